//! Monte-Carlo driver: one replicate samples a graph and scores every
//! requested method against the planted labels.

use std::time::Instant;

use rayon::prelude::*;

use super::config::{Method, RunConfig};
use super::scenarios::{ScenarioKind, ScenarioSpec};
use crate::baselines::{dscore, kma, spectral, SpectralOptions};
use crate::clustering::kmp_pipeline;
use crate::error::{Error, Result};
use crate::estimator::default_bandwidth;
use crate::graph_model::{
    build_probability_matrix, sample_directed, sample_labels, sample_undirected, AdjacencyMatrix, LabelVector,
};
use crate::metrics::{ari, matched_count};
use crate::rng::{derive_seed, stream, streams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score {
    pub ari: f64,
    pub accuracy: f64,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub scenario: ScenarioKind,
    pub directed: bool,
    pub n: usize,
    pub method: Method,
    pub replicate: usize,
    pub seed: u64,
    /// `Err` carries the failure message of an error row.
    pub outcome: std::result::Result<Score, String>,
    pub elapsed_ms: u64,
}

impl RunRecord {
    pub fn score(&self) -> Option<&Score> {
        self.outcome.as_ref().ok()
    }

    pub fn is_error(&self) -> bool {
        self.outcome.is_err()
    }

    pub(crate) fn sort_key(&self) -> (ScenarioKind, bool, usize, Method, usize) {
        (self.scenario, !self.directed, self.n, self.method, self.replicate)
    }
}

/// Seed of one replicate. Directed and undirected ensembles get distinct
/// keys; methods never enter the key, so adding one leaves graphs intact.
pub fn replicate_seed(master: u64, scenario: ScenarioKind, directed: bool, n: usize, replicate: usize) -> u64 {
    derive_seed(&[master, scenario.id(), directed as u64, n as u64, replicate as u64])
}

/// Planted labels and the sampled graph of one replicate.
pub fn sample_replicate(spec: &ScenarioSpec, n: usize, seed: u64) -> Result<(LabelVector, AdjacencyMatrix)> {
    let block = spec.block(n)?;
    let rho = spec.rho(n)?;
    let labels = sample_labels(&rho, n, &mut stream(seed, streams::LABELS))?;
    let p = build_probability_matrix(&labels, &block)?;
    let mut rng = stream(seed, streams::EDGES);
    let a = if spec.directed {
        sample_directed(&p, &mut rng)
    } else {
        sample_undirected(&p, &mut rng)
    };
    Ok((labels, a))
}

pub fn score(truth: &LabelVector, pred: &LabelVector) -> Result<Score> {
    let k = truth.k().max(pred.k());
    let matched = matched_count(truth.as_slice(), pred.as_slice(), k)?;
    Ok(Score {
        ari: ari(truth.as_slice(), pred.as_slice())?,
        accuracy: matched as f64 / truth.len() as f64,
        exact: matched == truth.len() as u64,
    })
}

/// Runs one method on one graph.
pub fn run_method(
    method: Method,
    a: &AdjacencyMatrix,
    k: usize,
    config: &RunConfig,
    seed: u64,
) -> Result<LabelVector> {
    let mut rng = stream(seed, streams::METHOD_BASE + method.id());
    let spectral_opts = SpectralOptions {
        kmeans: config.kmeans,
        svd: config.svd,
    };
    match method {
        Method::Kma => kma(a, k, &config.kmeans, &mut rng),
        Method::Kmp => {
            let h = default_bandwidth(a.n(), config.h_constant);
            kmp_pipeline(a, k, Some(h), &config.kmeans, &mut rng)
        }
        Method::Spectral => spectral(a, k, &spectral_opts, &mut rng),
        Method::Dscore => dscore(a, k, &spectral_opts, &mut rng),
    }
}

fn run_replicate(spec: &ScenarioSpec, config: &RunConfig, n: usize, replicate: usize) -> Result<Vec<RunRecord>> {
    let seed = replicate_seed(config.master_seed, spec.kind, spec.directed, n, replicate);
    let (labels, a) = sample_replicate(spec, n, seed)?;
    let k = spec.k(n);
    let records = config
        .methods
        .iter()
        .map(|&method| {
            let start = Instant::now();
            let outcome = run_method(method, &a, k, config, seed)
                .and_then(|pred| score(&labels, &pred))
                .map_err(|e| e.to_string());
            let elapsed_ms = if config.record_timing {
                start.elapsed().as_millis() as u64
            } else {
                0
            };
            RunRecord {
                scenario: spec.kind,
                directed: spec.directed,
                n,
                method,
                replicate,
                seed,
                outcome,
                elapsed_ms,
            }
        })
        .collect();
    Ok(records)
}

/// All `(n, replicate, method)` records for one scenario, canonically
/// sorted. Method failures become error rows; invalid scenario or config
/// input fails the whole call.
pub fn run_monte_carlo(spec: &ScenarioSpec, config: &RunConfig) -> Result<Vec<RunRecord>> {
    config.validate()?;
    for &n in &config.n_grid {
        spec.block(n)?;
    }
    let tasks: Vec<(usize, usize)> = config
        .n_grid
        .iter()
        .flat_map(|&n| (0..config.mc).map(move |r| (n, r)))
        .collect();
    let work = || -> Result<Vec<RunRecord>> {
        let chunks: Vec<Vec<RunRecord>> = tasks
            .par_iter()
            .map(|&(n, r)| run_replicate(spec, config, n, r))
            .collect::<Result<_>>()?;
        Ok(chunks.into_iter().flatten().collect())
    };
    let mut records = if config.parallelism == 0 {
        work()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.parallelism)
            .build()
            .map_err(|e| Error::Internal(format!("cannot start worker pool: {e}")))?
            .install(work)?
    };
    sort_records(&mut records);
    Ok(records)
}

pub fn sort_records(records: &mut [RunRecord]) {
    records.sort_by_key(RunRecord::sort_key);
}
