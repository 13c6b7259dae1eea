//! Per-(scenario, direction, n, method) summaries.

use std::collections::BTreeMap;

use super::config::Method;
use super::monte_carlo::RunRecord;
use super::scenarios::ScenarioKind;

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub scenario: ScenarioKind,
    pub directed: bool,
    pub n: usize,
    pub method: Method,
    /// Successful records.
    pub count: usize,
    pub errors: usize,
    /// NaN when every record in the group failed.
    pub mean_ari: f64,
    /// Sample standard deviation, 0 for a single record.
    pub sd_ari: f64,
    pub exact_rate: f64,
    pub mean_elapsed_ms: f64,
}

/// Groups records and summarizes ARI over successful replicates. Output is
/// sorted by group key, so input order does not matter.
pub fn aggregate(records: &[RunRecord]) -> Vec<AggregateRow> {
    type Key = (ScenarioKind, bool, usize, Method);
    let mut groups: BTreeMap<Key, Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.scenario, !r.directed, r.n, r.method))
            .or_default()
            .push(r);
    }
    groups
        .into_iter()
        .map(|((scenario, undirected, n, method), mut group)| {
            group.sort_by_key(|r| r.replicate);
            let scores: Vec<_> = group.iter().filter_map(|r| r.score()).collect();
            let count = scores.len();
            let mean = |xs: &mut dyn Iterator<Item = f64>| {
                let (s, c) = xs.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
                if c == 0 {
                    f64::NAN
                } else {
                    s / c as f64
                }
            };
            let mean_ari = mean(&mut scores.iter().map(|s| s.ari));
            let sd_ari = if count < 2 {
                if count == 1 {
                    0.0
                } else {
                    f64::NAN
                }
            } else {
                // Shifted sums: identical values give exactly zero.
                let x0 = scores[0].ari;
                let (s1, s2) = scores
                    .iter()
                    .map(|s| s.ari - x0)
                    .fold((0.0, 0.0), |(a, b), d| (a + d, b + d * d));
                let ss = (s2 - s1 * s1 / count as f64).max(0.0);
                (ss / (count - 1) as f64).sqrt()
            };
            AggregateRow {
                scenario,
                directed: !undirected,
                n,
                method,
                count,
                errors: group.len() - count,
                mean_ari,
                sd_ari,
                exact_rate: mean(&mut scores.iter().map(|s| if s.exact { 1.0 } else { 0.0 })),
                mean_elapsed_ms: mean(&mut group.iter().map(|r| r.elapsed_ms as f64)),
            }
        })
        .collect()
}
