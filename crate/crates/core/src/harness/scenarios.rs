//! The five simulation scenarios.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::graph_model::{BlockMatrix, CommunityProbs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScenarioKind {
    Star,
    Banded,
    DiagDominant,
    SparseTwoBlock,
    GrowingK,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 5] = [
        ScenarioKind::Star,
        ScenarioKind::Banded,
        ScenarioKind::DiagDominant,
        ScenarioKind::SparseTwoBlock,
        ScenarioKind::GrowingK,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Star => "star",
            ScenarioKind::Banded => "banded",
            ScenarioKind::DiagDominant => "diag_dominant",
            ScenarioKind::SparseTwoBlock => "sparse_two_block",
            ScenarioKind::GrowingK => "growing_k",
        }
    }

    /// Stable small integer mixed into replicate seeds.
    pub fn id(self) -> u64 {
        self as u64
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name() == key)
            .ok_or_else(|| Error::InvalidInput(format!("unknown scenario '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KRule {
    Fixed(usize),
    /// `floor(ln n)`, capped at `n / 10` and floored at 2.
    LogN,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaRule {
    One,
    /// `(ln n / n)^{1/4}`.
    QuarterRate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub k_rule: KRule,
    pub gamma_rule: GammaRule,
    pub directed: bool,
}

/// Hub pattern: row and column 1 carry `0.90 - 0.01 (index - 1)`, the rest
/// is 0.85.
fn star_block(k: usize) -> Vec<Vec<f64>> {
    (0..k)
        .map(|a| {
            (0..k)
                .map(|b| match (a, b) {
                    (0, l) | (l, 0) => (90 - l) as f64 / 100.0,
                    _ => 0.85,
                })
                .collect()
        })
        .collect()
}

fn banded_block(k: usize) -> Vec<Vec<f64>> {
    (0..k)
        .map(|a| {
            (0..k)
                .map(|b| {
                    let d = a.abs_diff(b);
                    // Tenths as integers so entries are the nearest doubles
                    // to their decimal values.
                    if d <= 1 {
                        0.5
                    } else {
                        (5 - (d as i64 - 1)) as f64 / 10.0
                    }
                })
                .collect()
        })
        .collect()
}

fn two_level_block(k: usize, within: f64, across: f64) -> Vec<Vec<f64>> {
    (0..k)
        .map(|a| (0..k).map(|b| if a == b { within } else { across }).collect())
        .collect()
}

impl ScenarioSpec {
    pub fn new(kind: ScenarioKind, directed: bool) -> Self {
        let (k_rule, gamma_rule) = match kind {
            ScenarioKind::Star | ScenarioKind::Banded | ScenarioKind::DiagDominant => (KRule::Fixed(5), GammaRule::One),
            ScenarioKind::SparseTwoBlock => (KRule::Fixed(2), GammaRule::QuarterRate),
            ScenarioKind::GrowingK => (KRule::LogN, GammaRule::One),
        };
        Self {
            kind,
            k_rule,
            gamma_rule,
            directed,
        }
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn with_directed(self, directed: bool) -> Self {
        Self { directed, ..self }
    }

    pub fn k(&self, n: usize) -> usize {
        match self.k_rule {
            KRule::Fixed(k) => k,
            KRule::LogN => ((n as f64).ln().floor() as usize).min(n / 10).max(2),
        }
    }

    pub fn gamma(&self, n: usize) -> f64 {
        match self.gamma_rule {
            GammaRule::One => 1.0,
            GammaRule::QuarterRate => {
                let n = n as f64;
                (n.ln() / n).powf(0.25)
            }
        }
    }

    /// Unscaled `K x K` pattern.
    pub fn base_block(&self, k: usize) -> Vec<Vec<f64>> {
        match self.kind {
            ScenarioKind::Star | ScenarioKind::GrowingK => star_block(k),
            ScenarioKind::Banded => banded_block(k),
            ScenarioKind::DiagDominant => two_level_block(k, 0.9, 0.6),
            ScenarioKind::SparseTwoBlock => two_level_block(k, 0.1, 0.3),
        }
    }

    /// Block matrix at size `n`, with its sparsity factor.
    pub fn block(&self, n: usize) -> Result<BlockMatrix> {
        let block = BlockMatrix::new(&self.base_block(self.k(n)), self.gamma(n))?;
        if !block.has_distinct_rows() {
            return invalid(format!("scenario {} has repeated block rows at n = {n}", self.name()));
        }
        Ok(block)
    }

    pub fn rho(&self, n: usize) -> Result<CommunityProbs> {
        CommunityProbs::uniform(self.k(n))
    }
}

/// All five scenarios, directed.
pub fn scenario_registry() -> Vec<ScenarioSpec> {
    ScenarioKind::ALL
        .into_iter()
        .map(|k| ScenarioSpec::new(k, true))
        .collect()
}
