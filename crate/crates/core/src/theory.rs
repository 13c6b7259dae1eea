//! Closed-form probability floors, error bounds, separation quantities and
//! finite-n checks of the model assumptions.

use crate::error::{invalid, Result};
use crate::estimator::gram;
use crate::graph_model::{AdjacencyMatrix, BlockMatrix, CommunityProbs, LabelVector};

fn clamp01(x: f64) -> f64 {
    if x.is_nan() {
        0.0
    } else {
        x.clamp(0.0, 1.0)
    }
}

fn rate(n: usize) -> f64 {
    let n = n as f64;
    (n.ln() / n).sqrt()
}

/// Tolerances and constants that parameterize the estimation bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonSet {
    pub eps_pi: f64,
    pub eps_ap: f64,
    pub eps_m: f64,
    pub c_pi: f64,
    pub c_rho: f64,
    pub c_ap: f64,
    pub c_m: f64,
    pub c_h: f64,
    pub c1: f64,
    pub c2: f64,
}

impl EpsilonSet {
    pub const DEFAULT_C_M: f64 = 3.0;
    pub const DEFAULT_C_AP: f64 = 6.0;

    /// Rate-scaled tolerances `eps = C sqrt(log n / n)` with `C_m = 3`,
    /// `C_AP = 6` and bandwidth constant `c_h`.
    ///
    /// `eps_pi` is `rho_min - h` when that is positive and `rho_min / 2`
    /// otherwise. `C_rho` is set to `rho_min / sqrt(log n / n)`, the largest
    /// value for which the first part of the first assumption holds.
    pub fn rate_defaults(n: usize, rho_min: f64, c_h: f64) -> Result<Self> {
        if n < 3 {
            return invalid(format!("need n >= 3, got {n}"));
        }
        if !(rho_min > 0.0 && rho_min <= 1.0) {
            return invalid(format!("rho_min must lie in (0, 1], got {rho_min}"));
        }
        if !(c_h > 0.0 && c_h.is_finite()) {
            return invalid(format!("bandwidth constant must be positive, got {c_h}"));
        }
        let r = rate(n);
        let h = c_h * r;
        let eps_pi = if rho_min - h > 0.0 { rho_min - h } else { rho_min / 2.0 };
        let c_m = Self::DEFAULT_C_M;
        let c_ap = Self::DEFAULT_C_AP;
        Ok(Self {
            eps_pi,
            eps_ap: c_ap * r,
            eps_m: c_m * r,
            c_pi: eps_pi / r,
            c_rho: rho_min / r,
            c_ap,
            c_m,
            c_h,
            c1: 1.0 / c_h + c_m + 2.0 + 16.0 * c_ap,
            c2: 1.0,
        })
    }
}

/// Floor on the probability that every node's same-community fraction is
/// within `eps_pi` of its community proportion.
pub fn prob_pi(n: usize, k: usize, eps_pi: f64) -> Result<f64> {
    if n < 3 {
        return invalid(format!("need n >= 3, got {n}"));
    }
    if !(eps_pi > 0.0) {
        return invalid(format!("eps_pi must be positive, got {eps_pi}"));
    }
    if eps_pi.is_infinite() {
        return Ok(1.0);
    }
    let n = n as f64;
    let exponent = 0.25 * n * eps_pi * eps_pi / (1.0 + eps_pi);
    Ok(clamp01(1.0 - 2.0 * k as f64 * (-exponent).exp()))
}

/// Floor on the probability that `AA^T / n` is entrywise within `eps_ap` of
/// `PP^T / n`.
pub fn prob_ap(n: usize, eps_ap: f64) -> Result<f64> {
    if n == 0 {
        return invalid("need n >= 1");
    }
    let nf = n as f64;
    if !(eps_ap > 4.0 / nf) {
        return invalid(format!("eps_ap = {eps_ap} must exceed 4/n = {}", 4.0 / nf));
    }
    if eps_ap.is_infinite() {
        return Ok(1.0);
    }
    let shifted = eps_ap - 4.0 / nf;
    let exponent = 0.25 * nf * shifted * shifted / (1.0 + eps_ap);
    Ok(clamp01(1.0 - 2.0 * nf * nf * (-exponent).exp()))
}

/// Floor on the probability that all pairwise centered cross terms stay
/// below `eps_m`.
pub fn prob_cross(n: usize, eps_m: f64) -> Result<f64> {
    if n < 4 {
        return invalid(format!("need n >= 4, got {n}"));
    }
    if !(eps_m > 0.0) {
        return invalid(format!("eps_m must be positive, got {eps_m}"));
    }
    if eps_m.is_infinite() {
        return Ok(1.0);
    }
    let nf = n as f64;
    let exponent = 0.25 * nf * eps_m * eps_m / (1.0 + eps_m);
    Ok(clamp01(1.0 - nf * (nf - 1.0) * (-exponent).exp()))
}

/// Which form of the per-row error bound to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// `1/|N| + eps_m + 2/n + 8 eps_ap`.
    Main,
    /// `2/|N| + eps_m + 2/n + 16 eps_ap`.
    Appendix,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBound {
    /// Bound on `max_i (1/n) ||P~_i. - P_i.||^2`.
    pub error_bound: f64,
    /// Union-bound floor on the probability that the bound holds.
    pub probability_floor: f64,
}

/// Error bound and its probability floor for a graph on `n` nodes with `k`
/// communities whose smallest neighborhood has `min_neighborhood` members.
pub fn theorem1_bound(
    n: usize,
    k: usize,
    min_neighborhood: usize,
    eps: &EpsilonSet,
    variant: Variant,
) -> Result<ErrorBound> {
    if min_neighborhood == 0 {
        return invalid("neighborhood size must be at least 1");
    }
    let nf = n as f64;
    let inv = 1.0 / min_neighborhood as f64;
    let error_bound = match variant {
        Variant::Main => inv + eps.eps_m + 2.0 / nf + 8.0 * eps.eps_ap,
        Variant::Appendix => 2.0 * inv + eps.eps_m + 2.0 / nf + 16.0 * eps.eps_ap,
    };
    let total = prob_pi(n, k, eps.eps_pi)? + prob_ap(n, eps.eps_ap)? + prob_cross(n, eps.eps_m)? - 2.0;
    Ok(ErrorBound {
        error_bound,
        probability_floor: clamp01(total),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorollaryBounds {
    /// `C_1^{1/2} (n log n)^{1/4}`, threshold for the (2,inf) error.
    pub two_inf: f64,
    /// `two_inf * sqrt(n)`, threshold for the Frobenius error.
    pub frobenius: f64,
}

pub fn corollary_bounds(n: usize, c1: f64) -> Result<CorollaryBounds> {
    if n < 2 {
        return invalid(format!("need n >= 2, got {n}"));
    }
    if !(c1 > 0.0) {
        return invalid(format!("C_1 must be positive, got {c1}"));
    }
    let nf = n as f64;
    let two_inf = c1.sqrt() * (nf * nf.ln()).powf(0.25);
    Ok(CorollaryBounds {
        two_inf,
        frobenius: two_inf * nf.sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationQuantities {
    pub d_b_star: f64,
    /// `gamma sqrt(E_min) d_B*`.
    pub d_p_star_lower: f64,
    /// `gamma sqrt(rho_min / 2) d_B*`.
    pub s_n: f64,
    pub l_n: f64,
    /// `n rho_min / 2`.
    pub e_min: f64,
    /// `S_n sqrt(n) / 2`.
    pub r: f64,
}

pub fn separation(gamma: f64, rho_min: f64, d_b_star: f64, n: usize) -> Result<SeparationQuantities> {
    for (name, v) in [("gamma", gamma), ("rho_min", rho_min), ("d_B*", d_b_star)] {
        if !(v >= 0.0 && v.is_finite()) {
            return invalid(format!("{name} must be nonnegative and finite, got {v}"));
        }
    }
    if n == 0 {
        return invalid("need n >= 1");
    }
    let nf = n as f64;
    let half = rho_min / 2.0;
    let e_min = nf * half;
    let s_n = gamma * half.sqrt() * d_b_star;
    let l_n = 2.0 * (-(0.5 * half * half * nf) / (1.0 + half / 3.0)).exp();
    Ok(SeparationQuantities {
        d_b_star,
        d_p_star_lower: gamma * e_min.sqrt() * d_b_star,
        s_n,
        l_n,
        e_min,
        r: s_n * nf.sqrt() / 2.0,
    })
}

/// `1 - C(K,2) K L_n`, the floor on the probability that all distinct rows
/// of `P` are separated by `d_P*` lower bound.
pub fn row_separation_floor(k: usize, l_n: f64) -> f64 {
    let k = k as f64;
    clamp01(1.0 - k * (k - 1.0) / 2.0 * k * l_n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionCheck {
    pub passed: bool,
    /// Left-hand side minus right-hand side; negative means violated.
    pub slack: f64,
    pub lhs: f64,
    pub rhs: f64,
}

impl AssumptionCheck {
    fn new(lhs: f64, rhs: f64) -> Self {
        let slack = lhs - rhs;
        // Constants derived from the data can make the two sides equal up
        // to rounding.
        let tol = 1e-12 * lhs.abs().max(rhs.abs());
        Self {
            passed: slack >= -tol,
            slack,
            lhs,
            rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport {
    pub n: usize,
    /// `rho_min >= C_rho sqrt(log n / n)`.
    pub a1_density: AssumptionCheck,
    /// `rho_min > eps_pi >= C_pi sqrt(log n / n)` with a positive exponent
    /// margin in the community-proportion floor and `K n^{-C_pi^2/4} < 1`.
    pub a1_eps_pi: AssumptionCheck,
    /// `n rho_min^2 / (8 (1 + rho_min/6)) - log(K^2 (K-1)) > 0`.
    pub a2: AssumptionCheck,
    /// `gamma d_B* rho_min >= 8 C_1^2 (log n / n)^{1/4}`.
    pub a3: AssumptionCheck,
}

impl AssumptionReport {
    pub fn all_passed(&self) -> bool {
        self.assumption1() && self.a2.passed && self.a3.passed
    }

    pub fn assumption1(&self) -> bool {
        self.a1_density.passed && self.a1_eps_pi.passed
    }
}

/// Evaluates the three assumptions at a single `n`.
pub fn check_assumptions(
    n: usize,
    k: usize,
    rho: &CommunityProbs,
    gamma: f64,
    d_b_star: f64,
    eps: &EpsilonSet,
) -> Result<AssumptionReport> {
    if n < 3 {
        return invalid(format!("need n >= 3, got {n}"));
    }
    if rho.k() != k {
        return invalid(format!("rho has {} entries but K = {k}", rho.k()));
    }
    let nf = n as f64;
    let kf = k as f64;
    let r = rate(n);
    let rho_min = rho.rho_min();

    let a1_density = AssumptionCheck::new(rho_min, eps.c_rho * r);

    // Several conditions folded into one check; the slack is the smallest
    // of their margins. `eps_pi >= C_pi rate` holds with equality under the
    // default constants, so allow rounding there.
    let e = eps.eps_pi;
    let margins = [
        rho_min - e,
        e - eps.c_pi * r + 1e-12 * e,
        0.25 * nf * e * e / (1.0 + e) - (2.0 * kf).ln(),
        1.0 - kf * nf.powf(-eps.c_pi * eps.c_pi / 4.0),
        eps.c_rho - eps.c_pi,
    ];
    let slack = margins.iter().copied().fold(f64::INFINITY, f64::min);
    let a1_eps_pi = AssumptionCheck {
        passed: margins[1] >= 0.0 && [margins[0], margins[2], margins[3], margins[4]].iter().all(|&m| m > 0.0),
        slack,
        lhs: slack,
        rhs: 0.0,
    };

    let a2_lhs = nf * rho_min * rho_min / (8.0 * (1.0 + rho_min / 6.0));
    let a2_rhs = if k >= 2 { (kf * kf * (kf - 1.0)).ln() } else { f64::NEG_INFINITY };
    let mut a2 = AssumptionCheck::new(a2_lhs, a2_rhs);
    a2.passed = a2.slack > 0.0;

    let a3 = AssumptionCheck::new(
        gamma * d_b_star * rho_min,
        8.0 * eps.c1 * eps.c1 * (nf.ln() / nf).powf(0.25),
    );

    Ok(AssumptionReport {
        n,
        a1_density,
        a1_eps_pi,
        a2,
        a3,
    })
}

/// Trend proxy for an asymptotic condition: true when `values` is
/// nondecreasing and its last entry is positive.
pub fn growing_trend(values: &[f64]) -> bool {
    !values.is_empty()
        && values.windows(2).all(|w| w[1] >= w[0])
        && values.last().is_some_and(|&v| v > 0.0)
}

/// `max_i |#{i' != i : pi(i') = pi(i)} / (n-1) - rho_{pi(i)}|`.
pub fn proportion_max_deviation(labels: &LabelVector, rho: &CommunityProbs) -> Result<f64> {
    if labels.k() != rho.k() {
        return invalid("labels and rho disagree on K");
    }
    let n = labels.len();
    if n < 2 {
        return invalid("need at least two nodes");
    }
    let counts = labels.counts();
    Ok(counts
        .iter()
        .zip(rho.as_slice())
        .filter(|(&c, _)| c > 0)
        .map(|(&c, &p)| ((c - 1) as f64 / (n - 1) as f64 - p).abs())
        .fold(0.0, f64::max))
}

/// `max_{i,j} |(AA^T)_ij - (PP^T)_ij| / n` where `P` is block-constant
/// with the given labels. Uses exact counts for `AA^T`.
pub fn gram_max_deviation(a: &AdjacencyMatrix, labels: &LabelVector, block: &BlockMatrix) -> Result<f64> {
    let n = a.n();
    if labels.len() != n || labels.k() != block.k() {
        return invalid("graph, labels and block matrix disagree in size");
    }
    let k = block.k();
    let counts = labels.counts();
    // (PP^T)_ij depends only on the two communities.
    let mut ppt = vec![0.0; k * k];
    for x in 0..k {
        for y in 0..k {
            ppt[x * k + y] = (0..k)
                .map(|c| counts[c] as f64 * block.probability(x, c) * block.probability(y, c))
                .sum();
        }
    }
    let g = gram(a)?;
    let lab = labels.as_slice();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let row = g.count_row(i);
        let base = lab[i] * k;
        for (j, &c) in row.iter().enumerate() {
            worst = worst.max((c as f64 - ppt[base + lab[j]]).abs());
        }
    }
    Ok(worst / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prob_pi_examples() {
        assert_eq!(prob_pi(3, 1, 1.0).unwrap(), 0.0);
        assert_eq!(prob_pi(3, 1, f64::INFINITY).unwrap(), 1.0);
        assert!(prob_pi(500, 2, 0.3).unwrap() > prob_pi(500, 4, 0.3).unwrap());
        assert!(prob_pi(2, 1, 1.0).is_err());
        assert!(prob_pi(10, 1, 0.0).is_err());
    }

    #[test]
    fn prob_ap_vacuous_threshold() {
        assert!(prob_ap(100, 0.04).is_err());
        assert!(prob_ap(100, 0.0401).is_ok());
    }

    #[test]
    fn main_bound_arithmetic() {
        let eps = EpsilonSet {
            eps_pi: 0.1,
            eps_ap: 0.05,
            eps_m: 0.05,
            ..EpsilonSet::rate_defaults(400, 0.2, 1.0).unwrap()
        };
        let b = theorem1_bound(400, 5, 60, &eps, Variant::Main).unwrap();
        assert!((b.error_bound - 0.471_666_666_666_666_7).abs() < 1e-12);
        let app = theorem1_bound(400, 5, 60, &eps, Variant::Appendix).unwrap();
        assert!((app.error_bound - b.error_bound - 1.0 / 60.0 - 0.4).abs() < 1e-12);
        assert!(theorem1_bound(400, 5, 0, &eps, Variant::Main).is_err());
    }

    #[test]
    fn default_constants() {
        let eps = EpsilonSet::rate_defaults(1000, 0.2, 1.0).unwrap();
        assert_eq!(eps.c1, 102.0);
        let r = (1000f64.ln() / 1000.0).sqrt();
        assert!((eps.eps_ap - 6.0 * r).abs() < 1e-15);
        assert!((eps.eps_pi - (0.2 - r)).abs() < 1e-15);
    }

    #[test]
    fn separation_example() {
        let s = separation(1.0, 0.2, 0.424264, 600).unwrap();
        assert!((s.s_n - 0.134164).abs() < 1e-6);
        assert!((s.r - 1.6432).abs() < 1e-4);
        assert!((s.d_p_star_lower - s.s_n * 600f64.sqrt()).abs() < 1e-12);
        assert_eq!(separation(0.0, 0.2, 0.4, 600).unwrap().s_n, 0.0);
    }

    #[test]
    fn assumption3_slack_example() {
        let mut eps = EpsilonSet::rate_defaults(600, 0.2, 1.0).unwrap();
        eps.c1 = 0.1;
        let rho = CommunityProbs::uniform(5).unwrap();
        let rep = check_assumptions(600, 5, &rho, 1.0, 0.4243, &eps).unwrap();
        let expected = 0.4243 * 0.2 - 8.0 * 0.01 * (600f64.ln() / 600.0).powf(0.25);
        assert!((rep.a3.slack - expected).abs() < 1e-12);
        let rep0 = check_assumptions(600, 5, &rho, 0.0, 0.4243, &eps).unwrap();
        assert!(!rep0.a3.passed && rep0.a3.slack < 0.0);
    }

    #[test]
    fn trend_proxy() {
        assert!(growing_trend(&[-1.0, 0.0, 2.0]));
        assert!(!growing_trend(&[1.0, 0.5]));
        assert!(!growing_trend(&[-2.0, -1.0]));
    }
}
