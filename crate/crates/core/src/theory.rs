//! Learning bounds for the threshold vote, the lower-bound quantities for
//! exclusive learners, the parameter regime separating the two, and an
//! exact posterior for small instances.
//!
//! All bounds are evaluated in their finite form, with `1 + o(1)` factors
//! dropped.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{domain, precondition, Error, Result};
use crate::learner::EdgeTable;
use crate::source::Dataset;
use crate::vote::{exact_error, Composition};

/// Largest `N` and `m` accepted by the posterior enumeration.
pub const POSTERIOR_CAPACITY: usize = 12;

fn check_sizes(n: u64, k: u64) -> Result<()> {
    if k == 0 || k > n {
        return Err(domain(format!("need 1 <= K <= N, got K = {k}, N = {n}")));
    }
    Ok(())
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 0.5) {
        return Err(domain(format!("gamma = {gamma} must lie in (0, 1/2)")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem2Bound {
    /// `exp(-2 gamma^2 K [1 - 8e^{-2(gamma-beta)^2 m} - gamma]_+^2 / (1 + 8(N/K)e^{-2 beta^2 m} + gamma))`
    pub bound: f64,
    /// `bound + 4 delta` with `delta = e^{-gamma K / 6}`, the form before the
    /// failure probability of the relevant-count concentration is absorbed.
    pub with_delta: f64,
}

/// Error bound for `M_beta` on `N` variables, `K` of them relevant with
/// edge `gamma`, from `m` examples.
pub fn theorem2_bound(n: u64, k: u64, gamma: f64, m: u64, beta: f64) -> Result<Theorem2Bound> {
    check_sizes(n, k)?;
    check_gamma(gamma)?;
    if m == 0 {
        return Err(domain("m must be at least 1"));
    }
    if !(beta >= 0.0) {
        return Err(domain(format!("beta = {beta} must be nonnegative")));
    }
    if beta > gamma {
        return Err(precondition(format!("beta = {beta} exceeds gamma = {gamma}")));
    }
    let (kf, nf, mf) = (k as f64, n as f64, m as f64);
    let bracket = 1.0 - 8.0 * (-2.0 * (gamma - beta).powi(2) * mf).exp() - gamma;
    let bound = if bracket <= 0.0 {
        1.0
    } else {
        let den = 1.0 + 8.0 * (nf / kf) * (-2.0 * beta * beta * mf).exp() + gamma;
        (-2.0 * gamma * gamma * kf * bracket * bracket / den).exp().min(1.0)
    };
    let delta = (-gamma * kf / 6.0).exp();
    Ok(Theorem2Bound { bound, with_delta: (bound + 4.0 * delta).min(1.0) })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem3Bound {
    /// `exp(-gamma^2 K^2 / N)`
    pub bound: f64,
    /// `exp(-2 gamma^2 K^2 / N)`, the limit form for `m` growing faster
    /// than `1/gamma^2`.
    pub asymptotic: f64,
    /// `ln 32 / (2 (1 - c)^2 gamma^2)`
    pub m_threshold: f64,
    pub applicable: bool,
}

/// Bound for `M_beta` with `beta = c_frac * gamma` once
/// `m >= ln 32 / (2 (1-c)^2 gamma^2)`.
pub fn theorem3_bound(n: u64, k: u64, gamma: f64, m: u64, c_frac: f64) -> Result<Theorem3Bound> {
    check_sizes(n, k)?;
    check_gamma(gamma)?;
    if !(0.0..1.0).contains(&c_frac) {
        return Err(domain(format!("beta/gamma ratio {c_frac} must lie in [0, 1)")));
    }
    let e = gamma * gamma * (k as f64).powi(2) / n as f64;
    let m_threshold = 32f64.ln() / (2.0 * (1.0 - c_frac).powi(2) * gamma * gamma);
    Ok(Theorem3Bound { bound: (-e).exp(), asymptotic: (-2.0 * e).exp(), m_threshold, applicable: m as f64 >= m_threshold })
}

/// Exact error of the vote over the `K` relevant variables, and its bound
/// `e^{-2 gamma^2 K}`.
pub fn bayes_error_and_bound(k: u64, gamma: f64) -> Result<(f64, f64)> {
    if k == 0 {
        return Err(domain("K must be at least 1"));
    }
    let exact = exact_error(Composition::new(k, k, 0)?, gamma)?;
    Ok((exact, (-2.0 * gamma * gamma * k as f64).exp()))
}

/// `e^{-5 gamma^2 k} / 4`, a floor on the error of any classifier that
/// sees only `k` relevant variables.
pub fn relevant_floor(k: u64, gamma: f64) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(domain(format!("gamma = {gamma} must be nonnegative")));
    }
    if gamma > 0.2 {
        return Err(precondition(format!("the floor needs gamma <= 1/5, got {gamma}")));
    }
    Ok(0.25 * (-5.0 * gamma * gamma * k as f64).exp())
}

/// `(N - K) e^{-16 beta^2 m}`, a floor on the expected number of
/// irrelevant variables selected by `M_beta`.
pub fn expected_irrelevant_floor(n: u64, k: u64, beta: f64, m: u64) -> Result<f64> {
    if k > n {
        return Err(domain(format!("K = {k} exceeds N = {n}")));
    }
    if !(beta >= 0.0) {
        return Err(domain(format!("beta = {beta} must be nonnegative")));
    }
    if beta > 0.125 {
        return Err(precondition(format!("the floor needs beta <= 1/8, got {beta}")));
    }
    Ok((n - k) as f64 * (-16.0 * beta * beta * m as f64).exp())
}

/// Parameters of the regime where inclusive learners beat exclusive ones.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeParams {
    pub gamma: f64,
    pub k: u64,
    pub n: u64,
    pub m: u64,
    pub b: f64,
    pub beta_star: f64,
}

/// `K = ceil(gamma^-2 e^{ln(1/gamma)^{1/3}})`, `N = ceil(K e^{ln(1/gamma)^{1/4}})`,
/// `m` the odd integer nearest `2 ln 32 / gamma^2`, `b = 2 ln 32` and
/// `beta* = gamma ln(N/K) / (5b)`.
pub fn regime_params(gamma: f64) -> Result<RegimeParams> {
    check_gamma(gamma)?;
    let l = (1.0 / gamma).ln();
    let k = (l.cbrt().exp() / (gamma * gamma)).ceil() as u64;
    let n = (k as f64 * l.powf(0.25).exp()).ceil() as u64;
    let b = 2.0 * 32f64.ln();
    let m = 2 * ((b / (gamma * gamma) - 1.0) / 2.0).round() as u64 + 1;
    let beta_star = gamma * (n as f64 / k as f64).ln() / (5.0 * b);
    Ok(RegimeParams { gamma, k, n, m, b, beta_star })
}

/// Posterior probability that each variable is relevant, given agreement
/// counts from `m` examples, when a uniformly random `K`-subset of the
/// variables is relevant with edge `gamma` and positive polarity.
///
/// Enumerates every `K`-subset. Only the agreement counts enter the
/// likelihood, which factors as `prod_{i in R} (1+2 gamma)^{c_i} (1-2 gamma)^{m-c_i}`
/// up to a constant.
pub fn posterior_all(counts: &[u64], m: u64, k: usize, gamma: f64) -> Result<Vec<f64>> {
    let n = counts.len();
    if n > POSTERIOR_CAPACITY || m as usize > POSTERIOR_CAPACITY {
        return Err(Error::Capacity(format!(
            "exact posterior limited to N, m <= {POSTERIOR_CAPACITY}, got N = {n}, m = {m}"
        )));
    }
    check_sizes(n as u64, k as u64)?;
    if !(0.0..0.5).contains(&gamma) {
        return Err(domain(format!("gamma = {gamma} must lie in [0, 1/2)")));
    }
    if counts.iter().any(|&c| c > m) {
        return Err(domain("agreement count exceeds m"));
    }
    let (up, down) = ((2.0 * gamma).ln_1p(), (-2.0 * gamma).ln_1p());
    let log_w: Vec<f64> = counts.iter().map(|&c| c as f64 * up + (m - c) as f64 * down).collect();
    let subsets: Vec<(Vec<usize>, f64)> =
        (0..n).combinations(k).map(|s| { let lw = s.iter().map(|&i| log_w[i]).sum(); (s, lw) }).collect();
    let top = subsets.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    let mut mass = vec![0.0; n];
    let mut total = 0.0;
    for (s, lw) in &subsets {
        let w = (lw - top).exp();
        total += w;
        for &i in s {
            mass[i] += w;
        }
    }
    Ok(mass.into_iter().map(|w| w / total).collect())
}

/// Posterior probability that variable `var` of `data` is relevant.
pub fn posterior_relevance(data: &Dataset, k: usize, gamma: f64, var: usize) -> Result<f64> {
    if var >= data.n_vars() {
        return Err(Error::Input(format!("variable {var} out of range for N = {}", data.n_vars())));
    }
    if data.m() == 0 {
        return Err(domain("the sample is empty"));
    }
    let table = EdgeTable::from_dataset(data);
    Ok(posterior_all(table.counts(), table.m(), k, gamma)?[var])
}
