//! Exact misclassification probability of a majority vote.
//!
//! A vote over `n` conditionally independent features errs when fewer than
//! `n/2` features equal the label, and with probability 1/2 on an exact tie:
//! the count of correct features does not depend on the label, and the
//! fixed default label is wrong for exactly one of the two equally likely
//! labels.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::tail::pmf::{binom_pmf_vec, CompensatedSum};

/// Largest number of heterogeneous features handled by the quadratic
/// Poisson-binomial recursion.
pub const HETERO_CAPACITY: usize = 5000;

/// Feature counts of a vote: `k` relevant, `l` misleading, the remaining
/// `n - k - l` irrelevant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Composition {
    pub n: u64,
    pub k: u64,
    pub l: u64,
}

impl Composition {
    pub fn new(n: u64, k: u64, l: u64) -> Result<Self> {
        let c = Self { n, k, l };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k + self.l > self.n {
            return Err(domain(format!("k + l = {} exceeds n = {}", self.k + self.l, self.n)));
        }
        Ok(())
    }

    pub fn irrelevant(&self) -> u64 {
        self.n - self.k - self.l
    }
}

pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 0.5) {
        return Err(domain(format!("gamma = {gamma} must lie in (0, 1/2)")));
    }
    Ok(())
}

fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (o, &y) in out[i..].iter_mut().zip(b) {
            *o += x * y;
        }
    }
    out
}

/// Error of a vote over `n` features whose correct-count is `S + L`, with
/// `S ~ partial` (a pmf) and `L ~ Bin(big_n, big_p)` independent.
fn error_with_binomial(partial: &[f64], big_n: u64, big_p: f64, n: u64) -> f64 {
    if n == 0 {
        // empty vote: default label, wrong half the time
        return 0.5;
    }
    let pmf_big = binom_pmf_vec(big_n, big_p);
    let mut cdf_big = Vec::with_capacity(pmf_big.len());
    let mut acc = CompensatedSum::default();
    for &p in &pmf_big {
        acc.add(p);
        cdf_big.push(acc.value().min(1.0));
    }
    // correct count c errs outright when 2c < n, i.e. c <= (n - 1) / 2
    let mut less = CompensatedSum::default();
    let mut tie = CompensatedSum::default();
    let strict_max = (n - 1) / 2;
    for (s, &ps) in partial.iter().enumerate() {
        if ps == 0.0 {
            continue;
        }
        let s = s as u64;
        if s <= strict_max {
            let j = (strict_max - s).min(big_n) as usize;
            less.add(ps * cdf_big[j]);
        }
        if n % 2 == 0 && s <= n / 2 {
            let j = n / 2 - s;
            if j <= big_n {
                tie.add(ps * pmf_big[j as usize]);
            }
        }
    }
    (less.value() + 0.5 * tie.value()).clamp(0.0, 1.0)
}

/// Exact error of a vote with composition `comp` when relevant features
/// agree with the label w.p. `1/2 + gamma`, misleading ones w.p.
/// `1/2 - gamma` and irrelevant ones w.p. `1/2`.
pub fn exact_error(comp: Composition, gamma: f64) -> Result<f64> {
    comp.validate()?;
    check_gamma(gamma)?;
    if comp.n == 0 {
        return Err(domain("exact_error needs n >= 1"));
    }
    let mut groups = [(comp.k, 0.5 + gamma), (comp.l, 0.5 - gamma), (comp.irrelevant(), 0.5)];
    groups.sort_by_key(|g| g.0);
    let partial = convolve(&binom_pmf_vec(groups[0].0, groups[0].1), &binom_pmf_vec(groups[1].0, groups[1].1));
    Ok(error_with_binomial(&partial, groups[2].0, groups[2].1, comp.n))
}

/// Distribution of the number of successes among independent trials with
/// the given probabilities.
pub fn poisson_binomial_pmf(probs: &[f64]) -> Vec<f64> {
    let mut pmf = vec![0.0; probs.len() + 1];
    pmf[0] = 1.0;
    for (i, &p) in probs.iter().enumerate() {
        let q = 1.0 - p;
        for j in (1..=i + 1).rev() {
            pmf[j] = pmf[j] * q + pmf[j - 1] * p;
        }
        pmf[0] *= q;
    }
    pmf
}

fn check_probs(probs: &[f64]) -> Result<()> {
    if let Some(p) = probs.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
        return Err(domain(format!("agreement probability {p} must lie in (0, 1)")));
    }
    if probs.len() > HETERO_CAPACITY {
        return Err(Error::Capacity(format!(
            "{} heterogeneous features exceed the exact limit of {HETERO_CAPACITY}",
            probs.len()
        )));
    }
    Ok(())
}

/// Exact error of a vote whose features agree with the label with the
/// given per-feature probabilities.
pub fn exact_error_hetero(probs: &[f64]) -> Result<f64> {
    if probs.is_empty() {
        return Err(domain("exact_error_hetero needs at least one feature"));
    }
    exact_error_mixed(probs, 0)
}

/// As [`exact_error_hetero`] with `irrelevant` extra features of
/// agreement probability exactly 1/2, which are not counted against
/// [`HETERO_CAPACITY`].
pub fn exact_error_mixed(probs: &[f64], irrelevant: u64) -> Result<f64> {
    check_probs(probs)?;
    let n = probs.len() as u64 + irrelevant;
    if n == 0 {
        return Err(domain("a vote needs at least one feature"));
    }
    let partial = poisson_binomial_pmf(probs);
    Ok(error_with_binomial(&partial, irrelevant, 0.5, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let c = Composition::new(3, 3, 0).unwrap();
        assert!((exact_error(c, 0.1).unwrap() - 0.352).abs() < 1e-15);
        for g in [0.05, 0.1, 0.3, 0.45] {
            assert!((exact_error(Composition::new(2, 1, 1).unwrap(), g).unwrap() - 0.5).abs() < 1e-15);
        }
        assert!((exact_error(Composition::new(1, 0, 0).unwrap(), 0.2).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn hetero_examples() {
        assert!((exact_error_hetero(&[0.6, 0.6, 0.6]).unwrap() - 0.352).abs() < 1e-15);
        assert!((exact_error_hetero(&[0.6, 0.4]).unwrap() - 0.5).abs() < 1e-15);
        assert!((exact_error_hetero(&[0.9]).unwrap() - 0.1).abs() < 1e-15);
        assert!(exact_error_hetero(&[]).is_err());
        assert!(exact_error_hetero(&[0.5, 1.0]).is_err());
        assert!(matches!(exact_error_hetero(&vec![0.6; HETERO_CAPACITY + 1]), Err(Error::Capacity(_))));
    }

    #[test]
    fn mixed_matches_grouped() {
        let mixed = exact_error_mixed(&[0.6; 40], 300).unwrap();
        let grouped = exact_error(Composition::new(340, 40, 0).unwrap(), 0.1).unwrap();
        assert!((mixed - grouped).abs() < 1e-13);
    }

    #[test]
    fn parameter_errors() {
        assert!(Composition::new(3, 2, 2).is_err());
        assert!(exact_error(Composition { n: 3, k: 3, l: 0 }, 0.5).is_err());
        assert!(exact_error(Composition { n: 3, k: 3, l: 0 }, 0.0).is_err());
        assert!(exact_error(Composition { n: 0, k: 0, l: 0 }, 0.1).is_err());
    }

    #[test]
    fn balanced_votes_are_coin_flips() {
        for (n, k) in [(10, 3), (11, 5), (1000, 400), (100_000, 1000)] {
            let e = exact_error(Composition::new(n, k, k).unwrap(), 0.25).unwrap();
            assert!((e - 0.5).abs() < 1e-12, "n={n} k={k} e={e}");
        }
    }
}
