//! Exact binomial tails and the tail inequalities they audit.

mod audit;
mod bounds;
pub mod pmf;

pub use audit::{audit_bound, AuditGrid, AuditPoint, AuditReport, EtaGrid, PointStatus};
pub use bounds::{
    berry_esseen_lower, chernoff_eta_le4_upper, chernoff_upper, eval_lower_bound, eval_upper_bound,
    fair_coin_lower, four_mean_upper, hoeffding_upper, slud_lower, BoundId, BoundParams, UpperBound,
};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::rational::{self, Rational};

/// Largest trial count accepted by the exact tail routines.
pub const MAX_TRIALS: u64 = 1_000_000;

/// Whether the event is `U >= t` or `U > t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strictness {
    AtLeast,
    Greater,
}

/// The event `U >= t` (or `U > t`) for `U ~ Bin(trials, success_prob)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailQuery {
    pub trials: u64,
    #[serde(with = "rational::as_str")]
    pub success_prob: Rational,
    pub threshold: u64,
    pub strictness: Strictness,
}

impl TailQuery {
    pub fn new(trials: u64, success_prob: Rational, threshold: u64, strictness: Strictness) -> Result<Self> {
        let q = Self { trials, success_prob, threshold, strictness };
        q.validate()?;
        Ok(q)
    }

    /// `U >= x` for a rational real threshold `x`, i.e. `U >= ceil(x)`.
    pub fn at_least_real(trials: u64, success_prob: Rational, x: Rational) -> Result<Self> {
        let t = rational::ceil_int(x).clamp(0, trials as i64 + 1) as u64;
        Self::new(trials, success_prob, t, Strictness::AtLeast)
    }

    /// `U > x` for a rational real threshold `x`, i.e. `U >= floor(x) + 1`.
    pub fn greater_real(trials: u64, success_prob: Rational, x: Rational) -> Result<Self> {
        let fl = rational::floor_int(x);
        if fl < 0 {
            Self::new(trials, success_prob, 0, Strictness::AtLeast)
        } else if fl as u64 >= trials {
            // U > trials is empty
            Self::new(trials, success_prob, trials + 1, Strictness::AtLeast)
        } else {
            Self::new(trials, success_prob, fl as u64, Strictness::Greater)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.success_prob <= Rational::zero() || self.success_prob >= Rational::one() {
            return Err(domain(format!(
                "success probability {} must lie in (0, 1)",
                rational::format_rational(&self.success_prob)
            )));
        }
        if self.trials == 0 || self.trials > MAX_TRIALS {
            return Err(domain(format!("trial count {} must lie in 1..={MAX_TRIALS}", self.trials)));
        }
        let limit = match self.strictness {
            Strictness::AtLeast => self.trials + 1,
            Strictness::Greater => self.trials,
        };
        if self.threshold > limit {
            return Err(domain(format!("threshold {} exceeds {limit}", self.threshold)));
        }
        Ok(())
    }

    /// Smallest count in the event.
    pub fn min_count(&self) -> u64 {
        match self.strictness {
            Strictness::AtLeast => self.threshold,
            Strictness::Greater => self.threshold + 1,
        }
    }

    fn probs(&self) -> (f64, f64) {
        let p = rational::to_f64(self.success_prob);
        let q = rational::to_f64(Rational::one() - self.success_prob);
        (p, q)
    }
}

/// `P(U >= t)` (or `P(U > t)`) for the query's binomial.
pub fn exact_upper_tail(q: &TailQuery) -> Result<f64> {
    q.validate()?;
    let (p, qq) = q.probs();
    Ok(pmf::binom_range_prob(q.trials, p, qq, q.min_count(), q.trials))
}

/// Probability of the complement of the query's event, summed over the
/// complementary range directly rather than as `1 - upper`.
pub fn exact_lower_complement(q: &TailQuery) -> Result<f64> {
    q.validate()?;
    let (p, qq) = q.probs();
    let t = q.min_count();
    if t == 0 {
        return Ok(0.0);
    }
    Ok(pmf::binom_range_prob(q.trials, p, qq, 0, t - 1))
}
