//! Majority-vote models: prediction, exact and Monte Carlo error, and the
//! closed-form error bounds.

mod bounds;
mod exact;
mod mc;
mod model;

pub use bounds::{dependence_bound, hetero_bound, theorem1_bound};
pub use exact::{
    exact_error, exact_error_hetero, exact_error_mixed, poisson_binomial_pmf, Composition, HETERO_CAPACITY,
};
pub use mc::{mc_error, McEstimate};
pub use model::{Feature, VoteModel};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::source::SourceSpec;

/// Composition of a model relative to a source.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CompositionReport {
    pub composition: Composition,
    /// Fraction of the model's variables that are relevant, sign-blind
    /// (misleading features count as relevant variables). `None` for the
    /// empty model.
    pub exclusivity: Option<f64>,
    /// `k / n`; `None` for the empty model.
    pub relevant_fraction: Option<f64>,
}

impl CompositionReport {
    /// Fraction of the model's features that are irrelevant.
    pub fn irrelevant_fraction(&self) -> Option<f64> {
        self.exclusivity.map(|x| 1.0 - x)
    }
}

pub fn composition_of(model: &VoteModel, spec: &SourceSpec) -> Result<CompositionReport> {
    if let Some(max) = model.max_var() {
        if max >= spec.n_vars {
            return Err(Error::Input(format!("model variable {max} outside a source of {} variables", spec.n_vars)));
        }
    }
    let (mut k, mut l) = (0u64, 0u64);
    for f in model.features() {
        if let Some(var) = spec.relevant_var(f.var) {
            if var.positive != f.negated {
                k += 1;
            } else {
                l += 1;
            }
        }
    }
    let n = model.len() as u64;
    let composition = Composition { n, k, l };
    let (exclusivity, relevant_fraction) =
        if n == 0 { (None, None) } else { (Some((k + l) as f64 / n as f64), Some(k as f64 / n as f64)) };
    Ok(CompositionReport { composition, exclusivity, relevant_fraction })
}

/// Per-feature agreement probabilities of `model`'s features under `spec`.
pub fn feature_agreement_probs(model: &VoteModel, spec: &SourceSpec) -> Vec<f64> {
    model
        .features()
        .iter()
        .map(|f| {
            let p = crate::rational::to_f64(spec.agreement_prob(f.var));
            if f.negated {
                1.0 - p
            } else {
                p
            }
        })
        .collect()
}
