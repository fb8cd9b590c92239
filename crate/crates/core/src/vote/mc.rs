use rayon::prelude::*;
use serde::Serialize;

use super::model::VoteModel;
use crate::error::{domain, Error, Result};
use crate::source::{Sampler, SourceSpec};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub standard_error: f64,
    pub trials: u64,
}

const CHUNK: u64 = 4096;

/// Fraction of `trials` fresh examples from `spec` that `model` misclassifies.
///
/// Test example `t` is example `t` of the seeded source, so the estimate
/// does not depend on how trials are split between workers.
pub fn mc_error(model: &VoteModel, spec: &SourceSpec, trials: u64, seed: u64) -> Result<McEstimate> {
    if trials < 1 {
        return Err(domain("mc_error needs at least one trial"));
    }
    if let Some(max) = model.max_var() {
        if max >= spec.n_vars {
            return Err(Error::Input(format!("model variable {max} outside a source of {} variables", spec.n_vars)));
        }
    }
    let sampler = Sampler::new(spec, seed);
    let vars = model.variables();
    let chunks = trials.div_ceil(CHUNK);
    let errors: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut values = Vec::with_capacity(vars.len());
            let mut wrong = 0u64;
            for t in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                let label = sampler.draw_vars(t, &vars, &mut values);
                let ones = model.features().iter().zip(&values).filter(|(f, &x)| f.vote(x)).count();
                if model.decide(ones) != label {
                    wrong += 1;
                }
            }
            wrong
        })
        .sum();
    let estimate = errors as f64 / trials as f64;
    let standard_error = (estimate * (1.0 - estimate) / trials as f64).sqrt();
    Ok(McEstimate { estimate, standard_error, trials })
}
