use std::io::Write;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use super::sweep::{draw_table, model_error, ErrorMode, Sampling};
use super::with_pool;
use crate::error::{domain, Result};
use crate::learner::{rank_threshold, select_model, select_positive_model_real, EdgeTable};
use crate::rational::{self, Rational};
use crate::rng::sub_seed;
use crate::source::{make_spec, Dependence, Polarity, SourceSpec};
use crate::theory::{regime_params, RegimeParams};
use crate::vote::{composition_of, VoteModel};

/// Averages for one learner over the training replicates.
#[derive(Clone, Debug, Serialize)]
pub struct LearnerSummary {
    pub name: String,
    /// Mean fraction of the hypothesis' variables that are relevant, over
    /// replicates with a nonempty hypothesis.
    pub lambda_hat: Option<f64>,
    /// Fraction of replicates whose `n(S)`-th largest variable edge is at
    /// least `beta*`, with `n(S)` the hypothesis' variable count (empty
    /// hypotheses never count).
    pub q_hat: f64,
    pub mean_error: f64,
    pub error_se: f64,
    pub empty_models: u32,
    pub errors: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExclusivityReport {
    pub params: RegimeParams,
    pub replicates: u32,
    /// `M_{gamma/2}`.
    pub inclusive: LearnerSummary,
    /// `V_{beta*}`, the vote over variables with edge at least `beta*`.
    pub exclusive: LearnerSummary,
}

struct Outcome {
    exclusivity: Option<f64>,
    hits: bool,
    error: f64,
}

fn evaluate(model: &VoteModel, table: &EdgeTable, spec: &SourceSpec, beta_star: f64) -> Result<Outcome> {
    let report = composition_of(model, spec)?;
    let (error, _) = model_error(model, spec, &report, ErrorMode::Exact, 1, 0)?;
    let size = model.variables().len();
    let hits = size > 0 && rational::to_f64(rank_threshold(table, size)?) >= beta_star;
    Ok(Outcome { exclusivity: report.exclusivity, hits, error })
}

fn summarize(name: &str, outcomes: &[Outcome]) -> LearnerSummary {
    let r = outcomes.len() as f64;
    let lam: Vec<f64> = outcomes.iter().filter_map(|o| o.exclusivity).collect();
    let errors: Vec<f64> = outcomes.iter().map(|o| o.error).collect();
    let mean = errors.iter().sum::<f64>() / r;
    let var = if outcomes.len() > 1 { errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (r - 1.0) } else { 0.0 };
    LearnerSummary {
        name: name.to_string(),
        lambda_hat: (!lam.is_empty()).then(|| lam.iter().sum::<f64>() / lam.len() as f64),
        q_hat: outcomes.iter().filter(|o| o.hits).count() as f64 / r,
        mean_error: mean,
        error_se: (var / r).sqrt(),
        empty_models: (outcomes.len() - lam.len()) as u32,
        errors,
    }
}

/// For each `gamma`, compare the inclusive learner `M_{gamma/2}` with the
/// exclusive surrogate `V_{beta*}` over `replicates` training samples in
/// the regime of [`regime_params`] (all-positive relevant variables).
pub fn exclusivity_profile(gammas: &[Rational], replicates: u32, seed: u64) -> Result<Vec<ExclusivityReport>> {
    if replicates == 0 {
        return Err(domain("replicates must be at least 1"));
    }
    with_pool(|| {
        gammas
            .iter()
            .enumerate()
            .map(|(gi, &gamma)| {
                let params = regime_params(rational::to_f64(gamma))?;
                let spec =
                    make_spec(params.n as usize, params.k as usize, gamma, &Polarity::AllPositive, Dependence::Independent)?;
                let inclusive_beta = gamma * Ratio::new(1, 2);
                let gamma_seed = sub_seed(seed, gi as u64);
                let pairs: Vec<(Outcome, Outcome)> = (0..replicates)
                    .into_par_iter()
                    .map(|r| {
                        let table = draw_table(&spec, params.m, sub_seed(gamma_seed, r as u64), Sampling::Counts)?;
                        let inc = select_model(&table, inclusive_beta)?;
                        let exc = select_positive_model_real(&table, params.beta_star)?;
                        Ok((
                            evaluate(&inc, &table, &spec, params.beta_star)?,
                            evaluate(&exc, &table, &spec, params.beta_star)?,
                        ))
                    })
                    .collect::<Result<_>>()?;
                let (inc, exc): (Vec<Outcome>, Vec<Outcome>) = pairs.into_iter().unzip();
                Ok(ExclusivityReport {
                    params,
                    replicates,
                    inclusive: summarize("inclusive", &inc),
                    exclusive: summarize("exclusive", &exc),
                })
            })
            .collect()
    })?
}

/// One row per `(gamma, learner)`.
pub fn write_exclusivity_csv<W: Write>(reports: &[ExclusivityReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "gamma", "learner", "n_vars", "n_relevant", "m", "beta", "beta_star", "replicates", "lambda_hat", "q_hat",
        "mean_error", "error_se", "empty_models",
    ])?;
    for rep in reports {
        let p = &rep.params;
        for (s, beta) in [(&rep.inclusive, p.gamma / 2.0), (&rep.exclusive, p.beta_star)] {
            w.write_record([
                p.gamma.to_string(),
                s.name.clone(),
                p.n.to_string(),
                p.k.to_string(),
                p.m.to_string(),
                beta.to_string(),
                p.beta_star.to_string(),
                rep.replicates.to_string(),
                super::fmt_opt(s.lambda_hat),
                s.q_hat.to_string(),
                s.mean_error.to_string(),
                s.error_se.to_string(),
                s.empty_models.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
