use std::io::Write;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{fmt_opt, with_pool};
use crate::error::{domain, Result};
use crate::learner::{rank_threshold, select_model, select_positive_model, EdgeTable};
use crate::rational::{self, Rational};
use crate::rng::sub_seed;
use crate::source::{draw_dataset, Dependence, SourceConfig, SourceSpec};
use crate::theory::{theorem2_bound, theorem3_bound};
use crate::vote::{
    composition_of, exact_error, exact_error_mixed, feature_agreement_probs, hetero_bound, mc_error, theorem1_bound,
    CompositionReport, VoteModel,
};

/// How test error is measured.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorMode {
    /// From the model's composition; falls back to Monte Carlo for
    /// dependent sources.
    #[default]
    Exact,
    Mc,
}

/// How training samples are produced.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// Draw the `m x N` sample and count agreements.
    #[default]
    Examples,
    /// Draw the agreement counts directly (same distribution, far cheaper).
    Counts,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub source: SourceConfig,
    pub m: u64,
    /// Thresholds, ascending.
    #[serde(with = "rational::seq_as_str")]
    pub betas: Vec<Rational>,
    #[serde(default = "one")]
    pub replicates: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub error_mode: ErrorMode,
    #[serde(default = "default_trials")]
    pub mc_trials: u64,
    #[serde(default)]
    pub sampling: Sampling,
    /// Use `V_beta` (un-negated variables only) instead of `M_beta`.
    #[serde(default)]
    pub positive_only: bool,
    /// Record the `n`-th largest variable edge for each model of size `n`.
    #[serde(default)]
    pub rank_edges: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

fn one() -> u32 {
    1
}

fn default_trials() -> u64 {
    100_000
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<SourceSpec> {
        let spec = self.source.build()?;
        spec.validate()?;
        if self.m == 0 {
            return Err(domain("m must be at least 1"));
        }
        if self.replicates == 0 {
            return Err(domain("replicates must be at least 1"));
        }
        if self.betas.is_empty() {
            return Err(domain("the beta grid is empty"));
        }
        if self.betas.windows(2).any(|w| w[0] >= w[1]) {
            return Err(domain("the beta grid must be strictly ascending"));
        }
        if self.betas[0] < Rational::zero() || *self.betas.last().expect("nonempty") > rational::half() {
            return Err(domain("betas must lie in [0, 1/2]"));
        }
        if self.error_mode == ErrorMode::Mc && self.mc_trials == 0 {
            return Err(domain("mc_trials must be at least 1"));
        }
        Ok(spec)
    }

    /// First 8 bytes of the SHA-256 of the JSON encoding, as hex.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(serde_json::to_vec(self).expect("config serializes"));
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// `start, start + step, ..., <= stop`.
pub fn beta_grid(start: Rational, stop: Rational, step: Rational) -> Result<Vec<Rational>> {
    if step <= Rational::zero() {
        return Err(domain("the grid step must be positive"));
    }
    let mut out = Vec::new();
    let mut b = start;
    while b <= stop {
        out.push(b);
        b += step;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentRecord {
    pub config_fingerprint: String,
    pub replicate: u32,
    #[serde(with = "rational::as_str")]
    pub beta: Rational,
    pub n: u64,
    pub k: u64,
    pub l: u64,
    pub irrelevant: u64,
    pub exclusivity: Option<f64>,
    pub error: f64,
    /// Standard error of a Monte Carlo estimate; `None` when exact.
    pub error_se: Option<f64>,
    pub t1_bound: Option<f64>,
    pub t2_bound: Option<f64>,
    pub t3_bound: Option<f64>,
    pub rank_edge: Option<String>,
}

impl ExperimentRecord {
    pub fn irrelevant_fraction(&self) -> Option<f64> {
        self.exclusivity.map(|x| 1.0 - x)
    }
}

pub const CSV_COLUMNS: [&str; 13] = [
    "replicate",
    "beta_num",
    "beta_den",
    "n",
    "k",
    "l",
    "irrelevant",
    "exclusivity",
    "error",
    "error_se",
    "t1_bound",
    "t2_bound",
    "t3_bound",
];

/// Training agreement counts for one replicate.
pub fn draw_table(spec: &SourceSpec, m: u64, seed: u64, sampling: Sampling) -> Result<EdgeTable> {
    match sampling {
        Sampling::Examples => Ok(EdgeTable::from_dataset(&draw_dataset(spec, m as usize, seed)?)),
        Sampling::Counts => EdgeTable::sample(spec, m, seed),
    }
}

/// Test error of `model` on `spec`, with a standard error when estimated.
///
/// The empty model predicts the default label and errs with probability
/// exactly 1/2.
pub fn model_error(
    model: &VoteModel,
    spec: &SourceSpec,
    report: &CompositionReport,
    mode: ErrorMode,
    trials: u64,
    seed: u64,
) -> Result<(f64, Option<f64>)> {
    let exact_possible = matches!(spec.dependence, Dependence::Independent | Dependence::BlockClique { r: 0 });
    if mode == ErrorMode::Exact && exact_possible {
        if model.is_empty() {
            return Ok((0.5, None));
        }
        let comp = report.composition;
        let err = match spec.common_edge() {
            Some(g) => exact_error(comp, rational::to_f64(g))?,
            None if spec.relevant.is_empty() => 0.5,
            None => {
                let probs: Vec<f64> = feature_agreement_probs(model, spec).into_iter().filter(|&p| p != 0.5).collect();
                exact_error_mixed(&probs, comp.irrelevant())?
            }
        };
        return Ok((err, None));
    }
    let mc = mc_error(model, spec, trials, seed)?;
    Ok((mc.estimate, Some(mc.standard_error)))
}

fn bounds(spec: &SourceSpec, report: &CompositionReport, m: u64, beta: Rational) -> [Option<f64>; 3] {
    let independent = matches!(spec.dependence, Dependence::Independent | Dependence::BlockClique { r: 0 });
    let comp = report.composition;
    if !independent || spec.relevant.is_empty() {
        return [None; 3];
    }
    let (n_vars, k_rel) = (spec.n_vars as u64, spec.n_relevant() as u64);
    match spec.common_edge() {
        Some(g) => {
            let gf = rational::to_f64(g);
            let t1 = (comp.n > 0).then(|| theorem1_bound(comp, gf).ok()).flatten();
            let t2 = (beta <= g).then(|| theorem2_bound(n_vars, k_rel, gf, m, rational::to_f64(beta)).ok()).flatten();
            let t3 = (beta < g)
                .then(|| theorem3_bound(n_vars, k_rel, gf, m, rational::to_f64(beta / g)).ok())
                .flatten()
                .filter(|t| t.applicable)
                .map(|t| t.bound);
            [t1, t2.map(|t| t.bound), t3]
        }
        None => {
            let (lo, hi) = spec.edge_range();
            let t1 = (comp.n > 0)
                .then(|| hetero_bound(comp.n, comp.k, comp.l, rational::to_f64(lo), rational::to_f64(hi)).ok())
                .flatten();
            [t1, None, None]
        }
    }
}

/// Run every replicate and threshold of `config`, ordered by
/// `(replicate, beta)`.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    let spec = config.validate()?;
    let fingerprint = config.fingerprint();
    with_pool(|| {
        let tables: Vec<EdgeTable> = (0..config.replicates)
            .into_par_iter()
            .map(|r| draw_table(&spec, config.m, sub_seed(sub_seed(config.seed, r as u64), 0), config.sampling))
            .collect::<Result<_>>()?;
        let jobs: Vec<(u32, usize)> =
            (0..config.replicates).flat_map(|r| (0..config.betas.len()).map(move |j| (r, j))).collect();
        jobs.into_par_iter()
            .map(|(r, j)| {
                let beta = config.betas[j];
                let table = &tables[r as usize];
                let model = if config.positive_only {
                    select_positive_model(table, beta)?
                } else {
                    select_model(table, beta)?
                };
                let report = composition_of(&model, &spec)?;
                let mc_seed = sub_seed(sub_seed(config.seed, r as u64), 1 + j as u64);
                let (error, error_se) = model_error(&model, &spec, &report, config.error_mode, config.mc_trials, mc_seed)?;
                let [t1_bound, t2_bound, t3_bound] = bounds(&spec, &report, config.m, beta);
                let size = model.variables().len();
                let rank_edge = (config.rank_edges && size > 0)
                    .then(|| rank_threshold(table, size).map(|e| rational::format_rational(&e)))
                    .transpose()?;
                let c = report.composition;
                Ok(ExperimentRecord {
                    config_fingerprint: fingerprint.clone(),
                    replicate: r,
                    beta,
                    n: c.n,
                    k: c.k,
                    l: c.l,
                    irrelevant: c.irrelevant(),
                    exclusivity: report.exclusivity,
                    error,
                    error_se,
                    t1_bound,
                    t2_bound,
                    t3_bound,
                    rank_edge,
                })
            })
            .collect()
    })?
}

/// Write records with the fixed [`CSV_COLUMNS`]; absent values are empty.
pub fn write_sweep_csv<W: Write>(records: &[ExperimentRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in records {
        w.write_record([
            r.replicate.to_string(),
            r.beta.numer().to_string(),
            r.beta.denom().to_string(),
            r.n.to_string(),
            r.k.to_string(),
            r.l.to_string(),
            r.irrelevant.to_string(),
            fmt_opt(r.exclusivity),
            r.error.to_string(),
            fmt_opt(r.error_se),
            fmt_opt(r.t1_bound),
            fmt_opt(r.t2_bound),
            fmt_opt(r.t3_bound),
        ])?;
    }
    w.flush()?;
    Ok(())
}
