use num_rational::Ratio;
use serde::Serialize;

use super::sweep::{beta_grid, run_sweep, ErrorMode, ExperimentConfig, ExperimentRecord, Sampling};
use crate::error::Result;
use crate::rational::{self, Rational};
use crate::source::{Dependence, Polarity, SourceConfig};

/// Models with an irrelevant fraction below this count as "few irrelevant".
pub const FEW_IRRELEVANT: f64 = 0.25;
/// "Far worse" means at least this multiple of the best error.
pub const FAR_WORSE_FACTOR: f64 = 2.0;

/// `N = 100000`, `K = 1000` (500 positive, 500 negative), `gamma = 1/10`,
/// `m = 100`, `beta = 0, 1/100, ..., 3/10`, one replicate, exact error.
pub fn fig2_config(seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        source: SourceConfig {
            n_vars: 100_000,
            n_relevant: 1000,
            gamma: Some(Ratio::new(1, 10)),
            gamma_min: None,
            gamma_max: None,
            edges: None,
            polarity: Polarity::HalfHalf,
            dependence: Dependence::Independent,
        },
        m: 100,
        betas: beta_grid(Ratio::new(0, 1), Ratio::new(3, 10), Ratio::new(1, 100)).expect("valid grid"),
        replicates: 1,
        seed,
        error_mode: ErrorMode::Exact,
        mc_trials: 1000,
        sampling: Sampling::Examples,
        positive_only: false,
        rank_edges: false,
        output: None,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Fig2Summary {
    pub seed: u64,
    #[serde(with = "rational::as_str")]
    pub best_beta: Rational,
    pub best_error: f64,
    pub best_irrelevant_fraction: Option<f64>,
    /// Lowest error among nonempty models with irrelevant fraction below
    /// [`FEW_IRRELEVANT`].
    pub min_error_few_irrelevant: Option<f64>,
    #[serde(with = "rational::as_str")]
    pub min_error_few_irrelevant_beta: Rational,
    pub far_worse: bool,
    pub records: Vec<ExperimentRecord>,
}

/// Run the canonical threshold sweep and summarize where the best model
/// sits.
pub fn repro_fig2(seed: u64) -> Result<Fig2Summary> {
    let records = run_sweep(&fig2_config(seed))?;
    // first minimum: the smallest beta attaining the lowest error
    let best = records.iter().fold(&records[0], |b, r| if r.error < b.error { r } else { b });
    let few = records
        .iter()
        .filter(|r| r.irrelevant_fraction().is_some_and(|f| f < FEW_IRRELEVANT))
        .fold(None::<&ExperimentRecord>, |b, r| match b {
            Some(b) if b.error <= r.error => Some(b),
            _ => Some(r),
        });
    let min_few = few.map(|r| r.error);
    Ok(Fig2Summary {
        seed,
        best_beta: best.beta,
        best_error: best.error,
        best_irrelevant_fraction: best.irrelevant_fraction(),
        min_error_few_irrelevant: min_few,
        min_error_few_irrelevant_beta: few.map_or(Rational::from_integer(0), |r| r.beta),
        far_worse: min_few.is_none_or(|e| e >= FAR_WORSE_FACTOR * best.error),
        records: records.clone(),
    })
}
