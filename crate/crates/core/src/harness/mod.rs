//! Experiment runner: threshold sweeps, the canonical N = 100000 reproduction,
//! exclusivity profiles and dependence studies, with CSV output.
//!
//! Every random quantity is derived from the master seed through
//! [`sub_seed`](crate::rng::sub_seed), so a run reproduces bit-identically
//! regardless of the worker count.

mod dependence;
mod exclusivity;
mod fig2;
mod sweep;

pub use dependence::{dependence_study, write_dependence_csv, DependenceConfig, DependenceRecord};
pub use exclusivity::{exclusivity_profile, write_exclusivity_csv, ExclusivityReport, LearnerSummary};
pub use fig2::{fig2_config, repro_fig2, Fig2Summary, FAR_WORSE_FACTOR, FEW_IRRELEVANT};
pub use sweep::{
    beta_grid, draw_table, model_error, run_sweep, write_sweep_csv, ErrorMode, ExperimentConfig, ExperimentRecord,
    Sampling, CSV_COLUMNS,
};

use crate::error::{domain, Result};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "EDGEVOTE_THREADS";

/// Run `f` on a worker pool sized by [`THREADS_ENV`] when it is set, and on
/// the global pool otherwise.
pub fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => {
            let n: usize = v.trim().parse().map_err(|_| domain(format!("{THREADS_ENV}={v} is not a thread count")))?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| domain(format!("cannot build a pool of {n} threads: {e}")))?;
            Ok(pool.install(f))
        }
        Err(_) => Ok(f()),
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}
