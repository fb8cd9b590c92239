use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{fmt_opt, with_pool};
use crate::error::{domain, Result};
use crate::rational::{self, Rational};
use crate::rng::sub_seed;
use crate::source::{make_spec, Dependence, Polarity};
use crate::vote::{dependence_bound, exact_error, mc_error, Composition, Feature, VoteModel};

/// A fixed vote over `n_relevant` relevant variables (voted positively)
/// and `n_irrelevant` irrelevant ones, evaluated on sources whose relevant
/// variables come in perfectly correlated blocks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DependenceConfig {
    pub n_relevant: usize,
    pub n_irrelevant: usize,
    #[serde(with = "rational::as_str")]
    pub gamma: Rational,
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    /// Constant of the dependence bound, which the theory leaves open.
    #[serde(default = "unit")]
    pub c: f64,
}

fn unit() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DependenceRecord {
    pub r: usize,
    pub n: u64,
    pub k: u64,
    pub gamma: f64,
    pub mc_error: f64,
    pub mc_se: f64,
    /// Exact error of the same vote on an independent source.
    pub independent_error: f64,
    /// The dependence bound with constant `c`; `None` when `2r > n`.
    pub bound: Option<f64>,
}

/// Monte Carlo error of the fixed vote for each dependence degree in `rs`.
pub fn dependence_study(rs: &[usize], config: &DependenceConfig) -> Result<Vec<DependenceRecord>> {
    if config.n_relevant == 0 || config.trials == 0 {
        return Err(domain("need at least one relevant variable and one trial"));
    }
    let n = config.n_relevant + config.n_irrelevant;
    let gamma = rational::to_f64(config.gamma);
    let model = VoteModel::new((0..n).map(Feature::pos).collect(), true)?;
    let independent_error = exact_error(Composition::new(n as u64, config.n_relevant as u64, 0)?, gamma)?;
    with_pool(|| {
        rs.iter()
            .map(|&r| {
                let spec =
                    make_spec(n, config.n_relevant, config.gamma, &Polarity::AllPositive, Dependence::BlockClique { r })?;
                let mc = mc_error(&model, &spec, config.trials, sub_seed(config.seed, r as u64))?;
                Ok(DependenceRecord {
                    r,
                    n: n as u64,
                    k: config.n_relevant as u64,
                    gamma,
                    mc_error: mc.estimate,
                    mc_se: mc.standard_error,
                    independent_error,
                    bound: dependence_bound(n as u64, config.n_relevant as u64, r as u64, gamma, config.c).ok(),
                })
            })
            .collect()
    })?
}

pub fn write_dependence_csv<W: Write>(records: &[DependenceRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["r", "n", "k", "gamma", "mc_error", "mc_se", "independent_error", "bound"])?;
    for d in records {
        w.write_record([
            d.r.to_string(),
            d.n.to_string(),
            d.k.to_string(),
            d.gamma.to_string(),
            d.mc_error.to_string(),
            d.mc_se.to_string(),
            d.independent_error.to_string(),
            fmt_opt(d.bound),
        ])?;
    }
    w.flush()?;
    Ok(())
}
