use std::io::Write;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::bounds::{self, BoundId};
use super::{exact_upper_tail, TailQuery};
use crate::error::Result;
use crate::rational::{self, Rational};

/// Deviation values of an audit grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaGrid {
    List(#[serde(with = "rational::seq_as_str")] Vec<Rational>),
    /// Every `j / l` with `0 <= j/l <= max`, generated per trial count.
    PerEll {
        #[serde(with = "rational::as_str")]
        max: Rational,
    },
}

impl EtaGrid {
    fn values(&self, ell: u64) -> Vec<Rational> {
        match self {
            EtaGrid::List(v) => v.clone(),
            EtaGrid::PerEll { max } => {
                let l = ell as i64;
                (0..=l).map(|j| Ratio::new(j, l)).take_while(|eta| eta <= max).collect()
            }
        }
    }
}

/// Parameter grid for [`audit_bound`], read from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditGrid {
    pub ells: Vec<u64>,
    #[serde(with = "rational::seq_as_str", default = "default_probs")]
    pub probs: Vec<Rational>,
    #[serde(default = "default_etas")]
    pub etas: EtaGrid,
    #[serde(default)]
    pub deltas: Vec<f64>,
}

fn default_probs() -> Vec<Rational> {
    vec![rational::half()]
}

fn default_etas() -> EtaGrid {
    EtaGrid::PerEll { max: rational::half() }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointStatus {
    Ok,
    Violation,
    Skipped(String),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditPoint {
    pub bound: BoundId,
    pub ell: u64,
    /// Success probability of `U`.
    #[serde(with = "rational::as_str")]
    pub p: Rational,
    pub eta_nominal: Option<Rational>,
    /// Deviation actually realized by the integer threshold.
    pub eta_discrete: Option<f64>,
    pub delta: Option<f64>,
    /// Smallest count in the audited event (for Slud, of the complementary
    /// binomial).
    pub threshold: Option<u64>,
    pub bound_value: Option<f64>,
    pub exact_tail: Option<f64>,
    /// Signed so that a negative margin is a violation.
    pub margin: Option<f64>,
    pub status: PointStatus,
}

impl AuditPoint {
    fn skipped(bound: BoundId, ell: u64, p: Rational, eta: Option<Rational>, delta: Option<f64>, why: String) -> Self {
        Self {
            bound,
            ell,
            p,
            eta_nominal: eta,
            eta_discrete: None,
            delta,
            threshold: None,
            bound_value: None,
            exact_tail: None,
            margin: None,
            status: PointStatus::Skipped(why),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub bound: BoundId,
    pub grid: AuditGrid,
    pub points: Vec<AuditPoint>,
    /// Indices into `points`.
    pub violations: Vec<usize>,
    /// Largest `margin / exact_tail` over checked points with a positive tail.
    pub max_relative_slack: f64,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn checked(&self) -> usize {
        self.points.iter().filter(|p| !matches!(p.status, PointStatus::Skipped(_))).count()
    }

    pub fn skipped(&self) -> usize {
        self.points.len() - self.checked()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "bound_id",
            "ell",
            "p",
            "eta_nominal",
            "eta_discrete",
            "threshold",
            "bound_value",
            "exact_tail",
            "margin",
            "status",
        ])?;
        let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        for pt in &self.points {
            let status = match &pt.status {
                PointStatus::Ok => "ok".to_string(),
                PointStatus::Violation => "violation".to_string(),
                PointStatus::Skipped(why) => format!("skipped: {why}"),
            };
            w.write_record([
                pt.bound.name().to_string(),
                pt.ell.to_string(),
                rational::format_rational(&pt.p),
                pt.eta_nominal.map(|e| rational::format_rational(&e)).unwrap_or_default(),
                opt(pt.eta_discrete),
                pt.threshold.map(|t| t.to_string()).unwrap_or_default(),
                opt(pt.bound_value),
                opt(pt.exact_tail),
                opt(pt.margin),
                status,
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

struct Checked {
    query: TailQuery,
    eta_discrete: Option<f64>,
    bound_value: f64,
}

fn finish(bound: BoundId, ell: u64, p: Rational, eta: Option<Rational>, delta: Option<f64>, c: Result<Checked>) -> AuditPoint {
    let c = match c {
        Ok(c) => c,
        Err(e) => return AuditPoint::skipped(bound, ell, p, eta, delta, e.to_string()),
    };
    let exact = match exact_upper_tail(&c.query) {
        Ok(v) => v,
        Err(e) => return AuditPoint::skipped(bound, ell, p, eta, delta, e.to_string()),
    };
    let margin = if bound.is_upper() { c.bound_value - exact } else { exact - c.bound_value };
    AuditPoint {
        bound,
        ell,
        p,
        eta_nominal: eta,
        eta_discrete: c.eta_discrete,
        delta,
        threshold: Some(c.query.min_count()),
        bound_value: Some(c.bound_value),
        exact_tail: Some(exact),
        margin: Some(margin),
        status: if margin >= 0.0 { PointStatus::Ok } else { PointStatus::Violation },
    }
}

fn discrete_deviation(t: u64, ell: u64, p: Rational) -> f64 {
    rational::to_f64(Ratio::new(t as i64, ell as i64) - p)
}

fn check_point(bound: BoundId, ell: u64, p: Rational, eta: Rational) -> Result<Checked> {
    let l = Rational::from_integer(ell as i64);
    let eta_f = rational::to_f64(eta);
    let half = rational::half();
    match bound {
        BoundId::HoeffdingUpper => {
            let bound_value = bounds::hoeffding_upper(ell, eta_f)?;
            let query = TailQuery::at_least_real(ell, p, l * (p + eta))?;
            let eta_discrete = Some(discrete_deviation(query.min_count(), ell, p));
            Ok(Checked { query, eta_discrete, bound_value })
        }
        BoundId::ChernoffUpper | BoundId::ChernoffEtaLe4Upper => {
            let mean = l * p;
            let mean_f = rational::to_f64(mean);
            let bound_value = if bound == BoundId::ChernoffUpper {
                bounds::chernoff_upper(mean_f, eta_f)?
            } else {
                bounds::chernoff_eta_le4_upper(mean_f, eta_f)?
            };
            let query = TailQuery::greater_real(ell, p, (Rational::one() + eta) * mean)?;
            let eta_discrete = Some(query.min_count() as f64 / mean_f - 1.0);
            Ok(Checked { query, eta_discrete, bound_value })
        }
        BoundId::BerryEsseenLower | BoundId::FairCoinLower => {
            if p != half {
                return Err(crate::error::precondition("fair-coin bound requires p = 1/2"));
            }
            let bound_value = if bound == BoundId::BerryEsseenLower {
                // exact form of l >= 1/eta^2
                if eta <= Rational::zero() || l * eta * eta < Rational::one() {
                    return Err(crate::error::precondition(format!(
                        "berry_esseen_lower requires eta > 0 and l >= 1/eta^2 (l = {ell}, eta = {})",
                        rational::format_rational(&eta)
                    )));
                }
                bounds::berry_esseen_lower(ell, eta_f)?
            } else {
                if !(l * eta).is_integer() {
                    return Err(crate::error::precondition("fair_coin_lower requires eta*l integral"));
                }
                if eta < Rational::zero() || eta > Ratio::new(1, 8) {
                    return Err(crate::error::precondition("fair_coin_lower requires 0 <= eta <= 1/8"));
                }
                bounds::fair_coin_lower(ell, eta_f)?
            };
            let query = TailQuery::at_least_real(ell, half, l * (half + eta))?;
            let eta_discrete = Some(discrete_deviation(query.min_count(), ell, half));
            Ok(Checked { query, eta_discrete, bound_value })
        }
        BoundId::SludLower => {
            if eta < Rational::zero() || eta > Ratio::new(1, 5) {
                return Err(crate::error::precondition("slud_lower requires 0 <= eta <= 1/5"));
            }
            let bound_value = bounds::slud_lower(ell, eta_f)?;
            // U/l < 1/2 for U ~ Bin(l, 1/2 + eta) is B > l/2 for B = l - U ~ Bin(l, 1/2 - eta)
            let query = TailQuery::greater_real(ell, half - eta, l * half)?;
            Ok(Checked { query, eta_discrete: Some(eta_f), bound_value })
        }
        BoundId::FourMeanUpper => unreachable!("handled by check_four_mean"),
    }
}

fn check_four_mean(ell: u64, p: Rational, delta: f64) -> Result<Checked> {
    let mean = Rational::from_integer(ell as i64) * p;
    let bound = bounds::four_mean_upper(rational::to_f64(mean), delta)?;
    let query = if delta == 1.0 {
        TailQuery::greater_real(ell, p, mean * 4)?
    } else {
        let thr = match bound {
            bounds::UpperBound::Threshold { threshold, .. } => threshold,
            bounds::UpperBound::Probability(_) => unreachable!(),
        };
        TailQuery::greater_real(ell, p, Rational::from_integer(thr.floor() as i64))?
    };
    Ok(Checked { query, eta_discrete: None, bound_value: delta })
}

/// Compare `bound` with the exact binomial tail at every grid point.
///
/// Upper bounds must dominate the tail of their event, lower bounds must be
/// dominated by it. Points outside a bound's preconditions are kept in the
/// report as skipped.
pub fn audit_bound(bound: BoundId, grid: &AuditGrid) -> AuditReport {
    let mut points = Vec::new();
    for &ell in &grid.ells {
        match bound {
            BoundId::FourMeanUpper => {
                for &p in &grid.probs {
                    for &delta in &grid.deltas {
                        let c = check_four_mean(ell, p, delta);
                        points.push(finish(bound, ell, p, None, Some(delta), c));
                    }
                }
            }
            BoundId::SludLower => {
                for eta in grid.etas.values(ell) {
                    let p = rational::half() + eta;
                    let c = check_point(bound, ell, p, eta);
                    points.push(finish(bound, ell, p, Some(eta), None, c));
                }
            }
            _ => {
                for &p in &grid.probs {
                    for eta in grid.etas.values(ell) {
                        let c = check_point(bound, ell, p, eta);
                        points.push(finish(bound, ell, p, Some(eta), None, c));
                    }
                }
            }
        }
    }
    let violations = points
        .iter()
        .enumerate()
        .filter(|(_, p)| p.status == PointStatus::Violation)
        .map(|(i, _)| i)
        .collect();
    let max_relative_slack = points
        .iter()
        .filter(|p| p.status == PointStatus::Ok)
        .filter_map(|p| match (p.margin, p.exact_tail) {
            (Some(m), Some(e)) if e > 0.0 => Some(m / e),
            _ => None,
        })
        .fold(0.0, f64::max);
    AuditReport { bound, grid: grid.clone(), points, violations, max_relative_slack }
}
