use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, precondition, Error, Result};

/// The tail inequalities for sums of independent {0,1} variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundId {
    /// `P(U/l - E(U)/l >= eta) <= exp(-2 eta^2 l)`
    HoeffdingUpper,
    /// `P(U > (1+eta)E(U)) < exp(-(1+eta)E(U) ln((1+eta)/e))`, eta > 0
    ChernoffUpper,
    /// `P(U > (1+eta)E(U)) < exp(-eta^2 E(U)/4)`, 0 <= eta <= 4
    ChernoffEtaLe4Upper,
    /// `P(U > 4E(U) + 3 ln(1/delta)) < delta`, 0 < delta <= 1
    FourMeanUpper,
    /// Fair coins, `l >= 1/eta^2`:
    /// `P(U/l - 1/2 >= eta) >= exp(-2 eta^2 l)/(7 eta sqrt(l)) - 1/sqrt(l)`
    BerryEsseenLower,
    /// Fair coins, 0 <= eta <= 1/8, eta*l integral:
    /// `P(U/l - 1/2 >= eta) >= exp(-16 eta^2 l)/5`
    FairCoinLower,
    /// Success probability 1/2 + eta, 0 <= eta <= 1/5:
    /// `P(U/l < 1/2) >= exp(-5 eta^2 l)/4`
    SludLower,
}

impl BoundId {
    pub const ALL: [BoundId; 7] = [
        BoundId::HoeffdingUpper,
        BoundId::ChernoffUpper,
        BoundId::ChernoffEtaLe4Upper,
        BoundId::FourMeanUpper,
        BoundId::BerryEsseenLower,
        BoundId::FairCoinLower,
        BoundId::SludLower,
    ];

    pub fn is_upper(self) -> bool {
        matches!(
            self,
            BoundId::HoeffdingUpper | BoundId::ChernoffUpper | BoundId::ChernoffEtaLe4Upper | BoundId::FourMeanUpper
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            BoundId::HoeffdingUpper => "hoeffding_upper",
            BoundId::ChernoffUpper => "chernoff_upper",
            BoundId::ChernoffEtaLe4Upper => "chernoff_eta_le4_upper",
            BoundId::FourMeanUpper => "four_mean_upper",
            BoundId::BerryEsseenLower => "berry_esseen_lower",
            BoundId::FairCoinLower => "fair_coin_lower",
            BoundId::SludLower => "slud_lower",
        }
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| domain(format!("unknown bound id {s:?}")))
    }
}

/// Value of an upper bound. The high-confidence bound yields a threshold
/// together with the probability it guarantees rather than a probability
/// of a fixed event.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UpperBound {
    Probability(f64),
    Threshold { threshold: f64, delta: f64 },
}

impl UpperBound {
    /// The bounding probability.
    pub fn value(&self) -> f64 {
        match *self {
            UpperBound::Probability(p) => p,
            UpperBound::Threshold { delta, .. } => delta,
        }
    }
}

/// Parameters for [`eval_upper_bound`] / [`eval_lower_bound`]; each bound
/// reads the subset it needs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub ell: Option<u64>,
    pub mean: Option<f64>,
    pub eta: Option<f64>,
    pub delta: Option<f64>,
}

fn need<T>(v: Option<T>, name: &str, id: BoundId) -> Result<T> {
    v.ok_or_else(|| domain(format!("{id} needs parameter {name}")))
}

fn check_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{name} must be finite, got {x}")))
    }
}

pub fn hoeffding_upper(ell: u64, eta: f64) -> Result<f64> {
    check_finite("eta", eta)?;
    if ell == 0 {
        return Err(domain("hoeffding_upper requires l >= 1"));
    }
    if eta < 0.0 {
        return Err(precondition(format!("hoeffding_upper requires eta >= 0, got {eta}")));
    }
    Ok((-2.0 * eta * eta * ell as f64).exp())
}

pub fn chernoff_upper(mean: f64, eta: f64) -> Result<f64> {
    check_finite("eta", eta)?;
    check_finite("E(U)", mean)?;
    if eta <= 0.0 {
        return Err(precondition(format!("chernoff_upper requires eta > 0, got {eta}")));
    }
    if mean < 0.0 {
        return Err(domain(format!("E(U) must be nonnegative, got {mean}")));
    }
    Ok((-(1.0 + eta) * mean * (eta.ln_1p() - 1.0)).exp())
}

pub fn chernoff_eta_le4_upper(mean: f64, eta: f64) -> Result<f64> {
    check_finite("eta", eta)?;
    check_finite("E(U)", mean)?;
    if !(0.0..=4.0).contains(&eta) {
        return Err(precondition(format!("chernoff_eta_le4_upper requires 0 <= eta <= 4, got {eta}")));
    }
    if mean < 0.0 {
        return Err(domain(format!("E(U) must be nonnegative, got {mean}")));
    }
    Ok((-eta * eta * mean / 4.0).exp())
}

/// Returns `(4 E(U) + 3 ln(1/delta), delta)`.
pub fn four_mean_upper(mean: f64, delta: f64) -> Result<UpperBound> {
    check_finite("delta", delta)?;
    check_finite("E(U)", mean)?;
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(precondition(format!("four_mean_upper requires 0 < delta <= 1, got {delta}")));
    }
    if mean < 0.0 {
        return Err(domain(format!("E(U) must be nonnegative, got {mean}")));
    }
    Ok(UpperBound::Threshold { threshold: 4.0 * mean + 3.0 * (1.0 / delta).ln(), delta })
}

/// May be negative, in which case it is vacuous.
pub fn berry_esseen_lower(ell: u64, eta: f64) -> Result<f64> {
    check_finite("eta", eta)?;
    if eta <= 0.0 {
        return Err(precondition(format!("berry_esseen_lower requires eta > 0, got {eta}")));
    }
    let l = ell as f64;
    if l * eta * eta < 1.0 - 1e-12 {
        return Err(precondition(format!("berry_esseen_lower requires l >= 1/eta^2 (l = {ell}, eta = {eta})")));
    }
    let root = l.sqrt();
    Ok((-2.0 * eta * eta * l).exp() / (7.0 * eta * root) - 1.0 / root)
}

pub fn fair_coin_lower(ell: u64, eta: f64) -> Result<f64> {
    check_finite("eta", eta)?;
    if !(0.0..=0.125).contains(&eta) {
        return Err(precondition(format!("fair_coin_lower requires 0 <= eta <= 1/8, got {eta}")));
    }
    let scaled = eta * ell as f64;
    if (scaled - scaled.round()).abs() > 1e-9 {
        return Err(precondition(format!("fair_coin_lower requires eta*l integral, got {scaled}")));
    }
    Ok(0.2 * (-16.0 * eta * eta * ell as f64).exp())
}

pub fn slud_lower(ell: u64, eta: f64) -> Result<f64> {
    check_finite("eta", eta)?;
    if !(0.0..=0.2).contains(&eta) {
        return Err(precondition(format!("slud_lower requires 0 <= eta <= 1/5, got {eta}")));
    }
    Ok(0.25 * (-5.0 * eta * eta * ell as f64).exp())
}

pub fn eval_upper_bound(id: BoundId, params: &BoundParams) -> Result<UpperBound> {
    match id {
        BoundId::HoeffdingUpper => {
            hoeffding_upper(need(params.ell, "ell", id)?, need(params.eta, "eta", id)?).map(UpperBound::Probability)
        }
        BoundId::ChernoffUpper => {
            chernoff_upper(need(params.mean, "mean", id)?, need(params.eta, "eta", id)?).map(UpperBound::Probability)
        }
        BoundId::ChernoffEtaLe4Upper => chernoff_eta_le4_upper(need(params.mean, "mean", id)?, need(params.eta, "eta", id)?)
            .map(UpperBound::Probability),
        BoundId::FourMeanUpper => four_mean_upper(need(params.mean, "mean", id)?, need(params.delta, "delta", id)?),
        _ => Err(domain(format!("{id} is a lower bound"))),
    }
}

pub fn eval_lower_bound(id: BoundId, params: &BoundParams) -> Result<f64> {
    let ell = need(params.ell, "ell", id);
    let eta = need(params.eta, "eta", id);
    match id {
        BoundId::BerryEsseenLower => berry_esseen_lower(ell?, eta?),
        BoundId::FairCoinLower => fair_coin_lower(ell?, eta?),
        BoundId::SludLower => slud_lower(ell?, eta?),
        _ => Err(domain(format!("{id} is an upper bound"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn upper_examples() {
        assert!(close(hoeffding_upper(10, 0.2).unwrap(), 0.449_328_964_117_221_6, 1e-12));
        assert!(close(chernoff_eta_le4_upper(2.0, 1.0).unwrap(), 0.606_530_659_712_633_4, 1e-12));
        match four_mean_upper(5.0, 0.5).unwrap() {
            UpperBound::Threshold { threshold, delta } => {
                assert!(close(threshold, 20.0 + 3.0 * 2f64.ln(), 1e-12));
                assert!(close(threshold, 22.0794, 1e-4));
                assert_eq!(delta, 0.5);
            }
            other => panic!("unexpected {other:?}"),
        }
        // (1+1)*2*(ln 2 - 1) exponent
        let v = chernoff_upper(2.0, 1.0).unwrap();
        assert!(close(v, (-4.0 * (2f64.ln() - 1.0)).exp(), 1e-12));
    }

    #[test]
    fn lower_examples() {
        assert!(close(berry_esseen_lower(10_000, 0.01).unwrap(), (-2f64).exp() / 7.0 - 0.01, 1e-12));
        assert!(close(berry_esseen_lower(10_000, 0.01).unwrap(), 0.009_334, 1e-6));
        assert!(close(fair_coin_lower(16, 0.125).unwrap(), 0.2 * (-4f64).exp(), 1e-15));
        assert!(close(fair_coin_lower(16, 0.125).unwrap(), 0.003_663, 1e-6));
        assert!(close(slud_lower(10, 0.1).unwrap(), 0.151_632_664_928_158_3, 1e-12));
    }

    #[test]
    fn preconditions_are_named() {
        let e = chernoff_upper(1.0, 0.0).unwrap_err();
        assert!(matches!(e, Error::Precondition(ref m) if m.contains("eta > 0")));
        assert!(chernoff_eta_le4_upper(1.0, 4.5).is_err());
        assert!(four_mean_upper(1.0, 0.0).is_err());
        assert!(four_mean_upper(1.0, 1.5).is_err());
        assert!(berry_esseen_lower(50, 0.1).is_err());
        assert!(berry_esseen_lower(100, 0.1).is_ok());
        assert!(fair_coin_lower(16, 0.2).is_err());
        assert!(fair_coin_lower(10, 0.05).is_err());
        assert!(slud_lower(10, 0.25).is_err());
        assert!(hoeffding_upper(10, -0.1).is_err());
    }

    #[test]
    fn dispatch() {
        let p = BoundParams { ell: Some(10), eta: Some(0.2), ..Default::default() };
        assert_eq!(eval_upper_bound(BoundId::HoeffdingUpper, &p).unwrap().value(), hoeffding_upper(10, 0.2).unwrap());
        assert!(eval_upper_bound(BoundId::SludLower, &p).is_err());
        assert!(eval_lower_bound(BoundId::HoeffdingUpper, &p).is_err());
        assert!(eval_upper_bound(BoundId::ChernoffUpper, &p).is_err());
        for id in BoundId::ALL {
            assert_eq!(id.name().parse::<BoundId>().unwrap(), id);
        }
    }
}
