use super::exact::{check_gamma, Composition};
use crate::error::{domain, precondition, Result};

/// `exp(-2 gamma^2 [k - l]_+^2 / n)`, which is 1 when `k <= l`.
pub fn theorem1_bound(comp: Composition, gamma: f64) -> Result<f64> {
    comp.validate()?;
    check_gamma(gamma)?;
    if comp.n == 0 {
        return Err(domain("theorem1_bound needs n >= 1"));
    }
    let excess = comp.k.saturating_sub(comp.l) as f64;
    Ok((-2.0 * gamma * gamma * excess * excess / comp.n as f64).exp())
}

/// Edges spread over `[gamma_min, gamma_max]`:
/// `exp(-2 [gamma_min k - gamma_max l]_+^2 / n)`.
pub fn hetero_bound(n: u64, k: u64, l: u64, gamma_min: f64, gamma_max: f64) -> Result<f64> {
    Composition::new(n, k, l)?;
    if n == 0 {
        return Err(domain("hetero_bound needs n >= 1"));
    }
    if !(gamma_min > 0.0 && gamma_min <= gamma_max && gamma_max < 0.5) {
        return Err(domain(format!("need 0 < gamma_min <= gamma_max < 1/2, got [{gamma_min}, {gamma_max}]")));
    }
    let excess = (gamma_min * k as f64 - gamma_max * l as f64).max(0.0);
    Ok((-2.0 * excess * excess / n as f64).exp())
}

/// `c (r + 1) exp(-2 gamma^2 k^2 / (n (r + 1)))`, capped at 1, for sources
/// where each variable depends on at most `r` others given the label.
pub fn dependence_bound(n: u64, k: u64, r: u64, gamma: f64, c: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if n == 0 || k > n {
        return Err(domain(format!("need 0 <= k <= n and n >= 1, got k = {k}, n = {n}")));
    }
    if 2 * r > n {
        return Err(precondition(format!("dependence_bound requires r <= n/2, got r = {r}, n = {n}")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(domain(format!("constant c = {c} must be positive")));
    }
    let r1 = (r + 1) as f64;
    let kf = k as f64;
    Ok((c * r1 * (-2.0 * gamma * gamma * kf * kf / (n as f64 * r1)).exp()).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theorem1_examples() {
        assert_eq!(theorem1_bound(Composition::new(10, 3, 3).unwrap(), 0.1).unwrap(), 1.0);
        assert_eq!(theorem1_bound(Composition::new(10, 2, 3).unwrap(), 0.1).unwrap(), 1.0);
        let v = theorem1_bound(Composition::new(1000, 200, 100).unwrap(), 0.25).unwrap();
        assert!((v - (-1.25f64).exp()).abs() < 1e-15);
        assert!((v - 0.286_505).abs() < 1e-6);
        // n = 1000, k = 2 n^(2/3), l = n^(2/3)
        let n = 1000f64;
        let third = n.powf(2.0 / 3.0).round() as u64;
        assert_eq!(third, 100);
        assert_eq!(theorem1_bound(Composition::new(1000, 2 * third, third).unwrap(), 0.25).unwrap(), v);
    }

    #[test]
    fn hetero_examples() {
        let t1 = theorem1_bound(Composition::new(200, 100, 10).unwrap(), 0.1).unwrap();
        assert!((hetero_bound(200, 100, 10, 0.1, 0.1).unwrap() - t1).abs() < 1e-15);
        let v = hetero_bound(200, 100, 10, 0.05, 0.2).unwrap();
        assert!((v - (-0.09f64).exp()).abs() < 1e-15);
        assert!((v - 0.913_931).abs() < 1e-6);
        assert_eq!(hetero_bound(200, 10, 10, 0.05, 0.2).unwrap(), 1.0);
        assert!(hetero_bound(200, 10, 10, 0.2, 0.05).is_err());
    }

    #[test]
    fn dependence_examples() {
        let t1 = theorem1_bound(Composition::new(1000, 200, 0).unwrap(), 0.25).unwrap();
        assert!((dependence_bound(1000, 200, 0, 0.25, 1.0).unwrap() - t1).abs() < 1e-15);
        // 2 gamma^2 k^2 / (n (r+1)) = 2.5 for k = 200, and 0.625 for k = 100 where 2 e^-0.625 > 1
        let v = dependence_bound(1000, 200, 1, 0.25, 1.0).unwrap();
        assert!((v - 2.0 * (-2.5f64).exp()).abs() < 1e-15);
        assert_eq!(dependence_bound(1000, 100, 1, 0.25, 1.0).unwrap(), 1.0);
        let v = dependence_bound(4000, 800, 3, 0.25, 1.0).unwrap();
        assert!((v - 4.0 * (-5f64).exp()).abs() < 1e-15);
        assert!((v - 0.026_952).abs() < 1e-6);
        assert!(dependence_bound(10, 5, 6, 0.25, 1.0).is_err());
        assert!(dependence_bound(10, 5, 5, 0.25, 1.0).is_ok());
    }
}
