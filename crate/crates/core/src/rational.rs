//! Exact rationals at the configuration boundary.
//!
//! Probabilities, edges and thresholds are carried as `Ratio<i64>` so that
//! inclusion tests and tail thresholds are decided in integer arithmetic.
//! They are written as `"a/b"` strings, or as terminating decimals such as
//! `"0.05"`, which are converted exactly.

use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::error::{domain, Error, Result};

pub type Rational = Ratio<i64>;

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(domain("empty rational"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = i64::from_str(num.trim()).map_err(|e| domain(format!("bad numerator in {s:?}: {e}")))?;
        let den = i64::from_str(den.trim()).map_err(|e| domain(format!("bad denominator in {s:?}: {e}")))?;
        if den == 0 {
            return Err(domain(format!("zero denominator in {s:?}")));
        }
        return Ok(Ratio::new(num, den));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(domain(format!("not a number: {s:?}")));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(domain(format!("not a decimal or a/b rational: {s:?}")));
    }
    if frac_part.len() > 15 {
        return Err(domain(format!("too many decimal places in {s:?}")));
    }
    let digits = format!("{int_part}{frac_part}");
    let num = if digits.is_empty() { 0 } else { i64::from_str(&digits).map_err(|e| domain(format!("{s:?}: {e}")))? };
    let den = 10i64.pow(frac_part.len() as u32);
    let r = Ratio::new(num, den);
    Ok(if neg { -r } else { r })
}

pub fn to_f64(r: Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| *r.numer() as f64 / *r.denom() as f64)
}

pub fn format_rational(r: &Rational) -> String {
    if r.denom() == &1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Smallest integer `t` with `t >= r`.
pub fn ceil_int(r: Rational) -> i64 {
    r.ceil().to_integer()
}

/// Largest integer `t` with `t <= r`.
pub fn floor_int(r: Rational) -> i64 {
    r.floor().to_integer()
}

pub fn half() -> Rational {
    Ratio::new(1, 2)
}

pub fn check_open_unit(name: &str, p: Rational) -> Result<()> {
    if p <= Rational::zero() || p >= Rational::from_integer(1) {
        return Err(Error::Domain(format!("{name} = {} must lie in (0, 1)", format_rational(&p))));
    }
    Ok(())
}

/// Serde adapter writing a rational as an `"a/b"` string.
pub mod as_str {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Int(i64),
        }
        match Repr::deserialize(d)? {
            Repr::Text(t) => parse_rational(&t).map_err(de::Error::custom),
            Repr::Int(i) => Ok(Rational::from_integer(i)),
        }
    }
}

/// Serde adapter for sequences of rationals.
pub mod seq_as_str {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "super::as_str")] Rational);

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|r| Wrap(*r)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Ok(Vec::<Wrap>::deserialize(d)?.into_iter().map(|w| w.0).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("1/10").unwrap(), Ratio::new(1, 10));
        assert_eq!(parse_rational("0.1").unwrap(), Ratio::new(1, 10));
        assert_eq!(parse_rational("0.05").unwrap(), Ratio::new(1, 20));
        assert_eq!(parse_rational("-0.5").unwrap(), Ratio::new(-1, 2));
        assert_eq!(parse_rational("3").unwrap(), Ratio::from_integer(3));
        assert_eq!(parse_rational(".25").unwrap(), Ratio::new(1, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn rounding_helpers() {
        assert_eq!(ceil_int(Ratio::new(7, 2)), 4);
        assert_eq!(floor_int(Ratio::new(7, 2)), 3);
        assert_eq!(ceil_int(Ratio::from_integer(6)), 6);
        assert_eq!(floor_int(Ratio::new(-1, 2)), -1);
    }
}
