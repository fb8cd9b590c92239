use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A variable or its complement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Feature {
    pub var: usize,
    pub negated: bool,
}

impl Feature {
    pub fn pos(var: usize) -> Self {
        Self { var, negated: false }
    }

    pub fn neg(var: usize) -> Self {
        Self { var, negated: true }
    }

    #[inline]
    pub fn vote(&self, value: bool) -> bool {
        value != self.negated
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.negated { '-' } else { '+' }, self.var)
    }
}

impl FromStr for Feature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (negated, digits) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        let var = digits.parse().map_err(|_| Error::Input(format!("bad feature {s:?}; expected +i or -i")))?;
        Ok(Self { var, negated })
    }
}

impl Serialize for Feature {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Feature {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

mod bit {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(b: &bool, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(*b as u8)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
        match u8::deserialize(d)? {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(serde::de::Error::custom(format!("label must be 0 or 1, got {other}"))),
        }
    }
}

/// Unweighted majority vote over signed features; ties (and the empty
/// model) predict `default_label`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ModelFile", into = "ModelFile")]
pub struct VoteModel {
    features: Vec<Feature>,
    default_label: bool,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    features: Vec<Feature>,
    #[serde(with = "bit")]
    default_label: bool,
}

impl TryFrom<ModelFile> for VoteModel {
    type Error = Error;

    fn try_from(f: ModelFile) -> Result<Self> {
        VoteModel::new(f.features, f.default_label)
    }
}

impl From<VoteModel> for ModelFile {
    fn from(m: VoteModel) -> Self {
        ModelFile { features: m.features, default_label: m.default_label }
    }
}

impl VoteModel {
    /// Rejects repeated variables, including a variable with both signs.
    pub fn new(mut features: Vec<Feature>, default_label: bool) -> Result<Self> {
        features.sort_unstable();
        if let Some(w) = features.windows(2).find(|w| w[0].var == w[1].var) {
            return Err(Error::Input(format!("variable {} appears more than once ({} and {})", w[0].var, w[0], w[1])));
        }
        Ok(Self { features, default_label })
    }

    /// Build from candidate features, dropping every variable that appears
    /// with both signs (their votes cancel) and exact repeats.
    pub fn with_cancellation(mut features: Vec<Feature>, default_label: bool) -> Self {
        features.sort_unstable();
        features.dedup();
        let mut kept = Vec::with_capacity(features.len());
        let mut i = 0;
        while i < features.len() {
            if i + 1 < features.len() && features[i + 1].var == features[i].var {
                i += 2;
            } else {
                kept.push(features[i]);
                i += 1;
            }
        }
        Self { features: kept, default_label }
    }

    pub fn empty(default_label: bool) -> Self {
        Self { features: Vec::new(), default_label }
    }

    /// Features sorted by variable index.
    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn default_label(&self) -> bool {
        self.default_label
    }

    pub fn variables(&self) -> Vec<usize> {
        self.features.iter().map(|f| f.var).collect()
    }

    pub fn max_var(&self) -> Option<usize> {
        self.features.last().map(|f| f.var)
    }

    /// Majority decision from the number of features voting 1.
    #[inline]
    pub fn decide(&self, ones: usize) -> bool {
        let n = self.features.len();
        match (2 * ones).cmp(&n) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => self.default_label,
        }
    }

    pub fn predict(&self, example: &[bool]) -> Result<bool> {
        if let Some(max) = self.max_var() {
            if max >= example.len() {
                return Err(Error::Input(format!(
                    "model references variable {max} but the example has {} values",
                    example.len()
                )));
            }
        }
        let ones = self.features.iter().filter(|f| f.vote(example[f.var])).count();
        Ok(self.decide(ones))
    }
}
