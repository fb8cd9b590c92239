use num_traits::Zero;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{domain, Result};
use crate::rational::{self, Rational};

/// How relevant variables depend on each other given the label.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dependence {
    /// All variables conditionally independent given the label.
    #[default]
    Independent,
    /// Relevant variables, in index order, are cut into blocks of `r + 1`
    /// (the last block may be shorter). Every member of a block copies one
    /// latent agreement bit, so each variable depends on at most `r` others.
    BlockClique { r: usize },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    #[default]
    AllPositive,
    /// `ceil(K/2)` positive then `floor(K/2)` negative, by index.
    HalfHalf,
    /// `true` = positive, one entry per relevant variable.
    Explicit(Vec<bool>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeAssignment {
    /// Evenly spaced from `gamma_min` (first relevant variable) to `gamma_max`.
    UniformGrid,
    Explicit(#[serde(with = "rational::seq_as_str")] Vec<Rational>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelevantVar {
    pub index: usize,
    /// Strength of association, `0 < edge < 1/2`.
    #[serde(with = "rational::as_str")]
    pub edge: Rational,
    /// Positive variables agree with the label w.p. `1/2 + edge`,
    /// negative ones w.p. `1/2 - edge`.
    pub positive: bool,
}

impl RelevantVar {
    pub fn agreement_prob(&self) -> Rational {
        if self.positive {
            rational::half() + self.edge
        } else {
            rational::half() - self.edge
        }
    }
}

/// The generative source: a fair label and `n_vars` boolean variables,
/// of which those listed in `relevant` are associated with the label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceSpec {
    pub n_vars: usize,
    /// Sorted by index.
    pub relevant: Vec<RelevantVar>,
    #[serde(default)]
    pub dependence: Dependence,
}

fn polarity_list(k: usize, plan: &Polarity) -> Result<Vec<bool>> {
    match plan {
        Polarity::AllPositive => Ok(vec![true; k]),
        Polarity::HalfHalf => Ok((0..k).map(|i| i < k.div_ceil(2)).collect()),
        Polarity::Explicit(v) if v.len() == k => Ok(v.clone()),
        Polarity::Explicit(v) => Err(domain(format!("explicit polarity lists {} signs for {k} relevant variables", v.len()))),
    }
}

fn check_edge(edge: Rational) -> Result<()> {
    if edge <= Rational::zero() || edge >= rational::half() {
        return Err(domain(format!("edge {} must lie in (0, 1/2)", rational::format_rational(&edge))));
    }
    Ok(())
}

/// Source with `n_relevant` variables of common edge `gamma`, placed at
/// indices `0..n_relevant`.
pub fn make_spec(
    n_vars: usize,
    n_relevant: usize,
    gamma: Rational,
    polarity: &Polarity,
    dependence: Dependence,
) -> Result<SourceSpec> {
    make_spec_with_edges(n_vars, n_relevant, &vec![gamma; n_relevant], polarity, dependence)
}

/// Source whose relevant variables have edges in `[gamma_min, gamma_max]`.
pub fn make_hetero_spec(
    n_vars: usize,
    n_relevant: usize,
    gamma_min: Rational,
    gamma_max: Rational,
    assignment: &EdgeAssignment,
    polarity: &Polarity,
    dependence: Dependence,
) -> Result<SourceSpec> {
    check_edge(gamma_min)?;
    check_edge(gamma_max)?;
    if gamma_min > gamma_max {
        return Err(domain("gamma_min exceeds gamma_max"));
    }
    let edges: Vec<Rational> = match assignment {
        EdgeAssignment::UniformGrid => {
            if n_relevant <= 1 {
                vec![gamma_min; n_relevant]
            } else {
                let steps = Rational::from_integer(n_relevant as i64 - 1);
                (0..n_relevant)
                    .map(|i| gamma_min + (gamma_max - gamma_min) * Rational::from_integer(i as i64) / steps)
                    .collect()
            }
        }
        EdgeAssignment::Explicit(v) => {
            if v.len() != n_relevant {
                return Err(domain(format!("{} explicit edges for {n_relevant} relevant variables", v.len())));
            }
            if let Some(e) = v.iter().find(|e| **e < gamma_min || **e > gamma_max) {
                return Err(domain(format!(
                    "edge {} outside [gamma_min, gamma_max]",
                    rational::format_rational(e)
                )));
            }
            v.clone()
        }
    };
    make_spec_with_edges(n_vars, n_relevant, &edges, polarity, dependence)
}

fn make_spec_with_edges(
    n_vars: usize,
    n_relevant: usize,
    edges: &[Rational],
    polarity: &Polarity,
    dependence: Dependence,
) -> Result<SourceSpec> {
    if n_relevant < 1 || n_relevant > n_vars {
        return Err(domain(format!("need 1 <= K <= N, got K = {n_relevant}, N = {n_vars}")));
    }
    let signs = polarity_list(n_relevant, polarity)?;
    let relevant = edges
        .iter()
        .zip(signs)
        .enumerate()
        .map(|(index, (&edge, positive))| RelevantVar { index, edge, positive })
        .collect();
    let spec = SourceSpec { n_vars, relevant, dependence };
    spec.validate()?;
    Ok(spec)
}

impl SourceSpec {
    pub fn validate(&self) -> Result<()> {
        for w in self.relevant.windows(2) {
            if w[0].index >= w[1].index {
                return Err(domain("relevant variables must be sorted by index without repeats"));
            }
        }
        for v in &self.relevant {
            if v.index >= self.n_vars {
                return Err(domain(format!("relevant index {} out of range for N = {}", v.index, self.n_vars)));
            }
            check_edge(v.edge)?;
        }
        if self.relevant.is_empty() {
            return Err(domain("a source needs at least one relevant variable"));
        }
        if let Dependence::BlockClique { .. } = self.dependence {
            for block in self.blocks() {
                let e = self.relevant[block[0]].edge;
                if block.iter().any(|&j| self.relevant[j].edge != e) {
                    return Err(domain("all members of a dependence block must share one edge"));
                }
            }
        }
        Ok(())
    }

    pub fn n_relevant(&self) -> usize {
        self.relevant.len()
    }

    pub fn relevant_var(&self, index: usize) -> Option<&RelevantVar> {
        self.relevant.binary_search_by_key(&index, |v| v.index).ok().map(|i| &self.relevant[i])
    }

    /// Probability that variable `index` equals the label.
    pub fn agreement_prob(&self, index: usize) -> Rational {
        self.relevant_var(index).map_or_else(rational::half, RelevantVar::agreement_prob)
    }

    /// Dependence blocks as positions into `relevant`.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let size = match self.dependence {
            Dependence::Independent => 1,
            Dependence::BlockClique { r } => r + 1,
        };
        (0..self.relevant.len()).collect::<Vec<_>>().chunks(size).map(<[usize]>::to_vec).collect()
    }

    /// The common edge when every relevant variable has the same one.
    pub fn common_edge(&self) -> Option<Rational> {
        let e = self.relevant.first()?.edge;
        self.relevant.iter().all(|v| v.edge == e).then_some(e)
    }

    /// Smallest and largest edge.
    pub fn edge_range(&self) -> (Rational, Rational) {
        let min = self.relevant.iter().map(|v| v.edge).min().unwrap_or_else(Rational::zero);
        let max = self.relevant.iter().map(|v| v.edge).max().unwrap_or_else(Rational::zero);
        (min, max)
    }

    /// First 8 bytes of the SHA-256 of the canonical JSON encoding.
    pub fn fingerprint(&self) -> u64 {
        let json = serde_json::to_vec(self).expect("spec serializes");
        let digest = Sha256::digest(&json);
        u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
    }
}

/// JSON configuration from which a [`SourceSpec`] is built; either
/// `gamma` or both `gamma_min` and `gamma_max` must be given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceConfig {
    pub n_vars: usize,
    pub n_relevant: usize,
    #[serde(default, with = "opt_rational", skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Rational>,
    #[serde(default, with = "opt_rational", skip_serializing_if = "Option::is_none")]
    pub gamma_min: Option<Rational>,
    #[serde(default, with = "opt_rational", skip_serializing_if = "Option::is_none")]
    pub gamma_max: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<EdgeAssignment>,
    #[serde(default)]
    pub polarity: Polarity,
    #[serde(default)]
    pub dependence: Dependence,
}

mod opt_rational {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "crate::rational::as_str")] Rational);

    pub fn serialize<S: Serializer>(v: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        v.map(Wrap).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rational>, D::Error> {
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

impl SourceConfig {
    pub fn build(&self) -> Result<SourceSpec> {
        match (self.gamma, self.gamma_min, self.gamma_max) {
            (Some(g), None, None) => {
                if let Some(EdgeAssignment::Explicit(_)) = self.edges {
                    return Err(domain("explicit edges need gamma_min/gamma_max, not gamma"));
                }
                make_spec(self.n_vars, self.n_relevant, g, &self.polarity, self.dependence)
            }
            (None, Some(lo), Some(hi)) => make_hetero_spec(
                self.n_vars,
                self.n_relevant,
                lo,
                hi,
                self.edges.as_ref().unwrap_or(&EdgeAssignment::UniformGrid),
                &self.polarity,
                self.dependence,
            ),
            _ => Err(domain("give either gamma or both gamma_min and gamma_max")),
        }
    }
}

/// `1/2 + edge` as an exact fraction `(num, den)` with `den > 0`.
pub(crate) fn strength_fraction(edge: Rational) -> (u64, u64) {
    let s: Rational = rational::half() + edge;
    (*s.numer() as u64, *s.denom() as u64)
}
