//! Empirical edges and the edge-threshold vote learners.
//!
//! `M_beta` votes every feature (variable or negation) that equals the
//! label on at least a `1/2 + beta` fraction of the training examples,
//! after dropping variables whose two signs both qualify. `V_beta` is the
//! same over un-negated variables only.

use num_rational::Ratio;
use num_traits::Zero;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::rational::{self, Rational};
use crate::rng;
use crate::source::{Dataset, SourceSpec};
use crate::vote::{Feature, VoteModel};

/// Per-variable counts of training examples on which the variable equals
/// the label. The negation of variable `i` agrees on `m - counts[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeTable {
    m: u64,
    counts: Vec<u64>,
}

impl EdgeTable {
    pub fn new(m: u64, counts: Vec<u64>) -> Result<Self> {
        if m == 0 {
            return Err(domain("an edge table needs m >= 1"));
        }
        if let Some(c) = counts.iter().find(|&&c| c > m) {
            return Err(domain(format!("agreement count {c} exceeds m = {m}")));
        }
        Ok(Self { m, counts })
    }

    /// Count agreements in a dataset.
    pub fn from_dataset(d: &Dataset) -> Self {
        let n = d.n_vars();
        let mut counts = vec![0u64; n];
        for e in 0..d.m() {
            let flip = if d.label(e) { 0 } else { u64::MAX };
            for (w, &word) in d.row(e).iter().enumerate() {
                let mut agree = word ^ flip;
                if (w + 1) * 64 > n {
                    let valid = n - w * 64;
                    agree &= if valid == 64 { u64::MAX } else { (1u64 << valid) - 1 };
                }
                while agree != 0 {
                    let b = agree.trailing_zeros() as usize;
                    counts[w * 64 + b] += 1;
                    agree &= agree - 1;
                }
            }
        }
        Self { m: d.m() as u64, counts }
    }

    /// Draw the agreement counts of an `m`-example sample from `spec`
    /// directly.
    ///
    /// The counts are sufficient for both learners and are independent
    /// binomials, one per dependence block (members of a block copy the
    /// latent count), so this matches the distribution of
    /// `from_dataset(draw_dataset(spec, m, _))` without materializing the
    /// `m x N` sample. Variable `v`'s count is drawn from ChaCha8 stream `v`.
    pub fn sample(spec: &SourceSpec, m: u64, seed: u64) -> Result<Self> {
        spec.validate()?;
        if m == 0 {
            return Err(domain("m must be at least 1"));
        }
        let key = rng::StreamKey::new(seed);
        let draw = |v: usize, p: f64| -> u64 {
            let mut r: ChaCha8Rng = key.stream(v as u64);
            Binomial::new(m, p).expect("probability in (0, 1)").sample(&mut r)
        };
        let mut counts: Vec<u64> = (0..spec.n_vars).map(|v| if spec.relevant_var(v).is_some() { 0 } else { draw(v, 0.5) }).collect();
        for block in spec.blocks() {
            let leader = &spec.relevant[block[0]];
            let latent = draw(leader.index, rational::to_f64(rational::half() + leader.edge));
            for &j in &block {
                let var = &spec.relevant[j];
                counts[var.index] = if var.positive { latent } else { m - latent };
            }
        }
        Ok(Self { m, counts })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn n_vars(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Empirical edge `count/m - 1/2` of variable `i`.
    pub fn edge(&self, i: usize) -> Rational {
        Ratio::new(self.counts[i] as i64, self.m as i64) - rational::half()
    }
}

fn check_beta(beta: Rational) -> Result<()> {
    if beta < Rational::zero() || beta > rational::half() {
        return Err(domain(format!("beta = {} must lie in [0, 1/2]", rational::format_rational(&beta))));
    }
    Ok(())
}

/// Smallest agreement count `c` with `c >= m (1/2 + beta)`.
pub fn inclusion_count(m: u64, beta: Rational) -> u64 {
    rational::ceil_int(Rational::from_integer(m as i64) * (rational::half() + beta)).max(0) as u64
}

/// `M_beta` with default label 1.
pub fn select_model(table: &EdgeTable, beta: Rational) -> Result<VoteModel> {
    check_beta(beta)?;
    Ok(select_model_at(table, inclusion_count(table.m, beta)))
}

/// `M_beta` for an agreement-count cutoff.
pub fn select_model_at(table: &EdgeTable, min_count: u64) -> VoteModel {
    let candidates = table
        .counts
        .iter()
        .enumerate()
        .flat_map(|(i, &c)| {
            let pos = (c >= min_count).then_some(Feature::pos(i));
            let neg = (table.m - c >= min_count).then_some(Feature::neg(i));
            pos.into_iter().chain(neg)
        })
        .collect();
    VoteModel::with_cancellation(candidates, true)
}

/// `V_beta`: vote over the variables with empirical edge at least `beta`.
pub fn select_positive_model(table: &EdgeTable, beta: Rational) -> Result<VoteModel> {
    check_beta(beta)?;
    Ok(select_positive_at(table, inclusion_count(table.m, beta)))
}

/// `V_beta` for a real threshold such as an irrational critical edge.
pub fn select_positive_model_real(table: &EdgeTable, beta: f64) -> Result<VoteModel> {
    if !(0.0..=0.5).contains(&beta) {
        return Err(domain(format!("beta = {beta} must lie in [0, 1/2]")));
    }
    let min_count = (table.m as f64 * (0.5 + beta)).ceil() as u64;
    Ok(select_positive_at(table, min_count))
}

fn select_positive_at(table: &EdgeTable, min_count: u64) -> VoteModel {
    let features = table
        .counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c >= min_count)
        .map(|(i, _)| Feature::pos(i))
        .collect();
    VoteModel::new(features, true).expect("one feature per variable")
}

/// The `j`-th largest variable edge (1-based), ties ranked by lower index first.
pub fn rank_threshold(table: &EdgeTable, j: usize) -> Result<Rational> {
    let n = table.counts.len();
    if j < 1 || j > n {
        return Err(Error::Input(format!("rank {j} outside 1..={n}")));
    }
    Ok(table.edge(rank_order(table)[j - 1]))
}

/// Variable indices by decreasing edge, ties by increasing index.
pub fn rank_order(table: &EdgeTable) -> Vec<usize> {
    let mut order: Vec<usize> = (0..table.counts.len()).collect();
    order.sort_by(|&a, &b| table.counts[b].cmp(&table.counts[a]).then(a.cmp(&b)));
    order
}
