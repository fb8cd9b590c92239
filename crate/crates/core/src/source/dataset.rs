use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use super::spec::{strength_fraction, SourceSpec};
use crate::error::{domain, Error, Result};
use crate::rng::{self, StreamKey};

/// How one variable is drawn: it reads the latent agreement bit drawn at
/// `leader`'s slot with probability `num/den`, and agrees with the label
/// iff that bit equals `positive`.
#[derive(Clone, Copy, Debug)]
struct VarPlan {
    leader: usize,
    num: u64,
    den: u64,
    positive: bool,
}

/// Seeded, order-independent example generator for a [`SourceSpec`].
///
/// Example `e` reads ChaCha8 stream `e` of the seed's key: slot 0 decides
/// the label and slot `v + 1` the latent bit of variable `v`.
#[derive(Clone, Debug)]
pub struct Sampler {
    key: StreamKey,
    plan: Vec<VarPlan>,
}

impl Sampler {
    pub fn new(spec: &SourceSpec, seed: u64) -> Self {
        let mut plan: Vec<VarPlan> =
            (0..spec.n_vars).map(|v| VarPlan { leader: v, num: 1, den: 2, positive: true }).collect();
        for block in spec.blocks() {
            let leader = spec.relevant[block[0]].index;
            let (num, den) = strength_fraction(spec.relevant[block[0]].edge);
            for &j in &block {
                let var = &spec.relevant[j];
                plan[var.index] = VarPlan { leader, num, den, positive: var.positive };
            }
        }
        Self { key: StreamKey::new(seed), plan }
    }

    pub fn n_vars(&self) -> usize {
        self.plan.len()
    }

    /// Draw example `e` in full: its label and the packed row of values.
    pub fn draw_row(&self, e: u64, row: &mut [u64]) -> bool {
        let mut rng = self.key.stream(e);
        let label = rng::bernoulli_word(rng.next_u64(), 1, 2);
        let mut latent = vec![false; self.plan.len()];
        row.iter_mut().for_each(|w| *w = 0);
        for (v, p) in self.plan.iter().enumerate() {
            let word = rng.next_u64();
            let bit = if p.leader == v { rng::bernoulli_word(word, p.num, p.den) } else { latent[p.leader] };
            latent[v] = bit;
            let agrees = bit == p.positive;
            if agrees == label {
                row[v / 64] |= 1 << (v % 64);
            }
        }
        label
    }

    /// Draw the label of example `e` and the values of `vars` only.
    ///
    /// Produces exactly the values [`Sampler::draw_row`] would.
    pub fn draw_vars(&self, e: u64, vars: &[usize], values: &mut Vec<bool>) -> bool {
        let mut rng = self.key.stream(e);
        let label = rng::bernoulli_word(rng.next_u64(), 1, 2);
        // next slot the generator would return
        let mut pos: u64 = 1;
        let mut leaders: Vec<usize> = vars.iter().map(|&v| self.plan[v].leader).collect();
        leaders.sort_unstable();
        leaders.dedup();
        let mut latent = Vec::with_capacity(leaders.len());
        for &l in &leaders {
            let slot = l as u64 + 1;
            if slot - pos > 32 {
                rng::seek(&mut rng, slot);
            } else {
                for _ in pos..slot {
                    rng.next_u64();
                }
            }
            let p = self.plan[l];
            latent.push(rng::bernoulli_word(rng.next_u64(), p.num, p.den));
            pos = slot + 1;
        }
        values.clear();
        values.extend(vars.iter().map(|&v| {
            let p = self.plan[v];
            let bit = latent[leaders.binary_search(&p.leader).expect("leader drawn")];
            (bit == p.positive) == label
        }));
        label
    }
}

/// `m` labeled examples over `n_vars` boolean variables, bit-packed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Dataset {
    n_vars: usize,
    n_relevant: usize,
    m: usize,
    seed: u64,
    spec_hash: u64,
    labels: Vec<bool>,
    /// Row-major, `words_per_row` little-endian bit words per example.
    rows: Vec<u64>,
}

pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

impl Dataset {
    /// Build from explicit rows, mainly for hand-made examples.
    pub fn from_rows(labels: Vec<bool>, values: &[Vec<bool>]) -> Result<Self> {
        if labels.is_empty() {
            return Err(domain("a dataset needs at least one example"));
        }
        if values.len() != labels.len() {
            return Err(Error::Input(format!("{} rows for {} labels", values.len(), labels.len())));
        }
        let n_vars = values[0].len();
        let wpr = words_for(n_vars);
        let mut rows = vec![0u64; wpr * labels.len()];
        for (e, row) in values.iter().enumerate() {
            if row.len() != n_vars {
                return Err(Error::Input(format!("row {e} has {} values, expected {n_vars}", row.len())));
            }
            for (v, &x) in row.iter().enumerate() {
                if x {
                    rows[e * wpr + v / 64] |= 1 << (v % 64);
                }
            }
        }
        Ok(Self { n_vars, n_relevant: 0, m: labels.len(), seed: 0, spec_hash: 0, labels, rows })
    }

    pub(crate) fn from_parts(
        n_vars: usize,
        n_relevant: usize,
        seed: u64,
        spec_hash: u64,
        labels: Vec<bool>,
        rows: Vec<u64>,
    ) -> Result<Self> {
        if labels.is_empty() {
            return Err(domain("a dataset needs at least one example"));
        }
        if rows.len() != labels.len() * words_for(n_vars) {
            return Err(Error::Format("row storage does not match dimensions".into()));
        }
        Ok(Self { n_vars, n_relevant, m: labels.len(), seed, spec_hash, labels, rows })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    /// Relevant-variable count recorded from the generating spec (0 if unknown).
    pub fn n_relevant(&self) -> usize {
        self.n_relevant
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn spec_hash(&self) -> u64 {
        self.spec_hash
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn label(&self, e: usize) -> bool {
        self.labels[e]
    }

    pub fn row(&self, e: usize) -> &[u64] {
        let wpr = words_for(self.n_vars);
        &self.rows[e * wpr..(e + 1) * wpr]
    }

    pub fn value(&self, e: usize, v: usize) -> bool {
        self.row(e)[v / 64] >> (v % 64) & 1 == 1
    }

    /// Values of example `e` as booleans.
    pub fn example(&self, e: usize) -> Vec<bool> {
        (0..self.n_vars).map(|v| self.value(e, v)).collect()
    }
}

/// Draw `m` examples; identical `(spec, m, seed)` give identical datasets.
pub fn draw_dataset(spec: &SourceSpec, m: usize, seed: u64) -> Result<Dataset> {
    spec.validate()?;
    if m < 1 {
        return Err(domain("m must be at least 1"));
    }
    let sampler = Sampler::new(spec, seed);
    let wpr = words_for(spec.n_vars);
    let drawn: Vec<(bool, Vec<u64>)> = (0..m as u64)
        .into_par_iter()
        .map(|e| {
            let mut row = vec![0u64; wpr];
            let label = sampler.draw_row(e, &mut row);
            (label, row)
        })
        .collect();
    let mut labels = Vec::with_capacity(m);
    let mut rows = Vec::with_capacity(m * wpr);
    for (label, row) in drawn {
        labels.push(label);
        rows.extend(row);
    }
    Dataset::from_parts(spec.n_vars, spec.n_relevant(), seed, spec.fingerprint(), labels, rows)
}
