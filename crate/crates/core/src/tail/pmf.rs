//! Binomial probabilities in log space.
//!
//! The pmf uses Loader's saddle-point form: log-gamma differences are
//! replaced by Stirling remainders (`stirlerr`) and the deviance term `bd0`,
//! which keeps near full relative precision far into the tails and for
//! trial counts well beyond 10^6.

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// `ln n! - [(n + 1/2) ln n - n + ln(2 pi)/2]` for n = 0..=15.
const STIRLERR_SMALL: [f64; 16] = [
    0.0,
    0.081_061_466_795_327_258_22,
    0.041_340_695_955_409_294_09,
    0.027_677_925_684_998_339_15,
    0.020_790_672_103_765_093_11,
    0.016_644_691_189_821_192_16,
    0.013_876_128_823_070_747_99,
    0.011_896_709_945_891_770_1,
    0.010_411_265_261_972_096_5,
    0.009_255_462_182_712_732_918,
    0.008_330_563_433_362_871_256,
    0.007_573_675_487_951_840_795,
    0.006_942_840_107_209_529_866,
    0.006_408_994_188_004_207_068,
    0.005_951_370_112_758_847_736,
    0.005_554_733_551_962_801_371,
];

fn stirlerr(n: f64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if n <= 15.0 {
        return STIRLERR_SMALL[n as usize];
    }
    let nn = n * n;
    if n > 500.0 {
        (S0 - S1 / nn) / n
    } else if n > 80.0 {
        (S0 - (S1 - S2 / nn) / nn) / n
    } else if n > 35.0 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
    }
}

/// Deviance `x ln(x/np) + np - x`, evaluated without cancellation near x = np.
fn bd0(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let mut v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        let mut j = 1.0;
        loop {
            ej *= v;
            let s1 = s + ej / (2.0 * j + 1.0);
            if s1 == s {
                return s1;
            }
            s = s1;
            j += 1.0;
        }
    }
    x * (x / np).ln() + np - x
}

/// `ln P(Bin(n, p) = x)`; `q` must equal `1 - p` (passed separately so the
/// caller can supply it without rounding).
pub fn ln_binom_pmf(x: u64, n: u64, p: f64, q: f64) -> f64 {
    if x > n {
        return f64::NEG_INFINITY;
    }
    if p == 0.0 {
        return if x == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if q == 0.0 {
        return if x == n { 0.0 } else { f64::NEG_INFINITY };
    }
    let nf = n as f64;
    if x == 0 {
        if n == 0 {
            return 0.0;
        }
        return if p < 0.1 { -bd0(nf, nf * q) - nf * p } else { nf * q.ln() };
    }
    if x == n {
        return if q < 0.1 { -bd0(nf, nf * p) - nf * q } else { nf * p.ln() };
    }
    let xf = x as f64;
    let lc = stirlerr(nf) - stirlerr(xf) - stirlerr(nf - xf) - bd0(xf, nf * p) - bd0(nf - xf, nf * q);
    let lf = LN_2PI + xf.ln() + (-xf / nf).ln_1p();
    lc - 0.5 * lf
}

pub fn binom_pmf(x: u64, n: u64, p: f64) -> f64 {
    ln_binom_pmf(x, n, p, 1.0 - p).exp()
}

/// Dense pmf vector of Bin(n, p), indices 0..=n.
pub fn binom_pmf_vec(n: u64, p: f64) -> Vec<f64> {
    let q = 1.0 - p;
    (0..=n).map(|x| ln_binom_pmf(x, n, p, q).exp()).collect()
}

/// Index of a mode of Bin(n, p).
pub fn binom_mode(n: u64, p: f64) -> u64 {
    (((n + 1) as f64) * p).floor().min(n as f64) as u64
}

/// Neumaier-compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// `P(lo <= Bin(n, p) <= hi)`, summed from the smallest terms inward.
///
/// The pmf is unimodal, so the terms on either side of the mode are
/// monotone; each side is accumulated starting from its far end.
pub fn binom_range_prob(n: u64, p: f64, q: f64, lo: u64, hi: u64) -> f64 {
    if lo > hi || lo > n {
        return 0.0;
    }
    let hi = hi.min(n);
    if lo == 0 && hi == n {
        return 1.0;
    }
    let mode = binom_mode(n, p);
    let term = |j: u64| ln_binom_pmf(j, n, p, q).exp();
    let mut acc = CompensatedSum::default();
    // increasing run lo..min(mode, hi+1)
    let rise_end = mode.clamp(lo, hi + 1);
    for j in lo..rise_end {
        acc.add(term(j));
    }
    // decreasing run, added from hi down to rise_end
    let mut j = hi;
    while j >= rise_end {
        acc.add(term(j));
        if j == 0 {
            break;
        }
        j -= 1;
    }
    acc.value().min(1.0)
}
