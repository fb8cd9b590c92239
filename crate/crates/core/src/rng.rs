//! Counter-based randomness.
//!
//! Every random draw is addressed by `(seed, stream, slot)`: the seed fixes a
//! ChaCha8 key, the stream selects an independent keystream (one per example)
//! and the slot is the 64-bit word position within it. A draw therefore does
//! not depend on which worker produced it or in what order.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Keyed source of independent ChaCha8 streams.
#[derive(Clone, Debug)]
pub struct StreamKey {
    seed: [u8; 32],
}

impl StreamKey {
    pub fn new(seed: u64) -> Self {
        // seed_from_u64 expands the seed through PCG32; the resulting key is
        // reused for every stream.
        let mut key = [0u8; 32];
        ChaCha8Rng::seed_from_u64(seed).fill_bytes(&mut key);
        Self { seed: key }
    }

    /// A generator positioned at slot 0 of `stream`.
    pub fn stream(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.seed);
        rng.set_stream(stream);
        rng
    }

    /// The 64-bit word at `slot` of `stream`.
    pub fn word(&self, stream: u64, slot: u64) -> u64 {
        let mut rng = self.stream(stream);
        seek(&mut rng, slot);
        rng.next_u64()
    }
}

/// Position `rng` so that the next `next_u64` returns 64-bit slot `slot`.
pub fn seek(rng: &mut ChaCha8Rng, slot: u64) {
    rng.set_word_pos(2 * slot as u128);
}

/// `true` with probability `num/den`, decided from a uniform 64-bit word.
///
/// `floor(word * den / 2^64)` is uniform on `0..den` up to a bias of
/// `den / 2^64`, so rational probabilities are honored without rounding
/// them to binary fractions.
#[inline]
pub fn bernoulli_word(word: u64, num: u64, den: u64) -> bool {
    (((word as u128) * (den as u128)) >> 64) < num as u128
}

/// Derive the seed of child `index` from `master`.
pub fn sub_seed(master: u64, index: u64) -> u64 {
    StreamKey::new(master).word(index, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_access_matches_sequential() {
        let key = StreamKey::new(42);
        let mut seq = key.stream(7);
        let words: Vec<u64> = (0..40).map(|_| seq.next_u64()).collect();
        for slot in [0u64, 1, 5, 8, 15, 16, 17, 31, 39] {
            assert_eq!(key.word(7, slot), words[slot as usize]);
        }
        let mut rng = key.stream(7);
        seek(&mut rng, 13);
        assert_eq!(rng.next_u64(), words[13]);
        assert_eq!(rng.next_u64(), words[14]);
    }

    #[test]
    fn streams_differ() {
        let key = StreamKey::new(1);
        assert_ne!(key.word(0, 0), key.word(1, 0));
        assert_ne!(sub_seed(1, 0), sub_seed(1, 1));
        assert_ne!(sub_seed(1, 0), sub_seed(2, 0));
    }

    #[test]
    fn bernoulli_word_edges() {
        assert!(bernoulli_word(0, 1, 2));
        assert!(bernoulli_word((1u64 << 63) - 1, 1, 2));
        assert!(!bernoulli_word(1u64 << 63, 1, 2));
        assert!(!bernoulli_word(u64::MAX, 9, 10));
        assert!(!bernoulli_word(0, 0, 10));
    }
}
