//! Reproducible counter-based random streams.
//!
//! A stream is a SplitMix64 sequence: the `i`-th output is `mix(key + (i+1) * GAMMA)`
//! where `mix` is the SplitMix64 finalizer. Independent streams are derived from
//! `(seed, stream index)` by hashing both into the key, so trial `i` of any
//! experiment draws the same numbers regardless of scheduling or platform.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::rational::{to_f64, Rat};

const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Clone, Debug)]
pub struct StreamRng {
    key: u64,
    counter: u64,
}

impl StreamRng {
    pub fn new(seed: u64) -> Self {
        Self { key: mix(seed ^ 0x5eed_5eed_5eed_5eed), counter: 0 }
    }

    /// Independent stream `index` under `seed`.
    pub fn derive(seed: u64, index: u64) -> Self {
        Self { key: mix(mix(seed).wrapping_add(mix(index.wrapping_add(GAMMA)))), counter: 0 }
    }

    /// Child stream; does not advance `self`.
    pub fn fork(&self, index: u64) -> Self {
        Self::derive(self.key ^ self.counter, index)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix(self.key.wrapping_add(self.counter.wrapping_mul(GAMMA)))
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Unbiased uniform integer in `[0, n)` (Lemire's multiply-and-reject).
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "empty range");
        let threshold = n.wrapping_neg() % n;
        loop {
            let x = self.next_u64();
            let m = (x as u128) * (n as u128);
            if (m as u64) >= threshold {
                return (m >> 64) as u64;
            }
        }
    }

    /// Uniform integer in `[lo, hi]`.
    pub fn range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi);
        let span = (hi as i128 - lo as i128 + 1) as u64;
        (lo as i128 + self.below(span) as i128) as i64
    }

    /// `true` with probability exactly `p` when its denominator fits in 64 bits.
    pub fn bernoulli(&mut self, p: &Rat) -> bool {
        if p <= &Rat::zero() {
            return false;
        }
        if p >= &Rat::from_integer(BigInt::from(1)) {
            return true;
        }
        match (p.numer().to_u64(), p.denom().to_u64()) {
            (Some(num), Some(den)) => self.below(den) < num,
            _ => self.next_f64() < to_f64(p),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map({
            let mut r = StreamRng::derive(7, 3);
            move |_| r.next_u64()
        }).collect();
        let b: Vec<u64> = (0..4).map({
            let mut r = StreamRng::derive(7, 3);
            move |_| r.next_u64()
        }).collect();
        let c = StreamRng::derive(7, 4).next_u64();
        assert_eq!(a, b);
        assert_ne!(a[0], c);
    }

    #[test]
    fn below_stays_in_range() {
        let mut r = StreamRng::new(1);
        let mut seen = [0usize; 6];
        for _ in 0..6000 {
            seen[r.below(6) as usize] += 1;
        }
        assert!(seen.iter().all(|&c| c > 800 && c < 1200), "{seen:?}");
    }

    #[test]
    fn bernoulli_edges() {
        let mut r = StreamRng::new(2);
        assert!(!(0..100).any(|_| r.bernoulli(&rat(0, 1))));
        assert!((0..100).all(|_| r.bernoulli(&rat(1, 1))));
        let hits = (0..30000).filter(|_| r.bernoulli(&rat(1, 3))).count();
        assert!((9500..10500).contains(&hits), "{hits}");
    }
}
