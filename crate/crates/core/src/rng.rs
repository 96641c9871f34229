//! SplitMix64, the small deterministic generator used for simulation and
//! label shuffling. Every caller seeds it explicitly; there is no global
//! state.

use num_bigint::BigUint;
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in `0..n` by rejection. Panics if `n == 0`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "empty range");
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % n;
            }
        }
    }

    /// Uniform in `0..n` for arbitrary-size `n`. Panics if `n` is zero.
    pub fn below_big(&mut self, n: &BigUint) -> BigUint {
        assert!(!n.is_zero(), "empty range");
        let bits = n.bits();
        loop {
            let mut x = BigUint::zero();
            let mut remaining = bits;
            while remaining > 0 {
                let take = remaining.min(64);
                let word = if take == 64 { self.next_u64() } else { self.next_u64() >> (64 - take) };
                x = (x << take) | BigUint::from(word);
                remaining -= take;
            }
            if &x < n {
                return x;
            }
        }
    }

    /// Fisher–Yates.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}
