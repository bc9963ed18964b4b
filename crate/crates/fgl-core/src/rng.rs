//! Deterministic pseudo-random generator for seeded test corpora.
//! SplitMix64: tiny, stable across platforms and crate versions, which
//! is what byte-identical reruns require.

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, n)` by rejection.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % n;
            }
        }
    }

    /// A unit modulo the odd prime `ell`, i.e. uniform in `[1, ell)`.
    pub fn unit(&mut self, ell: u64) -> u64 {
        1 + self.below(ell - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_spread() {
        let mut a = SplitMix64::new(42);
        let mut b = SplitMix64::new(42);
        let xs: alloc::vec::Vec<u64> = (0..16).map(|_| a.next_u64()).collect();
        let ys: alloc::vec::Vec<u64> = (0..16).map(|_| b.next_u64()).collect();
        assert_eq!(xs, ys);
        let mut counts = [0usize; 5];
        let mut r = SplitMix64::new(7);
        for _ in 0..5000 {
            counts[r.below(5) as usize] += 1;
        }
        assert!(counts.iter().all(|&c| c > 800));
    }
}
