//! SplitMix64, the only randomness source in the crate.
//!
//! The stream is part of the file-format contract: a uniform draw is
//! `(next_u64 >> 11) * 2^-53`, and categorical sampling walks cumulative
//! weights in feature declaration order. Ports in other languages must
//! reproduce the same draws bit for bit.

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Draws an index from `weights` (non-negative, not necessarily
    /// normalized). Always consumes exactly one draw. Returns `None` when
    /// every weight is zero.
    pub fn categorical(&mut self, weights: &[f64]) -> Option<usize> {
        let u = self.next_f64();
        pick_cumulative(weights, u)
    }

    /// Uniform index below `n`; consumes one draw.
    pub fn index(&mut self, n: usize) -> usize {
        let u = self.next_f64();
        ((u * n as f64) as usize).min(n.saturating_sub(1))
    }
}

/// Index selected by `u` in `[0, 1)` against cumulative `weights`.
pub fn pick_cumulative(weights: &[f64], u: f64) -> Option<usize> {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return None;
    }
    let target = u * total;
    let mut acc = 0.0;
    let mut last_positive = None;
    for (i, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        last_positive = Some(i);
        if target < acc {
            return Some(i);
        }
    }
    // rounding can leave target == total
    last_positive
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_stream_for_seed_zero() {
        // Published SplitMix64 outputs for seed 0.
        let mut rng = SplitMix64::new(0);
        assert_eq!(rng.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(rng.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(rng.next_u64(), 0x06C4_5D18_8009_454F);
    }

    #[test]
    fn uniform_draws_stay_in_unit_interval() {
        let mut rng = SplitMix64::new(42);
        for _ in 0..10_000 {
            let u = rng.next_f64();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn categorical_skips_zero_weights() {
        assert_eq!(pick_cumulative(&[0.0, 1.0, 0.0], 0.0), Some(1));
        assert_eq!(pick_cumulative(&[0.0, 1.0, 0.0], 0.999_999), Some(1));
        assert_eq!(pick_cumulative(&[0.0, 0.0], 0.5), None);
        assert_eq!(pick_cumulative(&[0.25, 0.75], 0.2), Some(0));
        assert_eq!(pick_cumulative(&[0.25, 0.75], 0.25), Some(1));
    }

    #[test]
    fn same_seed_same_stream() {
        let mut a = SplitMix64::new(7);
        let mut b = SplitMix64::new(7);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }
}
