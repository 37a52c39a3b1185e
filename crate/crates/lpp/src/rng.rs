//! Counter-based randomness.
//!
//! Every random quantity in the library is a pure function of a master seed
//! and an integer key (edge endpoints, trial index, resample index, ...).
//! There is no mutable generator state to share, so results are independent
//! of query order and of how work is split across threads, and a window of
//! any size needs O(1) memory.
//!
//! The mixer is the standard 64-bit finalizer used by SplitMix64: invertible,
//! well avalanched, and cheap enough to sit on the edge-query hot path.

/// SplitMix64 finalizer round on `x + GOLDEN_GAMMA`.
#[inline]
pub fn mix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Absorbs one key word into a running state.
#[inline]
pub fn absorb(state: u64, word: u64) -> u64 {
    mix64(state ^ word)
}

/// Stream tags keeping unrelated uses of the same key decorrelated.
pub mod stream {
    pub const EDGE_PRESENCE: u64 = 0x01;
    pub const EDGE_WEIGHT: u64 = 0x02;
    pub const TRIAL: u64 = 0x03;
    pub const CONTINUUM_INCREMENT: u64 = 0x04;
    pub const CONTINUUM_LEFT: u64 = 0x05;
    pub const CONTINUUM_RIGHT: u64 = 0x06;
    pub const BOOTSTRAP: u64 = 0x07;
    pub const SCRATCH: u64 = 0x08;
}

/// Raw 64-bit word for the edge `(i, j)` on the given stream.
#[inline]
pub fn edge_word(seed: u64, i: u64, j: u64, tag: u64) -> u64 {
    // i and j are absorbed through separate rounds so that (i, j) and
    // (i', j') with i ^ j == i' ^ j' do not collide.
    absorb(absorb(absorb(seed, i), j), tag)
}

/// Uniform variate in the open interval (0, 1), never exactly 0 or 1.
///
/// Uses the top 52 bits shifted to grid midpoints: every value (2k+1)/2^53 is
/// exactly representable, so the range is [2^-53, 1 - 2^-53] with no rounding
/// onto the endpoints.
#[inline]
pub fn unit_open(bits: u64) -> f64 {
    ((bits >> 12) as f64 + 0.5) * (1.0 / 4_503_599_627_370_496.0)
}

/// Per-trial derived seed; trials are decorrelated streams of the master.
#[inline]
pub fn trial_seed(master_seed: u64, trial_index: u64) -> u64 {
    absorb(absorb(master_seed, stream::TRIAL), trial_index)
}

/// Sequential counter stream for bulk draws (bootstrap resampling, test
/// scaffolding). Equivalent to SplitMix64 seeded with `seed`.
#[derive(Debug, Clone)]
pub struct Counter {
    seed: u64,
    count: u64,
}

impl Counter {
    pub fn new(seed: u64, tag: u64) -> Self {
        Counter {
            seed: absorb(seed, tag),
            count: 0,
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let word = absorb(self.seed, self.count);
        self.count += 1;
        word
    }

    /// Uniform in (0, 1).
    #[inline]
    pub fn next_unit(&mut self) -> f64 {
        unit_open(self.next_u64())
    }

    /// Uniform index in `0..bound` (rejection-free multiply-shift; bias is
    /// below 2^-32 for the bounds used here).
    #[inline]
    pub fn next_index(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0);
        ((self.next_u64() as u128 * bound as u128) >> 64) as usize
    }
}
