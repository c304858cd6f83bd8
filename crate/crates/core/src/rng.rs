//! Deterministic per-image random streams.
//!
//! Generator `splitmix64-v1`:
//!
//! * `mix64(z)`: `z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
//!   z *= 0x94D049BB133111EB; z ^= z >> 31` (wrapping arithmetic).
//! * Stream key for image `i` under master seed `s`:
//!   `key = mix64(s ^ mix64(i + 0x9E3779B97F4A7C15))`.
//! * The `k`-th draw (k = 1, 2, ...) is `mix64(key + k * 0x9E3779B97F4A7C15)`,
//!   i.e. SplitMix64 seeded with `key`, addressed by counter.
//! * `next_f64`: top 53 bits of a draw times 2^-53, in `[0, 1)`.
//! * `below(n)`: rejection sampling, discarding draws `< (2^64 - n) mod n`,
//!   then `draw % n`.
//!
//! Changing any of the above changes every manifest; bump the name if so.

pub const GENERATOR: &str = "splitmix64-v1";

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-image stream key derived from the master seed and the image index.
#[inline]
pub fn stream_seed(master_seed: u64, stream_index: u64) -> u64 {
    mix64(master_seed ^ mix64(stream_index.wrapping_add(GAMMA)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RngStream {
    key: u64,
    index: u64,
    counter: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self::from_key(stream_seed(master_seed, stream_index), stream_index)
    }

    /// Rebuilds a stream from a recorded per-image key.
    pub fn from_key(key: u64, stream_index: u64) -> Self {
        RngStream {
            key,
            index: stream_index,
            counter: 0,
        }
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// Number of draws consumed so far.
    pub fn position(&self) -> u64 {
        self.counter
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GAMMA)))
    }

    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, n)`. `n` must be non-zero.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let threshold = n.wrapping_neg() % n;
        loop {
            let x = self.next_u64();
            if x >= threshold {
                return x % n;
            }
        }
    }

    /// Uniform integer in `[lo, hi]`.
    pub fn range_inclusive(&mut self, lo: u32, hi: u32) -> u32 {
        debug_assert!(lo <= hi);
        lo + self.below((hi - lo) as u64 + 1) as u32
    }

    /// Uniform real in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// +1 or -1 with equal probability.
    pub fn sign(&mut self) -> i8 {
        if self.next_u64() >> 63 == 0 {
            1
        } else {
            -1
        }
    }
}
