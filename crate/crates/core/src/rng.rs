//! Counter-based random streams.
//!
//! A [`StreamKey`] is a 64-bit key; `draw(counter)` hashes the key with the
//! counter through the SplitMix64 finalizer, so any draw can be computed
//! without state. Child keys are derived by mixing in an index, which gives
//! every (seed, replicate, setup, metric) tuple its own stream regardless of
//! evaluation order.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const CHILD_SALT: u64 = 0x632B_E59B_D9B4_E019;

/// SplitMix64 output function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey(u64);

impl StreamKey {
    pub fn new(seed: u64) -> Self {
        StreamKey(mix64(seed.wrapping_add(GOLDEN_GAMMA)))
    }

    pub fn raw(self) -> u64 {
        self.0
    }

    pub fn child(self, index: u64) -> Self {
        let salt = mix64(index.wrapping_mul(GOLDEN_GAMMA).wrapping_add(CHILD_SALT));
        StreamKey(mix64(self.0.rotate_left(23) ^ salt))
    }

    #[inline]
    pub fn draw(self, counter: u64) -> u64 {
        mix64(self.0 ^ mix64(counter.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
    }

    /// Uniform on (0, 1], 53-bit resolution.
    pub fn uniform_open_closed(self, counter: u64) -> f64 {
        ((self.draw(counter) >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on [0, 1), 53-bit resolution.
    pub fn uniform(self, counter: u64) -> f64 {
        (self.draw(counter) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// One standard normal variate via Box–Muller on draws 0 and 1 of this stream.
    pub fn standard_normal(self) -> f64 {
        let u1 = self.uniform_open_closed(0);
        let u2 = self.uniform(1);
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}
