//! Portable seeded generator.
//!
//! A 64-bit linear congruential generator with the MMIX constants
//!
//! ```text
//! state ← state · 6364136223846793005 + 1442695040888963407   (mod 2^64)
//! ```
//!
//! Uniform doubles take the top 53 bits of the *new* state:
//! `u = (state >> 11) · 2^-53`, so `u ∈ [0, 1)`. Sub-streams are derived with
//! [`derive_seed`], which folds each tag into the state with one LCG step and
//! an xor-shift finaliser. Everything here is integer arithmetic with
//! wrapping semantics, so any language can reproduce the exact streams.

pub const LCG_MULTIPLIER: u64 = 6_364_136_223_846_793_005;
pub const LCG_INCREMENT: u64 = 1_442_695_040_888_963_407;

#[derive(Debug, Clone)]
pub struct Lcg64 {
    state: u64,
}

impl Lcg64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self
            .state
            .wrapping_mul(LCG_MULTIPLIER)
            .wrapping_add(LCG_INCREMENT);
        self.state
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `(0, 1]`.
    pub fn next_f64_open0(&mut self) -> f64 {
        1.0 - self.next_f64()
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Standard normal via Box–Muller (one draw per call, two uniforms).
    pub fn normal(&mut self) -> f64 {
        let u1 = self.next_f64_open0();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}

/// Mix a list of tags into a base seed.
pub fn derive_seed(base: u64, tags: &[u64]) -> u64 {
    let mut s = base ^ 0x9E37_79B9_7F4A_7C15;
    for &t in tags {
        s = (s ^ t)
            .wrapping_mul(LCG_MULTIPLIER)
            .wrapping_add(LCG_INCREMENT);
        s ^= s >> 29;
        s = s.wrapping_mul(0xBF58_476D_1CE4_E5B9);
        s ^= s >> 32;
    }
    s
}
