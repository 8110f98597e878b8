//! Deterministic pseudo-random vectors for spot checks; fixed seeds keep
//! reports byte-identical across runs.

use fockforge_core::tensor_core::C64;

pub struct XorShift(u64);

impl XorShift {
    pub fn new(seed: u64) -> Self {
        XorShift(seed.max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    /// Uniform in [-0.5, 0.5).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    }

    pub fn complex_vec(&mut self, dim: usize) -> Vec<C64> {
        (0..dim).map(|_| C64::new(self.next_f64(), self.next_f64())).collect()
    }

    pub fn next_usize(&mut self, bound: usize) -> usize {
        (self.next_u64() % bound.max(1) as u64) as usize
    }
}
