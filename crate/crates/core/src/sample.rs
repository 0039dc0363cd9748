//! Seeded random algebra elements.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::basis::{algebra_dim, check_dim, norm, AlgebraVector};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SampleMode {
    /// Every coefficient standard normal.
    Gaussian,
    /// Uniform direction, fixed norm.
    Sphere(f64),
    /// Uniform direction, norm uniform on `(0, max]`.
    Ball(f64),
}

pub struct Sampler {
    n: usize,
    mode: SampleMode,
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(n: usize, seed: u64, mode: SampleMode) -> Result<Self> {
        check_dim(n)?;
        Ok(Self { n, mode, rng: ChaCha8Rng::seed_from_u64(seed) })
    }

    pub fn next_vector(&mut self) -> AlgebraVector {
        let d = algebra_dim(self.n);
        let mut v: Vec<f64> = (0..d).map(|_| self.rng.sample(StandardNormal)).collect();
        let target = match self.mode {
            SampleMode::Gaussian => None,
            SampleMode::Sphere(r) => Some(r),
            // 1 - U(0,1] avoids the zero norm
            SampleMode::Ball(max) => Some(max * (1.0 - self.rng.gen::<f64>())),
        };
        if let Some(r) = target {
            let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x *= r / len);
        }
        AlgebraVector::new(self.n, v).expect("sampled coefficients are finite")
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }
}

impl Iterator for Sampler {
    type Item = AlgebraVector;

    fn next(&mut self) -> Option<AlgebraVector> {
        Some(self.next_vector())
    }
}

/// Rescales `av` to norm `r`; the zero vector is returned unchanged.
pub fn with_norm(av: &AlgebraVector, r: f64) -> AlgebraVector {
    let v = norm(av);
    if v == 0.0 {
        av.clone()
    } else {
        av.scaled(r / v)
    }
}
