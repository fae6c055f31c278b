//! Reproducible random draws for instance generation and randomized search.
//!
//! The stream is ChaCha8 (a counter-based generator with a fixed, portable
//! output sequence) seeded through `SeedableRng::seed_from_u64`. Uniform
//! floats are `(next_u64 >> 11) / 2^53`; Gaussians use Box-Muller on those
//! uniforms. Instances are therefore bit-for-bit reproducible from their seed
//! on every platform.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::vector::orthonormalize;
use crate::linalg::{ComplexMatrix, Field};
use crate::scalar::{cx, Cx, Real};

const TWO_POW_53: f64 = 9_007_199_254_740_992.0;

#[derive(Debug, Clone)]
pub struct InstanceRng {
    inner: ChaCha8Rng,
}

impl InstanceRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 random mantissa bits.
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 / TWO_POW_53
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `lo..=hi`.
    pub fn int_in(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.uniform() * (hi - lo + 1) as f64) as usize
    }

    pub fn normal(&mut self) -> f64 {
        // 1 - u lies in (0, 1], so the logarithm is finite
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Standard Gaussian scalar of the given field (unit expected modulus
    /// squared for complex draws).
    pub fn scalar<R: Real>(&mut self, field: Field) -> Cx<R> {
        match field {
            Field::Real => cx(R::lit(self.normal()), R::zero()),
            Field::Complex => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                cx(R::lit(s * self.normal()), R::lit(s * self.normal()))
            }
        }
    }

    pub fn vector<R: Real>(&mut self, n: usize, field: Field) -> Vec<Cx<R>> {
        (0..n).map(|_| self.scalar(field)).collect()
    }

    pub fn unit_vector<R: Real>(&mut self, n: usize, field: Field) -> Vec<Cx<R>> {
        loop {
            let v = self.vector::<R>(n, field);
            if let Some(u) = crate::linalg::vector::normalized(&v) {
                return u;
            }
        }
    }

    /// Gaussian matrix with i.i.d. entries.
    pub fn matrix<R: Real>(&mut self, rows: usize, cols: usize, field: Field) -> ComplexMatrix<R> {
        let data = (0..rows * cols).map(|_| self.scalar(field)).collect();
        ComplexMatrix::new(rows, cols, field, data).expect("finite Gaussian draws")
    }

    /// Haar-like random unitary (orthogonal for the real field) from the
    /// Gram-Schmidt QR of a Gaussian matrix.
    pub fn unitary<R: Real>(&mut self, n: usize, field: Field) -> ComplexMatrix<R> {
        loop {
            let g = self.matrix::<R>(n, n, field);
            let (q, kept) = orthonormalize(&g.columns(), R::lit(1e-8));
            if kept.len() == n {
                return ComplexMatrix::from_columns(n, &q, field);
            }
        }
    }

    /// Point of the probability simplex drawn from a flat Dirichlet.
    pub fn simplex(&mut self, k: usize) -> Vec<f64> {
        let e: Vec<f64> = (0..k).map(|_| -(1.0 - self.uniform()).ln() + 1e-3).collect();
        let s: f64 = e.iter().sum();
        e.iter().map(|x| x / s).collect()
    }
}
