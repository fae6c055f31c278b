//! Cyclic Jacobi eigensolver for dense Hermitian matrices.
//!
//! Each rotation first applies a diagonal phase so the pivot block becomes
//! real symmetric, then a classical Jacobi rotation annihilates it. Real input
//! stays real: the phase is computed as `conj(a_pq)/|a_pq|`, which is exactly
//! `+-1` for real pivots.

use crate::error::{Error, Result};
use crate::linalg::matrix::ComplexMatrix;
use crate::scalar::{czero, floor_tol, re, Cx, Real};

const MAX_SWEEPS: usize = 64;

/// Spectral decomposition `H = V diag(values) V*` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermEig<R> {
    /// Eigenvalues in descending order.
    pub values: Vec<R>,
    /// Orthonormal eigenvectors as columns, matching `values`.
    pub vectors: ComplexMatrix<R>,
}

impl<R: Real> HermEig<R> {
    pub fn vector(&self, i: usize) -> Vec<Cx<R>> {
        self.vectors.column(i)
    }

    pub fn max(&self) -> R {
        self.values[0]
    }

    pub fn min(&self) -> R {
        *self.values.last().expect("nonempty spectrum")
    }

    /// Number of leading eigenvalues within `abs_tol` of the largest.
    pub fn top_multiplicity(&self, abs_tol: R) -> usize {
        let top = self.values[0];
        self.values.iter().take_while(|&&v| v >= top - abs_tol).count()
    }

    /// Rebuilds `V diag(values) V*`.
    pub fn reconstruct(&self) -> ComplexMatrix<R> {
        let n = self.vectors.rows();
        let k = self.values.len();
        ComplexMatrix::from_fn(n, n, self.vectors.field(), |i, j| {
            (0..k).fold(czero(), |acc, l| {
                acc + self.vectors.get(i, l) * self.vectors.get(j, l).conj() * self.values[l]
            })
        })
    }
}

/// Full eigendecomposition of a Hermitian matrix.
///
/// The input is symmetrized before iterating; an asymmetry above `1e-12`
/// (relative, Frobenius) is rejected.
pub fn herm_eig<R: Real>(h: &ComplexMatrix<R>) -> Result<HermEig<R>> {
    check_hermitian(h)?;
    Ok(jacobi(h, true))
}

/// Eigenvalues only (descending), skipping eigenvector accumulation.
pub fn herm_eigvals<R: Real>(h: &ComplexMatrix<R>) -> Result<Vec<R>> {
    check_hermitian(h)?;
    Ok(jacobi(h, false).values)
}

fn check_hermitian<R: Real>(h: &ComplexMatrix<R>) -> Result<()> {
    if !h.is_square() {
        return Err(Error::NonSquare {
            rows: h.rows(),
            cols: h.cols(),
        });
    }
    let defect = h.hermitian_defect();
    if defect > floor_tol::<R>(1e-12) {
        return Err(Error::NotHermitian {
            asymmetry: defect.as_f64(),
        });
    }
    Ok(())
}

/// Jacobi iteration on an input already known to be (numerically) Hermitian.
/// With `want_vectors == false` the returned vector matrix is the identity.
pub(crate) fn jacobi<R: Real>(h: &ComplexMatrix<R>, want_vectors: bool) -> HermEig<R> {
    let n = h.rows();
    let field = h.field();
    let half = R::lit(0.5);
    let mut a: Vec<Cx<R>> = vec![czero(); n * n];
    for i in 0..n {
        a[i * n + i] = re(h.get(i, i).re);
        for j in (i + 1)..n {
            let z = (h.get(i, j) + h.get(j, i).conj()) * half;
            a[i * n + j] = z;
            a[j * n + i] = z.conj();
        }
    }
    let mut v: Vec<Cx<R>> = vec![czero(); if want_vectors { n * n } else { 0 }];
    if want_vectors {
        for i in 0..n {
            v[i * n + i] = re(R::one());
        }
    }

    let scale = a.iter().fold(R::zero(), |m, z| m.max(z.norm()));
    if scale > R::zero() && n > 1 {
        let eps = R::epsilon();
        let skip = eps * scale * R::lit(1e-3);
        for _ in 0..MAX_SWEEPS {
            let mut off = R::zero();
            for p in 0..n {
                for q in (p + 1)..n {
                    off = off + (a[p * n + q] / scale).norm_sqr();
                }
            }
            if off.sqrt() <= eps {
                break;
            }
            let mut rotated = false;
            for p in 0..n - 1 {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    let r = apq.norm();
                    if r <= skip {
                        continue;
                    }
                    rotated = true;
                    rotate(&mut a, &mut v, n, p, q, apq, r, want_vectors);
                }
            }
            if !rotated {
                break;
            }
        }
    }

    let diag: Vec<R> = (0..n).map(|i| a[i * n + i].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    // stable: ties keep original index order
    order.sort_by(|&x, &y| diag[y].partial_cmp(&diag[x]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = if want_vectors {
        ComplexMatrix::from_fn(n, n, field, |i, j| v[i * n + order[j]])
    } else {
        ComplexMatrix::identity(n, field)
    };
    HermEig { values, vectors }
}

#[allow(clippy::too_many_arguments)]
fn rotate<R: Real>(a: &mut [Cx<R>], v: &mut [Cx<R>], n: usize, p: usize, q: usize, apq: Cx<R>, r: R, want_vectors: bool) {
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    // phase e^{-i phi} with a_pq = r e^{i phi}
    let ph = apq.conj() / r;
    let theta = (aqq - app) / (R::lit(2.0) * r);
    let t = if theta.is_infinite() {
        R::zero()
    } else {
        let sgn = if theta >= R::zero() { R::one() } else { -R::one() };
        sgn / (theta.abs() + (theta * theta + R::one()).sqrt())
    };
    let c = R::one() / (t * t + R::one()).sqrt();
    let s = t * c;
    let s_ph = ph * s;
    let c_ph = ph * c;
    // A <- A G with G_pp = c, G_qp = -s ph, G_pq = s, G_qq = c ph
    for i in 0..n {
        let aip = a[i * n + p];
        let aiq = a[i * n + q];
        a[i * n + p] = aip * c - aiq * s_ph;
        a[i * n + q] = aip * s + aiq * c_ph;
    }
    // A <- G* A
    let s_phc = s_ph.conj();
    let c_phc = c_ph.conj();
    for j in 0..n {
        let apj = a[p * n + j];
        let aqj = a[q * n + j];
        a[p * n + j] = apj * c - aqj * s_phc;
        a[q * n + j] = apj * s + aqj * c_phc;
    }
    a[p * n + q] = czero();
    a[q * n + p] = czero();
    a[p * n + p].im = R::zero();
    a[q * n + q].im = R::zero();
    if want_vectors {
        for i in 0..n {
            let vip = v[i * n + p];
            let viq = v[i * n + q];
            v[i * n + p] = vip * c - viq * s_ph;
            v[i * n + q] = vip * s + viq * c_ph;
        }
    }
}
