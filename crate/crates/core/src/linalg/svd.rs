//! Singular value decomposition through the Hermitian eigensolver.

use crate::linalg::eig::jacobi;
use crate::linalg::matrix::ComplexMatrix;
use crate::linalg::vector::{complete_basis, norm, orthonormalize};
use crate::scalar::{Cx, Real};

/// Thin SVD `M = U diag(values) V*` with `p = min(rows, cols)` triplets.
#[derive(Debug, Clone)]
pub struct Svd<R> {
    /// Singular values, descending.
    pub values: Vec<R>,
    /// Left singular vectors (`rows x p`).
    pub u: ComplexMatrix<R>,
    /// Right singular vectors (`cols x p`).
    pub v: ComplexMatrix<R>,
}

impl<R: Real> Svd<R> {
    pub fn reconstruct(&self) -> ComplexMatrix<R> {
        let p = self.values.len();
        let (rows, cols) = (self.u.rows(), self.v.rows());
        ComplexMatrix::from_fn(rows, cols, self.u.field().join(self.v.field()), |i, j| {
            (0..p).fold(Cx::new(R::zero(), R::zero()), |acc, l| {
                acc + self.u.get(i, l) * self.v.get(j, l).conj() * self.values[l]
            })
        })
    }
}

/// Right singular vectors come from the eigendecomposition of `M*M`; left
/// vectors are `M v / sigma` for singular values above `1e-12 sigma_1` and are
/// completed by orthonormalization below that threshold.
pub fn svd<R: Real>(m: &ComplexMatrix<R>) -> Svd<R> {
    let (rows, cols) = m.shape();
    let p = rows.min(cols);
    let field = m.field();
    let gram = m.adjoint_mul(m).expect("M*M is always defined");
    let eig = jacobi(&gram, true);
    let values: Vec<R> = eig.values.iter().take(p).map(|&mu| mu.max(R::zero()).sqrt()).collect();
    let right: Vec<Vec<Cx<R>>> = (0..p).map(|i| eig.vector(i)).collect();

    let sigma1 = values.first().copied().unwrap_or(R::zero());
    let cutoff = sigma1 * R::lit(1e-12);
    let mut left = Vec::with_capacity(p);
    for (sigma, v) in values.iter().zip(&right) {
        if *sigma <= cutoff || *sigma == R::zero() {
            break;
        }
        let mv = m.mul_vec(v);
        left.push(mv.iter().map(|&z| z / *sigma).collect::<Vec<_>>());
    }
    let (left, _) = orthonormalize(&left, R::lit(1e-6));
    let left = complete_basis(left, rows, p);
    debug_assert!(left.iter().all(|u| (norm(u) - R::one()).abs() < R::lit(1e-6)));

    Svd {
        values,
        u: ComplexMatrix::from_columns(rows, &left, field),
        v: ComplexMatrix::from_columns(cols, &right, field),
    }
}

/// Operator (spectral) norm, the largest singular value.
pub fn op_norm<R: Real>(m: &ComplexMatrix<R>) -> R {
    let gram = if m.rows() < m.cols() {
        m.matmul(&m.adjoint()).expect("M M* is always defined")
    } else {
        m.adjoint_mul(m).expect("M*M is always defined")
    };
    let eig = jacobi(&gram, false);
    eig.values[0].max(R::zero()).sqrt()
}

/// Largest singular value with one associated unit pair `(u, v)`,
/// `M v = sigma u`. For `M = 0` the pair is arbitrary.
pub fn top_singular_pair<R: Real>(m: &ComplexMatrix<R>) -> (R, Vec<Cx<R>>, Vec<Cx<R>>) {
    let gram = m.adjoint_mul(m).expect("M*M is always defined");
    let eig = jacobi(&gram, true);
    let sigma = eig.values[0].max(R::zero()).sqrt();
    let v = eig.vector(0);
    let mv = m.mul_vec(&v);
    let u = if sigma > R::zero() {
        mv.iter().map(|&z| z / sigma).collect()
    } else {
        let mut e = vec![Cx::new(R::zero(), R::zero()); m.rows()];
        e[0] = Cx::new(R::one(), R::zero());
        e
    };
    (sigma, u, v)
}
