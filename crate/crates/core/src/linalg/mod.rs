//! Dense linear algebra substrate: matrices, Hermitian eigensolver, SVD and
//! norms.

pub mod eig;
pub mod matrix;
pub mod svd;
pub mod vector;

pub use eig::{herm_eig, herm_eigvals, HermEig};
pub use matrix::{ComplexMatrix, Field};
pub use svd::{op_norm, svd, top_singular_pair, Svd};

use crate::error::Result;
use crate::scalar::{Cx, Real};

pub fn fro_norm<R: Real>(m: &ComplexMatrix<R>) -> R {
    m.fro_norm()
}

/// `tr(M* N)`.
pub fn fro_inner<R: Real>(m: &ComplexMatrix<R>, n: &ComplexMatrix<R>) -> Result<Cx<R>> {
    m.fro_inner(n)
}
