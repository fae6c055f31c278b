//! Frobenius-orthonormal bases of matrix subspaces.

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Field};
use crate::scalar::{czero, Cx, Real};

/// Relative norm below which a Gram-Schmidt remainder counts as dependent.
pub const DEPENDENCE_TOL: f64 = 1e-10;

/// A subspace `W = span{A_1, ..., A_m}` with a Frobenius-orthonormal basis
/// `B_1, ..., B_r` of the same span.
///
/// `transform[i][j]` holds the coefficient of `A_j` in `B_i`, so vectors over
/// the orthonormal basis map back to generator coefficients.
#[derive(Debug, Clone)]
pub struct SubspaceBasis<R> {
    pub generators: Vec<ComplexMatrix<R>>,
    pub orthonormalized: Vec<ComplexMatrix<R>>,
    pub transform: Vec<Vec<Cx<R>>>,
    /// Indices of generators found dependent on earlier ones (or zero).
    pub dropped: Vec<usize>,
    shape: (usize, usize),
    field: Field,
}

impl<R: Real> SubspaceBasis<R> {
    /// Orthonormalizes `generators` (modified Gram-Schmidt, two passes) in
    /// the Frobenius inner product. All generators must share one shape.
    pub fn new(generators: Vec<ComplexMatrix<R>>) -> Result<Self> {
        let Some(first) = generators.first() else {
            return Err(Error::InvalidSpec("a subspace needs a shape; use SubspaceBasis::empty".into()));
        };
        let shape = first.shape();
        let field = generators.iter().fold(first.field(), |f, g| f.join(g.field()));
        Self::build(generators, shape, field)
    }

    /// The zero subspace of `rows x cols` matrices.
    pub fn empty(rows: usize, cols: usize, field: Field) -> Self {
        Self {
            generators: Vec::new(),
            orthonormalized: Vec::new(),
            transform: Vec::new(),
            dropped: Vec::new(),
            shape: (rows, cols),
            field,
        }
    }

    /// Like [`SubspaceBasis::new`] but accepts an empty generator list.
    pub fn with_shape(generators: Vec<ComplexMatrix<R>>, rows: usize, cols: usize, field: Field) -> Result<Self> {
        let field = generators.iter().fold(field, |f, g| f.join(g.field()));
        Self::build(generators, (rows, cols), field)
    }

    fn build(generators: Vec<ComplexMatrix<R>>, shape: (usize, usize), field: Field) -> Result<Self> {
        for g in &generators {
            if g.shape() != shape {
                return Err(Error::ShapeMismatch {
                    expected: shape,
                    found: g.shape(),
                });
            }
        }
        let m = generators.len();
        let mut ortho: Vec<ComplexMatrix<R>> = Vec::new();
        let mut transform: Vec<Vec<Cx<R>>> = Vec::new();
        let mut dropped = Vec::new();
        for (j, g) in generators.iter().enumerate() {
            let scale = g.fro_norm();
            let mut v = g.clone().with_field(field)?;
            let mut coeff = vec![czero::<R>(); m];
            coeff[j] = Cx::new(R::one(), R::zero());
            for _ in 0..2 {
                for (b, tb) in ortho.iter().zip(&transform) {
                    let p = b.fro_inner(&v)?;
                    v = v.axpy(-p, b);
                    for (c, t) in coeff.iter_mut().zip(tb) {
                        *c = *c - p * *t;
                    }
                }
            }
            let nv = v.fro_norm();
            if scale == R::zero() || nv <= R::lit(DEPENDENCE_TOL) * scale {
                dropped.push(j);
                continue;
            }
            let inv = R::one() / nv;
            ortho.push(v.scale_real(inv));
            transform.push(coeff.into_iter().map(|c| c * inv).collect());
        }
        Ok(Self {
            generators,
            orthonormalized: ortho,
            transform,
            dropped,
            shape,
            field,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Dimension of the span over the field.
    pub fn dim(&self) -> usize {
        self.orthonormalized.len()
    }

    pub fn is_zero(&self) -> bool {
        self.orthonormalized.is_empty()
    }

    /// Maps coefficients over the orthonormal basis to coefficients over the
    /// original generators.
    pub fn to_generator_coeffs(&self, ortho_coeffs: &[Cx<R>]) -> Vec<Cx<R>> {
        let mut out = vec![czero::<R>(); self.generators.len()];
        for (g, row) in ortho_coeffs.iter().zip(&self.transform) {
            for (o, t) in out.iter_mut().zip(row) {
                *o = *o + *g * *t;
            }
        }
        out
    }

    /// `sum_j gamma_j A_j` over the original generators.
    pub fn combine(&self, coeffs: &[Cx<R>]) -> ComplexMatrix<R> {
        combine(&self.generators, coeffs, self.shape, self.field)
    }

    /// `sum_i c_i B_i` over the orthonormal basis.
    pub fn combine_orthonormal(&self, coeffs: &[Cx<R>]) -> ComplexMatrix<R> {
        combine(&self.orthonormalized, coeffs, self.shape, self.field)
    }
}

pub(crate) fn combine<R: Real>(
    mats: &[ComplexMatrix<R>],
    coeffs: &[Cx<R>],
    shape: (usize, usize),
    field: Field,
) -> ComplexMatrix<R> {
    let coeff_field = if coeffs.iter().all(|c| c.im == R::zero()) {
        Field::Real
    } else {
        Field::Complex
    };
    let mut acc = ComplexMatrix::zeros(shape.0, shape.1, field.join(coeff_field));
    for (m, &c) in mats.iter().zip(coeffs) {
        acc = acc.axpy(c, m);
    }
    acc
}
