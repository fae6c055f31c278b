use std::fmt;
use std::ops::{Add, Index, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cx, czero, re, Cx, Real};

/// Scalar field of a matrix or problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    #[serde(rename = "R")]
    Real,
    #[serde(rename = "C")]
    Complex,
}

impl Field {
    /// Smallest field containing both operands.
    pub fn join(self, other: Field) -> Field {
        if self == Field::Complex || other == Field::Complex {
            Field::Complex
        } else {
            Field::Real
        }
    }

    /// Dimension of the field as a real vector space.
    pub fn real_dim(self) -> usize {
        match self {
            Field::Real => 1,
            Field::Complex => 2,
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Real => write!(f, "R"),
            Field::Complex => write!(f, "C"),
        }
    }
}

/// Dense row-major matrix over R or C.
///
/// Entries are always stored as complex numbers; a `Field::Real` matrix keeps
/// every imaginary part exactly zero.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix<R> {
    rows: usize,
    cols: usize,
    field: Field,
    data: Vec<Cx<R>>,
}

impl<R: Real> ComplexMatrix<R> {
    /// Builds a matrix from row-major entries, validating the field tag.
    pub fn new(rows: usize, cols: usize, field: Field, data: Vec<Cx<R>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidMatrix(format!("empty shape {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for a {rows}x{cols} matrix, found {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(bad) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidMatrix(format!("non-finite entry at index {bad}")));
        }
        if field == Field::Real {
            if let Some(bad) = data.iter().position(|z| z.im != R::zero()) {
                return Err(Error::InvalidMatrix(format!(
                    "real-field matrix has nonzero imaginary part at index {bad}"
                )));
            }
        }
        Ok(Self { rows, cols, field, data })
    }

    /// Internal constructor: zeroes imaginary parts for real-field results.
    pub(crate) fn from_parts(rows: usize, cols: usize, field: Field, mut data: Vec<Cx<R>>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        if field == Field::Real {
            for z in &mut data {
                z.im = R::zero();
            }
        }
        Self { rows, cols, field, data }
    }

    pub fn zeros(rows: usize, cols: usize, field: Field) -> Self {
        Self::from_parts(rows, cols, field, vec![czero(); rows * cols])
    }

    pub fn identity(n: usize, field: Field) -> Self {
        Self::from_fn(n, n, field, |i, j| if i == j { re(R::one()) } else { czero() })
    }

    pub fn from_fn(rows: usize, cols: usize, field: Field, mut f: impl FnMut(usize, usize) -> Cx<R>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::from_parts(rows, cols, field, data)
    }

    /// Real matrix from row-major real entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[R]) -> Result<Self> {
        Self::new(rows, cols, Field::Real, entries.iter().map(|&x| re(x)).collect())
    }

    /// Complex-field matrix from row-major `(re, im)` pairs.
    pub fn from_pairs(rows: usize, cols: usize, entries: &[(R, R)]) -> Result<Self> {
        Self::new(rows, cols, Field::Complex, entries.iter().map(|&(a, b)| cx(a, b)).collect())
    }

    pub fn diag_real(values: &[R]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, Field::Real, |i, j| if i == j { re(values[i]) } else { czero() })
    }

    pub fn diag(values: &[Cx<R>], field: Field) -> Self {
        let n = values.len();
        Self::from_fn(n, n, field, |i, j| if i == j { values[i] } else { czero() })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<Cx<R>>], field: Field) -> Self {
        let cols = columns.len();
        Self::from_fn(rows, cols, field, |i, j| columns[j][i])
    }

    /// Rank-one matrix `x y*`.
    pub fn outer(x: &[Cx<R>], y: &[Cx<R>], field: Field) -> Self {
        Self::from_fn(x.len(), y.len(), field, |i, j| x[i] * y[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn data(&self) -> &[Cx<R>] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Cx<R> {
        self.data[i * self.cols + j]
    }

    /// Re-tags the matrix with a larger field. Promoting to `Real` is only
    /// allowed when every imaginary part is zero.
    pub fn with_field(mut self, field: Field) -> Result<Self> {
        if field == Field::Real && self.data.iter().any(|z| z.im != R::zero()) {
            return Err(Error::InvalidMatrix("cannot retag a complex matrix as real".into()));
        }
        self.field = field;
        Ok(self)
    }

    pub fn column(&self, j: usize) -> Vec<Cx<R>> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Cx<R>>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, self.field, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, alpha: Cx<R>) -> Self {
        let field = if alpha.im != R::zero() { Field::Complex } else { self.field };
        Self::from_parts(self.rows, self.cols, field, self.data.iter().map(|&z| z * alpha).collect())
    }

    pub fn scale_real(&self, alpha: R) -> Self {
        Self::from_parts(
            self.rows,
            self.cols,
            self.field,
            self.data.iter().map(|&z| z * alpha).collect(),
        )
    }

    /// `self + alpha * other`.
    pub fn axpy(&self, alpha: Cx<R>, other: &Self) -> Self {
        assert_eq!(self.shape(), other.shape(), "axpy shape mismatch");
        let field = self.field.join(other.field).join(if alpha.im != R::zero() {
            Field::Complex
        } else {
            Field::Real
        });
        Self::from_parts(
            self.rows,
            self.cols,
            field,
            self.data.iter().zip(&other.data).map(|(&a, &b)| a + alpha * b).collect(),
        )
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                expected: (self.cols, other.cols),
                found: other.shape(),
            });
        }
        let (n, p, m) = (self.rows, self.cols, other.cols);
        let mut data = vec![czero(); n * m];
        for i in 0..n {
            for k in 0..p {
                let a = self.data[i * p + k];
                if a.re == R::zero() && a.im == R::zero() {
                    continue;
                }
                let row = &other.data[k * m..(k + 1) * m];
                let out = &mut data[i * m..(i + 1) * m];
                for (o, &b) in out.iter_mut().zip(row) {
                    *o = *o + a * b;
                }
            }
        }
        Ok(Self::from_parts(n, m, self.field.join(other.field), data))
    }

    /// `self* other` without materializing the adjoint.
    pub fn adjoint_mul(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::ShapeMismatch {
                expected: (self.rows, other.cols),
                found: other.shape(),
            });
        }
        let (n, p, m) = (self.cols, self.rows, other.cols);
        let mut data = vec![czero(); n * m];
        for k in 0..p {
            for i in 0..n {
                let a = self.data[k * n + i].conj();
                let row = &other.data[k * m..(k + 1) * m];
                let out = &mut data[i * m..(i + 1) * m];
                for (o, &b) in out.iter_mut().zip(row) {
                    *o = *o + a * b;
                }
            }
        }
        Ok(Self::from_parts(n, m, self.field.join(other.field), data))
    }

    pub fn mul_vec(&self, x: &[Cx<R>]) -> Vec<Cx<R>> {
        assert_eq!(x.len(), self.cols, "mul_vec length mismatch");
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(x)
                    .fold(czero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    /// `self* x`.
    pub fn adjoint_mul_vec(&self, x: &[Cx<R>]) -> Vec<Cx<R>> {
        assert_eq!(x.len(), self.rows, "adjoint_mul_vec length mismatch");
        let mut out = vec![czero(); self.cols];
        for (i, &xi) in x.iter().enumerate() {
            for (j, o) in out.iter_mut().enumerate() {
                *o = *o + self.data[i * self.cols + j].conj() * xi;
            }
        }
        out
    }

    /// Quadratic form `x* M x` (square matrices).
    pub fn quad_form(&self, x: &[Cx<R>]) -> Cx<R> {
        crate::linalg::vector::dot(x, &self.mul_vec(x))
    }

    pub fn trace(&self) -> Cx<R> {
        (0..self.rows.min(self.cols)).fold(czero(), |acc, i| acc + self.get(i, i))
    }

    pub fn fro_norm(&self) -> R {
        let scale = self.max_abs();
        if scale == R::zero() {
            return R::zero();
        }
        let s: R = self.data.iter().map(|z| (*z / scale).norm_sqr()).sum();
        scale * s.sqrt()
    }

    /// Frobenius inner product `tr(self* other)`.
    pub fn fro_inner(&self, other: &Self) -> Result<Cx<R>> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                expected: self.shape(),
                found: other.shape(),
            });
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(czero(), |acc, (&a, &b)| acc + a.conj() * b))
    }

    pub fn max_abs(&self) -> R {
        self.data.iter().fold(R::zero(), |m, z| m.max(z.norm()))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == R::zero() && z.im == R::zero())
    }

    /// `(M + M*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let half = R::lit(0.5);
        Self::from_fn(self.rows, self.cols, self.field, |i, j| (self.get(i, j) + self.get(j, i).conj()) * half)
    }

    /// `(M - M*) / (2i)`, which is Hermitian.
    pub fn skew_part(&self) -> Self {
        let half = R::lit(0.5);
        Self::from_fn(self.rows, self.cols, Field::Complex, |i, j| {
            let d = self.get(i, j) - self.get(j, i).conj();
            // d / (2i) = -i d / 2
            cx(d.im, -d.re) * half
        })
    }

    /// Frobenius norm of `M - M*` relative to the Frobenius norm of `M`.
    pub fn hermitian_defect(&self) -> R {
        let scale = self.fro_norm();
        if scale == R::zero() {
            return R::zero();
        }
        let mut s = R::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                s = s + ((self.get(i, j) - self.get(j, i).conj()) / scale).norm_sqr();
            }
        }
        s.sqrt()
    }

    /// Converts the element type, e.g. `f64` to `f32`.
    pub fn cast<S: Real>(&self) -> ComplexMatrix<S> {
        ComplexMatrix::from_parts(
            self.rows,
            self.cols,
            self.field,
            self.data.iter().map(|z| cx(S::lit(z.re.as_f64()), S::lit(z.im.as_f64()))).collect(),
        )
    }
}

impl<R: Real> Index<(usize, usize)> for ComplexMatrix<R> {
    type Output = Cx<R>;

    fn index(&self, (i, j): (usize, usize)) -> &Cx<R> {
        &self.data[i * self.cols + j]
    }
}

impl<R: Real> Add for &ComplexMatrix<R> {
    type Output = ComplexMatrix<R>;

    fn add(self, rhs: Self) -> ComplexMatrix<R> {
        self.axpy(re(R::one()), rhs)
    }
}

impl<R: Real> Sub for &ComplexMatrix<R> {
    type Output = ComplexMatrix<R>;

    fn sub(self, rhs: Self) -> ComplexMatrix<R> {
        self.axpy(re(-R::one()), rhs)
    }
}

impl<R: Real> Mul for &ComplexMatrix<R> {
    type Output = ComplexMatrix<R>;

    /// Panics on incompatible shapes; use [`ComplexMatrix::matmul`] for a
    /// checked product.
    fn mul(self, rhs: Self) -> ComplexMatrix<R> {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl<R: fmt::Debug> fmt::Debug for ComplexMatrix<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} over {}", self.rows, self.cols, self.field)?;
        for i in 0..self.rows {
            write!(f, "  [")?;
            for j in 0..self.cols {
                let z = &self.data[i * self.cols + j];
                if self.field == Field::Real {
                    write!(f, " {:?}", z.re)?;
                } else {
                    write!(f, " {:?}{:+?}i", z.re, z.im)?;
                }
            }
            writeln!(f, " ]")?;
        }
        Ok(())
    }
}
