//! Density-matrix certificates and their from-scratch validation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::eig::jacobi;
use crate::linalg::vector::norm;
use crate::linalg::{op_norm, ComplexMatrix};
use crate::scalar::{czero, Cx, Real};

/// One term `lambda x x*` of a Caratheodory decomposition.
#[derive(Debug, Clone)]
pub struct WeightedVector<R> {
    pub weight: R,
    pub x: Vec<Cx<R>>,
}

/// Density matrix `P` with `T*TP = |T|^2 P` and `tr((TP)* A_j) = 0` for every
/// generator, decomposed as `P = sum lambda_i x_i x_i*`.
#[derive(Debug, Clone)]
pub struct OrthoCertificate<R> {
    pub p: ComplexMatrix<R>,
    pub decomposition: Vec<WeightedVector<R>>,
}

impl<R: Real> OrthoCertificate<R> {
    /// Builds the certificate `P = sum lambda_i x_i x_i*` from its terms.
    pub fn from_decomposition(n: usize, terms: Vec<WeightedVector<R>>, field: crate::Field) -> Self {
        let mut data = vec![czero::<R>(); n * n];
        for term in &terms {
            for a in 0..n {
                for b in 0..n {
                    data[a * n + b] = data[a * n + b] + term.x[a] * term.x[b].conj() * term.weight;
                }
            }
        }
        Self {
            p: ComplexMatrix::from_parts(n, n, field, data),
            decomposition: terms,
        }
    }

    /// Decomposes `P` by its eigendecomposition, keeping positive weights.
    pub fn from_density(p: ComplexMatrix<R>) -> Self {
        let eig = jacobi(&p.hermitian_part(), true);
        let scale = eig.values[0].abs().max(R::min_positive_value());
        let decomposition = eig
            .values
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > R::lit(1e-15) * scale)
            .map(|(i, &l)| WeightedVector {
                weight: l,
                x: eig.vector(i),
            })
            .collect();
        Self { p, decomposition }
    }
}

/// Residuals of every certificate condition, recomputed from `T`, the
/// generators and the certificate alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub trace: f64,
    /// `max(0, -lambda_min(P))`.
    pub psd: f64,
    /// `|T*TP - |T|^2 P|_F / |T|^2`.
    pub fixed_point: f64,
    /// `|tr((TP)* A_j)| / (|T| |A_j|_F)` per generator.
    pub constraints: Vec<f64>,
    /// `|P - sum lambda_i x_i x_i*|_F`.
    pub decomposition: f64,
    /// `|sum lambda_i - 1|`.
    pub weights: f64,
    /// `max_i | |T x_i| - |T| | / |T|`, with `|x_i| = 1` folded in.
    pub attainment: f64,
    /// A decomposition weight is not positive.
    pub nonpositive_weight: bool,
}

impl ResidualReport {
    pub fn max(&self) -> f64 {
        let mut m = self
            .trace
            .max(self.psd)
            .max(self.fixed_point)
            .max(self.decomposition)
            .max(self.weights)
            .max(self.attainment);
        for &c in &self.constraints {
            m = m.max(c);
        }
        if self.nonpositive_weight {
            m = m.max(f64::INFINITY);
        }
        m
    }

    pub fn passes(&self, eps_cert: f64) -> bool {
        self.max() <= eps_cert
    }
}

/// Recomputes every certificate condition without touching the recovery
/// path (no attainment subspace, no pencil, no orthonormalization).
pub fn validate_certificate<R: Real>(
    t: &ComplexMatrix<R>,
    generators: &[ComplexMatrix<R>],
    cert: &OrthoCertificate<R>,
) -> Result<ResidualReport> {
    let n = t.cols();
    let p = &cert.p;
    if p.shape() != (n, n) {
        return Err(Error::ShapeMismatch {
            expected: (n, n),
            found: p.shape(),
        });
    }
    for g in generators {
        if g.shape() != t.shape() {
            return Err(Error::ShapeMismatch {
                expected: t.shape(),
                found: g.shape(),
            });
        }
    }
    let nt = op_norm(t);
    let nt2 = nt * nt;
    let trace = (p.trace() - Cx::new(R::one(), R::zero())).norm().as_f64();
    let ph = p.hermitian_part();
    let lam_min = jacobi(&ph, false).values.last().copied().unwrap_or(R::zero());
    let psd = (-lam_min).max(R::zero()).as_f64();

    let zero_t = nt == R::zero();
    let rel = |x: R, scale: R| if zero_t { x.as_f64() } else { (x / scale).as_f64() };

    let ttp = t.adjoint_mul(&t.matmul(p)?)?;
    let fixed_point = rel((&ttp - &p.scale_real(nt2)).fro_norm(), nt2);

    let tp = t.matmul(p)?;
    let constraints = generators
        .iter()
        .map(|a| {
            let v = tp.fro_inner(a).expect("shapes checked").norm();
            let an = a.fro_norm();
            if an == R::zero() {
                0.0
            } else {
                rel(v / an, nt)
            }
        })
        .collect();

    let mut recon = ComplexMatrix::zeros(n, n, p.field());
    let mut weight_sum = R::zero();
    let mut attainment = 0.0f64;
    let mut nonpositive_weight = false;
    for term in &cert.decomposition {
        if term.x.len() != n {
            return Err(Error::ShapeMismatch {
                expected: (n, 1),
                found: (term.x.len(), 1),
            });
        }
        if !(term.weight > R::zero()) {
            nonpositive_weight = true;
        }
        weight_sum = weight_sum + term.weight;
        recon = &recon + &ComplexMatrix::outer(&term.x, &term.x, p.field()).scale_real(term.weight);
        let xn = norm(&term.x);
        let tx = norm(&t.mul_vec(&term.x));
        let unit = (xn - R::one()).abs().as_f64();
        let att = rel((tx - nt).abs(), nt);
        attainment = attainment.max(unit).max(att);
    }
    let decomposition = (&recon - p).fro_norm().as_f64();
    let weights = (weight_sum - R::one()).abs().as_f64();
    Ok(ResidualReport {
        trace,
        psd,
        fixed_point,
        constraints,
        decomposition,
        weights,
        attainment,
        nonpositive_weight,
    })
}
