//! Norm-decreasing perturbations certifying non-orthogonality.

use crate::certify::basis::{combine, SubspaceBasis};
use crate::error::{Error, Result};
use crate::linalg::{op_norm, ComplexMatrix, Field};
use crate::scalar::{cx, Cx, Real};

/// Maximum number of step halvings.
pub const MAX_HALVINGS: usize = 60;

/// `|T + t B| < |T| - eps_wit` with `B = sum_j gamma_j A_j` over the original
/// generators.
#[derive(Debug, Clone)]
pub struct NonOrthoWitness<R> {
    pub coeffs: Vec<Cx<R>>,
    pub step: R,
    /// `|T + t B| - |T|`, negative.
    pub achieved: R,
    pub halvings: usize,
}

/// Recomputed witness check.
#[derive(Debug, Clone, Copy)]
pub struct WitnessCheck<R> {
    pub norm_t: R,
    pub perturbed_norm: R,
    /// `|T| - |T + tB|`.
    pub decrease: R,
    pub valid: bool,
}

/// Maps a separating direction over the pencil to complex coefficients over
/// the orthonormal basis: `gamma_j = c_{2j-1} - i c_{2j}` (complex field) or
/// `gamma_j = c_j` (real field).
///
/// The conjugate pairs the pencil's real and imaginary parts with the real
/// part of `x*T*(gamma B)x`, which is the first-order change of `|T + tB|`.
pub fn direction_coeffs<R: Real>(c: &[R], field: Field) -> Vec<Cx<R>> {
    match field {
        Field::Real => c.iter().map(|&x| cx(x, R::zero())).collect(),
        Field::Complex => c.chunks(2).map(|p| cx(p[0], -p[1])).collect(),
    }
}

/// Backtracking search `t <- t/2` from `t0 = |T| / |B|_F` for a step with
/// `|T + t(+-B)| < |T| - eps_wit |T|`.
pub fn witness_from_direction<R: Real>(
    c: &[R],
    w: &SubspaceBasis<R>,
    t: &ComplexMatrix<R>,
    eps_wit: f64,
) -> Result<NonOrthoWitness<R>> {
    let field = t.field().join(w.field());
    let gamma = direction_coeffs(c, field);
    witness_from_ortho_coeffs(&gamma, w, t, eps_wit)
}

/// Backtracking search along `sum gamma_i B_i` over the orthonormal basis.
pub fn witness_from_ortho_coeffs<R: Real>(
    gamma: &[Cx<R>],
    w: &SubspaceBasis<R>,
    t: &ComplexMatrix<R>,
    eps_wit: f64,
) -> Result<NonOrthoWitness<R>> {
    let b = w.combine_orthonormal(gamma);
    let bn = b.fro_norm();
    let nt = op_norm(t);
    if bn == R::zero() || nt == R::zero() {
        return Err(Error::WitnessValidationFailed);
    }
    let threshold = nt - R::lit(eps_wit) * nt;
    let mut step = nt / bn;
    for halvings in 0..=MAX_HALVINGS {
        for sign in [R::one(), -R::one()] {
            let v = op_norm(&t.axpy(cx(sign * step, R::zero()), &b));
            if v < threshold {
                let signed: Vec<Cx<R>> = gamma.iter().map(|&g| g * sign).collect();
                return Ok(NonOrthoWitness {
                    coeffs: w.to_generator_coeffs(&signed),
                    step,
                    achieved: v - nt,
                    halvings,
                });
            }
        }
        step = step * R::lit(0.5);
    }
    Err(Error::WitnessValidationFailed)
}

/// Recomputes `|T + t sum gamma_j A_j|` from the generators alone.
pub fn validate_witness<R: Real>(
    t: &ComplexMatrix<R>,
    generators: &[ComplexMatrix<R>],
    witness: &NonOrthoWitness<R>,
    eps_wit: f64,
) -> Result<WitnessCheck<R>> {
    if generators.len() != witness.coeffs.len() {
        return Err(Error::InvalidSpec(format!(
            "witness has {} coefficients for {} generators",
            witness.coeffs.len(),
            generators.len()
        )));
    }
    for g in generators {
        if g.shape() != t.shape() {
            return Err(Error::ShapeMismatch {
                expected: t.shape(),
                found: g.shape(),
            });
        }
    }
    let b = combine(generators, &witness.coeffs, t.shape(), t.field());
    let norm_t = op_norm(t);
    let perturbed_norm = op_norm(&t.axpy(cx(witness.step, R::zero()), &b));
    let decrease = norm_t - perturbed_norm;
    Ok(WitnessCheck {
        norm_t,
        perturbed_norm,
        decrease,
        valid: witness.step > R::zero() && decrease > R::lit(eps_wit) * norm_t,
    })
}
