//! Decision procedure for `T ⊥_B W`.
//!
//! `T` is orthogonal to `W` iff some density matrix `P` supported on the
//! attainment subspace satisfies `tr((TP)* A) = 0` for all `A` in `W`. On the
//! attainment subspace this is the statement that the origin lies in the
//! convex hull of the joint numerical range of the constraint pencil. The
//! procedure decides that by a convex separation problem, then produces a
//! validated artifact for either answer: a density matrix (Dykstra recovery)
//! or a norm-decreasing perturbation.

pub mod basis;
pub mod dykstra;
pub mod pencil;
pub mod validate;
pub mod witness;

use serde::{Deserialize, Serialize};

pub use basis::SubspaceBasis;
pub use dykstra::{find_density, project_simplex, project_spectrahedron, Density, DykstraSettings};
pub use pencil::{constraint_pencil, separation_minimize, separation_value, Part, Pencil, Separation, SeparationSettings};
pub use validate::{validate_certificate, OrthoCertificate, ResidualReport, WeightedVector};
pub use witness::{validate_witness, witness_from_direction, NonOrthoWitness, WitnessCheck};

use crate::attainment::{attainment_subspace, AttainmentSubspace, EPS_GAP};
use crate::error::{Error, Result};
use crate::linalg::eig::jacobi;
use crate::linalg::{op_norm, ComplexMatrix, Field};
use crate::oracle::{min_opnorm_over_subspace, OracleSettings};
use crate::scalar::{cx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Separation threshold: `mu* >= -eps_dec` counts as orthogonal.
    pub eps_dec: f64,
    /// Certificate residual bound.
    pub eps_cert: f64,
    /// Required witness decrease, relative to `|T|`.
    pub eps_wit: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eps_dec: 1e-7,
            eps_cert: 1e-8,
            eps_wit: 1e-9,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CertifyConfig {
    pub tolerances: Tolerances,
    pub eps_gap: f64,
    pub separation: SeparationSettings,
    pub dykstra: DykstraSettings,
    /// Search for a witness with the oracle when the primary path fails.
    pub oracle_fallback: bool,
    pub oracle: OracleSettings,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        Self {
            tolerances: Tolerances::default(),
            eps_gap: EPS_GAP,
            separation: SeparationSettings::default(),
            dykstra: DykstraSettings::default(),
            oracle_fallback: true,
            oracle: OracleSettings {
                restarts: 4,
                grid_check: false,
                ..OracleSettings::default()
            },
        }
    }
}

impl CertifyConfig {
    pub fn with_tolerances(tolerances: Tolerances) -> Self {
        Self {
            tolerances,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    Orthogonal,
    NotOrthogonal,
    Inconclusive,
}

impl std::fmt::Display for Decision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Decision::Orthogonal => "Orthogonal",
            Decision::NotOrthogonal => "NotOrthogonal",
            Decision::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    pub norm_t: f64,
    pub attainment_dim: usize,
    pub gap: f64,
    pub subspace_dim: usize,
    pub dropped_generators: Vec<usize>,
    pub separation_value: Option<f64>,
    pub separation_iterations: usize,
    pub separation_budget_exhausted: bool,
    pub dykstra_iterations: Option<usize>,
    pub dykstra_residual: Option<f64>,
    pub witness_halvings: Option<usize>,
    pub witness_decrease: Option<f64>,
    pub oracle_fallback_used: bool,
    pub residuals: Option<ResidualReport>,
    /// Complex single-generator checks: does `{x*T*Ax : x in S_H0}` contain 0.
    pub numerical_range_contains_zero: Option<bool>,
    pub tolerances: Tolerances,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Verdict<R> {
    pub decision: Decision,
    pub certificate: Option<OrthoCertificate<R>>,
    pub witness: Option<NonOrthoWitness<R>>,
    pub diagnostics: Diagnostics,
}

impl<R> Verdict<R> {
    fn inconclusive(diagnostics: Diagnostics) -> Self {
        Self {
            decision: Decision::Inconclusive,
            certificate: None,
            witness: None,
            diagnostics,
        }
    }
}

/// Lifts a feasible `Q` on the attainment subspace to `P = U Q U*` with its
/// decomposition `x_i = U q_i`.
pub fn recover_density<R: Real>(
    pencil: &Pencil<R>,
    att: &AttainmentSubspace<R>,
    settings: &DykstraSettings,
) -> Result<(OrthoCertificate<R>, Density<R>)> {
    let k = att.dim();
    let density = find_density(&pencil.mats, k, settings)?;
    let eig = jacobi(&density.q, true);
    let scale = eig.values[0].abs().max(R::min_positive_value());
    let terms: Vec<WeightedVector<R>> = eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > R::lit(1e-15) * scale)
        .map(|(i, &l)| WeightedVector {
            weight: l,
            x: att.lift(&eig.vector(i)),
        })
        .collect();
    let n = att.basis.rows();
    let field = att.basis.field().join(pencil.field);
    let uq = att.basis.matmul(&density.q.clone().with_field(field)?)?;
    let p = uq.matmul(&att.basis.adjoint())?.hermitian_part();
    debug_assert_eq!(p.rows(), n);
    Ok((
        OrthoCertificate {
            p,
            decomposition: terms,
        },
        density,
    ))
}

fn trivial_certificate<R: Real>(x: Vec<crate::Cx<R>>, field: Field) -> OrthoCertificate<R> {
    let n = x.len();
    OrthoCertificate::from_decomposition(n, vec![WeightedVector { weight: R::one(), x }], field)
}

/// Decides `T ⊥_B span(W)`; every non-inconclusive verdict carries an
/// artifact that passed independent validation.
pub fn check_subspace<R: Real>(t: &ComplexMatrix<R>, w: &SubspaceBasis<R>, config: &CertifyConfig) -> Result<Verdict<R>> {
    if w.shape() != t.shape() {
        return Err(Error::ShapeMismatch {
            expected: t.shape(),
            found: w.shape(),
        });
    }
    let tol = config.tolerances;
    let field = t.field().join(w.field());
    let mut diag = Diagnostics {
        tolerances: tol,
        subspace_dim: w.dim(),
        dropped_generators: w.dropped.clone(),
        ..Diagnostics::default()
    };
    for &j in &w.dropped {
        diag.notes.push(format!("generator {j} is dependent on earlier generators and was dropped"));
    }
    let nt = op_norm(t);
    diag.norm_t = nt.as_f64();

    if nt == R::zero() {
        diag.notes.push("T = 0 is orthogonal to every subspace".into());
        let mut e = vec![cx(R::zero(), R::zero()); t.cols()];
        e[0] = cx(R::one(), R::zero());
        return finish_orthogonal(t, w, trivial_certificate(e, field), diag, tol);
    }

    let tn = t.scale_real(R::one() / nt);
    let att = attainment_subspace(&tn, R::lit(config.eps_gap))?;
    diag.attainment_dim = att.dim();
    diag.gap = att.gap.as_f64();

    if w.is_zero() {
        diag.notes.push("W = {0}: any attaining vector certifies".into());
        return finish_orthogonal(t, w, trivial_certificate(att.basis.column(0), field), diag, tol);
    }

    let pencil = constraint_pencil(&tn, &att, w)?;
    let sep = separation_minimize(&pencil, &config.separation);
    diag.separation_value = Some(sep.mu.as_f64());
    diag.separation_iterations = sep.iterations;
    diag.separation_budget_exhausted = sep.budget_exhausted;
    let separated = sep.mu < -R::lit(tol.eps_dec);
    if field == Field::Complex && w.dim() == 1 {
        diag.numerical_range_contains_zero = Some(!separated);
    }

    if !separated {
        match recover_density(&pencil, &att, &config.dykstra) {
            Ok((cert, density)) => {
                diag.dykstra_iterations = Some(density.iterations);
                diag.dykstra_residual = Some(density.residual.as_f64());
                let report = validate_certificate(t, &w.generators, &cert)?;
                if report.passes(tol.eps_cert) {
                    diag.residuals = Some(report);
                    return Ok(Verdict {
                        decision: Decision::Orthogonal,
                        certificate: Some(cert),
                        witness: None,
                        diagnostics: diag,
                    });
                }
                diag.notes.push(format!("recovered density failed validation (max residual {:e})", report.max()));
                diag.residuals = Some(report);
            }
            Err(e) => {
                if let Error::DykstraStalled { iterations, residual } = e {
                    diag.dykstra_iterations = Some(iterations);
                    diag.dykstra_residual = Some(residual);
                }
                diag.notes.push(format!("density recovery failed: {e}"));
            }
        }
    }

    if sep.mu < R::zero() {
        match witness_from_direction(&sep.c, w, t, tol.eps_wit) {
            Ok(wit) => {
                let check = validate_witness(t, &w.generators, &wit, tol.eps_wit)?;
                if check.valid {
                    diag.witness_halvings = Some(wit.halvings);
                    diag.witness_decrease = Some(check.decrease.as_f64());
                    return Ok(Verdict {
                        decision: Decision::NotOrthogonal,
                        certificate: None,
                        witness: Some(wit),
                        diagnostics: diag,
                    });
                }
                diag.notes.push("witness did not survive recomputation".into());
            }
            Err(e) => diag.notes.push(format!("witness search failed: {e}")),
        }
    }

    if config.oracle_fallback {
        if let Some(wit) = oracle_witness(t, w, config)? {
            let check = validate_witness(t, &w.generators, &wit, tol.eps_wit)?;
            if check.valid {
                diag.oracle_fallback_used = true;
                diag.witness_decrease = Some(check.decrease.as_f64());
                diag.notes.push("witness found by direct norm minimization".into());
                return Ok(Verdict {
                    decision: Decision::NotOrthogonal,
                    certificate: None,
                    witness: Some(wit),
                    diagnostics: diag,
                });
            }
        }
        diag.notes.push("direct norm minimization found no validated decrease".into());
    }
    Ok(Verdict::inconclusive(diag))
}

fn oracle_witness<R: Real>(t: &ComplexMatrix<R>, w: &SubspaceBasis<R>, config: &CertifyConfig) -> Result<Option<NonOrthoWitness<R>>> {
    let res = min_opnorm_over_subspace(t, w, &config.oracle)?;
    if res.min_value < res.base_value * (R::one() - R::lit(config.tolerances.eps_wit)) {
        Ok(Some(NonOrthoWitness {
            coeffs: res.coeffs,
            step: R::one(),
            achieved: res.min_value - res.base_value,
            halvings: 0,
        }))
    } else {
        Ok(None)
    }
}

fn finish_orthogonal<R: Real>(
    t: &ComplexMatrix<R>,
    w: &SubspaceBasis<R>,
    cert: OrthoCertificate<R>,
    mut diag: Diagnostics,
    tol: Tolerances,
) -> Result<Verdict<R>> {
    let report = validate_certificate(t, &w.generators, &cert)?;
    let ok = report.passes(tol.eps_cert);
    diag.residuals = Some(report);
    if ok {
        Ok(Verdict {
            decision: Decision::Orthogonal,
            certificate: Some(cert),
            witness: None,
            diagnostics: diag,
        })
    } else {
        diag.notes.push("trivial certificate failed validation".into());
        Ok(Verdict::inconclusive(diag))
    }
}

/// `T ⊥_B A`, the single-generator case of [`check_subspace`].
pub fn check_pair<R: Real>(t: &ComplexMatrix<R>, a: &ComplexMatrix<R>, config: &CertifyConfig) -> Result<Verdict<R>> {
    let w = SubspaceBasis::new(vec![a.clone()])?;
    check_subspace(t, &w, config)
}
