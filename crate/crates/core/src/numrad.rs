//! Numerical-radius orthogonality `T ⊥_w W`.
//!
//! Sufficient condition: if unit vectors `x_i` with `|x_i*Tx_i| = w(T)` and
//! weights `l_i > 0`, `sum l_i = 1` satisfy
//! `sum l_i conj(x_i*Tx_i) (x_i*Ax_i) = 0` for every `A` in `W`, then
//! `w(T + A) >= w(T)` on `W`. The search runs over sampled attaining vectors;
//! the convex numerical-radius oracle referees everything else.

use serde::{Deserialize, Serialize};

use crate::attainment::{numerical_radius, numrad_attainment, NumRadAttainment, EPS_W};
use crate::certify::{
    find_density, separation_minimize, DykstraSettings, Pencil, SeparationSettings, SubspaceBasis, Tolerances,
};
use crate::certify::basis::combine;
use crate::error::{Error, Result};
use crate::linalg::vector::norm;
use crate::linalg::{ComplexMatrix, Field};
use crate::oracle::{min_numrad_over_subspace, OracleResult, OracleSettings, ORACLE_MARGIN};
use crate::scalar::{cx, czero, Cx, Real};

/// One weighted attaining vector.
#[derive(Debug, Clone)]
pub struct WPoint<R> {
    pub lambda: R,
    pub x: Vec<Cx<R>>,
    /// `x*Tx`, of modulus `w(T)`.
    pub value: Cx<R>,
}

/// Weighted attaining vectors satisfying the sufficient condition.
#[derive(Debug, Clone)]
pub struct WOrthoCertificate<R> {
    pub w: R,
    pub points: Vec<WPoint<R>>,
    /// `|sum l_i conj(value_i) (x_i*A_jx_i)|` per generator.
    pub residuals: Vec<R>,
}

/// Residuals of a [`WOrthoCertificate`], recomputed from `T` and the
/// generators alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WResidualReport {
    /// `|sum l_i - 1|`.
    pub weights: f64,
    /// `max_i | |x_i| - 1 |`.
    pub units: f64,
    /// `max_i | |x_i*Tx_i| - w(T) | / w(T)`.
    pub attainment: f64,
    /// `|sum l_i conj(x_i*Tx_i)(x_i*A_jx_i)| / (w(T) |A_j|_F)` per generator.
    pub constraints: Vec<f64>,
    pub nonpositive_weight: bool,
}

impl WResidualReport {
    pub fn passes(&self, eps_cert: f64, eps_w: f64) -> bool {
        !self.nonpositive_weight
            && self.weights <= eps_cert
            && self.units <= eps_cert
            && self.attainment <= eps_w
            && self.constraints.iter().all(|&c| c <= eps_cert)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WorthDecision {
    /// The sufficient condition holds on sampled attaining vectors.
    CertifiedOrthogonal,
    /// No certificate found; the oracle finds no decrease.
    OracleOrthogonal,
    /// A validated perturbation lowers the numerical radius.
    NotOrthogonal,
}

impl std::fmt::Display for WorthDecision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            WorthDecision::CertifiedOrthogonal => "CertifiedOrthogonal",
            WorthDecision::OracleOrthogonal => "OracleOrthogonal",
            WorthDecision::NotOrthogonal => "NotOrthogonal",
        };
        f.write_str(s)
    }
}

/// `w(T + sum gamma_j A_j) < w(T)` over the original generators.
#[derive(Debug, Clone)]
pub struct WWitness<R> {
    pub coeffs: Vec<Cx<R>>,
    /// Recomputed `w(T + sum gamma_j A_j)`.
    pub perturbed: R,
    /// `w(T) - perturbed`.
    pub decrease: R,
}

#[derive(Debug, Clone)]
pub struct WorthSettings {
    pub tolerances: Tolerances,
    pub separation: SeparationSettings,
    pub dykstra: DykstraSettings,
    pub oracle: OracleSettings,
}

impl Default for WorthSettings {
    fn default() -> Self {
        Self {
            tolerances: Tolerances::default(),
            separation: SeparationSettings::default(),
            dykstra: DykstraSettings::default(),
            oracle: OracleSettings {
                restarts: 4,
                grid_check: false,
                ..OracleSettings::default()
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct WorthVerdict<R> {
    pub decision: WorthDecision,
    pub w: R,
    pub certificate: Option<WOrthoCertificate<R>>,
    pub witness: Option<WWitness<R>>,
    /// Present whenever the oracle ran.
    pub oracle: Option<OracleResult<R>>,
    /// Attaining vectors examined by the certificate search.
    pub samples: usize,
}

fn check_input<R: Real>(t: &ComplexMatrix<R>, w: &SubspaceBasis<R>) -> Result<()> {
    if !t.is_square() {
        return Err(Error::NonSquare {
            rows: t.rows(),
            cols: t.cols(),
        });
    }
    if w.shape() != t.shape() {
        return Err(Error::ShapeMismatch {
            expected: t.shape(),
            found: w.shape(),
        });
    }
    if t.field().join(w.field()) == Field::Real {
        return Err(Error::RealFieldUnsupported);
    }
    Ok(())
}

/// `conj(x*Tx) (x*Ax)`.
fn feature<R: Real>(value: Cx<R>, a: &ComplexMatrix<R>, x: &[Cx<R>]) -> Cx<R> {
    value.conj() * a.quad_form(x)
}

/// Searches sampled attaining vectors for weights satisfying the sufficient
/// condition. `None` proves nothing.
pub fn worth_certify<R: Real>(t: &ComplexMatrix<R>, w: &SubspaceBasis<R>) -> Result<Option<WOrthoCertificate<R>>> {
    worth_certify_with(t, w, &WorthSettings::default())
}

pub fn worth_certify_with<R: Real>(
    t: &ComplexMatrix<R>,
    w: &SubspaceBasis<R>,
    settings: &WorthSettings,
) -> Result<Option<WOrthoCertificate<R>>> {
    check_input(t, w)?;
    if t.is_zero() {
        return Err(Error::ZeroOperator);
    }
    let t = t.clone().with_field(Field::Complex)?;
    let att = numrad_attainment(&t)?;
    Ok(certify_from_samples(&t, w, &att, settings))
}

fn certify_from_samples<R: Real>(
    t: &ComplexMatrix<R>,
    w: &SubspaceBasis<R>,
    att: &NumRadAttainment<R>,
    settings: &WorthSettings,
) -> Option<WOrthoCertificate<R>> {
    let s = att.samples.len();
    if s == 0 || att.w <= R::zero() {
        return None;
    }
    // one diagonal pencil member per real coordinate of the normalized features
    let mut diag: Vec<Vec<R>> = Vec::new();
    for b in &w.orthonormalized {
        let phi: Vec<Cx<R>> = att.samples.iter().map(|p| feature(p.value, b, &p.x) / att.w).collect();
        diag.push(phi.iter().map(|z| z.re).collect());
        diag.push(phi.iter().map(|z| z.im).collect());
    }
    let lambda = if diag.is_empty() {
        let mut l = vec![R::zero(); s];
        l[0] = R::one();
        l
    } else {
        let mats: Vec<ComplexMatrix<R>> = diag.iter().map(|d| ComplexMatrix::diag_real(d)).collect();
        let pencil = Pencil::from_mats(mats);
        let sep = separation_minimize(&pencil, &settings.separation);
        if sep.mu < -R::lit(settings.tolerances.eps_dec) {
            return None;
        }
        let density = find_density(&pencil.mats, s, &settings.dykstra).ok()?;
        (0..s).map(|i| density.q.get(i, i).re).collect()
    };
    let cutoff = R::lit(1e-14);
    let kept: Vec<usize> = (0..s).filter(|&i| lambda[i] > cutoff).collect();
    let total: R = kept.iter().map(|&i| lambda[i]).sum();
    if kept.is_empty() || total <= R::zero() {
        return None;
    }
    let points: Vec<WPoint<R>> = kept
        .iter()
        .map(|&i| WPoint {
            lambda: lambda[i] / total,
            x: att.samples[i].x.clone(),
            value: att.samples[i].value,
        })
        .collect();
    let residuals = w
        .generators
        .iter()
        .map(|a| {
            points
                .iter()
                .fold(czero::<R>(), |acc, p| acc + feature(p.value, a, &p.x) * p.lambda)
                .norm()
        })
        .collect();
    let cert = WOrthoCertificate {
        w: att.w,
        points,
        residuals,
    };
    let report = validate_worth_certificate(t, &w.generators, &cert).ok()?;
    report.passes(settings.tolerances.eps_cert, EPS_W).then_some(cert)
}

/// Recomputes every certificate condition, including `w(T)` itself.
pub fn validate_worth_certificate<R: Real>(
    t: &ComplexMatrix<R>,
    generators: &[ComplexMatrix<R>],
    cert: &WOrthoCertificate<R>,
) -> Result<WResidualReport> {
    let n = t.rows();
    for g in generators {
        if g.shape() != t.shape() {
            return Err(Error::ShapeMismatch {
                expected: t.shape(),
                found: g.shape(),
            });
        }
    }
    let wt = numerical_radius(t);
    let scale = if wt > R::zero() { wt } else { R::one() };
    let mut weight_sum = R::zero();
    let mut units = 0.0f64;
    let mut attainment = 0.0f64;
    let mut nonpositive_weight = cert.points.is_empty();
    for p in &cert.points {
        if p.x.len() != n {
            return Err(Error::ShapeMismatch {
                expected: (n, 1),
                found: (p.x.len(), 1),
            });
        }
        if !(p.lambda > R::zero()) {
            nonpositive_weight = true;
        }
        weight_sum = weight_sum + p.lambda;
        units = units.max((norm(&p.x) - R::one()).abs().as_f64());
        let value = t.quad_form(&p.x);
        attainment = attainment.max(((value.norm() - wt).abs() / scale).as_f64());
    }
    let constraints = generators
        .iter()
        .map(|a| {
            let an = a.fro_norm();
            if an == R::zero() {
                return 0.0;
            }
            let v = cert.points.iter().fold(czero::<R>(), |acc, p| {
                acc + t.quad_form(&p.x).conj() * a.quad_form(&p.x) * p.lambda
            });
            (v.norm() / (scale * an)).as_f64()
        })
        .collect();
    Ok(WResidualReport {
        weights: (weight_sum - R::one()).abs().as_f64(),
        units,
        attainment,
        constraints,
        nonpositive_weight,
    })
}

/// Recomputes `w(T + sum gamma_j A_j)` for a claimed witness.
pub fn validate_worth_witness<R: Real>(
    t: &ComplexMatrix<R>,
    generators: &[ComplexMatrix<R>],
    coeffs: &[Cx<R>],
) -> Result<(R, R)> {
    if generators.len() != coeffs.len() {
        return Err(Error::InvalidSpec(format!(
            "witness has {} coefficients for {} generators",
            coeffs.len(),
            generators.len()
        )));
    }
    let b = combine(generators, coeffs, t.shape(), Field::Complex);
    let base = numerical_radius(t);
    let perturbed = numerical_radius(&t.axpy(cx(R::one(), R::zero()), &b));
    Ok((base, perturbed))
}

/// Certificate search first, then the numerical-radius oracle.
pub fn worth_check<R: Real>(t: &ComplexMatrix<R>, w: &SubspaceBasis<R>) -> Result<WorthVerdict<R>> {
    worth_check_with(t, w, &WorthSettings::default())
}

pub fn worth_check_with<R: Real>(
    t: &ComplexMatrix<R>,
    w: &SubspaceBasis<R>,
    settings: &WorthSettings,
) -> Result<WorthVerdict<R>> {
    check_input(t, w)?;
    let t = t.clone().with_field(Field::Complex)?;
    if t.is_zero() {
        // w(A) >= 0 = w(T) for every A
        return Ok(WorthVerdict {
            decision: WorthDecision::CertifiedOrthogonal,
            w: R::zero(),
            certificate: None,
            witness: None,
            oracle: None,
            samples: 0,
        });
    }
    let att = numrad_attainment(&t)?;
    let samples = att.samples.len();
    if let Some(cert) = certify_from_samples(&t, w, &att, settings) {
        return Ok(WorthVerdict {
            decision: WorthDecision::CertifiedOrthogonal,
            w: att.w,
            certificate: Some(cert),
            witness: None,
            oracle: None,
            samples,
        });
    }
    let res = min_numrad_over_subspace(&t, w, &settings.oracle)?;
    let mut decision = WorthDecision::OracleOrthogonal;
    let mut witness = None;
    if res.min_value < res.base_value * (R::one() - R::lit(ORACLE_MARGIN)) {
        let (base, perturbed) = validate_worth_witness(&t, &w.generators, &res.coeffs)?;
        let decrease = base - perturbed;
        if decrease > R::lit(settings.tolerances.eps_wit) * base {
            decision = WorthDecision::NotOrthogonal;
            witness = Some(WWitness {
                coeffs: res.coeffs.clone(),
                perturbed,
                decrease,
            });
        }
    }
    Ok(WorthVerdict {
        decision,
        w: att.w,
        certificate: None,
        witness,
        oracle: Some(res),
        samples,
    })
}
