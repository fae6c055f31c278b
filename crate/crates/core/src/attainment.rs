//! Norm-attainment structure of an operator.
//!
//! In finite dimensions the unit vectors at which `T` attains its operator
//! norm are exactly the unit sphere of the top right-singular subspace. The
//! numerical radius `w(T) = max_theta lambda_max(Re(e^{i theta} T))` is found by
//! a theta grid followed by golden-section refinement; its attaining vectors
//! are the top eigenvectors of `Re(e^{i theta} T)` at the maximizing angles.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::linalg::eig::jacobi;
use crate::linalg::vector::normalized;
use crate::linalg::{svd, ComplexMatrix, Field};
use crate::optim::golden_max;
use crate::scalar::{cx, czero, Cx, Real};

/// Default relative width of the top singular-value cluster.
pub const EPS_GAP: f64 = 1e-8;
/// Tolerance on `| |x*Tx| - w |` for numerical-radius samples.
pub const EPS_W: f64 = 1e-7;

/// Orthonormal basis `U` (`n x k`) of the subspace on which `T` attains its norm.
#[derive(Debug, Clone)]
pub struct AttainmentSubspace<R> {
    /// `|T|`.
    pub norm: R,
    pub basis: ComplexMatrix<R>,
    /// `sigma_1 - sigma_{k+1}`, or zero when the subspace is the whole domain.
    pub gap: R,
}

impl<R: Real> AttainmentSubspace<R> {
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    /// Orthogonal projector `U U*` onto the subspace.
    pub fn projector(&self) -> ComplexMatrix<R> {
        self.basis.matmul(&self.basis.adjoint()).expect("U U* is defined")
    }

    /// Lifts coordinates `c` in the basis to the vector `U c`.
    pub fn lift(&self, c: &[Cx<R>]) -> Vec<Cx<R>> {
        self.basis.mul_vec(c)
    }
}

/// Top right-singular subspace of `t`: every right singular vector with
/// `sigma_i >= sigma_1 (1 - eps_gap)`.
pub fn attainment_subspace<R: Real>(t: &ComplexMatrix<R>, eps_gap: R) -> Result<AttainmentSubspace<R>> {
    let s = svd(t);
    let sigma1 = s.values[0];
    if sigma1 == R::zero() {
        return Err(Error::ZeroOperator);
    }
    let threshold = sigma1 * (R::one() - eps_gap);
    let k = s.values.iter().take_while(|&&v| v >= threshold).count().max(1);
    let cols = t.cols();
    let gap = if k == cols {
        R::zero()
    } else if k < s.values.len() {
        sigma1 - s.values[k]
    } else {
        // remaining singular values are structurally zero (cols > rows)
        sigma1
    };
    let basis: Vec<Vec<Cx<R>>> = (0..k).map(|i| s.v.column(i)).collect();
    Ok(AttainmentSubspace {
        norm: sigma1,
        basis: ComplexMatrix::from_columns(cols, &basis, t.field()),
        gap,
    })
}

/// Compression `U* M U` of a square matrix onto the span of `u`'s columns.
pub fn compress<R: Real>(m: &ComplexMatrix<R>, u: &ComplexMatrix<R>) -> Result<ComplexMatrix<R>> {
    if !m.is_square() {
        return Err(Error::NonSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if u.rows() != m.rows() {
        return Err(Error::ShapeMismatch {
            expected: (m.rows(), u.cols()),
            found: u.shape(),
        });
    }
    u.adjoint_mul(&m.matmul(u)?)
}

/// Grid and refinement settings for the numerical radius.
#[derive(Debug, Clone, Copy)]
pub struct NumRadGrid {
    pub points: usize,
    /// Number of best local maxima refined.
    pub peaks: usize,
    /// Golden-section rounds per peak, each on a bracket 8x narrower.
    pub rounds: usize,
    pub iterations: usize,
}

impl Default for NumRadGrid {
    fn default() -> Self {
        Self {
            points: 720,
            peaks: 5,
            rounds: 3,
            iterations: 40,
        }
    }
}

/// `Re(e^{i theta} T) = (e^{i theta} T + e^{-i theta} T*) / 2`.
pub fn rotated_real_part<R: Real>(t: &ComplexMatrix<R>, theta: R) -> ComplexMatrix<R> {
    let e = cx(theta.cos(), theta.sin());
    let half = R::lit(0.5);
    let n = t.rows();
    ComplexMatrix::from_fn(n, n, Field::Complex, |i, j| (e * t.get(i, j) + (e * t.get(j, i)).conj()) * half)
}

/// `lambda_max(Re(e^{i theta} T))`.
pub fn numrad_profile<R: Real>(t: &ComplexMatrix<R>, theta: R) -> R {
    jacobi(&rotated_real_part(t, theta), false).values[0]
}

/// A refined local maximum of the numerical-radius profile.
#[derive(Debug, Clone, Copy)]
pub struct ProfilePeak<R> {
    pub theta: R,
    pub value: R,
}

/// Locates the best local maxima of `theta -> lambda_max(Re(e^{i theta} T))`,
/// sorted by value (best first).
pub fn numrad_peaks<R: Real>(t: &ComplexMatrix<R>, grid: &NumRadGrid) -> Vec<ProfilePeak<R>> {
    let m = grid.points.max(3);
    let h = TAU / m as f64;
    let values: Vec<R> = (0..m).map(|i| numrad_profile(t, R::lit(h * i as f64))).collect();
    let mut maxima: Vec<usize> = (0..m)
        .filter(|&i| {
            let prev = values[(i + m - 1) % m];
            let next = values[(i + 1) % m];
            values[i] > prev && values[i] >= next
        })
        .collect();
    if maxima.is_empty() {
        // flat profile (e.g. T = 0)
        maxima.push(0);
    }
    maxima.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap_or(std::cmp::Ordering::Equal));
    maxima.truncate(grid.peaks.max(1));

    let mut peaks: Vec<ProfilePeak<R>> = maxima
        .into_iter()
        .map(|i| {
            let mut best = ProfilePeak {
                theta: R::lit(h * i as f64),
                value: values[i],
            };
            let mut half_width = h;
            for _ in 0..grid.rounds {
                let c = best.theta;
                let hw = R::lit(half_width);
                let (theta, value) = golden_max(|th| numrad_profile(t, th), c - hw, c + hw, grid.iterations);
                if value >= best.value {
                    best = ProfilePeak { theta, value };
                }
                half_width /= 8.0;
            }
            best.theta = wrap_angle(best.theta);
            best
        })
        .collect();
    peaks.sort_by(|a, b| b.value.partial_cmp(&a.value).unwrap_or(std::cmp::Ordering::Equal));
    peaks
}

fn wrap_angle<R: Real>(theta: R) -> R {
    let tau = R::lit(TAU);
    let r = theta % tau;
    if r < R::zero() {
        r + tau
    } else {
        r
    }
}

/// Numerical radius `w(T)` (the best refined peak, floored at zero).
pub fn numerical_radius<R: Real>(t: &ComplexMatrix<R>) -> R {
    numerical_radius_with(t, &NumRadGrid::default())
}

pub fn numerical_radius_with<R: Real>(t: &ComplexMatrix<R>, grid: &NumRadGrid) -> R {
    numrad_peaks(t, grid)[0].value.max(R::zero())
}

/// A unit vector `x` with `Re(e^{i theta} x*Tx) = w(T)`.
#[derive(Debug, Clone)]
pub struct NumRadSample<R> {
    pub theta: R,
    pub x: Vec<Cx<R>>,
    /// `x*Tx`, of modulus `w(T)`.
    pub value: Cx<R>,
}

/// Numerical radius together with attaining vectors.
#[derive(Debug, Clone)]
pub struct NumRadAttainment<R> {
    pub w: R,
    pub samples: Vec<NumRadSample<R>>,
}

/// Numerical radius and attaining samples of a square complex-field matrix.
///
/// For every maximizing angle, samples are the top-eigenspace basis of
/// `Re(e^{i theta} T)` plus the balanced pairs `(e_a +- e_b)/sqrt2` and
/// `(e_a +- i e_b)/sqrt2`; with `k` the eigenspace dimension this gives at
/// most `2k^2` vectors per angle.
pub fn numrad_attainment<R: Real>(t: &ComplexMatrix<R>) -> Result<NumRadAttainment<R>> {
    numrad_attainment_with(t, &NumRadGrid::default())
}

pub fn numrad_attainment_with<R: Real>(t: &ComplexMatrix<R>, grid: &NumRadGrid) -> Result<NumRadAttainment<R>> {
    if t.field() == Field::Real {
        return Err(Error::RealFieldUnsupported);
    }
    if !t.is_square() {
        return Err(Error::NonSquare {
            rows: t.rows(),
            cols: t.cols(),
        });
    }
    let peaks = numrad_peaks(t, grid);
    let w = peaks[0].value.max(R::zero());
    let scale = w.max(t.max_abs()).max(R::min_positive_value());
    let attain_tol = R::lit(1e-9) * scale;
    let cluster_tol = R::lit(EPS_GAP) * scale;

    let mut angles: Vec<R> = Vec::new();
    for p in &peaks {
        if p.value < w - attain_tol {
            continue;
        }
        let dup = angles.iter().any(|&a| {
            let d = (a - p.theta).abs();
            d < R::lit(1e-6) || (R::lit(TAU) - d) < R::lit(1e-6)
        });
        if !dup {
            angles.push(p.theta);
        }
    }

    let rel_tol = R::lit(EPS_W);
    let mut samples = Vec::new();
    for theta in angles {
        let eig = jacobi(&rotated_real_part(t, theta), true);
        let k = eig.top_multiplicity(cluster_tol);
        let basis: Vec<Vec<Cx<R>>> = (0..k).map(|i| eig.vector(i)).collect();
        let s = R::FRAC_1_SQRT_2();
        let mut candidates = basis.clone();
        for a in 0..k {
            for b in (a + 1)..k {
                for phase in [cx(R::one(), R::zero()), cx(-R::one(), R::zero()), cx(R::zero(), R::one()), cx(R::zero(), -R::one())] {
                    let v: Vec<Cx<R>> = basis[a].iter().zip(&basis[b]).map(|(&x, &y)| (x + phase * y) * s).collect();
                    candidates.push(v);
                }
            }
        }
        candidates.truncate(2 * k * k);
        for c in candidates {
            let Some(x) = normalized(&c) else { continue };
            let value = t.quad_form(&x);
            if (value.norm() - w).abs() <= rel_tol * scale {
                samples.push(NumRadSample { theta, x, value });
            }
        }
    }
    if samples.is_empty() {
        // T = 0 or a degenerate profile: any unit vector attains w = 0
        let mut e = vec![czero(); t.rows()];
        e[0] = cx(R::one(), R::zero());
        let value = t.quad_form(&e);
        samples.push(NumRadSample {
            theta: R::zero(),
            x: e,
            value,
        });
    }
    Ok(NumRadAttainment { w, samples })
}
