//! Distance from `T` to `Span{A}` and its lower bounds.
//!
//! `dist(T, Span{A}) = min_l |T - l A|` is a convex one-parameter problem
//! (two real parameters over the complex field). When `A` is bounded below
//! the same number is the supremum over unit `x` of
//! `|Tx - (<Tx, Ax> / |Ax|^2) Ax|`, and every state `g` gives the lower bound
//! `g(T*T) - |g(A*T)|^2 / g(A*A) <= dist^2`.

use crate::certify::basis::SubspaceBasis;
use crate::error::{Error, Result};
use crate::linalg::vector::{dot, norm, normalized};
use crate::linalg::{op_norm, svd, ComplexMatrix, Field};
use crate::optim::golden_min;
use crate::oracle::{min_opnorm_over_subspace, OracleSettings};
use crate::rng::InstanceRng;
use crate::scalar::{cx, czero, Cx, Real};

/// Smallest admissible `sigma_min(A) / sigma_max(A)` for [`mta_sup`].
pub const SINGULAR_RATIO: f64 = 1e-10;

fn check_same_shape<R: Real>(t: &ComplexMatrix<R>, a: &ComplexMatrix<R>) -> Result<()> {
    if t.shape() != a.shape() {
        return Err(Error::ShapeMismatch {
            expected: t.shape(),
            found: a.shape(),
        });
    }
    Ok(())
}

/// Minimizer of `|T - l A|` over scalars `l`.
#[derive(Debug, Clone, Copy)]
pub struct SpanDistance<R> {
    pub dist: R,
    pub lambda: Cx<R>,
}

/// Nested golden-section search over `Re l` and `Im l` in `|l| <= 2|T|/|A|`.
/// The objective is convex, so the partial minimum over `Im l` is convex in
/// `Re l` and both searches are on unimodal functions.
pub fn dist_by_golden<R: Real>(t: &ComplexMatrix<R>, a: &ComplexMatrix<R>, field: Field) -> SpanDistance<R> {
    let na = op_norm(a);
    let nt = op_norm(t);
    if na == R::zero() {
        return SpanDistance {
            dist: nt,
            lambda: czero(),
        };
    }
    let r = R::lit(2.0) * nt / na;
    let f = |l: Cx<R>| op_norm(&t.axpy(-l, a));
    let iters = 70;
    match field {
        Field::Real => {
            let (x, v) = golden_min(|x| f(cx(x, R::zero())), -r, r, iters);
            SpanDistance {
                dist: v,
                lambda: cx(x, R::zero()),
            }
        }
        Field::Complex => {
            let inner = |x: R| golden_min(|y| f(cx(x, y)), -r, r, iters);
            let (x, v) = golden_min(|x| inner(x).1, -r, r, iters);
            let (y, _) = inner(x);
            SpanDistance {
                dist: v,
                lambda: cx(x, y),
            }
        }
    }
}

/// `dist(T, Span{A})` and a minimizing scalar: the better of the subgradient
/// oracle and the nested golden-section search.
pub fn dist_to_span<R: Real>(t: &ComplexMatrix<R>, a: &ComplexMatrix<R>) -> Result<SpanDistance<R>> {
    check_same_shape(t, a)?;
    let field = t.field().join(a.field());
    if a.is_zero() {
        return Ok(SpanDistance {
            dist: op_norm(t),
            lambda: czero(),
        });
    }
    let golden = dist_by_golden(t, a, field);
    let w = SubspaceBasis::new(vec![a.clone()])?;
    let settings = OracleSettings {
        restarts: 4,
        grid_check: false,
        ..OracleSettings::default()
    };
    let res = min_opnorm_over_subspace(t, &w, &settings)?;
    // the oracle minimizes |T + l A|
    if res.min_value < golden.dist {
        Ok(SpanDistance {
            dist: res.min_value,
            lambda: -res.coeffs[0],
        })
    } else {
        Ok(golden)
    }
}

/// `sigma_min(A) / sigma_max(A)` over the domain (zero when `A` has more
/// columns than rows).
pub fn bounded_below_ratio<R: Real>(a: &ComplexMatrix<R>) -> R {
    if a.cols() > a.rows() {
        return R::zero();
    }
    let s = svd(a);
    let max = s.values[0];
    if max == R::zero() {
        return R::zero();
    }
    *s.values.last().expect("nonempty") / max
}

/// Squared residual `|Tx|^2 - |x*A*Tx|^2 / |Ax|^2` of `Tx` after removing its
/// component along `Ax`.
pub fn mta_objective<R: Real>(t: &ComplexMatrix<R>, a: &ComplexMatrix<R>, x: &[Cx<R>]) -> R {
    let tx = t.mul_vec(x);
    let ax = a.mul_vec(x);
    let c = dot(&ax, &ax).re;
    let b = dot(&ax, &tx);
    let r: Vec<Cx<R>> = tx.iter().zip(&ax).map(|(&u, &v)| u - v * (b / c)).collect();
    let n = norm(&r);
    n * n
}

struct MtaParts<R> {
    ttt: ComplexMatrix<R>,
    ata: ComplexMatrix<R>,
    g: ComplexMatrix<R>,
}

impl<R: Real> MtaParts<R> {
    fn value_and_gradient(&self, x: &[Cx<R>]) -> (R, Vec<Cx<R>>) {
        let tt = self.ttt.mul_vec(x);
        let aa = self.ata.mul_vec(x);
        let gx = self.g.mul_vec(x);
        let gsx = self.g.adjoint_mul_vec(x);
        let a = dot(x, &tt).re;
        let c = dot(x, &aa).re;
        let b = dot(x, &gx);
        let b2 = b.norm_sqr();
        let value = a - b2 / c;
        let grad = (0..x.len())
            .map(|i| tt[i] - (b.conj() * gx[i] + b * gsx[i]) / c + aa[i] * (b2 / (c * c)))
            .collect();
        (value, grad)
    }
}

fn ascend<R: Real>(parts: &MtaParts<R>, start: Vec<Cx<R>>, field: Field, iterations: usize) -> (R, Vec<Cx<R>>) {
    let mut x = start;
    let (mut f, mut g) = parts.value_and_gradient(&x);
    let mut step = R::one();
    for _ in 0..iterations {
        // tangent component of the gradient
        let radial = dot(&x, &g).re;
        let mut d: Vec<Cx<R>> = g.iter().zip(&x).map(|(&gi, &xi)| gi - xi * radial).collect();
        if field == Field::Real {
            for v in d.iter_mut() {
                v.im = R::zero();
            }
        }
        let dn = norm(&d);
        if dn <= R::lit(1e-15) * f.abs().max(R::one()) {
            break;
        }
        let mut improved = false;
        for _ in 0..40 {
            let cand: Vec<Cx<R>> = x.iter().zip(&d).map(|(&xi, &di)| xi + di * (step / dn)).collect();
            let Some(cand) = normalized(&cand) else { break };
            let (fc, gc) = parts.value_and_gradient(&cand);
            if fc > f {
                x = cand;
                f = fc;
                g = gc;
                step = step * R::lit(1.5);
                improved = true;
                break;
            }
            step = step * R::lit(0.5);
        }
        if !improved || step < R::lit(1e-14) {
            break;
        }
    }
    (f, x)
}

/// `M_T(A) = sup_{|x|=1} |Tx - (<Tx,Ax>/|Ax|^2) Ax|` by multistart projected
/// gradient ascent on the unit sphere.
pub fn mta_sup<R: Real>(t: &ComplexMatrix<R>, a: &ComplexMatrix<R>) -> Result<R> {
    mta_sup_with(t, a, 32, 0x6d7461)
}

pub fn mta_sup_with<R: Real>(t: &ComplexMatrix<R>, a: &ComplexMatrix<R>, random_starts: usize, seed: u64) -> Result<R> {
    check_same_shape(t, a)?;
    let ratio = bounded_below_ratio(a);
    if !(ratio > R::lit(SINGULAR_RATIO)) {
        return Err(Error::SingularA { ratio: ratio.as_f64() });
    }
    let field = t.field().join(a.field());
    let parts = MtaParts {
        ttt: t.adjoint_mul(t)?,
        ata: a.adjoint_mul(a)?,
        g: a.adjoint_mul(t)?,
    };
    let n = t.cols();
    let mut starts: Vec<Vec<Cx<R>>> = Vec::new();
    // right singular vectors of T and of the best residual T - l A
    let best = dist_by_golden(t, a, field);
    for m in [t.clone(), t.axpy(-best.lambda, a)] {
        let s = svd(&m);
        for j in 0..s.v.cols().min(3) {
            starts.push(s.v.column(j));
        }
    }
    let mut rng = InstanceRng::new(seed);
    for _ in 0..random_starts {
        starts.push(rng.unit_vector(n, field));
    }
    let mut best_value = R::zero();
    for x in starts {
        let Some(x) = normalized(&x) else { continue };
        let (f, _) = ascend(&parts, x, field, 2000);
        if f > best_value {
            best_value = f;
        }
    }
    Ok(best_value.max(R::zero()).sqrt())
}

/// A state `g` on `n x n` matrices.
#[derive(Debug, Clone)]
pub enum StateSpec<R> {
    /// `g(S) = s_jj`.
    DiagonalUnit(usize),
    /// `g(S) = tr(S) / n`.
    NormalizedTrace,
    /// `g(S) = x*Sx` with `|x| = 1`.
    VectorState(Vec<Cx<R>>),
}

impl<R: Real> StateSpec<R> {
    pub fn apply(&self, s: &ComplexMatrix<R>) -> Result<Cx<R>> {
        let n = s.rows();
        match self {
            StateSpec::DiagonalUnit(j) => {
                if *j >= n {
                    return Err(Error::ShapeMismatch {
                        expected: (n, n),
                        found: (j + 1, j + 1),
                    });
                }
                Ok(s.get(*j, *j))
            }
            StateSpec::NormalizedTrace => Ok(s.trace() / R::lit(n as f64)),
            StateSpec::VectorState(x) => {
                if x.len() != n {
                    return Err(Error::ShapeMismatch {
                        expected: (n, 1),
                        found: (x.len(), 1),
                    });
                }
                let xn = norm(x);
                if (xn - R::one()).abs() > R::lit(1e-10) {
                    return Err(Error::NotUnit { norm: xn.as_f64() });
                }
                Ok(s.quad_form(x))
            }
        }
    }
}

/// `g(T*T) - |g(A*T)|^2 / g(A*A)`, a lower bound on `dist(T, Span{A})^2`.
pub fn state_lower_bound<R: Real>(t: &ComplexMatrix<R>, a: &ComplexMatrix<R>, g: &StateSpec<R>) -> Result<R> {
    check_same_shape(t, a)?;
    let gaa = g.apply(&a.adjoint_mul(a)?)?.re;
    let scale = a.max_abs() * a.max_abs();
    if !(gaa > R::lit(1e-14) * scale) || scale == R::zero() {
        return Err(Error::StateDegenerate);
    }
    let gtt = g.apply(&t.adjoint_mul(t)?)?.re;
    let gat = g.apply(&a.adjoint_mul(t)?)?;
    Ok(gtt - gat.norm_sqr() / gaa)
}

/// Largest column bound `sum_i |t_ij|^2 - |sum_i conj(a_ij) t_ij|^2 / sum_i |a_ij|^2`.
pub fn column_bound_max<R: Real>(t: &ComplexMatrix<R>, a: &ComplexMatrix<R>) -> Result<R> {
    check_same_shape(t, a)?;
    for j in 0..a.cols() {
        if a.column(j).iter().all(|z| z.re == R::zero() && z.im == R::zero()) {
            return Err(Error::ZeroColumn(j));
        }
    }
    let mut best = R::neg_infinity();
    for j in 0..a.cols() {
        best = best.max(state_lower_bound(t, a, &StateSpec::DiagonalUnit(j))?);
    }
    Ok(best)
}

/// Normalized-trace bound `(|T|_F^2 - |tr(T*A)|^2 / |A|_F^2) / n`.
pub fn trace_bound<R: Real>(t: &ComplexMatrix<R>, a: &ComplexMatrix<R>) -> Result<R> {
    state_lower_bound(t, a, &StateSpec::NormalizedTrace)
}

#[derive(Debug, Clone)]
pub struct LowerBounds<R> {
    /// `None` when `A` has a zero column.
    pub column: Option<R>,
    pub frobenius: R,
}

#[derive(Debug, Clone)]
pub struct DistanceReport<R> {
    pub dist: R,
    pub argmin_lambda: Cx<R>,
    /// `None` when `A` is not bounded below.
    pub mta: Option<R>,
    pub lower_bounds: LowerBounds<R>,
    /// Each lower bound is at most `dist^2 + 1e-6`.
    pub bounds_consistent: bool,
    /// `|dist - mta| <= 1e-5`, when `mta` is available.
    pub mta_consistent: Option<bool>,
}

/// Distance, the sphere supremum (when requested and defined) and both
/// explicit lower bounds.
pub fn distance_report<R: Real>(t: &ComplexMatrix<R>, a: &ComplexMatrix<R>, with_mta: bool) -> Result<DistanceReport<R>> {
    let d = dist_to_span(t, a)?;
    let mta = if with_mta { Some(mta_sup(t, a)?) } else { None };
    let column = match column_bound_max(t, a) {
        Ok(v) => Some(v),
        Err(Error::ZeroColumn(_)) => None,
        Err(e) => return Err(e),
    };
    let frobenius = match trace_bound(t, a) {
        Ok(v) => v,
        Err(Error::StateDegenerate) => R::zero(),
        Err(e) => return Err(e),
    };
    let d2 = d.dist * d.dist + R::lit(1e-6);
    let bounds_consistent = frobenius <= d2 && column.map_or(true, |c| c <= d2);
    Ok(DistanceReport {
        dist: d.dist,
        argmin_lambda: d.lambda,
        mta,
        lower_bounds: LowerBounds { column, frobenius },
        bounds_consistent,
        mta_consistent: mta.map(|m| (m - d.dist).abs() <= R::lit(1e-5)),
    })
}
