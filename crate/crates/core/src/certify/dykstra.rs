//! Primal recovery: a density matrix in the affine slice cut out by a pencil.

use crate::error::{Error, Result};
use crate::linalg::eig::jacobi;
use crate::linalg::{ComplexMatrix, Field};
use crate::scalar::{re, Real};

#[derive(Debug, Clone, Copy)]
pub struct DykstraSettings {
    pub max_iterations: usize,
    /// Window for stall detection.
    pub stall_window: usize,
    /// Minimum relative residual decrease across one window.
    pub stall_progress: f64,
    /// Target distance between the spectrahedron iterate and the affine set.
    pub target: f64,
}

impl Default for DykstraSettings {
    fn default() -> Self {
        Self {
            max_iterations: 20_000,
            stall_window: 500,
            stall_progress: 1e-14,
            target: 1e-11,
        }
    }
}

/// Output of [`find_density`].
#[derive(Debug, Clone)]
pub struct Density<R> {
    /// `Q` after the final affine projection: `tr Q = 1`, `tr(Q H_l) = 0`.
    pub q: ComplexMatrix<R>,
    pub iterations: usize,
    /// `|P_affine(Y) - Y|_F` for the last spectrahedron iterate `Y`.
    pub residual: R,
}

/// Euclidean projection onto the probability simplex.
pub fn project_simplex<R: Real>(v: &[R]) -> Vec<R> {
    let mut u: Vec<R> = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let mut cumsum = R::zero();
    let mut theta = R::zero();
    for (j, &uj) in u.iter().enumerate() {
        cumsum = cumsum + uj;
        let t = (cumsum - R::one()) / R::lit((j + 1) as f64);
        if uj - t > R::zero() {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(R::zero())).collect()
}

/// Projection onto `{Q >= 0, tr Q = 1}`.
pub fn project_spectrahedron<R: Real>(y: &ComplexMatrix<R>) -> ComplexMatrix<R> {
    let eig = jacobi(&y.hermitian_part(), true);
    let lam = project_simplex(&eig.values);
    let k = y.rows();
    ComplexMatrix::from_fn(k, k, y.field(), |a, b| {
        lam.iter()
            .enumerate()
            .filter(|(_, &l)| l > R::zero())
            .fold(re(R::zero()), |acc, (i, &l)| {
                acc + eig.vectors.get(a, i) * eig.vectors.get(b, i).conj() * l
            })
    })
}

/// The affine set `{tr Q = 1, tr(Q H_l) = 0}` with an orthonormalized
/// constraint system.
struct AffineSlice<R> {
    normals: Vec<ComplexMatrix<R>>,
    rhs: Vec<R>,
}

fn real_inner<R: Real>(a: &ComplexMatrix<R>, b: &ComplexMatrix<R>) -> R {
    a.data().iter().zip(b.data()).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

impl<R: Real> AffineSlice<R> {
    fn new(pencil: &[ComplexMatrix<R>], k: usize, field: Field) -> Result<Self> {
        let mut normals: Vec<ComplexMatrix<R>> = Vec::new();
        let mut rhs: Vec<R> = Vec::new();
        let mut system: Vec<(ComplexMatrix<R>, R)> = vec![(ComplexMatrix::identity(k, field), R::one())];
        system.extend(pencil.iter().map(|h| (h.hermitian_part(), R::zero())));
        for (mut v, mut b) in system {
            let scale = v.fro_norm();
            if scale == R::zero() {
                continue;
            }
            for _ in 0..2 {
                for (g, &bg) in normals.iter().zip(&rhs) {
                    let p = real_inner(g, &v);
                    v = v.axpy(re(-p), g);
                    b = b - p * bg;
                }
            }
            let nv = v.fro_norm();
            if nv <= R::lit(1e-10) * scale {
                if b.abs() > R::lit(1e-9) {
                    // tr Q = 1 contradicts the homogeneous constraints
                    return Err(Error::DykstraStalled {
                        iterations: 0,
                        residual: b.abs().as_f64(),
                    });
                }
                continue;
            }
            normals.push(v.scale_real(R::one() / nv));
            rhs.push(b / nv);
        }
        Ok(Self { normals, rhs })
    }

    fn project(&self, y: &ComplexMatrix<R>) -> ComplexMatrix<R> {
        let mut x = y.clone();
        for (g, &b) in self.normals.iter().zip(&self.rhs) {
            let r = real_inner(g, &x) - b;
            x = x.axpy(re(-r), g);
        }
        x
    }
}

/// Finds `Q >= 0`, `tr Q = 1` with `tr(Q H_l) = 0` for every pencil member by
/// Dykstra's alternating projections, started from `I/k`.
pub fn find_density<R: Real>(pencil: &[ComplexMatrix<R>], k: usize, settings: &DykstraSettings) -> Result<Density<R>> {
    let field = pencil.iter().fold(Field::Real, |f, h| f.join(h.field()));
    let slice = AffineSlice::new(pencil, k, field)?;
    let mut x = ComplexMatrix::identity(k, field).scale_real(R::one() / R::lit(k as f64));
    let mut p = ComplexMatrix::zeros(k, k, field);
    let target = R::lit(settings.target);
    let mut window_start = R::infinity();
    let mut residual = R::infinity();
    for it in 1..=settings.max_iterations {
        let y = project_spectrahedron(&(&x + &p));
        p = &(&x + &p) - &y;
        x = slice.project(&y);
        residual = (&x - &y).fro_norm();
        if residual <= target {
            return Ok(Density {
                q: x.hermitian_part(),
                iterations: it,
                residual,
            });
        }
        if it % settings.stall_window == 0 {
            let progress = (window_start - residual) / residual.max(R::min_positive_value());
            if window_start.is_finite() && progress < R::lit(settings.stall_progress) {
                return Err(Error::DykstraStalled {
                    iterations: it,
                    residual: residual.as_f64(),
                });
            }
            window_start = residual;
        }
    }
    Err(Error::DykstraStalled {
        iterations: settings.max_iterations,
        residual: residual.as_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::herm_eigvals;

    type M = ComplexMatrix<f64>;

    #[test]
    fn simplex_projection_examples() {
        assert_eq!(project_simplex(&[0.5, 0.5]), vec![0.5, 0.5]);
        assert_eq!(project_simplex(&[2.0, 0.0]), vec![1.0, 0.0]);
        let p = project_simplex(&[0.3f64, -1.0, 0.3]);
        assert!((p[0] - 0.5).abs() < 1e-15 && p[1] == 0.0);
    }

    #[test]
    fn spectrahedron_projection_is_density() {
        let y = M::from_real(2, 2, &[2.0, 1.0, 1.0, -3.0]).unwrap();
        let q = project_spectrahedron(&y);
        let ev = herm_eigvals(&q).unwrap();
        assert!(ev[1] >= -1e-15);
        assert!((q.trace().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn traceless_pencil_gives_maximally_mixed() {
        let pencil = vec![M::diag_real(&[1.0, -1.0]), M::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()];
        let d = find_density(&pencil, 2, &DykstraSettings::default()).unwrap();
        assert!((&d.q - &M::diag_real(&[0.5, 0.5])).max_abs() < 1e-12);
    }

    #[test]
    fn boundary_solution() {
        // only e1 e1* satisfies tr(Q diag(0,1)) = 0
        let d = find_density(&[M::diag_real(&[0.0, 1.0])], 2, &DykstraSettings::default()).unwrap();
        assert!((d.q.get(0, 0).re - 1.0).abs() < 1e-8);
    }

    #[test]
    fn infeasible_pencils_are_reported() {
        // identity member contradicts the trace condition directly
        assert!(matches!(
            find_density(&[M::identity(2, Field::Real)], 2, &DykstraSettings::default()),
            Err(Error::DykstraStalled { iterations: 0, .. })
        ));
        // positive definite member: no density satisfies tr(QH) = 0
        let r = find_density(&[M::diag_real(&[1.0, 2.0])], 2, &DykstraSettings::default());
        assert!(matches!(r, Err(Error::DykstraStalled { .. })));
    }
}
