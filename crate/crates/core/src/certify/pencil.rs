//! Constraint pencils and the separation problem over their joint numerical
//! range.

use crate::attainment::AttainmentSubspace;
use crate::certify::basis::SubspaceBasis;
use crate::error::{Error, Result};
use crate::linalg::eig::jacobi;
use crate::linalg::{ComplexMatrix, Field};
use crate::optim::{subgradient_minimize, SubgradientSettings};
use crate::rng::InstanceRng;
use crate::scalar::{cx, czero, Cx, Real};

/// Which part of `x*(T*A_j)x` a pencil member measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Re,
    Im,
}

/// Hermitian `k x k` matrices `H_1, ..., H_d` with `(Uc)*T*A_j(Uc)` equal to
/// `c*H_{2j-1}c + i c*H_{2j}c` (complex field) or `c*H_j c` (real field).
#[derive(Debug, Clone)]
pub struct Pencil<R> {
    pub mats: Vec<ComplexMatrix<R>>,
    /// `(orthonormal generator index, part)` for each member.
    pub origin: Vec<(usize, Part)>,
    pub field: Field,
}

impl<R: Real> Pencil<R> {
    pub fn from_mats(mats: Vec<ComplexMatrix<R>>) -> Self {
        let field = mats.iter().fold(Field::Real, |f, m| f.join(m.field()));
        let origin = (0..mats.len()).map(|i| (i, Part::Re)).collect();
        Self { mats, origin, field }
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    /// Size `k` of the members.
    pub fn size(&self) -> usize {
        self.mats.first().map_or(0, |m| m.rows())
    }

    /// `sum_l c_l H_l`.
    pub fn combine(&self, c: &[R]) -> ComplexMatrix<R> {
        let k = self.size();
        let mut data = vec![czero::<R>(); k * k];
        for (h, &cl) in self.mats.iter().zip(c) {
            if cl == R::zero() {
                continue;
            }
            for (d, &v) in data.iter_mut().zip(h.data()) {
                *d = *d + v * cl;
            }
        }
        ComplexMatrix::from_parts(k, k, self.field, data)
    }

    /// The point `(x*H_1x, ..., x*H_dx)` of the joint numerical range.
    pub fn joint_point(&self, x: &[Cx<R>]) -> Vec<R> {
        self.mats.iter().map(|h| h.quad_form(x).re).collect()
    }
}

/// Builds the constraint pencil of `T` against the orthonormal basis of `W`
/// on the attainment subspace `U`.
pub fn constraint_pencil<R: Real>(
    t: &ComplexMatrix<R>,
    att: &AttainmentSubspace<R>,
    w: &SubspaceBasis<R>,
) -> Result<Pencil<R>> {
    if w.shape() != t.shape() {
        return Err(Error::ShapeMismatch {
            expected: t.shape(),
            found: w.shape(),
        });
    }
    let field = t.field().join(w.field());
    let u = &att.basis;
    let tu = t.matmul(u)?;
    let half = R::lit(0.5);
    let mut mats = Vec::new();
    let mut origin = Vec::new();
    for (j, b) in w.orthonormalized.iter().enumerate() {
        let m = tu.adjoint_mul(&b.matmul(u)?)?;
        let k = m.rows();
        mats.push(ComplexMatrix::from_fn(k, k, field, |a, c| (m.get(a, c) + m.get(c, a).conj()) * half));
        origin.push((j, Part::Re));
        if field == Field::Complex {
            // (M - M*) / (2i)
            let mi = cx(R::zero(), -half);
            mats.push(ComplexMatrix::from_fn(k, k, field, |a, c| (m.get(a, c) - m.get(c, a).conj()) * mi));
            origin.push((j, Part::Im));
        }
    }
    Ok(Pencil { mats, origin, field })
}

#[derive(Debug, Clone, Copy)]
pub struct SeparationSettings {
    pub random_starts: usize,
    /// Subgradient iterations per start.
    pub budget: usize,
    pub patience: usize,
    pub seed: u64,
}

impl Default for SeparationSettings {
    fn default() -> Self {
        Self {
            random_starts: 5,
            budget: 5000,
            patience: 40,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Separation<R> {
    /// Minimizer over the unit ball.
    pub c: Vec<R>,
    /// `min lambda_max(sum c_l H_l)`, always `<= 0`.
    pub mu: R,
    pub iterations: usize,
    /// Some start used its full budget without settling.
    pub budget_exhausted: bool,
}

/// `lambda_max(sum c_l H_l)` and a subgradient `(v*H_l v)_l`.
pub fn separation_value<R: Real>(pencil: &Pencil<R>, c: &[R]) -> (R, Vec<R>) {
    let eig = jacobi(&pencil.combine(c), true);
    let v = eig.vector(0);
    (eig.values[0], pencil.joint_point(&v))
}

fn project_ball<R: Real>(c: &mut [R]) {
    let n = c.iter().map(|&x| x * x).sum::<R>().sqrt();
    if n > R::one() {
        for x in c.iter_mut() {
            *x = *x / n;
        }
    }
}

/// Minimizes `f(c) = lambda_max(sum c_l H_l)` over the unit ball by projected
/// subgradient from random unit starts and the signed coordinate directions.
///
/// `f` is convex, positively homogeneous and `f(0) = 0`, so the minimum is
/// `<= 0`; it equals minus the distance from the origin to the convex hull of
/// the joint numerical range.
pub fn separation_minimize<R: Real>(pencil: &Pencil<R>, settings: &SeparationSettings) -> Separation<R> {
    let d = pencil.len();
    let mut best = Separation {
        c: vec![R::zero(); d],
        mu: R::zero(),
        iterations: 0,
        budget_exhausted: false,
    };
    if d == 0 || pencil.size() == 0 {
        return best;
    }
    let mut starts: Vec<Vec<R>> = Vec::new();
    for l in 0..d {
        for s in [R::one(), -R::one()] {
            let mut e = vec![R::zero(); d];
            e[l] = s;
            starts.push(e);
        }
    }
    let mut rng = InstanceRng::new(settings.seed);
    for _ in 0..settings.random_starts {
        let v: Vec<R> = (0..d).map(|_| R::lit(rng.normal())).collect();
        let n = v.iter().map(|&x| x * x).sum::<R>().sqrt();
        if n > R::zero() {
            starts.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    let sub = SubgradientSettings {
        budget: settings.budget,
        step: 1.0,
        patience: settings.patience,
        min_step_ratio: 1e-10,
    };
    for start in starts {
        let run = subgradient_minimize(|c| separation_value(pencil, c), project_ball, start, &sub);
        best.iterations += run.iterations;
        best.budget_exhausted |= run.budget_exhausted;
        if run.best_value < best.mu {
            best.mu = run.best_value;
            best.c = run.best;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attainment::{attainment_subspace, EPS_GAP};
    use crate::rng::InstanceRng;
    use crate::scalar::re;

    type M = ComplexMatrix<f64>;

    fn pencil_of(mats: Vec<M>) -> Pencil<f64> {
        Pencil::from_mats(mats)
    }

    #[test]
    fn rank_one_attainment_pencil_is_zero() {
        let t = M::diag_real(&[1.0, 0.5]);
        let a = M::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let att = attainment_subspace(&t, EPS_GAP).unwrap();
        let p = constraint_pencil(&t, &att, &SubspaceBasis::new(vec![a]).unwrap()).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.size(), 1);
        assert!(p.mats[0].max_abs() < 1e-15);
    }

    #[test]
    fn identity_against_diagonal() {
        let t = M::identity(2, Field::Real);
        let a = M::diag_real(&[1.0, -1.0]);
        let att = attainment_subspace(&t, EPS_GAP).unwrap();
        let p = constraint_pencil(&t, &att, &SubspaceBasis::new(vec![a]).unwrap()).unwrap();
        assert_eq!(p.len(), 1);
        // orthonormalized generator is diag(1,-1)/sqrt2; compare the spectrum
        let ev = crate::linalg::herm_eigvals(&p.mats[0]).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((ev[0] - s).abs() < 1e-12 && (ev[1] + s).abs() < 1e-12);
    }

    #[test]
    fn pencil_reproduces_quadratic_form() {
        let mut rng = InstanceRng::new(17);
        let t: M = rng.unitary(4, Field::Complex);
        let a: M = rng.matrix(4, 4, Field::Complex);
        let att = attainment_subspace(&t, EPS_GAP).unwrap();
        let w = SubspaceBasis::new(vec![a]).unwrap();
        let p = constraint_pencil(&t, &att, &w).unwrap();
        assert_eq!(p.len(), 2);
        let tab = t.adjoint_mul(&w.orthonormalized[0]).unwrap();
        for _ in 0..100 {
            let c = rng.unit_vector::<f64>(att.dim(), Field::Complex);
            let x = att.lift(&c);
            let lhs = tab.quad_form(&x);
            let rhs = cx(p.mats[0].quad_form(&c).re, p.mats[1].quad_form(&c).re);
            assert!((lhs - rhs).norm() < 1e-10);
        }
    }

    #[test]
    fn separation_on_indefinite_is_zero() {
        let p = pencil_of(vec![M::diag_real(&[1.0, -1.0])]);
        let s = separation_minimize(&p, &SeparationSettings::default());
        assert!(s.mu >= -1e-12 && s.mu <= 0.0);
    }

    #[test]
    fn separation_on_negative_definite() {
        let p = pencil_of(vec![M::diag_real(&[-1.0, -2.0])]);
        let s = separation_minimize(&p, &SeparationSettings::default());
        assert!((s.mu + 1.0).abs() < 1e-9, "mu {}", s.mu);
        assert!((s.c[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn separation_on_circle_image_is_zero() {
        let p = pencil_of(vec![
            M::diag_real(&[1.0, -1.0]),
            M::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap(),
        ]);
        let s = separation_minimize(&p, &SeparationSettings::default());
        assert!(s.mu > -1e-9);
        // brute force: for every direction some point of the circle is >= 0
        for i in 0..10_000 {
            let phi = std::f64::consts::TAU * i as f64 / 10_000.0;
            let (f, _) = separation_value(&p, &[phi.cos(), phi.sin()]);
            assert!(f >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn shifted_circle_is_separated() {
        // image of the unit circle centred at (2, 0): distance 1 from 0
        let p = pencil_of(vec![
            M::diag_real(&[3.0, 1.0]),
            M::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap(),
        ]);
        let s = separation_minimize(&p, &SeparationSettings::default());
        assert!((s.mu + 1.0).abs() < 1e-8, "mu {}", s.mu);
        assert!((s.c[0] + 1.0).abs() < 1e-4);
        let _ = re::<f64>(0.0);
    }
}
