//! Reproducible instance generators for tests, fuzzing and demos.

use serde::{Deserialize, Serialize};

use crate::certify::{OrthoCertificate, SubspaceBasis, WeightedVector};
use crate::error::{Error, Result};
use crate::linalg::vector::{norm, orthonormalize};
use crate::linalg::{ComplexMatrix, Field};
use crate::oracle::{decide_by_oracle, NormKind, OracleDecision, OracleResult, OracleSettings};
use crate::rng::InstanceRng;
use crate::scalar::{cx, czero, re, Cx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    OrthogonalByConstruction,
    ContainsT,
    OracleLabeled,
}

/// Everything needed to regenerate an instance bit for bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub n: usize,
    /// Dimension of the top singular subspace (`1 <= k <= n`).
    pub k: usize,
    /// Number of generators of `W`.
    pub m: usize,
    pub field: Field,
    pub seed: u64,
    pub label: Label,
}

impl InstanceSpec {
    pub fn new(n: usize, k: usize, m: usize, field: Field, seed: u64, label: Label) -> Self {
        Self {
            n,
            k,
            m,
            field,
            seed,
            label,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidSpec("n must be positive".into()));
        }
        if self.m == 0 {
            return Err(Error::InvalidSpec("m must be positive".into()));
        }
        if self.k == 0 || self.k > self.n {
            return Err(Error::InvalidSpec(format!("k = {} outside 1..={}", self.k, self.n)));
        }
        Ok(())
    }
}

/// Lower and upper bound for the non-top singular values (and for the
/// moduli of the non-peripheral eigenvalues of numerical-radius instances).
const TAIL: (f64, f64) = (0.2, 0.8);

/// `U diag(1,...,1, s_{k+1},...,s_n) V*` with `s_i` drawn from `TAIL`.
/// Returns `T` and `V`.
fn unit_norm_operator<R: Real>(rng: &mut InstanceRng, n: usize, k: usize, field: Field) -> (ComplexMatrix<R>, ComplexMatrix<R>) {
    let u: ComplexMatrix<R> = rng.unitary(n, field);
    let v: ComplexMatrix<R> = rng.unitary(n, field);
    let s: Vec<R> = (0..n)
        .map(|i| if i < k { R::one() } else { R::lit(rng.uniform_in(TAIL.0, TAIL.1)) })
        .collect();
    let t = u
        .matmul(&ComplexMatrix::diag_real(&s))
        .and_then(|us| us.matmul(&v.adjoint()))
        .expect("square factors");
    (t, v)
}

/// `m` Frobenius-orthonormal random matrices orthogonal to `g` in the
/// Frobenius inner product of the field.
fn kernel_generators<R: Real>(
    rng: &mut InstanceRng,
    g: &ComplexMatrix<R>,
    m: usize,
    field: Field,
) -> Result<Vec<ComplexMatrix<R>>> {
    let (rows, cols) = g.shape();
    let capacity = rows * cols - 1;
    if m > capacity {
        return Err(Error::InvalidSpec(format!(
            "m = {m} exceeds the kernel dimension {capacity}"
        )));
    }
    let gn = g.fro_norm();
    let unit_g = g.scale_real(R::one() / gn);
    let flat = |a: &ComplexMatrix<R>| a.data().to_vec();
    loop {
        let mut draws = vec![flat(&unit_g)];
        for _ in 0..m {
            draws.push(flat(&rng.matrix::<R>(rows, cols, field)));
        }
        let (q, kept) = orthonormalize(&draws, R::lit(1e-8));
        if kept.len() == m + 1 {
            return Ok(q[1..]
                .iter()
                .map(|d| ComplexMatrix::new(rows, cols, field, d.clone()).expect("finite draws"))
                .collect());
        }
    }
}

/// A density matrix `sum l_i x_i x_i*` with `h` random unit vectors in the
/// column span of `basis`.
fn planted_density<R: Real>(rng: &mut InstanceRng, basis: &[Vec<Cx<R>>], h: usize, field: Field) -> OrthoCertificate<R> {
    let n = basis[0].len();
    let weights = rng.simplex(h);
    let terms = weights
        .into_iter()
        .map(|l| {
            let c: Vec<Cx<R>> = rng.unit_vector(basis.len(), field);
            let mut x = vec![czero::<R>(); n];
            for (cj, bj) in c.iter().zip(basis) {
                for (xi, &b) in x.iter_mut().zip(bj) {
                    *xi = *xi + *cj * b;
                }
            }
            let nx = norm(&x);
            WeightedVector {
                weight: R::lit(l),
                x: x.into_iter().map(|z| z / nx).collect(),
            }
        })
        .collect();
    OrthoCertificate::from_decomposition(n, terms, field)
}

/// Orthogonal instance with a planted certificate.
///
/// `T` has `|T| = 1` attained on a `k`-dimensional subspace `H`, `P` is a
/// random density of rank `<= k` supported on `H`, and `W` is spanned by
/// `m` orthonormal matrices `A` with `tr((TP)* A) = 0`.
pub fn gen_orthogonal<R: Real>(spec: &InstanceSpec) -> Result<(ComplexMatrix<R>, SubspaceBasis<R>, OrthoCertificate<R>)> {
    spec.validate()?;
    let mut rng = InstanceRng::new(spec.seed);
    let (t, v) = unit_norm_operator::<R>(&mut rng, spec.n, spec.k, spec.field);
    let top: Vec<Vec<Cx<R>>> = (0..spec.k).map(|j| v.column(j)).collect();
    let cert = planted_density(&mut rng, &top, spec.k, spec.field);
    let g = t.matmul(&cert.p)?;
    let gens = kernel_generators(&mut rng, &g, spec.m, spec.field)?;
    Ok((t, SubspaceBasis::new(gens)?, cert))
}

/// `W = span{T, R_2, ..., R_m}` for a Gaussian `T`; never orthogonal.
pub fn gen_nonorthogonal<R: Real>(spec: &InstanceSpec) -> Result<(ComplexMatrix<R>, SubspaceBasis<R>)> {
    spec.validate()?;
    let mut rng = InstanceRng::new(spec.seed);
    let t: ComplexMatrix<R> = rng.matrix(spec.n, spec.n, spec.field);
    let mut gens = vec![t.clone()];
    for _ in 1..spec.m {
        gens.push(rng.matrix(spec.n, spec.n, spec.field));
    }
    Ok((t, SubspaceBasis::new(gens)?))
}

/// Unit-norm `T` with an exact `k`-fold top singular value and Gaussian
/// generators. Either answer is possible.
pub fn gen_random<R: Real>(spec: &InstanceSpec) -> Result<(ComplexMatrix<R>, SubspaceBasis<R>)> {
    spec.validate()?;
    let mut rng = InstanceRng::new(spec.seed);
    let (t, _) = unit_norm_operator::<R>(&mut rng, spec.n, spec.k, spec.field);
    let gens = (0..spec.m).map(|_| rng.matrix(spec.n, spec.n, spec.field)).collect();
    Ok((t, SubspaceBasis::new(gens)?))
}

/// [`gen_random`] labelled by the operator-norm oracle.
pub fn gen_oracle_labeled<R: Real>(
    spec: &InstanceSpec,
    settings: &OracleSettings,
) -> Result<(ComplexMatrix<R>, SubspaceBasis<R>, OracleDecision, OracleResult<R>)> {
    let (t, w) = gen_random::<R>(spec)?;
    let (d, res) = decide_by_oracle(&t, &w, NormKind::Operator, settings)?;
    Ok((t, w, d, res))
}

/// Planted numerical-radius instance: a normal `T = U diag(e^{i phi_1}, ...,
/// e^{i phi_h}, mu_{h+1}, ...) U*` with `|mu| < 1`, and generators
/// Frobenius-orthogonal to `G = sum l_i e^{i phi_i} u_i u_i*`, so the weighted
/// eigenvectors `u_i` satisfy the sufficient condition for `T ⊥_w W`.
///
/// `h = min(k, 4)` keeps the peripheral angles at least `pi/4` apart.
/// Returns `T`, `W` and the planted `(l_i, u_i)`.
pub fn gen_numrad_orthogonal<R: Real>(spec: &InstanceSpec) -> Result<(ComplexMatrix<R>, SubspaceBasis<R>, Vec<(R, Vec<Cx<R>>)>)> {
    spec.validate()?;
    if spec.field != Field::Complex {
        return Err(Error::RealFieldUnsupported);
    }
    let n = spec.n;
    let h = spec.k.min(4);
    let mut rng = InstanceRng::new(spec.seed);
    let u: ComplexMatrix<R> = rng.unitary(n, Field::Complex);
    let offset = rng.uniform_in(0.0, std::f64::consts::TAU);
    let sector = std::f64::consts::TAU / h as f64;
    let mut eig: Vec<Cx<R>> = (0..h)
        .map(|i| {
            let phi = offset + sector * (i as f64 + rng.uniform_in(-0.25, 0.25));
            cx(R::lit(phi.cos()), R::lit(phi.sin()))
        })
        .collect();
    for _ in h..n {
        let r = rng.uniform_in(TAIL.0, TAIL.1);
        let a = rng.uniform_in(0.0, std::f64::consts::TAU);
        eig.push(cx(R::lit(r * a.cos()), R::lit(r * a.sin())));
    }
    let t = u
        .matmul(&ComplexMatrix::diag(&eig, Field::Complex))
        .and_then(|ud| ud.matmul(&u.adjoint()))?;
    let weights = rng.simplex(h);
    let mut g = ComplexMatrix::zeros(n, n, Field::Complex);
    let mut planted = Vec::with_capacity(h);
    for (i, &l) in weights.iter().enumerate() {
        let ui = u.column(i);
        g = g.axpy(eig[i] * R::lit(l), &ComplexMatrix::outer(&ui, &ui, Field::Complex));
        planted.push((R::lit(l), ui));
    }
    let gens = kernel_generators(&mut rng, &g, spec.m, Field::Complex)?;
    Ok((t, SubspaceBasis::new(gens)?, planted))
}

/// Operators `p x n` vanishing on the orthogonal complement of the unit
/// vector `f`: the span of `e_i f*` for `i = 1..p`.
pub fn hyperplane_kernel_subspace<R: Real>(f: &[Cx<R>], p: usize, field: Field) -> Result<SubspaceBasis<R>> {
    let nf = norm(f);
    if (nf - R::one()).abs() > R::lit(1e-10) {
        return Err(Error::NotUnit { norm: nf.as_f64() });
    }
    if p == 0 {
        return Err(Error::InvalidSpec("codomain dimension must be positive".into()));
    }
    let field = if f.iter().any(|z| z.im != R::zero()) {
        field.join(Field::Complex)
    } else {
        field
    };
    let gens = (0..p)
        .map(|i| {
            let mut e = vec![czero::<R>(); p];
            e[i] = re(R::one());
            ComplexMatrix::outer(&e, f, field)
        })
        .collect();
    SubspaceBasis::new(gens)
}
