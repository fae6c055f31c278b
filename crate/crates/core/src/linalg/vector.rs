//! Small helpers for column vectors stored as `Vec<Cx<R>>`.

use crate::scalar::{czero, Cx, Real};

/// `x* y`, conjugate-linear in the first argument.
pub fn dot<R: Real>(x: &[Cx<R>], y: &[Cx<R>]) -> Cx<R> {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).fold(czero(), |acc, (&a, &b)| acc + a.conj() * b)
}

pub fn norm<R: Real>(x: &[Cx<R>]) -> R {
    let scale = x.iter().fold(R::zero(), |m, z| m.max(z.norm()));
    if scale == R::zero() {
        return R::zero();
    }
    let s: R = x.iter().map(|z| (*z / scale).norm_sqr()).sum();
    scale * s.sqrt()
}

/// Returns `x / |x|`, or `None` for the zero vector.
pub fn normalized<R: Real>(x: &[Cx<R>]) -> Option<Vec<Cx<R>>> {
    let n = norm(x);
    if n == R::zero() || !n.is_finite() {
        return None;
    }
    Some(x.iter().map(|&z| z / n).collect())
}

pub fn scale<R: Real>(x: &[Cx<R>], alpha: Cx<R>) -> Vec<Cx<R>> {
    x.iter().map(|&z| z * alpha).collect()
}

/// `x + alpha y`.
pub fn axpy<R: Real>(x: &[Cx<R>], alpha: Cx<R>, y: &[Cx<R>]) -> Vec<Cx<R>> {
    x.iter().zip(y).map(|(&a, &b)| a + alpha * b).collect()
}

/// Removes from `v` its components along the orthonormal set `basis`
/// (two passes of modified Gram-Schmidt).
pub fn project_out<R: Real>(v: &mut [Cx<R>], basis: &[Vec<Cx<R>>]) {
    for _ in 0..2 {
        for b in basis {
            let c = dot(b, v);
            for (vi, &bi) in v.iter_mut().zip(b) {
                *vi = *vi - c * bi;
            }
        }
    }
}

/// Orthonormalizes `vectors` in order, dropping any vector whose residual
/// norm falls below `rel_tol` times its original norm. Returns the
/// orthonormal set and the indices of the kept inputs.
pub fn orthonormalize<R: Real>(vectors: &[Vec<Cx<R>>], rel_tol: R) -> (Vec<Vec<Cx<R>>>, Vec<usize>) {
    let mut basis: Vec<Vec<Cx<R>>> = Vec::new();
    let mut kept = Vec::new();
    for (idx, v) in vectors.iter().enumerate() {
        let n0 = norm(v);
        if n0 == R::zero() {
            continue;
        }
        let mut w = v.clone();
        project_out(&mut w, &basis);
        let n1 = norm(&w);
        if n1 <= rel_tol * n0 {
            continue;
        }
        basis.push(w.iter().map(|&z| z / n1).collect());
        kept.push(idx);
    }
    (basis, kept)
}

/// Extends an orthonormal set of vectors in `C^n` to `target` vectors using
/// standard basis candidates.
pub fn complete_basis<R: Real>(mut basis: Vec<Vec<Cx<R>>>, n: usize, target: usize) -> Vec<Vec<Cx<R>>> {
    let mut e = 0;
    while basis.len() < target && e < n {
        let mut w = vec![czero(); n];
        w[e] = Cx::new(R::one(), R::zero());
        project_out(&mut w, &basis);
        let nw = norm(&w);
        if nw > R::lit(0.5) {
            basis.push(w.iter().map(|&z| z / nw).collect());
        }
        e += 1;
    }
    basis
}
