//! One-dimensional search helpers and a restarted subgradient minimizer shared
//! by the oracle, distance and separation code.

use crate::scalar::Real;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a minimum of a unimodal `f` on `[a, b]`.
pub fn golden_min<R: Real>(mut f: impl FnMut(R) -> R, mut a: R, mut b: R, iterations: usize) -> (R, R) {
    let g = R::lit(INV_PHI);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iterations {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Golden-section search for a maximum.
pub fn golden_max<R: Real>(mut f: impl FnMut(R) -> R, a: R, b: R, iterations: usize) -> (R, R) {
    let (x, v) = golden_min(|x| -f(x), a, b, iterations);
    (x, -v)
}

/// Settings for [`subgradient_minimize`].
#[derive(Debug, Clone, Copy)]
pub struct SubgradientSettings {
    /// Hard iteration cap.
    pub budget: usize,
    /// Initial step length (in parameter units).
    pub step: f64,
    /// Iterations without improvement before restarting from the best point
    /// with a halved step.
    pub patience: usize,
    /// Stop once the step falls below `step * min_step_ratio`.
    pub min_step_ratio: f64,
}

/// Outcome of a subgradient run.
#[derive(Debug, Clone)]
pub struct SubgradientRun<R> {
    pub best: Vec<R>,
    pub best_value: R,
    pub iterations: usize,
    pub budget_exhausted: bool,
}

/// Minimizes a convex function given a value-and-subgradient oracle.
///
/// Steps are normalized subgradient moves with length `s / sqrt(t)`; after
/// `patience` non-improving steps (or an epoch of `3 * patience` steps) the
/// iterate returns to the best point and `s` is halved. `project` maps iterates back onto the feasible set.
pub fn subgradient_minimize<R: Real>(
    mut eval: impl FnMut(&[R]) -> (R, Vec<R>),
    mut project: impl FnMut(&mut [R]),
    start: Vec<R>,
    settings: &SubgradientSettings,
) -> SubgradientRun<R> {
    let mut x = start;
    project(&mut x);
    let (mut fx, mut g) = eval(&x);
    let mut best = x.clone();
    let mut best_value = fx;
    let mut best_grad = g.clone();
    let step0 = R::lit(settings.step);
    let min_step = step0 * R::lit(settings.min_step_ratio);
    let mut s = step0;
    let mut local_t = R::one();
    let mut stale = 0usize;
    let mut iterations = 0usize;
    let mut exhausted = true;
    while iterations < settings.budget {
        let gn = g.iter().map(|&v| v * v).sum::<R>().sqrt();
        if gn == R::zero() || !gn.is_finite() {
            exhausted = false;
            break;
        }
        let eta = s / local_t.sqrt();
        for (xi, gi) in x.iter_mut().zip(&g) {
            *xi = *xi - eta * *gi / gn;
        }
        project(&mut x);
        let (nf, ng) = eval(&x);
        iterations += 1;
        fx = nf;
        g = ng;
        local_t = local_t + R::one();
        if fx < best_value {
            best_value = fx;
            best.clone_from(&x);
            best_grad.clone_from(&g);
            stale = 0;
        } else {
            stale += 1;
        }
        if stale >= settings.patience || local_t > R::lit(3.0 * settings.patience as f64) {
            s = s * R::lit(0.5);
            if s < min_step {
                exhausted = false;
                break;
            }
            x.clone_from(&best);
            g.clone_from(&best_grad);
            local_t = R::one();
            stale = 0;
        }
    }
    SubgradientRun {
        best,
        best_value,
        iterations,
        budget_exhausted: exhausted,
    }
}

/// Outcome of [`ellipsoid_minimize`].
#[derive(Debug, Clone)]
pub struct EllipsoidRun<R> {
    pub best: Vec<R>,
    pub best_value: R,
    pub iterations: usize,
    /// Final bound `|B' g|` on the optimality gap at the last center.
    pub gap_bound: R,
}

/// Central-cut ellipsoid method on a ball of radius `radius` around `center`,
/// which must contain a minimizer. Stops once the gap bound falls below `tol`.
pub fn ellipsoid_minimize<R: Real>(
    mut eval: impl FnMut(&[R]) -> (R, Vec<R>),
    center: Vec<R>,
    radius: R,
    tol: R,
    max_iterations: usize,
) -> EllipsoidRun<R> {
    let d = center.len();
    let mut x = center;
    let (mut fx, mut g) = eval(&x);
    let mut best = x.clone();
    let mut best_value = fx;
    if d == 0 {
        return EllipsoidRun {
            best,
            best_value,
            iterations: 0,
            gap_bound: R::zero(),
        };
    }
    // E = {x + B u : |u| <= 1}; the factored update keeps B B' positive
    // semidefinite in floating point
    let mut b = vec![R::zero(); d * d];
    for i in 0..d {
        b[i * d + i] = radius;
    }
    let dd = R::lit(d as f64);
    let mut gap_bound = R::infinity();
    let mut iterations = 0;
    while iterations < max_iterations {
        // q = B' g
        let q: Vec<R> = (0..d).map(|j| (0..d).map(|i| b[i * d + j] * g[i]).sum()).collect();
        let qn = q.iter().map(|&v| v * v).sum::<R>().sqrt();
        gap_bound = qn;
        if !(qn > tol) {
            break;
        }
        let pvec: Vec<R> = q.iter().map(|&v| v / qn).collect();
        let bp: Vec<R> = (0..d).map(|i| (0..d).map(|j| b[i * d + j] * pvec[j]).sum()).collect();
        if d == 1 {
            // bisection
            x[0] = x[0] - bp[0] * R::lit(0.5);
            b[0] = b[0] * R::lit(0.5);
        } else {
            let shift = R::one() / (dd + R::one());
            for (xi, v) in x.iter_mut().zip(&bp) {
                *xi = *xi - shift * *v;
            }
            let scale = dd / (dd * dd - R::one()).sqrt();
            let shrink = ((dd - R::one()) / (dd + R::one())).sqrt() - R::one();
            for i in 0..d {
                for j in 0..d {
                    b[i * d + j] = scale * (b[i * d + j] + shrink * bp[i] * pvec[j]);
                }
            }
        }
        let (nf, ng) = eval(&x);
        iterations += 1;
        fx = nf;
        g = ng;
        if fx < best_value {
            best_value = fx;
            best.clone_from(&x);
        }
    }
    EllipsoidRun {
        best,
        best_value,
        iterations,
        gap_bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_vertex() {
        let (x, v) = golden_min(|x: f64| (x - 0.3).powi(2) + 1.0, -2.0, 2.0, 80);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((v - 1.0).abs() < 1e-14);
        let (x, _) = golden_max(|x: f64| -(x + 1.0).abs(), -3.0, 3.0, 80);
        assert!((x + 1.0).abs() < 1e-12);
    }

    #[test]
    fn subgradient_minimizes_l1_distance() {
        // f(x) = |x0 - 1| + |x1 + 2|, nonsmooth at the minimizer
        let target = [1.0, -2.0];
        let run = subgradient_minimize(
            |x: &[f64]| {
                let v = (x[0] - target[0]).abs() + (x[1] - target[1]).abs();
                let g = vec![(x[0] - target[0]).signum(), (x[1] - target[1]).signum()];
                (v, g)
            },
            |_| {},
            vec![0.0, 0.0],
            &SubgradientSettings {
                budget: 20_000,
                step: 1.0,
                patience: 50,
                min_step_ratio: 1e-12,
            },
        );
        assert!(run.best_value < 1e-9, "best value {}", run.best_value);
        assert!(!run.budget_exhausted);
    }

    #[test]
    fn ellipsoid_on_max_of_affine() {
        // f(x) = max(|x0 - 1|, |x1 + 2|), sharp minimum 0 at (1, -2)
        let f = |x: &[f64]| {
            let parts = [(x[0] - 1.0).abs(), (x[1] + 2.0).abs()];
            let (i, &v) = parts.iter().enumerate().fold((0, &f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
            let mut g = vec![0.0, 0.0];
            g[i] = if i == 0 { (x[0] - 1.0).signum() } else { (x[1] + 2.0).signum() };
            (v, g)
        };
        let run = ellipsoid_minimize(f, vec![0.0, 0.0], 10.0, 1e-12, 10_000);
        assert!(run.best_value < 1e-10, "{}", run.best_value);
        let one_d = ellipsoid_minimize(|x: &[f64]| ((x[0] - 0.3).abs(), vec![(x[0] - 0.3).signum()]), vec![5.0], 10.0, 1e-13, 500);
        assert!(one_d.best_value < 1e-12);
    }
}
