//! Property tests over randomly drawn instances.

use proptest::prelude::*;

use bjo_core::attainment::numerical_radius;
use bjo_core::certify::{check_subspace, validate_certificate, CertifyConfig, Decision, SubspaceBasis};
use bjo_core::instances::{gen_nonorthogonal, gen_orthogonal, InstanceSpec, Label};
use bjo_core::io::ProblemFile;
use bjo_core::linalg::{op_norm, ComplexMatrix, Field};
use bjo_core::rng::InstanceRng;

type M = ComplexMatrix<f64>;

fn field_of(complex: bool) -> Field {
    if complex {
        Field::Complex
    } else {
        Field::Real
    }
}

fn planted_or_containing(seed: u64, n: usize, m: usize, complex: bool, planted: bool) -> (M, SubspaceBasis<f64>, Decision) {
    let k = 1 + (seed as usize) % n;
    let field = field_of(complex);
    if planted {
        let spec = InstanceSpec::new(n, k, m, field, seed, Label::OrthogonalByConstruction);
        let (t, w, _) = gen_orthogonal::<f64>(&spec).unwrap();
        (t, w, Decision::Orthogonal)
    } else {
        let spec = InstanceSpec::new(n, k, m, field, seed, Label::ContainsT);
        let (t, w) = gen_nonorthogonal::<f64>(&spec).unwrap();
        (t, w, Decision::NotOrthogonal)
    }
}

fn conjugate(u: &M, x: &M, v: &M) -> M {
    u.matmul(x).unwrap().matmul(v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn op_norm_is_unitarily_invariant(seed in any::<u64>(), n in 1usize..6, complex in any::<bool>()) {
        let field = field_of(complex);
        let mut rng = InstanceRng::new(seed);
        let a: M = rng.matrix(n, n, field);
        let u: M = rng.unitary(n, field);
        let v: M = rng.unitary(n, field);
        let base = op_norm(&a);
        prop_assert!((op_norm(&conjugate(&u, &a, &v)) - base).abs() <= 1e-12 * base.max(1.0));
        prop_assert!(op_norm(&a) <= a.fro_norm() * (1.0 + 1e-12));
    }

    #[test]
    fn numerical_radius_sits_between_half_norm_and_norm(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = InstanceRng::new(seed);
        let t: M = rng.matrix(n, n, Field::Complex);
        let w = numerical_radius(&t);
        let norm = op_norm(&t);
        prop_assert!(w <= norm * (1.0 + 1e-9));
        prop_assert!(norm <= 2.0 * w * (1.0 + 1e-9));
    }

    #[test]
    fn norm_along_a_line_is_convex(seed in any::<u64>(), n in 1usize..6, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let mut rng = InstanceRng::new(seed);
        let t: M = rng.matrix(n, n, Field::Complex);
        let d: M = rng.matrix(n, n, Field::Complex);
        let f = |s: f64| op_norm(&t.axpy(num_complex::Complex::new(s, 0.0), &d));
        let mid = f(0.5 * (a + b));
        prop_assert!(mid <= 0.5 * (f(a) + f(b)) + 1e-10 * (1.0 + f(a).max(f(b))));
    }

    #[test]
    fn planted_certificates_validate(seed in any::<u64>(), n in 2usize..6, m in 1usize..4, complex in any::<bool>()) {
        let k = 1 + (seed as usize) % n;
        let spec = InstanceSpec::new(n, k, m, field_of(complex), seed, Label::OrthogonalByConstruction);
        let (t, w, cert) = gen_orthogonal::<f64>(&spec).unwrap();
        let r = validate_certificate(&t, &w.generators, &cert).unwrap();
        prop_assert!(r.passes(1e-8), "{:?}", r);
    }

    #[test]
    fn decisions_survive_scaling(
        seed in any::<u64>(), n in 2usize..5, m in 1usize..3, complex in any::<bool>(), planted in any::<bool>(),
        log_alpha in -3.0f64..3.0, log_beta in -3.0f64..3.0,
    ) {
        let (t, w, expected) = planted_or_containing(seed, n, m, complex, planted);
        let config = CertifyConfig::default();
        let scaled_t = t.scale_real(10f64.powf(log_alpha));
        let beta = 10f64.powf(log_beta);
        let scaled_w = SubspaceBasis::new(w.generators.iter().map(|g| g.scale_real(beta)).collect()).unwrap();
        prop_assert_eq!(check_subspace(&t, &w, &config).unwrap().decision, expected);
        prop_assert_eq!(check_subspace(&scaled_t, &scaled_w, &config).unwrap().decision, expected);
    }

    #[test]
    fn decisions_survive_unitary_conjugation(
        seed in any::<u64>(), n in 2usize..5, m in 1usize..3, complex in any::<bool>(), planted in any::<bool>(),
    ) {
        let (t, w, expected) = planted_or_containing(seed, n, m, complex, planted);
        let field = field_of(complex);
        let mut rng = InstanceRng::new(seed ^ 0x5eed);
        let u: M = rng.unitary(n, field);
        let v: M = rng.unitary(n, field);
        let moved = SubspaceBasis::new(w.generators.iter().map(|g| conjugate(&u, g, &v)).collect()).unwrap();
        let verdict = check_subspace(&conjugate(&u, &t, &v), &moved, &CertifyConfig::default()).unwrap();
        prop_assert_eq!(verdict.decision, expected);
    }

    #[test]
    fn problem_files_round_trip_exactly(seed in any::<u64>(), n in 1usize..5, m in 0usize..3, complex in any::<bool>()) {
        let field = field_of(complex);
        let mut rng = InstanceRng::new(seed);
        let t: M = rng.matrix(n, n, field);
        let gens: Vec<M> = (0..m).map(|_| rng.matrix(n, n, field)).collect();
        let file = ProblemFile::from_problem(&t, &gens, field, Some(seed), None);
        let back = ProblemFile::from_json(&file.to_json()).unwrap();
        prop_assert_eq!(&back, &file);
        let problem = back.decode().unwrap();
        prop_assert_eq!(problem.t, t);
        prop_assert_eq!(problem.generators, gens);
    }
}
