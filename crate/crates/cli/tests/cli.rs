use std::path::PathBuf;
use std::process::{Command, Output};

use bjo_core::certify::{validate_certificate, validate_witness};
use bjo_core::io::{ProblemFile, ReportFile};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn scratch(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn bjo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bjo"))
        .args(args)
        .env_remove("BJO_TOL_DEC")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn golden_exit_codes() {
    let cases: &[(&str, &str, &[&str], i32)] = &[
        ("check-pair", "pair_diag_offdiag.json", &[], 0),
        ("check-subspace", "span_of_t.json", &[], 3),
        ("check-subspace", "empty_subspace.json", &[], 0),
        ("check-subspace", "hyperplane_kernel.json", &[], 0),
        ("check-subspace", "identity_traceless.json", &[], 0),
        ("check-subspace", "impossible_witness_tolerance.json", &[], 4),
        ("check-subspace", "malformed.json", &[], 1),
        ("check-subspace", "wrong_entry_count.json", &[], 1),
        ("check-subspace", "complex_entry_real_tag.json", &[], 1),
        ("check-subspace", "shape_mismatch.json", &[], 1),
        ("distance", "singular_a_mta.json", &["--span", "--mta"], 2),
        ("distance", "distance_worked_case.json", &["--span", "--mta"], 0),
        ("numrad-check", "numrad_real_field.json", &[], 2),
        ("numrad-check", "numrad_certified.json", &[], 0),
        ("numrad-check", "numrad_identity_span.json", &[], 3),
        ("numrad-check", "numrad_oracle_only.json", &[], 4),
    ];
    for (cmd, file, extra, expected) in cases {
        let path = fixture(file);
        let mut args = vec![*cmd, path.to_str().unwrap()];
        args.extend_from_slice(extra);
        let out = bjo(&args);
        assert_eq!(code(&out), *expected, "{cmd} {file}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&bjo(&["no-such-command"])), 1);
    assert_eq!(code(&bjo(&["check-subspace"])), 1);
    assert_eq!(code(&bjo(&["check-subspace", "/nonexistent/problem.json"])), 1);
    let f = fixture("distance_worked_case.json");
    // --span is mandatory
    assert_eq!(code(&bjo(&["distance", f.to_str().unwrap()])), 1);
    // check-pair needs exactly one generator
    let f = fixture("identity_traceless.json");
    assert_eq!(code(&bjo(&["check-pair", f.to_str().unwrap()])), 1);
    assert_eq!(code(&bjo(&["--help"])), 0);
}

#[test]
fn pair_report_contains_rank_one_certificate() {
    let report_path = scratch("pair_report.json");
    let f = fixture("pair_diag_offdiag.json");
    let out = bjo(&["check-pair", f.to_str().unwrap(), "--json", report_path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let report = ReportFile::from_json(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report.decision, "Orthogonal");
    let cert = report.certificate.unwrap().decode(report.field).unwrap();
    assert!((cert.p.get(0, 0).re - 1.0).abs() < 1e-8);
    assert!(cert.p.get(1, 1).re.abs() < 1e-8);
}

#[test]
fn reports_revalidate() {
    for (file, expected) in [("hyperplane_kernel.json", "Orthogonal"), ("span_of_t.json", "NotOrthogonal")] {
        let report_path = scratch(&format!("revalidate_{file}"));
        let f = fixture(file);
        bjo(&["check-subspace", f.to_str().unwrap(), "--json", report_path.to_str().unwrap()]);
        let report = ReportFile::from_json(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
        assert_eq!(report.decision, expected);
        let problem = ProblemFile::read(&f).unwrap().decode().unwrap();
        if let Some(c) = report.certificate {
            let cert = c.decode(report.field).unwrap();
            let r = validate_certificate(&problem.t, &problem.generators, &cert).unwrap();
            assert!(r.passes(report.tolerances.eps_cert), "{r:?}");
        }
        if let Some(w) = report.witness {
            let chk = validate_witness(&problem.t, &problem.generators, &w.decode(), report.tolerances.eps_wit).unwrap();
            assert!(chk.valid);
        }
    }
}

#[test]
fn verify_only_appends_residuals() {
    for file in ["hyperplane_kernel.json", "span_of_t.json", "identity_traceless.json"] {
        let f = fixture(file);
        let plain_path = scratch(&format!("plain_{file}"));
        let verified_path = scratch(&format!("verified_{file}"));
        let a = bjo(&["check-subspace", f.to_str().unwrap(), "--json", plain_path.to_str().unwrap()]);
        let b = bjo(&["check-subspace", f.to_str().unwrap(), "--verify", "--json", verified_path.to_str().unwrap()]);
        assert_eq!(code(&a), code(&b));
        let plain = ReportFile::from_json(&std::fs::read_to_string(&plain_path).unwrap()).unwrap();
        let verified = ReportFile::from_json(&std::fs::read_to_string(&verified_path).unwrap()).unwrap();
        assert_eq!(plain.decision, verified.decision);
        assert!(plain.residuals.is_none());
        let residuals = verified.residuals.unwrap();
        assert_eq!(residuals["passes"], serde_json::Value::Bool(true));
        assert!(stdout(&b).contains("verify:"));
    }
}

#[test]
fn tolerance_flag_and_environment() {
    let f = fixture("pair_diag_offdiag.json");
    let report_path = scratch("tol_flag.json");
    bjo(&["check-pair", f.to_str().unwrap(), "--tol-dec", "1e-5", "--json", report_path.to_str().unwrap()]);
    let report = ReportFile::from_json(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report.tolerances.eps_dec, 1e-5);

    let env_path = scratch("tol_env.json");
    let out = Command::new(env!("CARGO_BIN_EXE_bjo"))
        .args(["check-pair", f.to_str().unwrap(), "--json", env_path.to_str().unwrap()])
        .env("BJO_TOL_DEC", "3e-6")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let report = ReportFile::from_json(&std::fs::read_to_string(&env_path).unwrap()).unwrap();
    assert_eq!(report.tolerances.eps_dec, 3e-6);

    // the flag wins over the environment
    let out = Command::new(env!("CARGO_BIN_EXE_bjo"))
        .args(["check-pair", f.to_str().unwrap(), "--tol-dec", "1e-4", "--json", env_path.to_str().unwrap()])
        .env("BJO_TOL_DEC", "3e-6")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let report = ReportFile::from_json(&std::fs::read_to_string(&env_path).unwrap()).unwrap();
    assert_eq!(report.tolerances.eps_dec, 1e-4);

    let out = Command::new(env!("CARGO_BIN_EXE_bjo"))
        .args(["check-pair", f.to_str().unwrap()])
        .env("BJO_TOL_DEC", "abc")
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
}

#[test]
fn gen_is_deterministic_and_round_trips() {
    let args = ["gen", "--kind", "orthogonal", "--n", "4", "--k", "2", "--m", "3", "--field", "c", "--seed", "17"];
    let a = bjo(&args);
    let b = bjo(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let file = ProblemFile::from_json(&stdout(&a)).unwrap();
    let again = ProblemFile::from_json(&file.to_json()).unwrap();
    assert_eq!(file, again);
    assert_eq!(file.seed, Some(17));

    let path = scratch("gen_orthogonal.json");
    assert_eq!(code(&bjo(&[&args[..], &["--out", path.to_str().unwrap()]].concat())), 0);
    assert_eq!(code(&bjo(&["check-subspace", path.to_str().unwrap()])), 0);

    let path = scratch("gen_nonorthogonal.json");
    let args = ["gen", "--kind", "nonorthogonal", "--n", "3", "--m", "2", "--seed", "4", "--out", path.to_str().unwrap()];
    assert_eq!(code(&bjo(&args)), 0);
    assert_eq!(code(&bjo(&["check-subspace", path.to_str().unwrap()])), 3);

    // k > n is a usage error
    assert_eq!(code(&bjo(&["gen", "--n", "2", "--k", "3"])), 1);
}

#[test]
fn distance_report_fields() {
    let f = fixture("distance_worked_case.json");
    let path = scratch("distance.json");
    let out = bjo(&["distance", f.to_str().unwrap(), "--span", "--mta", "--json", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let report = ReportFile::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let d = &report.diagnostics;
    assert!((d["dist"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert!((d["mta"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert!((d["trace_bound"].as_f64().unwrap() - 0.25).abs() < 1e-10);
    assert_eq!(d["bounds_consistent"], serde_json::Value::Bool(true));
}

#[test]
fn numrad_verify_passes() {
    let f = fixture("numrad_certified.json");
    let path = scratch("numrad.json");
    let out = bjo(&["numrad-check", f.to_str().unwrap(), "--verify", "--json", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let report = ReportFile::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report.decision, "CertifiedOrthogonal");
    assert_eq!(report.residuals.unwrap()["passes"], serde_json::Value::Bool(true));
}

#[test]
fn fuzz_has_no_contradictions() {
    let path = scratch("fuzz.json");
    let out = bjo(&["fuzz", "--trials", "24", "--seed", "1", "--json", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("contradictions: 0"));
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(summary["trials"], 24);
    assert_eq!(summary["contradictions"].as_array().unwrap().len(), 0);
}
