use std::path::Path;

use serde_json::json;

use bjo_core::certify::{
    check_subspace, validate_certificate, validate_witness, CertifyConfig, Decision, SubspaceBasis, Tolerances,
    Verdict,
};
use bjo_core::distance::distance_report;
use bjo_core::instances::{
    gen_nonorthogonal, gen_numrad_orthogonal, gen_orthogonal, gen_random, InstanceSpec, Label,
};
use bjo_core::io::{encode_vector, CertificateJson, Problem, ProblemFile, ReportFile, WitnessJson};
use bjo_core::linalg::op_norm;
use bjo_core::numrad::{validate_worth_certificate, validate_worth_witness, worth_check_with, WorthDecision, WorthSettings};
use bjo_core::Field;

use crate::{
    CheckArgs, Common, DistanceArgs, Failure, FieldArg, GenArgs, GenKind, EXIT_INCONCLUSIVE, EXIT_NOT_ORTHOGONAL,
    EXIT_ORTHOGONAL,
};

pub const TOL_DEC_ENV: &str = "BJO_TOL_DEC";

/// `--tol-dec`, else `BJO_TOL_DEC`, else `None`.
pub fn tol_dec_override(flag: Option<f64>) -> Result<Option<f64>, Failure> {
    if let Some(v) = flag {
        return check_tol(v).map(Some);
    }
    match std::env::var(TOL_DEC_ENV) {
        Ok(s) => {
            let v: f64 = s
                .trim()
                .parse()
                .map_err(|_| Failure::usage(format!("{TOL_DEC_ENV}={s:?} is not a number")))?;
            check_tol(v).map(Some)
        }
        Err(_) => Ok(None),
    }
}

fn check_tol(v: f64) -> Result<f64, Failure> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(Failure::usage(format!("tolerance {v} must be finite and nonnegative")))
    }
}

fn load(path: &Path, common: &Common) -> Result<Problem, Failure> {
    let mut problem = ProblemFile::read(path)?.decode()?;
    if let Some(v) = tol_dec_override(common.tol_dec)? {
        problem.tolerances.eps_dec = v;
    }
    Ok(problem)
}

fn write_report(report: &ReportFile, path: Option<&Path>) -> Result<(), Failure> {
    if let Some(p) = path {
        std::fs::write(p, report.to_json() + "\n")
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", p.display())))?;
    }
    Ok(())
}

fn certify_config(tolerances: Tolerances, seed: Option<u64>) -> CertifyConfig {
    let mut config = CertifyConfig::with_tolerances(tolerances);
    if let Some(s) = seed {
        config.separation.seed = s;
        config.oracle.seed = s ^ 0x9e37_79b9_7f4a_7c15;
    }
    config
}

fn decision_code(d: Decision) -> u8 {
    match d {
        Decision::Orthogonal => EXIT_ORTHOGONAL,
        Decision::NotOrthogonal => EXIT_NOT_ORTHOGONAL,
        Decision::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn check_report(command: &str, problem: &Problem, verdict: &Verdict<f64>, seed: Option<u64>) -> ReportFile {
    let norm_t = op_norm(&problem.t);
    ReportFile {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.to_string(),
        decision: verdict.decision.to_string(),
        field: problem.field,
        norm_t,
        tolerances: problem.tolerances,
        seed: seed.or(problem.seed),
        certificate: verdict.certificate.as_ref().map(|c| CertificateJson::encode(c, problem.field)),
        witness: verdict.witness.as_ref().map(|w| WitnessJson::encode(w, norm_t, problem.field)),
        residuals: None,
        diagnostics: serde_json::to_value(&verdict.diagnostics).unwrap_or_default(),
    }
}

pub fn check(args: &CheckArgs, pair: bool) -> Result<u8, Failure> {
    let problem = load(&args.problem, &args.common)?;
    if pair && problem.generators.len() != 1 {
        return Err(Failure::usage(format!(
            "check-pair needs exactly one matrix under \"W\", found {}",
            problem.generators.len()
        )));
    }
    let w = problem.subspace()?;
    let config = certify_config(problem.tolerances, args.common.seed);
    let verdict = check_subspace(&problem.t, &w, &config)?;
    let command = if pair { "check-pair" } else { "check-subspace" };
    let mut report = check_report(command, &problem, &verdict, args.common.seed);

    println!("decision: {}", verdict.decision);
    println!("norm_T: {:.12e}", report.norm_t);
    println!(
        "attainment dim: {}, subspace dim: {}",
        verdict.diagnostics.attainment_dim, verdict.diagnostics.subspace_dim
    );
    if let Some(mu) = verdict.diagnostics.separation_value {
        println!("separation value: {mu:.3e}");
    }
    if let Some(cert) = &verdict.certificate {
        println!("certificate: density matrix of rank {}", cert.decomposition.len());
    }
    if let Some(wit) = &verdict.witness {
        println!("witness: step {:.6e}, norm decrease {:.3e}", wit.step, -wit.achieved);
    }
    for note in &verdict.diagnostics.notes {
        println!("note: {note}");
    }

    if args.verify {
        report.residuals = Some(verify(&problem, &w, &verdict)?);
    }
    write_report(&report, args.common.json.as_deref())?;
    Ok(decision_code(verdict.decision))
}

/// Re-validates the emitted artifact from the problem data alone.
fn verify(problem: &Problem, w: &SubspaceBasis<f64>, verdict: &Verdict<f64>) -> Result<serde_json::Value, Failure> {
    let eps = problem.tolerances;
    if let Some(cert) = &verdict.certificate {
        let r = validate_certificate(&problem.t, &w.generators, cert)?;
        println!("verify: certificate max residual {:.3e} ({})", r.max(), pass(r.passes(eps.eps_cert)));
        let mut v = serde_json::to_value(&r).unwrap_or_default();
        v["max"] = json!(r.max());
        v["passes"] = json!(r.passes(eps.eps_cert));
        return Ok(v);
    }
    if let Some(wit) = &verdict.witness {
        let c = validate_witness(&problem.t, &w.generators, wit, eps.eps_wit)?;
        println!("verify: witness decrease {:.3e} ({})", c.decrease, pass(c.valid));
        return Ok(json!({
            "norm_T": c.norm_t,
            "perturbed_norm": c.perturbed_norm,
            "decrease": c.decrease,
            "passes": c.valid,
        }));
    }
    println!("verify: nothing to validate");
    Ok(json!({ "passes": serde_json::Value::Null }))
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

pub fn distance(args: &DistanceArgs) -> Result<u8, Failure> {
    let problem = load(&args.problem, &args.common)?;
    if problem.generators.len() != 1 {
        return Err(Failure::usage(format!(
            "distance --span needs exactly one matrix under \"W\", found {}",
            problem.generators.len()
        )));
    }
    let a = &problem.generators[0];
    let r = distance_report(&problem.t, a, args.mta)?;
    println!("dist: {:.12e}", r.dist);
    println!("argmin lambda: {:.9e} {:+.9e}i", r.argmin_lambda.re, r.argmin_lambda.im);
    if let Some(m) = r.mta {
        println!("sphere supremum: {m:.12e}");
    }
    match r.lower_bounds.column {
        Some(c) => println!("column bound: {c:.12e}"),
        None => println!("column bound: undefined (A has a zero column)"),
    }
    println!("trace bound: {:.12e}", r.lower_bounds.frobenius);
    println!("bounds consistent: {}", r.bounds_consistent);
    let report = ReportFile {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        command: "distance".into(),
        decision: "Computed".into(),
        field: problem.field,
        norm_t: op_norm(&problem.t),
        tolerances: problem.tolerances,
        seed: problem.seed,
        certificate: None,
        witness: None,
        residuals: None,
        diagnostics: json!({
            "dist": r.dist,
            "dist_squared": r.dist * r.dist,
            "argmin_lambda": [r.argmin_lambda.re, r.argmin_lambda.im],
            "mta": r.mta,
            "column_bound": r.lower_bounds.column,
            "trace_bound": r.lower_bounds.frobenius,
            "bounds_consistent": r.bounds_consistent,
            "mta_consistent": r.mta_consistent,
        }),
    };
    write_report(&report, args.common.json.as_deref())?;
    Ok(EXIT_ORTHOGONAL)
}

pub fn numrad(args: &CheckArgs) -> Result<u8, Failure> {
    let problem = load(&args.problem, &args.common)?;
    let w = problem.subspace()?;
    let mut settings = WorthSettings {
        tolerances: problem.tolerances,
        ..WorthSettings::default()
    };
    if let Some(s) = args.common.seed {
        settings.separation.seed = s;
        settings.oracle.seed = s ^ 0x9e37_79b9_7f4a_7c15;
    }
    let t = &problem.t;
    let v = worth_check_with(t, &w, &settings)?;
    println!("decision: {}", v.decision);
    println!("w(T): {:.12e}", v.w);
    println!("attaining samples: {}", v.samples);

    let mut diagnostics = json!({
        "w": v.w,
        "samples": v.samples,
    });
    if let Some(cert) = &v.certificate {
        println!("certificate: {} weighted attaining vectors", cert.points.len());
        diagnostics["certificate"] = json!({
            "points": cert.points.iter().map(|p| json!({
                "lambda": p.lambda,
                "x": encode_vector(&p.x, Field::Complex),
                "value": [p.value.re, p.value.im],
            })).collect::<Vec<_>>(),
            "residuals": cert.residuals,
        });
    }
    if let Some(o) = &v.oracle {
        println!("oracle minimum: {:.12e}", o.min_value);
        diagnostics["oracle_min"] = json!(o.min_value);
        diagnostics["oracle_restart_values"] = json!(o.restart_values);
    }
    if let Some(wit) = &v.witness {
        println!("witness: w(T + A) = {:.12e}", wit.perturbed);
        diagnostics["witness"] = json!({
            "coeffs": encode_vector(&wit.coeffs, Field::Complex),
            "perturbed": wit.perturbed,
            "decrease": wit.decrease,
        });
    }
    let mut residuals = None;
    if args.verify {
        let tc = t.clone().with_field(Field::Complex)?;
        if let Some(cert) = &v.certificate {
            let r = validate_worth_certificate(&tc, &w.generators, cert)?;
            let ok = r.passes(settings.tolerances.eps_cert, bjo_core::attainment::EPS_W);
            println!("verify: certificate ({})", pass(ok));
            let mut val = serde_json::to_value(&r).unwrap_or_default();
            val["passes"] = json!(ok);
            residuals = Some(val);
        } else if let Some(wit) = &v.witness {
            let (base, perturbed) = validate_worth_witness(&tc, &w.generators, &wit.coeffs)?;
            let ok = base - perturbed > settings.tolerances.eps_wit * base;
            println!("verify: witness decrease {:.3e} ({})", base - perturbed, pass(ok));
            residuals = Some(json!({ "w": base, "perturbed": perturbed, "passes": ok }));
        } else {
            println!("verify: nothing to validate");
        }
    }
    let report = ReportFile {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        command: "numrad-check".into(),
        decision: v.decision.to_string(),
        field: problem.field,
        norm_t: v.w,
        tolerances: problem.tolerances,
        seed: args.common.seed.or(problem.seed),
        certificate: None,
        witness: None,
        residuals,
        diagnostics,
    };
    write_report(&report, args.common.json.as_deref())?;
    Ok(match v.decision {
        WorthDecision::CertifiedOrthogonal => EXIT_ORTHOGONAL,
        WorthDecision::NotOrthogonal => EXIT_NOT_ORTHOGONAL,
        WorthDecision::OracleOrthogonal => EXIT_INCONCLUSIVE,
    })
}

pub fn gen(args: &GenArgs) -> Result<u8, Failure> {
    let field = match args.field {
        FieldArg::R => Field::Real,
        FieldArg::C => Field::Complex,
    };
    let label = match args.kind {
        GenKind::Orthogonal | GenKind::Numrad => Label::OrthogonalByConstruction,
        GenKind::Nonorthogonal => Label::ContainsT,
        GenKind::Random => Label::OracleLabeled,
    };
    let spec = InstanceSpec::new(args.n, args.k, args.m, field, args.seed, label);
    let (t, w) = match args.kind {
        GenKind::Orthogonal => {
            let (t, w, _) = gen_orthogonal::<f64>(&spec)?;
            (t, w)
        }
        GenKind::Nonorthogonal => gen_nonorthogonal::<f64>(&spec)?,
        GenKind::Random => gen_random::<f64>(&spec)?,
        GenKind::Numrad => {
            let (t, w, _) = gen_numrad_orthogonal::<f64>(&spec)?;
            (t, w)
        }
    };
    let file = ProblemFile::from_problem(&t, &w.generators, field, Some(args.seed), Some(label));
    let text = file.to_json() + "\n";
    match &args.out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", p.display())))?,
        None => print!("{text}"),
    }
    Ok(EXIT_ORTHOGONAL)
}
