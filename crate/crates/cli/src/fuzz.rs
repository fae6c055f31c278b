//! Fuzz harness: planted, trivially non-orthogonal and oracle-labelled
//! trials, each checked against the operator-norm oracle.

use std::collections::BTreeMap;

use serde_json::json;

use bjo_core::certify::{check_subspace, CertifyConfig, Decision};
use bjo_core::instances::{gen_nonorthogonal, gen_orthogonal, gen_random, InstanceSpec, Label};
use bjo_core::oracle::{decide_by_oracle, NormKind, OracleDecision, OracleSettings};
use bjo_core::rng::InstanceRng;
use bjo_core::{Field, Tolerances};

use crate::commands::tol_dec_override;
use crate::{Failure, FuzzArgs, EXIT_INCONCLUSIVE, EXIT_ORTHOGONAL};

/// Trial `i` uses seed `seed ^ i` for both its shape draw and its instance.
pub fn trial_spec(seed: u64, i: usize) -> InstanceSpec {
    let s = seed ^ i as u64;
    let mut rng = InstanceRng::new(s);
    let n = rng.int_in(2, 6);
    let k = rng.int_in(1, n);
    let m = rng.int_in(1, 3);
    let field = if rng.uniform() < 0.5 { Field::Real } else { Field::Complex };
    let label = match i % 3 {
        0 => Label::OrthogonalByConstruction,
        1 => Label::ContainsT,
        _ => Label::OracleLabeled,
    };
    InstanceSpec::new(n, k, m, field, s, label)
}

fn oracle_name(d: OracleDecision) -> &'static str {
    match d {
        OracleDecision::Orthogonal => "Orthogonal",
        OracleDecision::NotOrthogonal => "NotOrthogonal",
    }
}

pub fn run(args: &FuzzArgs) -> Result<u8, Failure> {
    let mut tolerances = Tolerances::default();
    if let Some(v) = tol_dec_override(args.tol_dec)? {
        tolerances.eps_dec = v;
    }
    let config = CertifyConfig::with_tolerances(tolerances);
    let oracle = OracleSettings::default();
    // (oracle decision, certify decision) -> count
    let mut matrix: BTreeMap<(String, String), usize> = BTreeMap::new();
    let mut contradictions = Vec::new();
    let mut label_mismatches = Vec::new();
    let mut inconclusive = 0usize;
    let mut ambiguous = Vec::new();
    for i in 0..args.trials {
        let spec = trial_spec(args.seed, i);
        let (t, w) = match spec.label {
            Label::OrthogonalByConstruction => {
                let (t, w, _) = gen_orthogonal::<f64>(&spec)?;
                (t, w)
            }
            Label::ContainsT => gen_nonorthogonal::<f64>(&spec)?,
            Label::OracleLabeled => gen_random::<f64>(&spec)?,
        };
        let verdict = check_subspace(&t, &w, &config)?;
        let (od, oracle_run) = decide_by_oracle(&t, &w, NormKind::Operator, &oracle)?;
        *matrix
            .entry((oracle_name(od).to_string(), verdict.decision.to_string()))
            .or_default() += 1;
        let contradicts = matches!(
            (od, verdict.decision),
            (OracleDecision::Orthogonal, Decision::NotOrthogonal) | (OracleDecision::NotOrthogonal, Decision::Orthogonal)
        );
        // a decrease inside the oracle's own margin band is not evidence either way
        if contradicts && oracle_run.in_margin_band() {
            ambiguous.push(json!({ "trial": i, "spec": spec, "relative_decrease": oracle_run.relative_decrease() }));
        } else if contradicts {
            contradictions.push(json!({ "trial": i, "spec": spec }));
        }
        if verdict.decision == Decision::Inconclusive {
            inconclusive += 1;
        }
        let expected = match spec.label {
            Label::OrthogonalByConstruction => Some(Decision::Orthogonal),
            Label::ContainsT => Some(Decision::NotOrthogonal),
            Label::OracleLabeled => None,
        };
        if let Some(e) = expected {
            if verdict.decision != Decision::Inconclusive && verdict.decision != e {
                label_mismatches.push(json!({ "trial": i, "spec": spec }));
            }
        }
    }
    println!("trials: {}", args.trials);
    println!("oracle \\ certify    Orthogonal  NotOrthogonal  Inconclusive");
    for od in ["Orthogonal", "NotOrthogonal"] {
        let cell = |cd: &str| matrix.get(&(od.to_string(), cd.to_string())).copied().unwrap_or(0);
        println!(
            "{od:<18} {:>11} {:>14} {:>13}",
            cell("Orthogonal"),
            cell("NotOrthogonal"),
            cell("Inconclusive")
        );
    }
    println!("contradictions: {}", contradictions.len());
    println!("ambiguous (oracle margin band): {}", ambiguous.len());
    println!("label mismatches: {}", label_mismatches.len());
    println!("inconclusive: {inconclusive}");
    if let Some(p) = &args.json {
        let summary = json!({
            "tool_version": env!("CARGO_PKG_VERSION"),
            "trials": args.trials,
            "seed": args.seed,
            "tolerances": tolerances,
            "agreement": matrix.iter().map(|((o, c), n)| json!({ "oracle": o, "certify": c, "count": n })).collect::<Vec<_>>(),
            "contradictions": contradictions,
            "ambiguous": ambiguous,
            "label_mismatches": label_mismatches,
            "inconclusive": inconclusive,
        });
        let text = serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n";
        std::fs::write(p, text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", p.display())))?;
    }
    if contradictions.is_empty() && label_mismatches.is_empty() {
        Ok(EXIT_ORTHOGONAL)
    } else {
        Ok(EXIT_INCONCLUSIVE)
    }
}
