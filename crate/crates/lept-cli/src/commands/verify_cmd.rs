//! The built-in cross-check suite: prints one pass/fail line per
//! property, documents the adopted spectral constant and the located
//! degeneracies, and writes the same report as JSON.

use anyhow::Result;
use serde_json::{json, Value};

use lept_core::{run_verification, EpLocation};

use crate::output::{complex_json, Emitter};

fn location_json(loc: &Option<EpLocation>) -> Value {
    match loc {
        None => Value::Null,
        Some(l) => json!({
            "omega": l.omega,
            "delta": l.delta,
            "eigenvalue": complex_json(l.eigenvalue),
            "multiplicity": l.multiplicity,
            "cluster_spread": l.cluster_spread,
            "defectiveness": l.defectiveness,
            "iterations": l.iterations,
        }),
    }
}

pub fn run(em: &mut Emitter) -> Result<(Value, bool)> {
    let report = run_verification();

    for p in &report.properties {
        let verdict = if p.passed { "PASS" } else { "FAIL" };
        println!("{verdict} {}: {}", p.name, p.detail);
        if !p.passed {
            em.warn(format!("verification property failed: {}", p.name));
        }
    }
    let a = &report.alpha;
    println!(
        "spectral constant: adopted detuning coefficient {} (max grid error {:.3e}); \
         rejected {} fails by {:.3e} at (Ω = {}, Δ = {})",
        a.adopted_coefficient,
        a.adopted_max_error,
        a.rejected_coefficient,
        a.rejected_worst_error,
        a.rejected_worst_point.0,
        a.rejected_worst_point.1
    );
    if let Some(p) = &report.pair_point {
        println!(
            "pair degeneracy located at (Ω = {:.9}, Δ = {:.9}), λ = {:.6} + {:.6}i, \
             defectiveness {:.2e}",
            p.omega, p.delta, p.eigenvalue.re, p.eigenvalue.im, p.defectiveness
        );
    }
    if let Some(t) = &report.triple_point {
        println!(
            "higher-order cluster located at (Ω = {:.9}, Δ = {:.9}), λ = {:.6} + {:.6}i, \
             multiplicity {}",
            t.omega, t.delta, t.eigenvalue.re, t.eigenvalue.im, t.multiplicity
        );
    }
    let passed = report.passed();
    println!("verify: {}", if passed { "all checks passed" } else { "FAILURES PRESENT" });

    let results = json!({
        "passed": passed,
        "properties": report.properties.iter().map(|p| json!({
            "name": p.name,
            "passed": p.passed,
            "detail": p.detail,
        })).collect::<Vec<_>>(),
        "alpha": {
            "adopted_coefficient": a.adopted_coefficient,
            "rejected_coefficient": a.rejected_coefficient,
            "adopted_max_error": a.adopted_max_error,
            "rejected_worst_error": a.rejected_worst_error,
            "rejected_worst_point": [a.rejected_worst_point.0, a.rejected_worst_point.1],
        },
        "pair_point": location_json(&report.pair_point),
        "triple_point": location_json(&report.triple_point),
    });
    Ok((results, passed))
}
