//! Branch tracking around a closed parameter-space loop: eigenvalue
//! trajectories, the endpoint permutation, and per-branch winding numbers
//! against the configured reference values.

use std::f64::consts::TAU;

use anyhow::Result;
use num_complex::Complex64;
use serde_json::{json, Value};

use lept_core::{track_branches, winding_number, LDIM};

use crate::config::ResolvedLoop;
use crate::output::{Cell, Emitter, Field, PlotSpec, Table};

/// Permutation in disjoint-cycle notation, fixed points omitted.
fn cycle_notation(perm: &[usize; LDIM]) -> String {
    let mut seen = [false; LDIM];
    let mut out = String::new();
    for start in 0..LDIM {
        if seen[start] || perm[start] == start {
            seen[start] = true;
            continue;
        }
        let mut cycle = vec![start];
        seen[start] = true;
        let mut next = perm[start];
        while next != start {
            seen[next] = true;
            cycle.push(next);
            next = perm[next];
        }
        let parts: Vec<String> = cycle.iter().map(|b| b.to_string()).collect();
        out.push_str(&format!("({})", parts.join(" ")));
    }
    if out.is_empty() {
        out.push_str("identity");
    }
    out
}

pub fn run(rl: &ResolvedLoop, em: &mut Emitter) -> Result<Value> {
    let tracks = track_branches(&rl.lp)?;

    let mut rows = Vec::with_capacity((tracks.k_values.len() + 1) * LDIM);
    for (i, &k) in tracks.k_values.iter().enumerate() {
        for j in 0..LDIM {
            rows.push(vec![
                Cell::Real(k),
                Cell::Int(j as i64),
                Cell::Complex(tracks.paths[j][i]),
            ]);
        }
    }
    // Close the curves explicitly: at k = 2π branch j lands on the start
    // of the branch the permutation sends it to.
    for j in 0..LDIM {
        rows.push(vec![
            Cell::Real(TAU),
            Cell::Int(j as i64),
            Cell::Complex(tracks.paths[tracks.permutation[j]][0]),
        ]);
    }
    em.emit(
        &Table {
            name: "loop_branches",
            fields: vec![
                Field::Real("k"),
                Field::Int("branch"),
                Field::Complex("lambda"),
            ],
            rows,
        },
        Some(PlotSpec {
            kind: "complex-plane",
            x: "re_lambda",
            y: "im_lambda",
            series_key: Some("branch"),
            title: format!(
                "Eigenvalue trajectories, loop r = {} about (Ω = {}, Δ = {})",
                rl.lp.radius, rl.lp.center_omega, rl.lp.center_delta
            ),
        }),
    )?;

    let mut winding_rows = Vec::with_capacity(LDIM);
    let mut winding_meta = Vec::with_capacity(LDIM);
    for j in 0..LDIM {
        let reference = Complex64::new(
            if j <= 4 {
                rl.reference_slow
            } else {
                rl.reference_fast
            },
            0.0,
        );
        let path = tracks.closed_path(j);
        let w = winding_number(&path, reference)?;
        let (num, den) = match w.rational {
            Some(r) => r,
            None => {
                em.warn(format!(
                    "branch {j}: raw winding {:.6} is not near a small rational",
                    w.raw
                ));
                (0, 0)
            }
        };
        let orbit = tracks.orbit(j);
        let orbit_text: Vec<String> = orbit.iter().map(|b| b.to_string()).collect();
        winding_rows.push(vec![
            Cell::Int(j as i64),
            Cell::Complex(reference),
            Cell::Real(w.raw),
            Cell::Int(num),
            Cell::Int(den),
            Cell::Int(path.closure_m as i64),
            Cell::Text(orbit_text.join(" ")),
        ]);
        winding_meta.push(json!({
            "branch": j,
            "reference": [reference.re, reference.im],
            "raw": w.raw,
            "rational": if den == 0 { Value::Null } else { json!([num, den]) },
            "closure_m": path.closure_m,
            "orbit": orbit,
        }));
    }
    em.emit(
        &Table {
            name: "windings",
            fields: vec![
                Field::Int("branch"),
                Field::Complex("reference"),
                Field::Real("raw"),
                Field::Int("winding_num"),
                Field::Int("winding_den"),
                Field::Int("closure_m"),
                Field::Text("orbit"),
            ],
            rows: winding_rows,
        },
        None,
    )?;

    let perm: Vec<usize> = tracks.permutation.to_vec();
    println!(
        "loop r = {} (N = {}): permutation {} ; windings re refs ({}, {}):",
        rl.lp.radius,
        rl.lp.samples,
        cycle_notation(&tracks.permutation),
        rl.reference_slow,
        rl.reference_fast
    );
    for w in &winding_meta {
        println!(
            "  branch {}: W = {} (raw {:.6}, m = {})",
            w["branch"],
            match &w["rational"] {
                Value::Null => "?".to_string(),
                r => format!("{}/{}", r[0], r[1]),
            },
            w["raw"].as_f64().unwrap_or(f64::NAN),
            w["closure_m"]
        );
    }

    Ok(json!({
        "kappa": rl.lp.kappa,
        "center_omega": rl.lp.center_omega,
        "center_delta": rl.lp.center_delta,
        "radius": rl.lp.radius,
        "samples": rl.lp.samples,
        "permutation": perm,
        "permutation_cycles": cycle_notation(&tracks.permutation),
        "windings": winding_meta,
    }))
}
