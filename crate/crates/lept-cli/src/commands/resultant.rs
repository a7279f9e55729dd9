//! Resultant vectors of the characteristic polynomial along a loop and
//! the integer homotopy invariant of the rescaled trajectory.

use std::f64::consts::TAU;

use anyhow::Result;
use serde_json::{json, Value};

use lept_core::homotopy_invariant;

use crate::config::ResolvedLoop;
use crate::output::{Cell, Emitter, Field, PlotSpec, Table};

pub fn run(rl: &ResolvedLoop, em: &mut Emitter) -> Result<Value> {
    let hr = homotopy_invariant(&rl.lp)?;

    let mut rows = Vec::with_capacity(hr.k_values.len() + 1);
    for i in 0..hr.k_values.len() {
        rows.push(vec![
            Cell::Real(hr.k_values[i]),
            Cell::Complex(hr.resultants[i].r1),
            Cell::Complex(hr.resultants[i].r2),
            Cell::Real(hr.trajectory[i].0),
            Cell::Real(hr.trajectory[i].1),
        ]);
    }
    // Periodic closure: repeat the first sample at k = 2π so the emitted
    // curve is explicitly closed.
    rows.push(vec![
        Cell::Real(TAU),
        Cell::Complex(hr.resultants[0].r1),
        Cell::Complex(hr.resultants[0].r2),
        Cell::Real(hr.trajectory[0].0),
        Cell::Real(hr.trajectory[0].1),
    ]);
    em.emit(
        &Table {
            name: "resultant_loop",
            fields: vec![
                Field::Real("k"),
                Field::Complex("r1"),
                Field::Complex("r2"),
                Field::Real("x_rescaled"),
                Field::Real("y_rescaled"),
            ],
            rows,
        },
        Some(PlotSpec {
            kind: "complex-plane",
            x: "x_rescaled",
            y: "y_rescaled",
            series_key: None,
            title: format!(
                "Rescaled resultant trajectory, loop r = {} about (Ω = {}, Δ = {})",
                rl.lp.radius, rl.lp.center_omega, rl.lp.center_delta
            ),
        }),
    )?;

    println!(
        "resultant loop r = {} (N = {}): homotopy invariant {} (raw winding {:.6})",
        rl.lp.radius, rl.lp.samples, hr.invariant, hr.raw_winding
    );
    Ok(json!({
        "kappa": rl.lp.kappa,
        "center_omega": rl.lp.center_omega,
        "center_delta": rl.lp.center_delta,
        "radius": rl.lp.radius,
        "samples": rl.lp.samples,
        "invariant": hr.invariant,
        "raw_winding": hr.raw_winding,
    }))
}
