//! `lept` — spectral topology of a driven qubit leaking through a lossy
//! auxiliary mode.
//!
//! Subcommands: `spectrum` (closed-form vs numeric eigenvalues, point or
//! sweep), `evolve-fit` (time-domain pipeline with optional tomography
//! noise), `loop` (branch tracking and winding numbers), `resultant`
//! (characteristic-polynomial resultants and the homotopy invariant) and
//! `verify` (the built-in cross-check suite).
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage/config error,
//! 3 numerical failure.

mod commands;
mod config;
mod output;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};

use lept_core::CoreError;

use config::{LoopFlags, SweepFlags};
use output::{Emitter, Format};

#[derive(Parser)]
#[command(
    name = "lept",
    version,
    about = "Spectral topology of a lossy qubit–pseudomode pair: sweeps, loops, fits, invariants"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// TOML configuration file; flags override its keys.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory (default "out").
    #[arg(long, global = true, value_name = "DIR")]
    output: Option<PathBuf>,
    /// Data-file format.
    #[arg(long, global = true, value_enum, value_name = "FORMAT")]
    format: Option<FormatArg>,
    /// Base seed for the stochastic emulation (default 0; never wall-clock).
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Worker threads for parameter sweeps (default: all processors).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form vs numeric eigenvalues at a point or over an (Ω, Δ) sweep.
    Spectrum(SpectrumArgs),
    /// Evolve the standard superposition state, extract modal amplitudes, fit eigenvalues.
    EvolveFit(EvolveFitArgs),
    /// Track the nine eigenvalue branches around a parameter-space loop.
    Loop(LoopArgs),
    /// Resultant vectors and the homotopy invariant along a loop.
    Resultant(ResultantArgs),
    /// Run the built-in cross-check suite (exit 1 on any failure).
    Verify,
}

#[derive(Args)]
struct SpectrumArgs {
    /// Drive amplitude Ω, in units of κ.
    #[arg(long, allow_negative_numbers = true)]
    omega: Option<f64>,
    /// Detuning Δ, in units of κ.
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    /// Decay rate κ (unit scale; default 1).
    #[arg(long, allow_negative_numbers = true)]
    kappa: Option<f64>,
    /// Sweep the (Ω, Δ) plane instead of a single point.
    #[arg(long)]
    sweep: bool,
    #[arg(long, allow_negative_numbers = true)]
    omega_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    omega_max: Option<f64>,
    #[arg(long)]
    omega_steps: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    delta_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    delta_max: Option<f64>,
    #[arg(long)]
    delta_steps: Option<usize>,
}

#[derive(Args)]
struct EvolveFitArgs {
    /// Drive amplitude Ω, in units of κ.
    #[arg(long, allow_negative_numbers = true)]
    omega: Option<f64>,
    /// Detuning Δ, in units of κ.
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    /// Decay rate κ (unit scale; default 1).
    #[arg(long, allow_negative_numbers = true)]
    kappa: Option<f64>,
    /// Time-grid span (default 5/κ).
    #[arg(long, allow_negative_numbers = true)]
    t_max: Option<f64>,
    /// Time-grid span in µs (needs physical params).
    #[arg(long, allow_negative_numbers = true)]
    t_max_us: Option<f64>,
    /// Time-grid sample count (default 50).
    #[arg(long)]
    samples: Option<usize>,
    /// Tomography noise per quadrature (default 0: exact amplitudes).
    #[arg(long, allow_negative_numbers = true)]
    noise_sigma: Option<f64>,
}

#[derive(Args)]
struct LoopArgs {
    /// Decay rate κ (unit scale; default 1).
    #[arg(long, allow_negative_numbers = true)]
    kappa: Option<f64>,
    /// Loop center Ω (default κ/2).
    #[arg(long, allow_negative_numbers = true)]
    center_omega: Option<f64>,
    /// Loop center Δ (default 0).
    #[arg(long, allow_negative_numbers = true)]
    center_delta: Option<f64>,
    /// Loop radius (default 0.327κ).
    #[arg(long, allow_negative_numbers = true)]
    radius: Option<f64>,
    /// Samples around the loop (default 128).
    #[arg(long)]
    samples: Option<usize>,
    /// Winding reference for branches 0–4 (default −κ/4).
    #[arg(long, allow_negative_numbers = true)]
    reference_slow: Option<f64>,
    /// Winding reference for branches 5–8 (default −κ/2).
    #[arg(long, allow_negative_numbers = true)]
    reference_fast: Option<f64>,
}

#[derive(Args)]
struct ResultantArgs {
    /// Decay rate κ (unit scale; default 1).
    #[arg(long, allow_negative_numbers = true)]
    kappa: Option<f64>,
    /// Loop center Ω (default κ/2).
    #[arg(long, allow_negative_numbers = true)]
    center_omega: Option<f64>,
    /// Loop center Δ (default 0).
    #[arg(long, allow_negative_numbers = true)]
    center_delta: Option<f64>,
    /// Loop radius (default 0.327κ).
    #[arg(long, allow_negative_numbers = true)]
    radius: Option<f64>,
    /// Samples around the loop (default 128).
    #[arg(long)]
    samples: Option<usize>,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            error_code(&err)
        }
    };
    std::process::exit(code);
}

/// Map failures onto the exit-code contract: invalid inputs are usage
/// errors (2), anything that went wrong inside the numerics is 3.
fn error_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(core) = cause.downcast_ref::<CoreError>() {
            return match core {
                CoreError::InvalidParams(_) => 2,
                _ => 3,
            };
        }
    }
    2
}

fn run(cli: Cli) -> Result<i32> {
    let file = config::load_file(cli.global.config.as_deref())?;

    let format = match cli.global.format {
        Some(FormatArg::Csv) => Format::Csv,
        Some(FormatArg::Json) => Format::Json,
        None => match file.format.as_deref() {
            None | Some("csv") => Format::Csv,
            Some("json") => Format::Json,
            Some(other) => anyhow::bail!("unknown format {other:?} (expected csv or json)"),
        },
    };
    let out_dir = cli
        .global
        .output
        .clone()
        .or_else(|| file.output_dir.clone().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let seed = cli.global.seed.or(file.seed).unwrap_or(0);
    let jobs = cli.global.jobs.or(file.jobs).unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(anyhow::Error::from)?;

    let params_table = file.params.clone().unwrap_or_default();
    let mut em = Emitter::new(out_dir, format)?;

    let code = match &cli.command {
        Command::Spectrum(args) => {
            let sweep_flags = SweepFlags {
                omega_min: args.omega_min,
                omega_max: args.omega_max,
                omega_steps: args.omega_steps,
                delta_min: args.delta_min,
                delta_max: args.delta_max,
                delta_steps: args.delta_steps,
            };
            let sweep_requested = args.sweep
                || file.sweep.is_some()
                || args.omega_min.is_some()
                || args.omega_max.is_some()
                || args.omega_steps.is_some()
                || args.delta_min.is_some()
                || args.delta_max.is_some()
                || args.delta_steps.is_some();
            let results = if sweep_requested {
                let (kappa, kappa_mhz) = config::resolve_kappa(&params_table, args.kappa)?;
                let spec = config::resolve_sweep(
                    &file.sweep.clone().unwrap_or_default(),
                    &sweep_flags,
                    kappa,
                )?;
                let mut results = commands::spectrum::run_sweep(kappa, &spec, &pool, &mut em)?;
                attach_units(&mut results, kappa_mhz);
                results
            } else {
                let r = config::resolve_params(&params_table, args.omega, args.delta, args.kappa)?;
                let mut results = commands::spectrum::run_point(r.params, &mut em)?;
                attach_units(&mut results, r.kappa_mhz);
                results
            };
            em.finish("spectrum", results)?;
            0
        }
        Command::EvolveFit(args) => {
            let r = config::resolve_params(&params_table, args.omega, args.delta, args.kappa)?;
            let grid = config::resolve_grid(
                &file.grid.clone().unwrap_or_default(),
                args.t_max,
                args.t_max_us,
                args.samples,
                r.params.kappa,
                r.kappa_mhz,
            )?;
            let noise_sigma = args.noise_sigma.or(file.noise_sigma).unwrap_or(0.0);
            if !(noise_sigma.is_finite() && noise_sigma >= 0.0) {
                anyhow::bail!("noise_sigma must be a finite non-negative number, got {noise_sigma}");
            }
            let mut results =
                commands::evolve_fit::run(r.params, &grid, noise_sigma, seed, &mut em)?;
            attach_units(&mut results, r.kappa_mhz);
            em.finish("evolve-fit", results)?;
            0
        }
        Command::Loop(args) => {
            let (kappa, kappa_mhz) = config::resolve_kappa(&params_table, args.kappa)?;
            let rl = config::resolve_loop(
                &file.loop_.clone().unwrap_or_default(),
                &LoopFlags {
                    center_omega: args.center_omega,
                    center_delta: args.center_delta,
                    radius: args.radius,
                    samples: args.samples,
                    reference_slow: args.reference_slow,
                    reference_fast: args.reference_fast,
                },
                kappa,
            )?;
            let mut results = commands::loop_cmd::run(&rl, &mut em)?;
            attach_units(&mut results, kappa_mhz);
            em.finish("loop", results)?;
            0
        }
        Command::Resultant(args) => {
            let (kappa, kappa_mhz) = config::resolve_kappa(&params_table, args.kappa)?;
            let rl = config::resolve_loop(
                &file.loop_.clone().unwrap_or_default(),
                &LoopFlags {
                    center_omega: args.center_omega,
                    center_delta: args.center_delta,
                    radius: args.radius,
                    samples: args.samples,
                    reference_slow: None,
                    reference_fast: None,
                },
                kappa,
            )?;
            let mut results = commands::resultant::run(&rl, &mut em)?;
            attach_units(&mut results, kappa_mhz);
            em.finish("resultant", results)?;
            0
        }
        Command::Verify => {
            let (results, passed) = commands::verify_cmd::run(&mut em)?;
            em.finish("verify", results)?;
            if passed {
                0
            } else {
                1
            }
        }
    };
    Ok(code)
}

/// Record the physical-unit conversion (when one happened) in the results
/// block: all emitted quantities are in units of κ.
fn attach_units(results: &mut serde_json::Value, kappa_mhz: Option<f64>) {
    if let Some(obj) = results.as_object_mut() {
        match kappa_mhz {
            Some(mhz) => {
                obj.insert(
                    "unit_conversion".into(),
                    serde_json::json!({
                        "kappa_mhz": mhz,
                        "note": "rates in units of κ; times in units of 1/κ",
                    }),
                );
            }
            None => {
                obj.insert("unit_conversion".into(), serde_json::Value::Null);
            }
        }
    }
}
