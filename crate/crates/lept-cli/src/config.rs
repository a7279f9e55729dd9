//! Run configuration: an optional TOML file plus command-line overrides,
//! resolved once at the boundary into κ-normalized quantities.
//!
//! Precedence is defaults < config file < flags.  Physical inputs (MHz for
//! rates, µs for times) are converted here and nowhere else; downstream
//! code only ever sees values in units of κ, and the conversion factor is
//! recorded in the run metadata.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use lept_core::{ParameterLoop, SystemParams, TimeGrid};

/// Raw `[params]` table: either κ-normalized keys or the `_mhz` triple.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsTable {
    pub omega: Option<f64>,
    pub delta: Option<f64>,
    pub kappa: Option<f64>,
    pub omega_mhz: Option<f64>,
    pub delta_mhz: Option<f64>,
    pub kappa_mhz: Option<f64>,
}

/// Raw `[sweep]` table for the 2-D spectrum mode.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepTable {
    pub omega_min: Option<f64>,
    pub omega_max: Option<f64>,
    pub omega_steps: Option<usize>,
    pub delta_min: Option<f64>,
    pub delta_max: Option<f64>,
    pub delta_steps: Option<usize>,
}

/// Raw `[grid]` table for time evolution.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridTable {
    pub t_max: Option<f64>,
    pub t_max_us: Option<f64>,
    pub samples: Option<usize>,
}

/// Raw `[loop]` table for branch tracking and resultant trajectories.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopTable {
    pub center_omega: Option<f64>,
    pub center_delta: Option<f64>,
    pub radius: Option<f64>,
    pub samples: Option<usize>,
    pub reference_slow: Option<f64>,
    pub reference_fast: Option<f64>,
}

/// Whole config file.  The invoked subcommand decides which sections are
/// read; unknown keys anywhere are rejected.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub params: Option<ParamsTable>,
    pub sweep: Option<SweepTable>,
    pub grid: Option<GridTable>,
    #[serde(rename = "loop")]
    pub loop_: Option<LoopTable>,
    pub noise_sigma: Option<f64>,
    pub seed: Option<u64>,
    pub output_dir: Option<String>,
    pub format: Option<String>,
    pub jobs: Option<usize>,
}

pub fn load_file(path: Option<&Path>) -> Result<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("malformed config file {}", path.display()))
}

/// Parameters after unit resolution; `kappa_mhz` is set only when the
/// inputs arrived in physical units (in which case κ = 1 internally).
#[derive(Clone, Copy, Debug)]
pub struct ResolvedParams {
    pub params: SystemParams,
    pub kappa_mhz: Option<f64>,
}

/// Resolve the `[params]` table against κ-normalized flag overrides.
pub fn resolve_params(
    table: &ParamsTable,
    omega_flag: Option<f64>,
    delta_flag: Option<f64>,
    kappa_flag: Option<f64>,
) -> Result<ResolvedParams> {
    let physical =
        table.omega_mhz.is_some() || table.delta_mhz.is_some() || table.kappa_mhz.is_some();
    let normalized = table.omega.is_some()
        || table.delta.is_some()
        || table.kappa.is_some()
        || omega_flag.is_some()
        || delta_flag.is_some()
        || kappa_flag.is_some();
    if physical && normalized {
        bail!("params mix physical (_mhz) and κ-normalized keys; pick one unit system");
    }

    if physical {
        let (Some(om), Some(de), Some(ka)) = (table.omega_mhz, table.delta_mhz, table.kappa_mhz)
        else {
            bail!("physical units need all of omega_mhz, delta_mhz and kappa_mhz");
        };
        if !(ka.is_finite() && ka > 0.0) {
            bail!("kappa_mhz must be a positive rate, got {ka}");
        }
        let params = SystemParams::new(om / ka, de / ka, 1.0)?;
        return Ok(ResolvedParams {
            params,
            kappa_mhz: Some(ka),
        });
    }

    let kappa = kappa_flag.or(table.kappa).unwrap_or(1.0);
    let Some(omega) = omega_flag.or(table.omega) else {
        bail!("params.omega is required (set it in the config or pass --omega)");
    };
    let delta = delta_flag.or(table.delta).unwrap_or(0.0);
    Ok(ResolvedParams {
        params: SystemParams::new(omega, delta, kappa)?,
        kappa_mhz: None,
    })
}

/// κ alone, for the loop-centered commands that take no drive point.
pub fn resolve_kappa(table: &ParamsTable, kappa_flag: Option<f64>) -> Result<(f64, Option<f64>)> {
    if let Some(ka) = table.kappa_mhz {
        if kappa_flag.is_some() || table.kappa.is_some() {
            bail!("params mix physical (_mhz) and κ-normalized keys; pick one unit system");
        }
        if !(ka.is_finite() && ka > 0.0) {
            bail!("kappa_mhz must be a positive rate, got {ka}");
        }
        return Ok((1.0, Some(ka)));
    }
    let kappa = kappa_flag.or(table.kappa).unwrap_or(1.0);
    if !(kappa.is_finite() && kappa > 0.0) {
        bail!("kappa must be a positive rate, got {kappa}");
    }
    Ok((kappa, None))
}

/// A resolved rectangular sweep with its grid values precomputed exactly
/// once (so every consumer sees bit-identical coordinates).
#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub omega_values: Vec<f64>,
    pub delta_values: Vec<f64>,
}

pub struct SweepFlags {
    pub omega_min: Option<f64>,
    pub omega_max: Option<f64>,
    pub omega_steps: Option<usize>,
    pub delta_min: Option<f64>,
    pub delta_max: Option<f64>,
    pub delta_steps: Option<usize>,
}

pub fn resolve_sweep(table: &SweepTable, flags: &SweepFlags, kappa: f64) -> Result<SweepSpec> {
    let omega_min = flags.omega_min.or(table.omega_min).unwrap_or(0.0);
    let omega_max = flags.omega_max.or(table.omega_max).unwrap_or(1.5 * kappa);
    let omega_steps = flags.omega_steps.or(table.omega_steps).unwrap_or(61);
    let delta_min = flags.delta_min.or(table.delta_min).unwrap_or(-kappa);
    let delta_max = flags.delta_max.or(table.delta_max).unwrap_or(kappa);
    let delta_steps = flags.delta_steps.or(table.delta_steps).unwrap_or(61);
    Ok(SweepSpec {
        omega_values: axis("omega", omega_min, omega_max, omega_steps)?,
        delta_values: axis("delta", delta_min, delta_max, delta_steps)?,
    })
}

fn axis(name: &str, min: f64, max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(min.is_finite() && max.is_finite()) || max < min {
        bail!("sweep {name} range [{min}, {max}] is not a valid interval");
    }
    if steps < 1 {
        bail!("sweep {name}_steps must be at least 1");
    }
    if steps == 1 {
        return Ok(vec![min]);
    }
    let span = max - min;
    let last = (steps - 1) as f64;
    // (span·i)/(steps−1) keeps exactly representable endpoints (and interior
    // points like the midpoint of a symmetric range) exact.
    Ok((0..steps).map(|i| min + (span * i as f64) / last).collect())
}

/// Resolved time grid plus the numbers that went into it, for metadata.
#[derive(Clone, Debug)]
pub struct ResolvedGrid {
    pub grid: TimeGrid,
    pub t_max: f64,
    pub samples: usize,
}

pub fn resolve_grid(
    table: &GridTable,
    t_max_flag: Option<f64>,
    t_max_us_flag: Option<f64>,
    samples_flag: Option<usize>,
    kappa: f64,
    kappa_mhz: Option<f64>,
) -> Result<ResolvedGrid> {
    let t_max_us = t_max_us_flag.or(table.t_max_us);
    let t_max_plain = t_max_flag.or(table.t_max);
    let t_max = match (t_max_plain, t_max_us) {
        (Some(_), Some(_)) => bail!("grid gives both t_max and t_max_us; pick one"),
        (Some(t), None) => t,
        (None, Some(us)) => {
            let Some(ka_mhz) = kappa_mhz else {
                bail!("t_max_us needs physical params (kappa_mhz) to fix the time unit");
            };
            us * ka_mhz
        }
        (None, None) => 5.0 / kappa,
    };
    if !(t_max.is_finite() && t_max > 0.0) {
        bail!("grid span must be positive, got {t_max}");
    }
    let samples = samples_flag.or(table.samples).unwrap_or(50);
    if samples < 4 {
        bail!("grid needs at least 4 samples for the fits, got {samples}");
    }
    Ok(ResolvedGrid {
        grid: TimeGrid::uniform(0.0, t_max, samples)?,
        t_max,
        samples,
    })
}

/// Resolved loop geometry plus the winding references for each branch
/// family.
#[derive(Clone, Debug)]
pub struct ResolvedLoop {
    pub lp: ParameterLoop,
    pub reference_slow: f64,
    pub reference_fast: f64,
}

pub struct LoopFlags {
    pub center_omega: Option<f64>,
    pub center_delta: Option<f64>,
    pub radius: Option<f64>,
    pub samples: Option<usize>,
    pub reference_slow: Option<f64>,
    pub reference_fast: Option<f64>,
}

pub fn resolve_loop(table: &LoopTable, flags: &LoopFlags, kappa: f64) -> Result<ResolvedLoop> {
    let center_omega = flags
        .center_omega
        .or(table.center_omega)
        .unwrap_or(0.5 * kappa);
    let center_delta = flags.center_delta.or(table.center_delta).unwrap_or(0.0);
    let radius = flags.radius.or(table.radius).unwrap_or(0.327 * kappa);
    let samples = flags.samples.or(table.samples).unwrap_or(128);
    let lp = ParameterLoop::new(center_omega, center_delta, radius, samples, kappa)?;
    Ok(ResolvedLoop {
        lp,
        reference_slow: flags
            .reference_slow
            .or(table.reference_slow)
            .unwrap_or(-0.25 * kappa),
        reference_fast: flags
            .reference_fast
            .or(table.reference_fast)
            .unwrap_or(-0.5 * kappa),
    })
}
