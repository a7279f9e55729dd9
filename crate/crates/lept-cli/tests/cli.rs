//! End-to-end checks of the `lept` binary: exit codes, file schemas, unit
//! handling, warning mirroring, and byte-level determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::tempdir;

fn lept(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lept"))
        .args(args)
        .arg("--output")
        .arg(out_dir)
        .output()
        .expect("binary should spawn")
}

fn metadata(dir: &Path) -> Value {
    let raw = fs::read_to_string(dir.join("metadata.json")).expect("metadata.json");
    serde_json::from_str(&raw).expect("well-formed metadata")
}

fn csv_lines(dir: &Path, name: &str) -> Vec<String> {
    fs::read_to_string(dir.join(name))
        .unwrap_or_else(|e| panic!("{name}: {e}"))
        .lines()
        .map(str::to_owned)
        .collect()
}

#[test]
fn usage_errors_exit_with_code_2() {
    let tmp = tempdir().unwrap();
    let bogus = lept(&["spectrum", "--omega", "0.5", "--no-such-flag"], tmp.path());
    assert_eq!(bogus.status.code(), Some(2));

    let negative = lept(&["loop", "--radius", "-1"], tmp.path());
    assert_eq!(negative.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&negative.stderr).contains("radius"));

    let cfg = tmp.path().join("bad.toml");
    fs::write(&cfg, "[params]\nomega = 0.5\nmystery_knob = 3\n").unwrap();
    let unknown = lept(
        &["spectrum", "--config", cfg.to_str().unwrap()],
        tmp.path(),
    );
    assert_eq!(unknown.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("mystery_knob"));
}

#[test]
fn loop_through_the_degeneracy_exits_with_code_3() {
    let tmp = tempdir().unwrap();
    // Radius κ/4 around (κ/2, 0) passes straight through the defective
    // point, where branch identity is meaningless.
    let out = lept(&["loop", "--radius", "0.25"], tmp.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degeneracy"));
}

#[test]
fn verify_command_passes_cleanly() {
    let tmp = tempdir().unwrap();
    let out = lept(&["verify"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("PASS"));
    assert!(!stdout.contains("FAIL"));
    let meta = metadata(tmp.path());
    assert_eq!(meta["results"]["passed"], Value::Bool(true));
    assert_eq!(meta["command"], "verify");
}

#[test]
fn spectrum_point_emits_the_nine_branch_table() {
    let tmp = tempdir().unwrap();
    let out = lept(&["spectrum", "--omega", "0.5", "--delta", "0.3"], tmp.path());
    assert_eq!(out.status.code(), Some(0));

    let lines = csv_lines(tmp.path(), "spectrum_point.csv");
    assert_eq!(
        lines[0],
        "branch,re_analytic,im_analytic,re_numeric,im_numeric,distance"
    );
    assert_eq!(lines.len(), 10, "header plus one row per branch");

    let meta = metadata(tmp.path());
    assert_eq!(meta["command"], "spectrum");
    let files: Vec<&str> = meta["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f.as_str().unwrap())
        .collect();
    assert!(files.contains(&"spectrum_point.csv"));
    assert!(meta["results"]["max_distance"].as_f64().unwrap() < 1e-9);

    let manifest: Value = serde_json::from_str(
        &fs::read_to_string(tmp.path().join("plot_manifest.json")).unwrap(),
    )
    .unwrap();
    assert!(!manifest["plots"].as_array().unwrap().is_empty());
}

#[test]
fn spectrum_at_the_defective_point_reports_clusters() {
    let tmp = tempdir().unwrap();
    let out = lept(&["spectrum", "--omega", "0.25", "--delta", "0"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("defective cluster"));

    let meta = metadata(tmp.path());
    let clusters = meta["results"]["defective_clusters"].as_array().unwrap();
    let labels: Vec<Vec<u64>> = clusters
        .iter()
        .map(|c| {
            c["labels"]
                .as_array()
                .unwrap()
                .iter()
                .map(|l| l.as_u64().unwrap())
                .collect()
        })
        .collect();
    assert_eq!(labels, vec![vec![1, 3], vec![2, 4], vec![5, 6, 7]]);
    for cluster in clusters {
        assert!(cluster["metric"].as_f64().unwrap() < 1e-6);
    }
}

#[test]
fn sweep_rows_cover_the_grid_and_pin_the_stationary_branch() {
    let tmp = tempdir().unwrap();
    let out = lept(
        &[
            "spectrum",
            "--sweep",
            "--omega-steps",
            "7",
            "--delta-steps",
            "5",
            "--jobs",
            "2",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0));

    let lines = csv_lines(tmp.path(), "spectrum_sweep.csv");
    assert_eq!(lines.len(), 1 + 7 * 5 * 9);
    assert!(lines[0].starts_with("omega,delta,branch,"));

    // The stationary branch prints as exact zeros in every column after
    // the grid coordinates.
    let zero = "0.0000000000000000e0";
    for line in &lines[1..] {
        let cols: Vec<&str> = line.split(',').collect();
        if cols[2] == "0" {
            assert!(cols[3..].iter().all(|c| *c == zero), "{line}");
        }
    }
}

#[test]
fn loop_tables_close_the_circle() {
    let tmp = tempdir().unwrap();
    let out = lept(&["loop"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("(1 3)(2 4)(7 8)"));

    // 128 samples plus an explicit closing row at k = 2π, for nine branches.
    let branches = csv_lines(tmp.path(), "loop_branches.csv");
    assert_eq!(branches.len(), 1 + 129 * 9);
    let windings = csv_lines(tmp.path(), "windings.csv");
    assert_eq!(windings.len(), 1 + 9);
    assert!(windings[0].starts_with("branch,re_reference,"));

    let meta = metadata(tmp.path());
    let perm: Vec<u64> = meta["results"]["permutation"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert_eq!(perm, vec![0, 3, 4, 1, 2, 5, 6, 8, 7]);
}

#[test]
fn resultant_curve_returns_to_its_starting_point() {
    let tmp = tempdir().unwrap();
    let out = lept(&["resultant"], tmp.path());
    assert_eq!(out.status.code(), Some(0));

    let lines = csv_lines(tmp.path(), "resultant_loop.csv");
    assert_eq!(lines.len(), 1 + 129);
    let first: Vec<&str> = lines[1].split(',').collect();
    let last: Vec<&str> = lines[129].split(',').collect();
    // Same point, different parameter value (k = 0 vs k = 2π).
    assert_ne!(first[0], last[0]);
    assert_eq!(first[1..], last[1..]);

    let meta = metadata(tmp.path());
    assert_eq!(meta["results"]["invariant"], Value::from(0));
}

#[test]
fn evolve_fit_flags_branches_without_signal() {
    let tmp = tempdir().unwrap();
    // On resonance the initial state has no overlap with part of the
    // spectrum; those branches must come back as no-signal, not as noise
    // fits or errors.
    let out = lept(&["evolve-fit", "--omega", "0.5", "--delta", "0"], tmp.path());
    assert_eq!(out.status.code(), Some(0));

    let meta = metadata(tmp.path());
    let branches = meta["results"]["branches"].as_array().unwrap();
    assert_eq!(branches.len(), 9);
    let statuses: Vec<&str> = branches
        .iter()
        .map(|b| b["status"].as_str().unwrap())
        .collect();
    assert!(statuses.contains(&"no-signal"));
    assert!(statuses.contains(&"ok"));
    assert!(meta["results"]["max_abs_error_ok"].as_f64().unwrap() < 1e-9);

    for name in (0..9).map(|j| format!("amplitude_{j}.csv")) {
        assert!(tmp.path().join(&name).exists(), "{name} missing");
    }
}

#[test]
fn json_output_encodes_complex_pairs() {
    let tmp = tempdir().unwrap();
    let out = lept(
        &["spectrum", "--omega", "0.5", "--delta", "0.3", "--format", "json"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0));

    let rows: Value = serde_json::from_str(
        &fs::read_to_string(tmp.path().join("spectrum_point.json")).unwrap(),
    )
    .unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 9);
    for (j, row) in rows.iter().enumerate() {
        assert_eq!(row["branch"], Value::from(j));
        let z = row["analytic"].as_array().unwrap();
        assert_eq!(z.len(), 2);
        assert!(z[0].is_f64() && z[1].is_f64());
    }
}

#[test]
fn config_file_values_yield_to_flags() {
    let tmp = tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    fs::write(&cfg, "[params]\nomega = 0.3\ndelta = 0.1\n").unwrap();
    let out = lept(
        &[
            "spectrum",
            "--config",
            cfg.to_str().unwrap(),
            "--delta",
            "0.25",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let meta = metadata(tmp.path());
    assert_eq!(meta["results"]["omega"].as_f64().unwrap(), 0.3);
    assert_eq!(meta["results"]["delta"].as_f64().unwrap(), 0.25);
}

#[test]
fn physical_unit_configs_record_the_conversion() {
    let tmp = tempdir().unwrap();
    let cfg = tmp.path().join("lab.toml");
    fs::write(
        &cfg,
        "[params]\nomega_mhz = 4.0\ndelta_mhz = -2.0\nkappa_mhz = 8.0\n",
    )
    .unwrap();
    let out = lept(&["spectrum", "--config", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(0));

    let meta = metadata(tmp.path());
    assert_eq!(meta["results"]["omega"].as_f64().unwrap(), 0.5);
    assert_eq!(meta["results"]["delta"].as_f64().unwrap(), -0.25);
    assert_eq!(meta["results"]["kappa"].as_f64().unwrap(), 1.0);
    let conv = &meta["results"]["unit_conversion"];
    assert_eq!(conv["kappa_mhz"].as_f64().unwrap(), 8.0);
}

#[test]
fn near_nyquist_rates_surface_warnings() {
    let tmp = tempdir().unwrap();
    // At Δ = 30 the oscillation rates of several branches approach the
    // Nyquist limit of the default 50-sample grid.
    let out = lept(&["evolve-fit", "--omega", "0.2", "--delta", "30"], tmp.path());
    assert_eq!(out.status.code(), Some(0));

    let meta = metadata(tmp.path());
    let warnings = meta["warnings"].as_array().unwrap();
    assert!(!warnings.is_empty());
    let stderr = String::from_utf8_lossy(&out.stderr);
    for w in warnings {
        assert!(stderr.contains(w.as_str().unwrap()), "unmirrored: {w}");
    }
}

#[test]
fn identical_invocations_write_identical_bytes() {
    let tmp = tempdir().unwrap();
    let args = [
        "evolve-fit",
        "--omega",
        "0.5",
        "--delta",
        "0.3",
        "--noise-sigma",
        "0.01",
        "--seed",
        "7",
    ];
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert_eq!(lept(&args, &a).status.code(), Some(0));
    assert_eq!(lept(&args, &b).status.code(), Some(0));

    let mut names: Vec<String> = fs::read_dir(&a)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert!(names.len() > 2);
    for name in names {
        let bytes_a = fs::read(a.join(&name)).unwrap();
        let bytes_b = fs::read(b.join(&name)).unwrap();
        assert_eq!(bytes_a, bytes_b, "{name} differs between reruns");
    }
}
