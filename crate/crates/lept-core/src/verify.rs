//! Self-verification: the cross-checks that pin the numerics to the model
//! rather than to themselves.
//!
//! Every property here has two independent routes to the same quantity —
//! closed forms against the dense eigensolver, evolution against spectral
//! reconstruction, winding against the tracked permutation — so a defect
//! in either route surfaces as a mismatch instead of a silently consistent
//! wrong answer.  The report also documents the two places where published
//! formulas disagree internally (the Δ² coefficient in α, and the position
//! of the higher-order coalescence): in both cases the check is powered,
//! meaning the rejected alternative demonstrably fails it.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{evolve, initial_superposition_state, TimeGrid};
use crate::eigen::{eigenvalues_only, min_cost_assignment, Spectrum};
use crate::locate::{locate_pair_ep, locate_triple_ep, EpLocation};
use crate::model::{
    analytic_eigenvalues, analytic_eigenvalues_with_delta_coeff, build_liouvillian,
    hermiticity_defect, min_density_eigenvalue, trace_defect, vec_density, DensityMatrix,
    LiouvillianMatrix, SystemParams, LDIM,
};
use crate::topology::{
    homotopy_invariant, resultant_scale, resultant_vector, track_branches, winding_number,
    ParameterLoop,
};

/// Maximum |closed-form − numeric| eigenvalue distance on the sweep grid,
/// in units of κ.
const GRID_TOL: f64 = 1e-9;

/// Margin by which the rejected α coefficient must fail the grid check.
const ALPHA_POWER: f64 = 1e-3;

/// Outcome of one verification property.
#[derive(Clone, Debug)]
pub struct PropertyCheck {
    pub name: &'static str,
    pub passed: bool,
    /// The measured quantities behind the verdict, human-readable.
    pub detail: String,
}

/// Which Δ² coefficient in α survives the numeric cross-check.
#[derive(Clone, Debug)]
pub struct AlphaResolution {
    pub adopted_coefficient: &'static str,
    pub rejected_coefficient: &'static str,
    /// Worst grid error of the adopted closed forms (units of κ).
    pub adopted_max_error: f64,
    /// Worst off-axis error of the rejected variant — large by design.
    pub rejected_worst_error: f64,
    pub rejected_worst_point: (f64, f64),
}

/// Aggregated verification outcome.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub properties: Vec<PropertyCheck>,
    pub alpha: AlphaResolution,
    /// Verified pair coalescence, when the search succeeded.
    pub pair_point: Option<EpLocation>,
    /// Verified higher-order coalescence, when the search succeeded.
    pub triple_point: Option<EpLocation>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(|p| p.passed)
    }
}

/// Run the full verification suite against the production generator.
pub fn run_verification() -> VerifyReport {
    run_verification_with(build_liouvillian)
}

/// The suite with an injectable generator — lets tests prove the
/// spectral-consistency check actually has teeth by feeding it a broken
/// matrix.
fn run_verification_with<F>(builder: F) -> VerifyReport
where
    F: Fn(&SystemParams) -> LiouvillianMatrix,
{
    let mut properties = Vec::new();

    let scan = scan_grid(&builder);
    let alpha = AlphaResolution {
        adopted_coefficient: "1/2",
        rejected_coefficient: "1/3",
        adopted_max_error: scan.adopted_max,
        rejected_worst_error: scan.rejected_max,
        rejected_worst_point: scan.rejected_worst,
    };
    properties.push(PropertyCheck {
        name: "spectral-consistency",
        passed: scan.failure.is_none() && scan.adopted_max <= GRID_TOL,
        detail: match &scan.failure {
            Some(msg) => msg.clone(),
            None => format!(
                "max |closed-form - numeric| = {:.3e} at (omega, delta) = ({:.4}, {:.4}) \
                 over the 61x61 grid",
                scan.adopted_max, scan.adopted_worst.0, scan.adopted_worst.1
            ),
        },
    });
    properties.push(PropertyCheck {
        name: "alpha-coefficient-power",
        passed: scan.rejected_max >= ALPHA_POWER,
        detail: format!(
            "delta^2/3 variant misses by {:.3e} at (omega, delta) = ({:.4}, {:.4}); \
             adopted delta^2/2 fits to {:.3e}",
            scan.rejected_max, scan.rejected_worst.0, scan.rejected_worst.1, scan.adopted_max
        ),
    });

    properties.push(trace_preservation());
    properties.push(biorthogonality());
    properties.push(winding_regression());
    properties.push(resultant_zero_locus());

    let (search, pair_point, triple_point) = degeneracy_search();
    properties.push(search);

    VerifyReport {
        properties,
        alpha,
        pair_point,
        triple_point,
    }
}

struct GridScan {
    adopted_max: f64,
    adopted_worst: (f64, f64),
    rejected_max: f64,
    rejected_worst: (f64, f64),
    failure: Option<String>,
}

/// One pass over the 61×61 sweep grid comparing the numeric spectrum of
/// `builder` against the closed forms with both α candidates.
fn scan_grid<F>(builder: &F) -> GridScan
where
    F: Fn(&SystemParams) -> LiouvillianMatrix,
{
    let mut scan = GridScan {
        adopted_max: 0.0,
        adopted_worst: (0.0, 0.0),
        rejected_max: 0.0,
        rejected_worst: (0.0, 0.0),
        failure: None,
    };
    'grid: for i in 0..61 {
        for j in 0..61 {
            let omega = 1.5 * i as f64 / 60.0;
            let delta = -1.0 + 2.0 * j as f64 / 60.0;
            let p = SystemParams::normalized(omega, delta);
            let numeric = match eigenvalues_only(&builder(&p)) {
                Ok(v) => v,
                Err(e) => {
                    scan.failure = Some(format!(
                        "eigensolver failed at (omega, delta) = ({omega:.4}, {delta:.4}): {e}"
                    ));
                    break 'grid;
                }
            };
            let adopted = pairing_error(&analytic_eigenvalues(&p), &numeric);
            if adopted > scan.adopted_max {
                scan.adopted_max = adopted;
                scan.adopted_worst = (omega, delta);
            }
            if delta != 0.0 {
                let rejected = pairing_error(
                    &analytic_eigenvalues_with_delta_coeff(&p, 1.0 / 3.0),
                    &numeric,
                );
                if rejected > scan.rejected_max {
                    scan.rejected_max = rejected;
                    scan.rejected_worst = (omega, delta);
                }
            }
        }
    }
    scan
}

/// Max per-eigenvalue distance after optimal pairing.
fn pairing_error(a: &[Complex64; LDIM], b: &[Complex64; LDIM]) -> f64 {
    let (assign, _) = min_cost_assignment(a, b);
    (0..LDIM)
        .map(|k| (a[k] - b[assign[k]]).norm())
        .fold(0.0, f64::max)
}

/// Trace, Hermiticity and positivity of the evolved state over random
/// parameter draws.
fn trace_preservation() -> PropertyCheck {
    let grid = match TimeGrid::uniform(0.0, 5.0, 25) {
        Ok(g) => g,
        Err(e) => {
            return PropertyCheck {
                name: "trace-preservation",
                passed: false,
                detail: e.to_string(),
            }
        }
    };
    let rho0 = initial_superposition_state();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_trace: f64 = 0.0;
    let mut worst_herm: f64 = 0.0;
    let mut worst_eig: f64 = 0.0;
    for _ in 0..20 {
        let p = SystemParams::normalized(rng.gen_range(0.0..1.2), rng.gen_range(-0.8..0.8));
        for rho in evolve(&p, &rho0, &grid) {
            worst_trace = worst_trace.max(trace_defect(&rho));
            worst_herm = worst_herm.max(hermiticity_defect(&rho));
            worst_eig = worst_eig.min(min_density_eigenvalue(&rho));
        }
    }
    PropertyCheck {
        name: "trace-preservation",
        passed: worst_trace <= 1e-9 && worst_herm <= 1e-9 && worst_eig >= -1e-8,
        detail: format!(
            "trace defect {worst_trace:.3e}, hermiticity defect {worst_herm:.3e}, \
             min density eigenvalue {worst_eig:.3e} over 20 draws x 25 times"
        ),
    }
}

/// T_i†V_j = δ_ij, small residuals, and the trace-preservation left vector
/// at a spread of generic points.
fn biorthogonality() -> PropertyCheck {
    let points = [
        (0.5, 0.3),
        (0.7791, 0.1885),
        (0.5, 0.327),
        (1.2, -0.7),
        (0.9, 0.05),
    ];
    let identity = vec_density(&DensityMatrix::identity());
    let mut worst_pairing: f64 = 0.0;
    let mut worst_residual: f64 = 0.0;
    let mut worst_t0: f64 = 0.0;
    for &(omega, delta) in &points {
        let p = SystemParams::normalized(omega, delta);
        let matrix = build_liouvillian(&p);
        let s = match Spectrum::compute(&matrix) {
            Ok(s) => s,
            Err(e) => {
                return PropertyCheck {
                    name: "biorthogonality",
                    passed: false,
                    detail: format!("decomposition failed at ({omega}, {delta}): {e}"),
                }
            }
        };
        for i in 0..LDIM {
            for j in 0..LDIM {
                let overlap = s.left_vectors[i].dotc(&s.right_vectors[j]);
                let expect = if i == j { 1.0 } else { 0.0 };
                worst_pairing = worst_pairing.max((overlap - expect).norm());
            }
            worst_residual = worst_residual.max(s.residuals[i] / matrix.norm());
        }
        // λ0's left eigenvector is the trace functional: T0 ∝ vec(I).
        let t0 = s.left_vectors[0];
        worst_t0 = worst_t0.max(1.0 - t0.dotc(&identity).norm() / (t0.norm() * identity.norm()));
    }
    PropertyCheck {
        name: "biorthogonality",
        passed: worst_pairing <= 1e-8 && worst_residual <= 1e-10 && worst_t0 <= 1e-8,
        detail: format!(
            "max |T_i^dag V_j - delta_ij| = {worst_pairing:.3e}, relative residual \
             {worst_residual:.3e}, trace-vector misalignment {worst_t0:.3e} over {} points",
            points.len()
        ),
    }
}

/// The headline loop regression: branch exchange, half-integer windings on
/// the hybrid branches, zero windings and trivial homotopy invariant on
/// the fast branches, identity on a small loop.
fn winding_regression() -> PropertyCheck {
    let fail = |detail: String| PropertyCheck {
        name: "winding-regression",
        passed: false,
        detail,
    };
    let lp = ParameterLoop::standard(1.0);
    let tracks = match track_branches(&lp) {
        Ok(t) => t,
        Err(e) => return fail(format!("tracking failed on the standard loop: {e}")),
    };
    if tracks.permutation != [0, 3, 4, 1, 2, 5, 6, 8, 7] {
        return fail(format!(
            "standard-loop permutation {:?} is not the expected pair exchange",
            tracks.permutation
        ));
    }
    let mut raw_dev: f64 = 0.0;
    for (j, reference, expect) in [
        (1, -0.25, (1, 2)),
        (3, -0.25, (1, 2)),
        (2, -0.25, (-1, 2)),
        (4, -0.25, (-1, 2)),
        (5, -0.5, (0, 1)),
        (6, -0.5, (0, 1)),
        (7, -0.5, (0, 1)),
        (8, -0.5, (0, 1)),
    ] {
        let path = tracks.closed_path(j);
        let w = match winding_number(&path, Complex64::new(reference, 0.0)) {
            Ok(w) => w,
            Err(e) => return fail(format!("winding failed on branch {j}: {e}")),
        };
        if w.rational != Some(expect) {
            return fail(format!(
                "branch {j} winding {:?} (raw {:.6}), expected {expect:?}",
                w.rational, w.raw
            ));
        }
        raw_dev = raw_dev.max((w.raw - expect.0 as f64 / expect.1 as f64).abs());
    }
    let invariant = match homotopy_invariant(&lp) {
        Ok(h) => h.invariant,
        Err(e) => return fail(format!("homotopy invariant failed: {e}")),
    };
    if invariant != 0 {
        return fail(format!("homotopy invariant {invariant} on the standard loop"));
    }
    let small = match lp.with_radius(0.1).and_then(|l| track_branches(&l)) {
        Ok(t) => t,
        Err(e) => return fail(format!("tracking failed on the r = 0.1 loop: {e}")),
    };
    if small.permutation != [0, 1, 2, 3, 4, 5, 6, 7, 8] {
        return fail(format!(
            "r = 0.1 loop permutation {:?} is not the identity",
            small.permutation
        ));
    }
    PropertyCheck {
        name: "winding-regression",
        passed: true,
        detail: format!(
            "pair exchange with windings +1/2 +1/2 -1/2 -1/2 (raw deviation {raw_dev:.2e}), \
             fast-branch windings 0, homotopy invariant 0, identity on r = 0.1"
        ),
    }
}

/// R1 vanishes (relative to the gap-product scale) exactly on the
/// degenerate zero-detuning line and nowhere generic.
fn resultant_zero_locus() -> PropertyCheck {
    let mut on_axis_max: f64 = 0.0;
    for i in 0..10 {
        let p = SystemParams::normalized(0.30 + 0.05 * i as f64, 0.0);
        let rel = resultant_vector(&p).r1.norm() / resultant_scale(&p);
        on_axis_max = on_axis_max.max(rel);
    }
    let generic = [
        (0.30, 0.10),
        (0.35, 0.40),
        (0.40, -0.20),
        (0.45, 0.25),
        (0.50, 0.30),
        (0.60, 0.20),
        (0.70, -0.50),
        (0.7791, 0.1885),
        (0.85, 0.45),
        (0.90, -0.50),
    ];
    let mut generic_min = f64::INFINITY;
    for &(omega, delta) in &generic {
        let p = SystemParams::normalized(omega, delta);
        let rel = resultant_vector(&p).r1.norm() / resultant_scale(&p);
        generic_min = generic_min.min(rel);
    }
    PropertyCheck {
        name: "resultant-zero-locus",
        passed: on_axis_max <= 1e-6 && generic_min >= 1e-3,
        detail: format!(
            "relative |R1| <= {on_axis_max:.3e} on 10 zero-detuning points, \
             >= {generic_min:.3e} on 10 generic points"
        ),
    }
}

/// Both coalescence searches must converge, verify defectiveness, and
/// agree on the parameter point.
fn degeneracy_search() -> (PropertyCheck, Option<EpLocation>, Option<EpLocation>) {
    let pair = locate_pair_ep(1.0, (0.6, 0.2));
    let triple = locate_triple_ep(1.0, (0.6, 0.2));
    match (pair, triple) {
        (Ok(p), Ok(t)) => {
            let agree = (p.omega - t.omega).abs() <= 1e-6 && (p.delta - t.delta).abs() <= 1e-6;
            let check = PropertyCheck {
                name: "degeneracy-search",
                passed: agree,
                detail: format!(
                    "pair coalescence at (omega, delta) = ({:.10}, {:.2e}) with metric {:.2e}; \
                     order-{} cluster at ({:.10}, {:.2e}) with metric {:.2e}",
                    p.omega, p.delta, p.defectiveness, t.multiplicity, t.omega, t.delta,
                    t.defectiveness
                ),
            };
            (check, Some(p), Some(t))
        }
        (pair, triple) => {
            let msg = [pair.err(), triple.err()]
                .into_iter()
                .flatten()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join("; ");
            (
                PropertyCheck {
                    name: "degeneracy-search",
                    passed: false,
                    detail: msg,
                },
                None,
                None,
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_verification_passes_and_documents_resolutions() {
        let report = run_verification();
        for p in &report.properties {
            assert!(p.passed, "{} failed: {}", p.name, p.detail);
        }
        assert!(report.passed());
        assert_eq!(report.properties.len(), 7);

        assert!(report.alpha.adopted_max_error <= 1e-9);
        assert!(report.alpha.rejected_worst_error >= 1e-3);
        assert_ne!(report.alpha.rejected_worst_point.1, 0.0);

        let pair = report.pair_point.as_ref().unwrap();
        assert!((pair.omega - 0.25).abs() <= 1e-4 && pair.delta.abs() <= 1e-4);
        assert!(pair.defectiveness < 1e-6);
        let triple = report.triple_point.as_ref().unwrap();
        assert!((triple.omega - 0.25).abs() <= 1e-4 && triple.delta.abs() <= 1e-4);
        assert!(triple.multiplicity >= 3);
    }

    #[test]
    fn injected_sign_error_is_caught() {
        // Flip the sign of one coupling entry of the generator — the
        // plausible transcription slip the consistency check must see.
        let report = run_verification_with(|p| {
            let mut m = build_liouvillian(p);
            m[(3, 6)] = -m[(3, 6)];
            m
        });
        let spectral = report
            .properties
            .iter()
            .find(|p| p.name == "spectral-consistency")
            .unwrap();
        assert!(!spectral.passed, "mutated generator passed: {}", spectral.detail);
        assert!(!report.passed());
    }
}
