//! Numerical location of the generator's exceptional points.
//!
//! Two coalescences organize the spectral topology: a pair of eigenvalues
//! meeting at −κ/4 (two second-order degeneracies sharing one parameter
//! point and one spectral value) and a higher-order cluster at −κ/2.  Both
//! searches run on the closed-form eigenvalues — a root find for the pair
//! condition, a direct simplex minimization of the cluster spread for the
//! other — and neither result is trusted until the full numeric spectrum
//! at the located point confirms the coalescence: the cluster must be
//! value-degenerate *and* defective (vanishing left/right overlap), which
//! is exactly what separates an exceptional point from an ordinary
//! crossing of a diagonalizable family.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::eigen::{
    cluster_metric, eigenvalues_only, min_cost_assignment, value_clusters, Spectrum, CLUSTER_TOL,
    DEFECTIVENESS_THRESHOLD,
};
use crate::error::CoreError;
use crate::model::{analytic_eigenvalues, build_liouvillian, LiouvillianMatrix, SystemParams, LDIM};

/// Maximum Newton iterations for the pair-coalescence root find.
const MAX_NEWTON_ITERS: usize = 60;

/// Maximum simplex iterations for the cluster-coalescence search.
const MAX_SIMPLEX_ITERS: usize = 500;

/// Required eigenvalue-cluster spread at a verified coalescence, in units
/// of κ.
const SPREAD_TOL: f64 = 1e-6;

/// Relative singular-value cutoff for the Jordan-structure nullity counts.
const NULLITY_TOL: f64 = 1e-8;

/// vec(ρ) coordinates carrying the two slow Jordan chains at the pair
/// coalescence: the column-coherence block into the ground state and its
/// row-side mirror.  Each chain's kernel vector lives entirely in one
/// block, which is how the four coalescing labels split into two
/// independent pairs.
const PAIR_BLOCK_A: [usize; 2] = [3, 6];
const PAIR_BLOCK_B: [usize; 2] = [1, 2];

/// A located and numerically verified coalescence point.
///
/// `defectiveness` is the σ_min overlap metric of the coalesced cluster
/// (see [`Spectrum`]); at a genuine exceptional point it is below
/// [`DEFECTIVENESS_THRESHOLD`], while an ordinary degeneracy of a
/// diagonalizable matrix keeps it O(1).
#[derive(Clone, Debug)]
pub struct EpLocation {
    pub omega: f64,
    pub delta: f64,
    /// Mean numeric eigenvalue of the coalesced cluster.
    pub eigenvalue: Complex64,
    /// Number of numeric eigenvalues in the coalesced cluster.
    pub multiplicity: usize,
    /// Largest pairwise distance inside the cluster.
    pub cluster_spread: f64,
    /// σ_min of the cluster's left/right Gram matrix.
    pub defectiveness: f64,
    /// Iterations consumed by the parameter search.
    pub iterations: usize,
}

/// Locate the parameter point where the slow hybrid pair coalesces.
///
/// The pair splits as ±√(η₊² − Ω²) about its center, so the coalescence
/// is the root of the complex condition η₊² − Ω² = 0 in the two real
/// unknowns (Ω, Δ).  Newton's method with the exact Jacobian converges
/// quadratically from any start with Ω > 0.  The located point is then
/// verified against the numeric spectrum (multiplicity ≥ 2, spread and
/// defectiveness below tolerance).
pub fn locate_pair_ep(kappa: f64, start: (f64, f64)) -> Result<EpLocation, CoreError> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(CoreError::InvalidParams(format!(
            "decay rate must be positive, got {kappa}"
        )));
    }
    let (mut omega, mut delta) = start;
    if !(omega.is_finite() && delta.is_finite()) || omega <= 0.0 {
        return Err(CoreError::LocateFailure(format!(
            "pair search requires a finite start with positive drive, got ({omega}, {delta})"
        )));
    }

    let scale = kappa * kappa;
    let mut iterations = 0;
    loop {
        // g = 4(η₊² − Ω²) with η₊ = (−κ + 2iΔ)/4; real Jacobian columns
        // ∂g/∂Ω = −8Ω and ∂g/∂Δ = 4iη₊.
        let eta = Complex64::new(-kappa, 2.0 * delta) / 4.0;
        let g = 4.0 * (eta * eta - Complex64::new(omega * omega, 0.0));
        if g.norm() <= 1e-14 * scale {
            break;
        }
        if iterations >= MAX_NEWTON_ITERS {
            return Err(CoreError::LocateFailure(format!(
                "pair condition still {:.3e} after {MAX_NEWTON_ITERS} Newton steps",
                g.norm()
            )));
        }
        let j_om = -8.0 * omega;
        let j_de = 4.0 * Complex64::new(0.0, 1.0) * eta;
        let det = j_om * j_de.im; // lower-left Jacobian entry is exactly 0
        if det.abs() <= f64::MIN_POSITIVE {
            return Err(CoreError::LocateFailure(
                "singular Jacobian in the pair search".into(),
            ));
        }
        let d_de = g.im / j_de.im;
        let d_om = (g.re - j_de.re * d_de) / j_om;
        omega -= d_om;
        delta -= d_de;
        if omega <= 0.0 {
            // The quadratic in Ω has a mirror root; fold back into the
            // physical half-plane rather than converging to −κ/4.
            omega = omega.abs().max(1e-3 * kappa);
        }
        iterations += 1;
    }

    // The pair center is η₋ + 0 at the root; identify its cluster through
    // the analytic value rather than assuming a position.
    let params = SystemParams::new(omega, delta, kappa)?;
    let expected = analytic_eigenvalues(&params)[1];
    verify_coalescence(&params, expected, 2, iterations)
}

/// Locate the parameter point where the four fast eigenvalues collapse
/// onto −κ/2.
///
/// Minimizes the total analytic offset Σ_{j=5..8} |λ_j + κ/2| =
/// 2|√(α+β)| + 2|√(α−β)| with a Nelder–Mead simplex.  The objective has a
/// square-root cusp at the minimum (steep, not smooth), which direct
/// search handles where gradient methods stall.  Note the minimizer is
/// *not* where the four values merely cross; the numeric verification
/// demands multiplicity ≥ 3 with a defective cluster.
pub fn locate_triple_ep(kappa: f64, start: (f64, f64)) -> Result<EpLocation, CoreError> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(CoreError::InvalidParams(format!(
            "decay rate must be positive, got {kappa}"
        )));
    }
    let (s_om, s_de) = start;
    if !(s_om.is_finite() && s_de.is_finite()) || s_om <= 0.0 {
        return Err(CoreError::LocateFailure(format!(
            "cluster search requires a finite start with positive drive, got ({s_om}, {s_de})"
        )));
    }

    let objective = |omega: f64, delta: f64| -> f64 {
        if omega <= 0.0 {
            return f64::INFINITY;
        }
        let params = SystemParams {
            omega,
            delta,
            kappa,
        };
        let lam = analytic_eigenvalues(&params);
        let center = Complex64::new(-kappa / 2.0, 0.0);
        (5..9).map(|j| (lam[j] - center).norm()).sum()
    };

    // Standard Nelder–Mead (reflect 1, expand 2, contract 1/2, shrink 1/2)
    // on the two control parameters.
    let h = 0.05 * kappa;
    let mut simplex = [
        (s_om, s_de),
        (s_om + h, s_de),
        (s_om, s_de + h),
    ];
    let mut values = simplex.map(|(o, d)| objective(o, d));
    let mut iterations = 0;
    while iterations < MAX_SIMPLEX_ITERS {
        let mut order = [0, 1, 2];
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.map(|i| simplex[i]);
        values = order.map(|i| values[i]);
        let diameter = f64::max(
            dist(simplex[0], simplex[1]),
            f64::max(dist(simplex[0], simplex[2]), dist(simplex[1], simplex[2])),
        );
        // The eigenvalue splitting grows as the square root of the
        // parameter offset, so landing within 1e-14 is what keeps the
        // verified cluster spread below 1e-6.
        if diameter <= 1e-14 * kappa {
            break;
        }
        iterations += 1;

        let centroid = (
            0.5 * (simplex[0].0 + simplex[1].0),
            0.5 * (simplex[0].1 + simplex[1].1),
        );
        let reflect = step(centroid, simplex[2], -1.0);
        let f_r = objective(reflect.0, reflect.1);
        if f_r < values[0] {
            let expand = step(centroid, simplex[2], -2.0);
            let f_e = objective(expand.0, expand.1);
            if f_e < f_r {
                simplex[2] = expand;
                values[2] = f_e;
            } else {
                simplex[2] = reflect;
                values[2] = f_r;
            }
        } else if f_r < values[1] {
            simplex[2] = reflect;
            values[2] = f_r;
        } else {
            let contract = step(centroid, simplex[2], 0.5);
            let f_c = objective(contract.0, contract.1);
            if f_c < values[2].min(f_r) {
                simplex[2] = contract;
                values[2] = f_c;
            } else {
                for i in 1..3 {
                    simplex[i] = (
                        0.5 * (simplex[i].0 + simplex[0].0),
                        0.5 * (simplex[i].1 + simplex[0].1),
                    );
                    values[i] = objective(simplex[i].0, simplex[i].1);
                }
            }
        }
    }
    if iterations >= MAX_SIMPLEX_ITERS {
        return Err(CoreError::LocateFailure(format!(
            "cluster search did not contract after {MAX_SIMPLEX_ITERS} simplex steps \
             (best offset {:.3e})",
            values[0]
        )));
    }

    let (omega, delta) = simplex[0];
    let params = SystemParams::new(omega, delta, kappa)?;
    let expected = analytic_eigenvalues(&params)[5];
    verify_coalescence(&params, expected, 3, iterations)
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// Point at centroid + t·(worst − centroid).
fn step(centroid: (f64, f64), worst: (f64, f64), t: f64) -> (f64, f64) {
    (
        centroid.0 + t * (worst.0 - centroid.0),
        centroid.1 + t * (worst.1 - centroid.1),
    )
}

/// Confirm an exceptional point against the numeric spectrum.
///
/// The cluster containing `expected` must have at least `multiplicity`
/// members, collapse in value (spread ≤ 1e-6·κ), and be defective
/// (overlap metric below the biorthogonalization threshold).
fn verify_coalescence(
    params: &SystemParams,
    expected: Complex64,
    multiplicity: usize,
    iterations: usize,
) -> Result<EpLocation, CoreError> {
    let matrix = build_liouvillian(params);
    let spectrum = Spectrum::compute_raw(&matrix)?;
    let tol = CLUSTER_TOL * matrix.norm().max(f64::MIN_POSITIVE);

    let clusters = value_clusters(&spectrum.eigenvalues, tol);
    let nearest = (0..9)
        .min_by(|&a, &b| {
            (spectrum.eigenvalues[a] - expected)
                .norm()
                .total_cmp(&(spectrum.eigenvalues[b] - expected).norm())
        })
        .unwrap();
    let cluster = clusters
        .into_iter()
        .find(|c| c.contains(&nearest))
        .unwrap();

    if cluster.len() < multiplicity {
        return Err(CoreError::LocateFailure(format!(
            "cluster at {expected} has multiplicity {} < {multiplicity} at (Ω = {}, Δ = {})",
            cluster.len(),
            params.omega,
            params.delta
        )));
    }
    let mut spread: f64 = 0.0;
    for (a, &i) in cluster.iter().enumerate() {
        for &j in &cluster[a + 1..] {
            spread = spread.max((spectrum.eigenvalues[i] - spectrum.eigenvalues[j]).norm());
        }
    }
    if spread > SPREAD_TOL * params.kappa {
        return Err(CoreError::LocateFailure(format!(
            "cluster spread {spread:.3e} exceeds {:.1e}",
            SPREAD_TOL * params.kappa
        )));
    }
    let defectiveness = cluster_metric(
        &spectrum.eigenvalues,
        &spectrum.right_vectors,
        &spectrum.left_vectors,
        &cluster,
    );
    if defectiveness >= DEFECTIVENESS_THRESHOLD {
        return Err(CoreError::LocateFailure(format!(
            "cluster is value-degenerate but not defective (metric {defectiveness:.3e}); \
             this is an ordinary crossing, not an exceptional point"
        )));
    }

    let mean = cluster
        .iter()
        .map(|&i| spectrum.eigenvalues[i])
        .sum::<Complex64>()
        / cluster.len() as f64;
    Ok(EpLocation {
        omega: params.omega,
        delta: params.delta,
        eigenvalue: mean,
        multiplicity: cluster.len(),
        cluster_spread: spread,
        defectiveness,
        iterations,
    })
}

/// A defective eigenvalue cluster found at a parameter point, with the
/// closed-form branch labels that coalesce in one Jordan chain.
#[derive(Clone, Debug, PartialEq)]
pub struct DefectiveFlag {
    /// Branch labels whose eigenvectors merge.
    pub labels: Vec<usize>,
    /// Shared spectral value (mean of the numeric cluster).
    pub value: Complex64,
    /// σ_min of the cluster's left/right Gram matrix.
    pub metric: f64,
}

/// Scan one parameter point for defective spectral clusters.
///
/// Value-degenerate clusters are screened by the biorthogonality metric —
/// an ordinary crossing of a diagonalizable family raises no flag — and
/// the survivors are resolved into Jordan chains through the nullity
/// sequence of (L − λ)^p.  Two chain layouts are recognized and split
/// into separate flags: the slow quadruple decomposing as two independent
/// pairs {1,3} and {2,4} (confirmed by the kernel's coordinate-block
/// support) and the fast quadruple with one cubic chain {5,6,7} beside a
/// simple branch.  Anything else is flagged as a single unresolved
/// cluster.
pub fn defective_flags(params: &SystemParams) -> Result<Vec<DefectiveFlag>, CoreError> {
    let matrix = build_liouvillian(params);
    let tol = CLUSTER_TOL * matrix.norm().max(f64::MIN_POSITIVE);

    // Cheap screen so parameter sweeps pay a single value-only
    // decomposition at non-degenerate points.
    let values = eigenvalues_only(&matrix)?;
    if value_clusters(&values, tol).iter().all(|c| c.len() < 2) {
        return Ok(Vec::new());
    }

    let spectrum = Spectrum::compute_raw(&matrix)?;
    let analytic = analytic_eigenvalues(params);
    let (assign, _) = min_cost_assignment(&analytic, &spectrum.eigenvalues);

    let mut flags = Vec::new();
    for cluster in value_clusters(&spectrum.eigenvalues, tol) {
        if cluster.len() < 2 {
            continue;
        }
        let metric = cluster_metric(
            &spectrum.eigenvalues,
            &spectrum.right_vectors,
            &spectrum.left_vectors,
            &cluster,
        );
        if metric >= DEFECTIVENESS_THRESHOLD {
            continue;
        }
        let value = cluster
            .iter()
            .map(|&i| spectrum.eigenvalues[i])
            .sum::<Complex64>()
            / cluster.len() as f64;
        let mut labels: Vec<usize> = (0..LDIM)
            .filter(|&j| cluster.contains(&assign[j]))
            .collect();
        labels.sort_unstable();

        // Jordan structure from nullity increments: nullity((L−λ)^p) −
        // nullity((L−λ)^{p−1}) counts the chains of length ≥ p.
        let shifted = embed_real(&(matrix - LiouvillianMatrix::from_diagonal_element(value)));
        let mut power = shifted.clone();
        let (first_nullity, weight) = kernel_structure(&power);
        let mut nullities = vec![first_nullity];
        for _ in 1..cluster.len().min(LDIM) {
            power = &power * &shifted;
            let (n, _) = kernel_structure(&power);
            if n == *nullities.last().unwrap() {
                break;
            }
            nullities.push(n);
        }
        let mut ge_counts = Vec::new();
        let mut prev = 0;
        for &n in &nullities {
            ge_counts.push(n.saturating_sub(prev));
            prev = n;
        }
        let mut sizes = Vec::new();
        for (p, &count) in ge_counts.iter().enumerate() {
            let next = ge_counts.get(p + 1).copied().unwrap_or(0);
            for _ in 0..count.saturating_sub(next) {
                sizes.push(p + 1);
            }
        }
        sizes.sort_unstable_by(|a, b| b.cmp(a));

        if labels == [1, 2, 3, 4] && sizes == [2, 2] {
            let w_a: f64 = PAIR_BLOCK_A.iter().map(|&i| weight[i]).sum();
            let w_b: f64 = PAIR_BLOCK_B.iter().map(|&i| weight[i]).sum();
            if (w_a - 1.0).abs() < 0.05 && (w_b - 1.0).abs() < 0.05 {
                flags.push(DefectiveFlag {
                    labels: vec![1, 3],
                    value,
                    metric,
                });
                flags.push(DefectiveFlag {
                    labels: vec![2, 4],
                    value,
                    metric,
                });
                continue;
            }
        } else if labels == [5, 6, 7, 8] && sizes == [3, 1] {
            // The cubic chain takes the three lower labels; the leftover
            // simple branch keeps the highest one.
            flags.push(DefectiveFlag {
                labels: vec![5, 6, 7],
                value,
                metric,
            });
            continue;
        }
        flags.push(DefectiveFlag {
            labels,
            value,
            metric,
        });
    }
    Ok(flags)
}

/// 2n×2n real embedding [[Re, −Im], [Im, Re]]; every complex singular
/// value appears twice and matrix powers commute with the embedding.
fn embed_real(m: &LiouvillianMatrix) -> DMatrix<f64> {
    let mut r = DMatrix::<f64>::zeros(2 * LDIM, 2 * LDIM);
    for i in 0..LDIM {
        for j in 0..LDIM {
            let z = m[(i, j)];
            r[(i, j)] = z.re;
            r[(i, j + LDIM)] = -z.im;
            r[(i + LDIM, j)] = z.im;
            r[(i + LDIM, j + LDIM)] = z.re;
        }
    }
    r
}

/// Complex nullity of an embedded matrix plus the kernel projector's
/// weight on each complex coordinate (weights over the kernel sum to the
/// nullity).
fn kernel_structure(embedded: &DMatrix<f64>) -> (usize, [f64; LDIM]) {
    let svd = embedded.clone().svd(false, true);
    let v_t = svd.v_t.as_ref().expect("kernel basis requested");
    let sigma1 = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    let cut = NULLITY_TOL * sigma1.max(f64::MIN_POSITIVE);
    let mut real_nullity = 0;
    let mut weight = [0.0; LDIM];
    for (r, &s) in svd.singular_values.iter().enumerate() {
        if s <= cut {
            real_nullity += 1;
            for (i, w) in weight.iter_mut().enumerate() {
                let a = v_t[(r, i)];
                let b = v_t[(r, i + LDIM)];
                *w += a * a + b * b;
            }
        }
    }
    // Each complex kernel direction shows up as two real ones and each
    // deposits the full coordinate weight once.
    (real_nullity / 2, weight.map(|w| w / 2.0))
}
