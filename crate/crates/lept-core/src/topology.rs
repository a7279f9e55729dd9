//! Parameter-space loops, continuity-based eigenvalue branch tracking,
//! spectral winding numbers (including fractional windings through
//! multi-traversal closure), and the resultant-vector machinery that
//! classifies higher-order degeneracies.
//!
//! Tracking matches consecutive sample spectra by minimum-cost assignment.
//! Equal-cost ambiguities (the signature of a value crossing) are settled
//! by eigenvector continuity; jump-threshold violations trigger adaptive
//! bisection in the loop parameter before any error is raised.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::eigen::{eig, min_cost_assignment};
use crate::model::{analytic_eigenvalues, build_liouvillian, SuperVector, SystemParams, LDIM};
use crate::CoreError;

/// Two eigenvalues closer than this (×κ) are treated as coincident.
const DEG_TOL: f64 = 1e-9;

/// Two pairings whose total costs differ by less than this (×κ) are
/// ambiguous and must be settled by eigenvector continuity.
const AMBIGUITY_TOL: f64 = 1e-9;

/// Minimum decisive margin between competing eigenvector overlaps.
const OVERLAP_MARGIN: f64 = 1e-12;

/// Adaptive bisection depth budget per tracking step.
const MAX_BISECTION_DEPTH: usize = 12;

/// Samples closer than this (×κ) to the winding reference are on it.
const ON_REFERENCE_TOL: f64 = 1e-9;

/// Largest admissible distance between the numeric winding and the
/// nearest small rational p/q, q ∈ {1, 2, 3}.
const RATIONAL_TOL: f64 = 1e-3;

/// A circular loop Ω(k) = c_Ω + r·cos k, Δ(k) = c_Δ + r·sin k sampled at
/// N uniform points of k ∈ [0, 2π).
#[derive(Clone, Debug)]
pub struct ParameterLoop {
    pub center_omega: f64,
    pub center_delta: f64,
    pub radius: f64,
    pub samples: usize,
    pub kappa: f64,
    /// Closest admissible approach (in parameter distance) to the
    /// exceptional point at (κ/4, 0); the spectrum is defective there and
    /// branch identity is lost.
    pub ep_guard: f64,
}

impl ParameterLoop {
    pub fn new(
        center_omega: f64,
        center_delta: f64,
        radius: f64,
        samples: usize,
        kappa: f64,
    ) -> Result<ParameterLoop, CoreError> {
        let lp = ParameterLoop {
            center_omega,
            center_delta,
            radius,
            samples,
            kappa,
            ep_guard: 1e-3 * kappa,
        };
        lp.validate()?;
        Ok(lp)
    }

    /// The canonical loop: centered at (κ/2, 0) with r = 0.327κ, N = 128 —
    /// encircling the second-order degeneracy at (κ/4, 0).
    pub fn standard(kappa: f64) -> ParameterLoop {
        ParameterLoop::new(0.5 * kappa, 0.0, 0.327 * kappa, 128, kappa)
            .expect("canonical loop is valid")
    }

    /// Same loop with a different radius.
    pub fn with_radius(&self, radius: f64) -> Result<ParameterLoop, CoreError> {
        let mut lp = self.clone();
        lp.radius = radius;
        lp.validate()?;
        Ok(lp)
    }

    /// Override the exceptional-point proximity guard (use 0 to disable).
    pub fn with_ep_guard(mut self, guard: f64) -> ParameterLoop {
        self.ep_guard = guard;
        self
    }

    pub fn validate(&self) -> Result<(), CoreError> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(CoreError::InvalidParams(format!(
                "loop radius must be positive, got {}",
                self.radius
            )));
        }
        if self.samples < 16 {
            return Err(CoreError::InvalidParams(format!(
                "loop needs at least 16 samples, got {}",
                self.samples
            )));
        }
        if !(self.kappa.is_finite() && self.kappa > 0.0) {
            return Err(CoreError::InvalidParams(format!(
                "decay rate must be positive, got {}",
                self.kappa
            )));
        }
        // Closest approach of the circle to the degeneracies at (±κ/4, 0).
        // This is a numerical impossibility rather than a malformed input:
        // the spectrum is defective on the circle, so it gets the dedicated
        // degeneracy error.
        for ep_omega in [0.25 * self.kappa, -0.25 * self.kappa] {
            let center_dist =
                ((self.center_omega - ep_omega).powi(2) + self.center_delta.powi(2)).sqrt();
            let approach = (center_dist - self.radius).abs();
            if approach < self.ep_guard {
                let theta = (-self.center_delta).atan2(ep_omega - self.center_omega);
                let step = TAU / self.samples as f64;
                let sample = (theta.rem_euclid(TAU) / step).round() as usize % self.samples;
                return Err(CoreError::LoopThroughDegeneracy {
                    sample,
                    magnitude: approach,
                });
            }
        }
        Ok(())
    }

    pub fn params_at(&self, k: f64) -> SystemParams {
        SystemParams {
            omega: self.center_omega + self.radius * k.cos(),
            delta: self.center_delta + self.radius * k.sin(),
            kappa: self.kappa,
        }
    }

    pub fn k_values(&self) -> Vec<f64> {
        (0..self.samples)
            .map(|i| TAU * i as f64 / self.samples as f64)
            .collect()
    }
}

/// One eigenvalue branch followed over the m loop traversals needed to
/// return to its starting value.
#[derive(Clone, Debug)]
pub struct BranchPath {
    pub branch_id: usize,
    pub values: Vec<Complex64>,
    pub closure_m: usize,
    pub kappa: f64,
}

/// All nine single-traversal branch paths plus the end-of-loop
/// permutation connecting them.
#[derive(Clone, Debug)]
pub struct BranchTracks {
    pub k_values: Vec<f64>,
    pub paths: [Vec<Complex64>; LDIM],
    /// permutation[j] = branch whose seed value branch j reaches at k = 2π.
    pub permutation: [usize; LDIM],
    pub kappa: f64,
}

impl BranchTracks {
    /// Permutation orbit of branch j (the branches visited on successive
    /// traversals before the path closes).
    pub fn orbit(&self, j: usize) -> Vec<usize> {
        let mut orbit = vec![j];
        let mut t = self.permutation[j];
        while t != j {
            orbit.push(t);
            t = self.permutation[t];
        }
        orbit
    }

    pub fn closure_m(&self, j: usize) -> usize {
        self.orbit(j).len()
    }

    /// The closed m-traversal path of branch j.
    pub fn closed_path(&self, j: usize) -> BranchPath {
        let orbit = self.orbit(j);
        let mut values = Vec::with_capacity(orbit.len() * self.k_values.len());
        for &b in &orbit {
            values.extend_from_slice(&self.paths[b]);
        }
        BranchPath {
            branch_id: j,
            values,
            closure_m: orbit.len(),
            kappa: self.kappa,
        }
    }
}

/// Winding of a closed branch path around a reference value: the raw
/// accumulated argument over 2πm, and its rounding to a small rational
/// when one lies within tolerance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindingResult {
    pub raw: f64,
    /// (p, q) with q ∈ {1, 2, 3}; `None` when no such rational is within
    /// tolerance of the raw value (callers should surface a warning).
    pub rational: Option<(i64, i64)>,
}

/// The two resultants (R1, R2) = (Res(P, P′), Res(P, P″)) of the
/// characteristic polynomial with its derivatives.
#[derive(Clone, Copy, Debug)]
pub struct ResultantVector {
    pub r1: Complex64,
    pub r2: Complex64,
}

/// Rescaled resultant trajectory over a loop and its winding around the
/// origin — the integer invariant classifying third-order degeneracies.
#[derive(Clone, Debug)]
pub struct HomotopyResult {
    pub invariant: i64,
    pub raw_winding: f64,
    pub k_values: Vec<f64>,
    pub resultants: Vec<ResultantVector>,
    /// (Re R1/|R|, Re R2/|R|) with |R| = √(|R1|² + |R2|²).
    pub trajectory: Vec<(f64, f64)>,
}

type SpectrumSample = ([Complex64; LDIM], [SuperVector; LDIM]);

fn spectrum_sample(lp: &ParameterLoop, k: f64) -> Result<SpectrumSample, CoreError> {
    eig(&build_liouvillian(&lp.params_at(k)))
}

/// Smallest gap between distinct values (pairs closer than `deg` are the
/// same value and do not count).
fn min_distinct_gap(values: &[Complex64; LDIM], deg: f64) -> f64 {
    let mut gap = f64::INFINITY;
    for i in 0..LDIM {
        for j in i + 1..LDIM {
            let d = (values[i] - values[j]).norm();
            if d > deg {
                gap = gap.min(d);
            }
        }
    }
    gap
}

#[derive(Clone)]
struct TrackState {
    values: [Complex64; LDIM],
    vecs: [SuperVector; LDIM],
    first_clean: [Option<SuperVector>; LDIM],
}

impl TrackState {
    /// Refresh continuity vectors for branches sitting on isolated
    /// eigenvalues; vectors at degenerate values are arbitrary in-cluster
    /// mixtures and would poison later overlap decisions.
    fn refresh_vectors(&mut self, lam: &[Complex64; LDIM], vecs: &[SuperVector; LDIM],
        assign: &[usize], deg: f64) {
        for j in 0..LDIM {
            let target = lam[assign[j]];
            let isolated = lam.iter().filter(|z| (*z - target).norm() <= deg).count() == 1;
            if isolated {
                self.vecs[j] = vecs[assign[j]];
                if self.first_clean[j].is_none() {
                    self.first_clean[j] = Some(vecs[assign[j]]);
                }
            }
        }
    }
}

/// Advance all branch values from the spectrum at k_from to the one at
/// k_to (given), bisecting the interval when the step is ambiguous or
/// jumps beyond the trust threshold.
fn advance(
    lp: &ParameterLoop,
    state: &mut TrackState,
    k_from: f64,
    k_to: f64,
    target: &SpectrumSample,
    depth: usize,
) -> Result<(), CoreError> {
    let deg = DEG_TOL * lp.kappa;
    let (lam, vecs) = target;
    let (mut assign, _) = min_cost_assignment(&state.values, lam);

    // Equal-cost pairings toward distinct targets: the value-based
    // assignment carries no information there (exactly what happens one
    // step after a value crossing, where two source values coincide), so
    // eigenvector continuity decides.
    let mut unresolved = false;
    for j in 0..LDIM {
        for j2 in j + 1..LDIM {
            let d_now = (state.values[j] - lam[assign[j]]).norm()
                + (state.values[j2] - lam[assign[j2]]).norm();
            let d_swap = (state.values[j] - lam[assign[j2]]).norm()
                + (state.values[j2] - lam[assign[j]]).norm();
            if (d_now - d_swap).abs() < AMBIGUITY_TOL * lp.kappa
                && (lam[assign[j]] - lam[assign[j2]]).norm() > deg
            {
                let o_now = state.vecs[j].dotc(&vecs[assign[j]]).norm()
                    + state.vecs[j2].dotc(&vecs[assign[j2]]).norm();
                let o_swap = state.vecs[j].dotc(&vecs[assign[j2]]).norm()
                    + state.vecs[j2].dotc(&vecs[assign[j]]).norm();
                if o_swap > o_now + OVERLAP_MARGIN {
                    assign.swap(j, j2);
                } else if o_now <= o_swap + OVERLAP_MARGIN {
                    unresolved = true;
                }
            }
        }
    }

    // Trust region: no branch may move further than half the smallest
    // distinct eigenvalue gap at the step's source.
    let threshold = 0.5 * min_distinct_gap(&state.values, deg);
    let worst_jump = (0..LDIM)
        .map(|j| (state.values[j] - lam[assign[j]]).norm())
        .fold(0.0, f64::max);

    if unresolved || worst_jump > threshold {
        // Refine first: bisection either licenses the halves outright or
        // refreshes vectors close enough to a split for the overlaps to
        // decide.  The descent is speculative — a refinement that dead-ends
        // is discarded and the direct step is judged on its own below.
        if depth < MAX_BISECTION_DEPTH {
            let k_mid = 0.5 * (k_from + k_to);
            if k_mid > k_from && k_mid < k_to {
                let mid = spectrum_sample(lp, k_mid)?;
                let mut refined = state.clone();
                let attempt = advance(lp, &mut refined, k_from, k_mid, &mid, depth + 1)
                    .and_then(|()| advance(lp, &mut refined, k_mid, k_to, target, depth + 1));
                match attempt {
                    Ok(()) => {
                        *state = refined;
                        return Ok(());
                    }
                    Err(CoreError::TrackingFailure { .. }) => {}
                    Err(e) => return Err(e),
                }
            }
        }
        // Ties still unresolved after refinement are structural: right at
        // a degenerate cluster every stored vector projects equally onto
        // the separating targets, so no amount of refinement can decide.
        // Keep the assignment — labels inside such clusters are pinned
        // against the closed forms afterwards.
        //
        // A jump violation that survives refinement means the step spans a
        // genuine value crossing, where the source-side criterion is
        // unsatisfiable: the binding gap and the crossing pair's motion
        // both shrink linearly under bisection, so their ratio never
        // improves.  The crossing is only traversable through a sample
        // where the pair has actually merged — which the loop grid
        // provides — so judge the direct step per branch instead: each
        // branch may move at most half the distance from its assigned
        // target to the nearest distinct other target.  That is the sharp
        // bound below which no relabeling among separated targets can
        // masquerade as a continuous step.
        if worst_jump > threshold {
            for j in 0..LDIM {
                let jump = (state.values[j] - lam[assign[j]]).norm();
                let isolation = (0..LDIM)
                    .map(|t| (lam[assign[j]] - lam[t]).norm())
                    .filter(|&g| g > deg)
                    .fold(f64::INFINITY, f64::min);
                if jump > 0.5 * isolation {
                    return Err(CoreError::TrackingFailure {
                        k: k_to,
                        jump,
                        threshold: 0.5 * isolation,
                    });
                }
            }
        }
    }

    let new_values: [Complex64; LDIM] = std::array::from_fn(|j| lam[assign[j]]);
    state.refresh_vectors(lam, vecs, &assign, deg);
    state.values = new_values;
    Ok(())
}

/// Follow all nine eigenvalue branches around the loop.
///
/// Branches are labeled by the closed-form eigenvalue order at k = 0;
/// labels inside degenerate seed clusters are pinned at the first sample
/// where their closed-form values separate.  Returns the single-traversal
/// paths and the end-of-loop permutation.
pub fn track_branches(lp: &ParameterLoop) -> Result<BranchTracks, CoreError> {
    lp.validate()?;
    let deg = DEG_TOL * lp.kappa;
    let n = lp.samples;
    let ks: Vec<f64> = lp.k_values();

    let (lam0, v0) = spectrum_sample(lp, 0.0)?;
    let an0 = analytic_eigenvalues(&lp.params_at(0.0));
    let (seed, _) = min_cost_assignment(&an0, &lam0);
    let mut state = TrackState {
        values: std::array::from_fn(|j| lam0[seed[j]]),
        vecs: std::array::from_fn(|j| v0[seed[j]]),
        first_clean: std::array::from_fn(|_| None),
    };
    let mut paths: [Vec<Complex64>; LDIM] = std::array::from_fn(|j| {
        let mut p = Vec::with_capacity(n);
        p.push(state.values[j]);
        p
    });

    for i in 1..n {
        let target = spectrum_sample(lp, ks[i])?;
        advance(lp, &mut state, ks[i - 1], ks[i], &target, 0)?;
        for (j, path) in paths.iter_mut().enumerate() {
            path.push(state.values[j]);
        }
    }

    // Labels within degenerate seed clusters were assigned arbitrarily at
    // k = 0; pin them against the closed forms at the first sample where
    // every pooled closed-form value has separated.
    let pool: Vec<usize> = (0..LDIM)
        .filter(|&a| (0..LDIM).any(|b| b != a && (an0[a] - an0[b]).norm() < deg))
        .collect();
    if !pool.is_empty() {
        for (i, &k) in ks.iter().enumerate().skip(1) {
            let an_i = analytic_eigenvalues(&lp.params_at(k));
            let vals: Vec<Complex64> = pool.iter().map(|&a| an_i[a]).collect();
            let split = (0..vals.len()).all(|x| {
                (x + 1..vals.len()).all(|y| (vals[x] - vals[y]).norm() > deg)
            });
            if !split {
                continue;
            }
            let traj: Vec<Complex64> = pool.iter().map(|&a| paths[a][i]).collect();
            let (c, _) = min_cost_assignment(&vals, &traj);
            let mut relabel: [usize; LDIM] = std::array::from_fn(|j| j);
            for x in 0..pool.len() {
                relabel[pool[x]] = pool[c[x]];
            }
            let old_paths = paths.clone();
            let old_vecs = state.vecs;
            let old_first = state.first_clean.clone();
            for j in 0..LDIM {
                paths[j] = old_paths[relabel[j]].clone();
                state.vecs[j] = old_vecs[relabel[j]];
                state.first_clean[j] = old_first[relabel[j]];
            }
            break;
        }
    }

    let permutation = endpoint_permutation(&paths, &state, deg);
    Ok(BranchTracks {
        k_values: ks,
        paths,
        permutation,
        kappa: lp.kappa,
    })
}

/// Match each branch's end value (k → 2π) to the seed values.  Ties within
/// the coincidence tolerance — inevitable when the loop closes on a
/// degenerate sample — prefer the identity, then the strongest eigenvector
/// overlap with each candidate's first clean vector.
fn endpoint_permutation(
    paths: &[Vec<Complex64>; LDIM],
    state: &TrackState,
    deg: f64,
) -> [usize; LDIM] {
    let start: Vec<Complex64> = (0..LDIM).map(|j| paths[j][0]).collect();
    let end: Vec<Complex64> = (0..LDIM).map(|j| *paths[j].last().unwrap()).collect();
    let (base, _) = min_cost_assignment(&end, &start);
    let mut cass = base.clone();
    for j in 0..LDIM {
        let best = (end[j] - start[cass[j]]).norm();
        let tied: Vec<usize> = (0..LDIM)
            .filter(|&x| ((end[j] - start[x]).norm() - best).abs() < deg)
            .collect();
        if tied.len() > 1 {
            if tied.contains(&j) {
                cass[j] = j;
            } else {
                let mut best_x = tied[0];
                let mut best_overlap = -1.0;
                for &x in &tied {
                    let overlap = match &state.first_clean[x] {
                        Some(v) => state.vecs[j].dotc(v).norm(),
                        None => -2.0,
                    };
                    if overlap > best_overlap {
                        best_overlap = overlap;
                        best_x = x;
                    }
                }
                cass[j] = best_x;
            }
        }
    }
    let mut seen = [false; LDIM];
    let bijective = cass.iter().all(|&c| {
        let fresh = !seen[c];
        seen[c] = true;
        fresh
    });
    let chosen = if bijective { cass } else { base };
    let mut perm = [0usize; LDIM];
    perm.copy_from_slice(&chosen);
    perm
}

/// Winding number of a closed branch path around a reference value:
/// W = Σ Δarg(λ − ref) / 2πm with each increment in (−π, π].
///
/// Samples lying on the reference are skipped when isolated (a removable
/// touch); two consecutive on-reference samples mean the path genuinely
/// runs through the reference and no winding is defined.
pub fn winding_number(
    path: &BranchPath,
    reference: Complex64,
) -> Result<WindingResult, CoreError> {
    let n = path.values.len();
    if n < 2 {
        return Err(CoreError::InvalidParams(
            "winding needs at least 2 path samples".into(),
        ));
    }
    let tol = ON_REFERENCE_TOL * path.kappa;
    let z: Vec<Complex64> = path.values.iter().map(|v| v - reference).collect();
    let on_ref: Vec<bool> = z.iter().map(|w| w.norm() <= tol).collect();
    for i in 0..n {
        if on_ref[i] && on_ref[(i + 1) % n] {
            return Err(CoreError::SingularReference { sample: i });
        }
    }
    let kept: Vec<Complex64> = z
        .iter()
        .zip(&on_ref)
        .filter(|(_, &s)| !s)
        .map(|(w, _)| *w)
        .collect();
    if kept.len() < 2 {
        return Err(CoreError::SingularReference { sample: 0 });
    }
    let mut total = 0.0;
    for i in 0..kept.len() {
        let next = kept[(i + 1) % kept.len()];
        total += (next / kept[i]).arg();
    }
    let raw = total / (TAU * path.closure_m as f64);
    let mut rational = None;
    for q in 1..=3i64 {
        let p = (raw * q as f64).round();
        if (raw - p / q as f64).abs() <= RATIONAL_TOL {
            rational = Some((p as i64, q));
            break;
        }
    }
    Ok(WindingResult { raw, rational })
}

/// Coefficients (ascending powers) of P(λ) = −∏_{i=0}^{8}(λ − λ_i), built
/// from the closed-form eigenvalues.  The constant coefficient is exactly
/// zero because λ_0 = 0 is always a root.
pub fn char_poly(params: &SystemParams) -> [Complex64; 10] {
    let roots = analytic_eigenvalues(params);
    let mut poly = [Complex64::new(0.0, 0.0); 10];
    poly[0] = Complex64::new(1.0, 0.0);
    for (deg, root) in roots.iter().enumerate() {
        for k in (1..=deg + 1).rev() {
            poly[k] = poly[k - 1] - root * poly[k];
        }
        poly[0] = -root * poly[0];
    }
    for c in &mut poly {
        *c = -*c;
    }
    poly
}

fn poly_degree(p: &[Complex64]) -> Option<usize> {
    (0..p.len()).rev().find(|&k| p[k].norm() != 0.0)
}

fn poly_derivative(p: &[Complex64]) -> Vec<Complex64> {
    (1..p.len()).map(|k| p[k] * k as f64).collect()
}

/// Determinant of the Sylvester matrix of two polynomials (coefficients
/// in ascending powers): zero exactly when they share a root.
pub fn sylvester_resultant(a: &[Complex64], b: &[Complex64]) -> Result<Complex64, CoreError> {
    let da = poly_degree(a).ok_or(CoreError::ZeroPolynomial)?;
    let db = poly_degree(b).ok_or(CoreError::ZeroPolynomial)?;
    if da == 0 || db == 0 {
        return Err(CoreError::InvalidParams(
            "resultant needs both degrees >= 1".into(),
        ));
    }
    let n = da + db;
    let mut s = DMatrix::<Complex64>::zeros(n, n);
    for row in 0..db {
        for k in 0..=da {
            s[(row, row + k)] = a[da - k];
        }
    }
    for row in 0..da {
        for k in 0..=db {
            s[(db + row, row + k)] = b[db - k];
        }
    }
    Ok(s.lu().determinant())
}

/// (R1, R2) = (Res(P, P′), Res(P, P″)) at one parameter point.
pub fn resultant_vector(params: &SystemParams) -> ResultantVector {
    let p = char_poly(params);
    let p1 = poly_derivative(&p);
    let p2 = poly_derivative(&p1);
    ResultantVector {
        r1: sylvester_resultant(&p, &p1).expect("characteristic polynomial has degree 9"),
        r2: sylvester_resultant(&p, &p2).expect("characteristic polynomial has degree 9"),
    }
}

/// Reference magnitude for judging resultant smallness at a parameter
/// point: ∏_{i<j} max(|λ_i − λ_j|, 10⁻³κ)².  |Res(P, P′)| equals the
/// unclamped product for our sign convention, so the ratio is ≈ 1 at
/// generic points and collapses only through genuinely vanishing gaps.
pub fn resultant_scale(params: &SystemParams) -> f64 {
    let roots = analytic_eigenvalues(params);
    let clamp = 1e-3 * params.kappa;
    let mut scale = 1.0;
    for i in 0..LDIM {
        for j in i + 1..LDIM {
            let d = (roots[i] - roots[j]).norm().max(clamp);
            scale *= d * d;
        }
    }
    scale
}

/// True when some eigenvalue has (near-)multiplicity ≥ 3, which is
/// exactly the zero set of the resultant vector: a triple root of P
/// annihilates both Res(P, P′) and Res(P, P″).
fn has_triple_cluster(roots: &[Complex64; LDIM], tol: f64) -> bool {
    roots.iter().any(|&r| {
        roots.iter().filter(|&&s| (s - r).norm() <= tol).count() >= 3
    })
}

/// Winding of a closed planar polygon around the origin, in turns.
pub fn planar_winding(points: &[(f64, f64)]) -> f64 {
    let n = points.len();
    let mut total = 0.0;
    for i in 0..n {
        let (x0, y0) = points[i];
        let (x1, y1) = points[(i + 1) % n];
        total += (x0 * y1 - y0 * x1).atan2(x0 * x1 + y0 * y1);
    }
    total / TAU
}

/// Rescaled resultant-vector trajectory over the loop and its integer
/// winding around the origin.
pub fn homotopy_invariant(lp: &ParameterLoop) -> Result<HomotopyResult, CoreError> {
    lp.validate()?;
    let ks = lp.k_values();
    let mut resultants = Vec::with_capacity(ks.len());
    let mut trajectory = Vec::with_capacity(ks.len());
    for (i, &k) in ks.iter().enumerate() {
        let params = lp.params_at(k);
        let rv = resultant_vector(&params);
        let mag = (rv.r1.norm_sqr() + rv.r2.norm_sqr()).sqrt();
        // The trajectory point is undefined where both resultants vanish,
        // i.e. at an eigenvalue of multiplicity ≥ 3.  A magnitude test
        // alone cannot see this in floating point (the determinant of a
        // singular Sylvester matrix computes to rounding noise, not
        // zero), so the root clusters are checked directly as well.
        let roots = analytic_eigenvalues(&params);
        if mag < 1e-12 * resultant_scale(&params)
            || has_triple_cluster(&roots, 1e-3 * lp.kappa)
        {
            return Err(CoreError::LoopThroughDegeneracy {
                sample: i,
                magnitude: mag,
            });
        }
        trajectory.push((rv.r1.re / mag, rv.r2.re / mag));
        resultants.push(rv);
    }
    let raw = planar_winding(&trajectory);
    Ok(HomotopyResult {
        invariant: raw.round() as i64,
        raw_winding: raw,
        k_values: ks,
        resultants,
        trajectory,
    })
}
