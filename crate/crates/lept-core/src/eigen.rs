//! Eigendecomposition of the 9×9 generator: right and left eigenvectors,
//! biorthonormal pairing, and defectiveness diagnostics near exceptional
//! points.
//!
//! The solver runs in double-double precision (see [`crate::schur`]);
//! results are returned in f64.  Eigenvalues are sorted canonically —
//! descending real part, then descending imaginary part — so output order
//! is reproducible; physical branch identity along parameter loops is
//! assigned by the topology module, never here.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::model::{LiouvillianMatrix, SuperVector, LDIM};
use crate::schur::{schur_decompose, schur_eigenvalues, CMat, MAX_SWEEPS_PER_EIGENVALUE};
use crate::CoreError;

/// Threshold on the cluster overlap metric below which a cluster is
/// declared defective (eigenvectors numerically coalesced).
pub const DEFECTIVENESS_THRESHOLD: f64 = 1e-6;

/// Relative tolerance (times the matrix norm) for grouping eigenvalues
/// into clusters prior to biorthonormalization.
pub(crate) const CLUSTER_TOL: f64 = 1e-6;

/// Full eigendecomposition with biorthogonality diagnostics.
///
/// `residuals[j]` is ‖L·V_j − λ_j·V_j‖₂ with ‖V_j‖ = 1 (absolute; divide by
/// ‖L‖ for the relative bound).  `raw_overlaps[j]` is |T_j†V_j| with both
/// vectors unit-norm, *before* any rescaling — the per-branch normalization
/// constant of the biorthogonal expansion.  `defectiveness` is the smallest
/// cluster overlap metric (σ_min of the cluster Gram matrix T_C†V_C); it
/// tends to zero as a cluster approaches an exceptional point.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: [Complex64; LDIM],
    pub right_vectors: [SuperVector; LDIM],
    pub left_vectors: [SuperVector; LDIM],
    pub residuals: [f64; LDIM],
    pub raw_overlaps: [f64; LDIM],
    pub defectiveness: f64,
}

fn to_cmat(m: &LiouvillianMatrix) -> CMat {
    let mut rows = Vec::with_capacity(LDIM * LDIM);
    for i in 0..LDIM {
        for j in 0..LDIM {
            rows.push(m[(i, j)]);
        }
    }
    CMat::from_c64_rows(LDIM, &rows)
}

/// Indices that sort `values` into the canonical order (descending real
/// part, ties by descending imaginary part).
pub fn canonical_order(values: &[Complex64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        values[b]
            .re
            .total_cmp(&values[a].re)
            .then(values[b].im.total_cmp(&values[a].im))
    });
    idx
}

/// Eigenvalues only (canonical order) — the fast path for sweeps and
/// branch tracking, skipping all eigenvector work.
pub fn eigenvalues_only(matrix: &LiouvillianMatrix) -> Result<[Complex64; LDIM], CoreError> {
    let dd = schur_eigenvalues(&to_cmat(matrix), MAX_SWEEPS_PER_EIGENVALUE)?;
    let vals: Vec<Complex64> = dd.iter().map(|z| z.to_c64()).collect();
    let order = canonical_order(&vals);
    let mut out = [Complex64::new(0.0, 0.0); LDIM];
    for (slot, &src) in order.iter().enumerate() {
        out[slot] = vals[src];
    }
    Ok(out)
}

/// Eigenvalues and right eigenvectors in canonical order.
pub fn eig(
    matrix: &LiouvillianMatrix,
) -> Result<([Complex64; LDIM], [SuperVector; LDIM]), CoreError> {
    let s = schur_decompose(&to_cmat(matrix), MAX_SWEEPS_PER_EIGENVALUE)?;
    let vals: Vec<Complex64> = s.eigenvalues().iter().map(|z| z.to_c64()).collect();
    let order = canonical_order(&vals);
    let mut values = [Complex64::new(0.0, 0.0); LDIM];
    let mut vectors = [SuperVector::zeros(); LDIM];
    for (slot, &src) in order.iter().enumerate() {
        values[slot] = vals[src];
        let v = s.right_eigenvector(src);
        vectors[slot] = SuperVector::from_iterator(v.iter().map(|z| z.to_c64()));
    }
    Ok((values, vectors))
}

/// Left eigenvectors T_j (solutions of L†T = λ̄T), unit norm, in the same
/// canonical order as [`eig`].
pub fn left_eig(matrix: &LiouvillianMatrix) -> Result<[SuperVector; LDIM], CoreError> {
    let s = schur_decompose(&to_cmat(matrix), MAX_SWEEPS_PER_EIGENVALUE)?;
    let vals: Vec<Complex64> = s.eigenvalues().iter().map(|z| z.to_c64()).collect();
    let order = canonical_order(&vals);
    let mut vectors = [SuperVector::zeros(); LDIM];
    for (slot, &src) in order.iter().enumerate() {
        let w = s.left_eigenvector(src);
        vectors[slot] = SuperVector::from_iterator(w.iter().map(|z| z.to_c64()));
    }
    Ok(vectors)
}

/// Connected components of the proximity graph |λ_i − λ_j| ≤ tol.
pub(crate) fn value_clusters(values: &[Complex64; LDIM], tol: f64) -> Vec<Vec<usize>> {
    let mut comp: Vec<usize> = (0..LDIM).collect();
    fn root(comp: &mut Vec<usize>, mut i: usize) -> usize {
        while comp[i] != i {
            comp[i] = comp[comp[i]];
            i = comp[i];
        }
        i
    }
    for i in 0..LDIM {
        for j in i + 1..LDIM {
            if (values[i] - values[j]).norm() <= tol {
                let (a, b) = (root(&mut comp, i), root(&mut comp, j));
                if a != b {
                    comp[a] = b;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut seen: Vec<Option<usize>> = vec![None; LDIM];
    for i in 0..LDIM {
        let r = root(&mut comp, i);
        match seen[r] {
            Some(g) => groups[g].push(i),
            None => {
                seen[r] = Some(groups.len());
                groups.push(vec![i]);
            }
        }
    }
    groups
}

/// σ_min of a small complex matrix via the real symmetric embedding of
/// G†G (whose smallest eigenvalue is σ_min²).
fn sigma_min(g: &DMatrix<Complex64>) -> f64 {
    let c = g.ncols();
    let m = g.adjoint() * g;
    let mut e = DMatrix::<f64>::zeros(2 * c, 2 * c);
    for i in 0..c {
        for j in 0..c {
            e[(i, j)] = m[(i, j)].re;
            e[(i, j + c)] = -m[(i, j)].im;
            e[(i + c, j)] = m[(i, j)].im;
            e[(i + c, j + c)] = m[(i, j)].re;
        }
    }
    e.symmetric_eigenvalues().min().max(0.0).sqrt()
}

impl Spectrum {
    /// Eigenvalues, right and left eigenvectors (canonical order) with
    /// residuals and cluster diagnostics, but *without* the biorthonormal
    /// rescaling of the left vectors.  Never fails at exceptional points.
    pub fn compute_raw(matrix: &LiouvillianMatrix) -> Result<Spectrum, CoreError> {
        let s = schur_decompose(&to_cmat(matrix), MAX_SWEEPS_PER_EIGENVALUE)?;
        let vals: Vec<Complex64> = s.eigenvalues().iter().map(|z| z.to_c64()).collect();
        let order = canonical_order(&vals);
        let mut eigenvalues = [Complex64::new(0.0, 0.0); LDIM];
        let mut right_vectors = [SuperVector::zeros(); LDIM];
        let mut left_vectors = [SuperVector::zeros(); LDIM];
        for (slot, &src) in order.iter().enumerate() {
            eigenvalues[slot] = vals[src];
            right_vectors[slot] =
                SuperVector::from_iterator(s.right_eigenvector(src).iter().map(|z| z.to_c64()));
            left_vectors[slot] =
                SuperVector::from_iterator(s.left_eigenvector(src).iter().map(|z| z.to_c64()));
        }

        let mut residuals = [0.0; LDIM];
        for j in 0..LDIM {
            residuals[j] = (matrix * right_vectors[j] - right_vectors[j] * eigenvalues[j]).norm();
        }

        let mut raw_overlaps = [0.0; LDIM];
        for j in 0..LDIM {
            raw_overlaps[j] = left_vectors[j].dotc(&right_vectors[j]).norm();
        }

        let tol = CLUSTER_TOL * matrix.norm().max(f64::MIN_POSITIVE);
        let mut defectiveness = f64::MAX;
        for cluster in value_clusters(&eigenvalues, tol) {
            defectiveness = defectiveness.min(cluster_metric(
                &eigenvalues,
                &right_vectors,
                &left_vectors,
                &cluster,
            ));
        }

        Ok(Spectrum {
            eigenvalues,
            right_vectors,
            left_vectors,
            residuals,
            raw_overlaps,
            defectiveness,
        })
    }

    /// Full decomposition with the left vectors rescaled to T_i†V_j = δ_ij.
    /// Fails with a defective-cluster error near exceptional points.
    pub fn compute(matrix: &LiouvillianMatrix) -> Result<Spectrum, CoreError> {
        biorthonormalize(Self::compute_raw(matrix)?, matrix)
    }
}

pub(crate) fn cluster_metric(
    _values: &[Complex64; LDIM],
    right: &[SuperVector; LDIM],
    left: &[SuperVector; LDIM],
    cluster: &[usize],
) -> f64 {
    let c = cluster.len();
    let mut g = DMatrix::<Complex64>::zeros(c, c);
    for (a, &i) in cluster.iter().enumerate() {
        for (b, &j) in cluster.iter().enumerate() {
            g[(a, b)] = left[i].dotc(&right[j]);
        }
    }
    sigma_min(&g)
}

/// Rescale the left vectors cluster-by-cluster so that T_i†V_j = δ_ij.
///
/// Within each eigenvalue cluster C the Gram matrix G = T_C†V_C is formed
/// and the new duals are T_C·(G†)⁻¹; per-vector scaling would blow up by
/// orders of magnitude at exactly degenerate (but semisimple) pairs, while
/// the cluster-wise solve stays conditioned as long as σ_min(G) is above
/// the defectiveness threshold.
pub fn biorthonormalize(
    mut spectrum: Spectrum,
    matrix: &LiouvillianMatrix,
) -> Result<Spectrum, CoreError> {
    let tol = CLUSTER_TOL * matrix.norm().max(f64::MIN_POSITIVE);
    let clusters = value_clusters(&spectrum.eigenvalues, tol);
    let mut defectiveness = f64::MAX;
    for cluster in &clusters {
        let metric = cluster_metric(
            &spectrum.eigenvalues,
            &spectrum.right_vectors,
            &spectrum.left_vectors,
            cluster,
        );
        defectiveness = defectiveness.min(metric);
        if metric < DEFECTIVENESS_THRESHOLD {
            return Err(CoreError::DefectiveCluster {
                indices: cluster.clone(),
                metric,
                threshold: DEFECTIVENESS_THRESHOLD,
            });
        }
    }
    for cluster in &clusters {
        let c = cluster.len();
        let mut g = DMatrix::<Complex64>::zeros(c, c);
        for (a, &i) in cluster.iter().enumerate() {
            for (b, &j) in cluster.iter().enumerate() {
                g[(a, b)] = spectrum.left_vectors[i].dotc(&spectrum.right_vectors[j]);
            }
        }
        let ginv_adj = g
            .adjoint()
            .try_inverse()
            .expect("cluster Gram matrix invertible above the defectiveness threshold");
        let old: Vec<SuperVector> = cluster.iter().map(|&i| spectrum.left_vectors[i]).collect();
        for (b, &j) in cluster.iter().enumerate() {
            let mut t_new = SuperVector::zeros();
            for (a, told) in old.iter().enumerate() {
                t_new += told * ginv_adj[(a, b)];
            }
            spectrum.left_vectors[j] = t_new;
        }
    }
    spectrum.defectiveness = defectiveness;
    Ok(spectrum)
}

/// Minimum-total-distance assignment between two complex 9-lists, by exact
/// dynamic programming over subsets.  `perm[i] = j` pairs `numeric[i]`
/// with `analytic[j]`; the total cost is returned alongside.
pub fn pair_to_analytic(
    numeric: &[Complex64; LDIM],
    analytic: &[Complex64; LDIM],
) -> ([usize; LDIM], f64) {
    let full = 1usize << LDIM;
    let mut dp = vec![f64::INFINITY; full];
    let mut choice = vec![0u8; full];
    dp[0] = 0.0;
    for mask in 0..full - 1 {
        if dp[mask].is_infinite() {
            continue;
        }
        let i = mask.count_ones() as usize;
        for j in 0..LDIM {
            if mask & (1 << j) == 0 {
                let next = mask | (1 << j);
                let cost = dp[mask] + (numeric[i] - analytic[j]).norm();
                if cost < dp[next] {
                    dp[next] = cost;
                    choice[next] = j as u8;
                }
            }
        }
    }
    let mut perm = [0usize; LDIM];
    let mut mask = full - 1;
    for i in (0..LDIM).rev() {
        let j = choice[mask] as usize;
        perm[i] = j;
        mask &= !(1 << j);
    }
    (perm, dp[full - 1])
}

/// Dense assignment on arbitrary-but-equal-length lists (same DP as
/// [`pair_to_analytic`]); used by the tracking module.
pub fn min_cost_assignment(from: &[Complex64], to: &[Complex64]) -> (Vec<usize>, f64) {
    let n = from.len();
    assert_eq!(n, to.len());
    assert!(n <= 16, "subset DP assignment limited to small lists");
    let full = 1usize << n;
    let mut dp = vec![f64::INFINITY; full];
    let mut choice = vec![0u8; full];
    dp[0] = 0.0;
    for mask in 0..full - 1 {
        if dp[mask].is_infinite() {
            continue;
        }
        let i = mask.count_ones() as usize;
        for j in 0..n {
            if mask & (1 << j) == 0 {
                let next = mask | (1 << j);
                let cost = dp[mask] + (from[i] - to[j]).norm();
                if cost < dp[next] {
                    dp[next] = cost;
                    choice[next] = j as u8;
                }
            }
        }
    }
    let mut perm = vec![0usize; n];
    let mut mask = full - 1;
    for i in (0..n).rev() {
        let j = choice[mask] as usize;
        perm[i] = j;
        mask &= !(1 << j);
    }
    (perm, dp[full - 1])
}

/// Euclidean norm of a complex matrix–vector residual, for tests.
#[allow(dead_code)]
fn vec_norm(v: &DVector<Complex64>) -> f64 {
    v.norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        analytic_eigenvalues, analytic_eigenvectors_low, build_liouvillian, vec_density,
        SystemParams,
    };
    use nalgebra::Matrix3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_params(rng: &mut ChaCha8Rng) -> SystemParams {
        SystemParams::normalized(rng.gen_range(0.05..2.0), rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn canonical_order_sorts_descending() {
        let vals = [
            Complex64::new(-0.5, 0.2),
            Complex64::new(0.0, 0.0),
            Complex64::new(-0.5, 0.7),
            Complex64::new(0.1, -1.0),
        ];
        let ord = canonical_order(&vals);
        assert_eq!(ord, vec![3, 1, 2, 0]);
    }

    #[test]
    fn diagonal_matrix_eigenpairs() {
        let mut m = LiouvillianMatrix::zeros();
        m[(0, 0)] = Complex64::new(1.0, 0.0);
        m[(1, 1)] = Complex64::new(0.0, 2.0);
        m[(2, 2)] = Complex64::new(-3.0, 0.0);
        let (vals, vecs) = eig(&m).unwrap();
        assert_eq!(vals[0], Complex64::new(1.0, 0.0));
        assert_eq!(vals[8], Complex64::new(-3.0, 0.0));
        // Each eigenvector is a coordinate axis up to phase.
        for v in &vecs {
            let mx = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!((mx - 1.0).abs() < 1e-14);
        }
        let ts = left_eig(&m).unwrap();
        for t in &ts {
            let mx = t.iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!((mx - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn liouvillian_spectrum_matches_closed_forms() {
        let p = SystemParams::normalized(0.5, 0.3);
        let vals = eigenvalues_only(&build_liouvillian(&p)).unwrap();
        let analytic = analytic_eigenvalues(&p);
        let (_, cost) = pair_to_analytic(&vals, &analytic);
        assert!(cost < 9.0 * 1e-12, "total pairing cost {cost}");
    }

    /// The numeric solver against independently computed high-precision
    /// eigenvalues (two parameter points, 25 significant digits).
    #[test]
    fn numeric_eigenvalues_match_frozen_references() {
        let p = SystemParams::normalized(0.5, 0.3);
        let vals = eigenvalues_only(&build_liouvillian(&p)).unwrap();
        let refs = [
            Complex64::new(0.0, 0.0),
            Complex64::new(-0.3305947616467025, 0.3152907860734927),
            Complex64::new(-0.3305947616467025, -0.3152907860734927),
            Complex64::new(-0.1694052383532975, -0.6152907860734927),
            Complex64::new(-0.1694052383532975, 0.6152907860734927),
            Complex64::new(-0.3388104767065950, 0.0),
            Complex64::new(-0.6611895232934050, 0.0),
            Complex64::new(-0.5, 0.9305815721469855),
            Complex64::new(-0.5, -0.9305815721469855),
        ];
        for r in refs {
            let d = vals.iter().map(|v| (v - r).norm()).fold(f64::MAX, f64::min);
            assert!(d < 1e-13, "eigenvalue {r} off by {d}");
        }
    }

    #[test]
    fn degenerate_point_multiplicities() {
        let l = build_liouvillian(&SystemParams::normalized(0.25, 0.0));
        let vals = eigenvalues_only(&l).unwrap();
        let near_quarter = vals
            .iter()
            .filter(|v| (*v - Complex64::new(-0.25, 0.0)).norm() < 1e-6)
            .count();
        let near_half = vals
            .iter()
            .filter(|v| (*v - Complex64::new(-0.5, 0.0)).norm() < 1e-6)
            .count();
        assert!(near_quarter >= 2);
        assert!(near_half >= 3);
    }

    #[test]
    fn steady_state_left_vector_is_the_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..10 {
            let p = random_params(&mut rng);
            let l = build_liouvillian(&p);
            let (vals, _) = eig(&l).unwrap();
            let ts = left_eig(&l).unwrap();
            let k = (0..LDIM)
                .min_by(|&a, &b| vals[a].norm().total_cmp(&vals[b].norm()))
                .unwrap();
            assert!(vals[k].norm() < 1e-12);
            let id = vec_density(&Matrix3::identity()).normalize();
            let overlap = ts[k].dotc(&id).norm();
            assert!(
                overlap > 1.0 - 1e-10,
                "steady left vector misaligned: {overlap}"
            );
        }
    }

    #[test]
    fn random_diagonalizable_biorthogonality() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..5 {
            let mut m = LiouvillianMatrix::zeros();
            for i in 0..LDIM {
                for j in 0..LDIM {
                    m[(i, j)] =
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                }
            }
            let (vals, vs) = eig(&m).unwrap();
            let ts = left_eig(&m).unwrap();
            for i in 0..LDIM {
                for j in 0..LDIM {
                    if (vals[i] - vals[j]).norm() > 1e-6 {
                        let ov = ts[i].dotc(&vs[j]).norm();
                        assert!(ov < 1e-10, "cross overlap {ov} at ({i},{j})");
                    }
                }
            }
        }
    }

    #[test]
    fn biorthonormalized_spectrum_has_kronecker_overlaps() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..25 {
            let p = random_params(&mut rng);
            let s = Spectrum::compute(&build_liouvillian(&p)).unwrap();
            assert!(s.defectiveness > DEFECTIVENESS_THRESHOLD);
            for i in 0..LDIM {
                for j in 0..LDIM {
                    let want = if i == j { 1.0 } else { 0.0 };
                    let got = s.left_vectors[i].dotc(&s.right_vectors[j]).norm();
                    assert!(
                        (got - want).abs() < 1e-8,
                        "overlap ({i},{j}) = {got} at ({}, {})",
                        p.omega,
                        p.delta
                    );
                }
                assert!((s.right_vectors[i].norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn exceptional_point_reports_defective_cluster() {
        let l = build_liouvillian(&SystemParams::normalized(0.25, 0.0));
        match Spectrum::compute(&l) {
            Err(CoreError::DefectiveCluster {
                indices, metric, ..
            }) => {
                // The canonical slots 1..=4 hold the fourfold −κ/4 value
                // whose two cross-block pairs coalesce.
                assert!(indices.contains(&1) && indices.contains(&3));
                assert!(metric < DEFECTIVENESS_THRESHOLD);
            }
            other => panic!("expected defective cluster, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn loop_point_far_from_degeneracy_succeeds() {
        let s = Spectrum::compute(&build_liouvillian(&SystemParams::normalized(0.5, 0.327)))
            .unwrap();
        assert!(s.defectiveness > DEFECTIVENESS_THRESHOLD);
    }

    #[test]
    fn residual_bound_on_random_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for _ in 0..100 {
            let mut p = random_params(&mut rng);
            if p.delta.abs() < 0.01 {
                p.delta = 0.05;
            }
            let l = build_liouvillian(&p);
            let s = Spectrum::compute_raw(&l).unwrap();
            let scale = l.norm();
            for j in 0..LDIM {
                assert!(s.residuals[j] <= 1e-10 * scale);
            }
        }
    }

    #[test]
    fn spectrum_closed_under_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        for _ in 0..20 {
            let vals = eigenvalues_only(&build_liouvillian(&random_params(&mut rng))).unwrap();
            for v in &vals {
                let d = vals
                    .iter()
                    .map(|w| (w - v.conj()).norm())
                    .fold(f64::MAX, f64::min);
                assert!(d < 1e-9);
            }
        }
    }

    #[test]
    fn defectiveness_decreases_toward_the_degeneracy() {
        // Approach (κ/4, 0) along Δ = 0; the four canonical slots 1..=4
        // hold the two coalescing cross-block pairs.
        let mut metrics = Vec::new();
        for i in 1..=10 {
            let omega = 0.25 + 10f64.powi(-(i as i32));
            let s = Spectrum::compute_raw(&build_liouvillian(&SystemParams::normalized(
                omega, 0.0,
            )))
            .unwrap();
            let cluster = [1, 2, 3, 4];
            let m = cluster_metric(
                &s.eigenvalues,
                &s.right_vectors,
                &s.left_vectors,
                &cluster,
            );
            metrics.push(m);
        }
        for w in metrics.windows(2) {
            assert!(w[1] <= w[0] * 1.05, "not decreasing: {:?}", metrics);
        }
        assert!(metrics[9] < 1e-3 * metrics[0]);
    }

    #[test]
    fn assignment_recovers_identity_and_shuffles() {
        let vals: [Complex64; LDIM] =
            core::array::from_fn(|i| Complex64::new(i as f64, -(i as f64) * 0.5));
        let (perm, cost) = pair_to_analytic(&vals, &vals);
        assert_eq!(perm, core::array::from_fn(|i| i));
        assert_eq!(cost, 0.0);

        let shuffle = [3usize, 1, 4, 0, 2, 8, 6, 7, 5];
        let shuffled: [Complex64; LDIM] = core::array::from_fn(|i| vals[shuffle[i]]);
        // numeric[i] = analytic[shuffle[i]], so the recovered pairing is
        // exactly the shuffle.
        let (perm, cost) = pair_to_analytic(&shuffled, &vals);
        assert_eq!(perm, shuffle);
        assert!(cost < 1e-12);
    }

    #[test]
    fn assignment_cost_small_on_parameter_grid() {
        for i in 0..7 {
            for j in 0..7 {
                let p = SystemParams::normalized(
                    0.05 + 1.9 * (i as f64) / 6.0,
                    -1.0 + 2.0 * (j as f64) / 6.0,
                );
                let numeric = eigenvalues_only(&build_liouvillian(&p)).unwrap();
                let analytic = analytic_eigenvalues(&p);
                let (_, cost) = pair_to_analytic(&numeric, &analytic);
                assert!(cost <= 9.0 * 1e-9, "cost {cost} at ({}, {})", p.omega, p.delta);
            }
        }
    }

    #[test]
    fn closed_form_pair_spans_numeric_eigenspace_at_zero_detuning() {
        // At Δ = 0 the two formula branches with a common eigenvalue live
        // in different coordinate blocks; their span must agree with the
        // numeric solver's two-dimensional eigenspace.
        let p = SystemParams::normalized(0.5, 0.0);
        let analytic_vals = analytic_eigenvalues(&p);
        let vs = analytic_eigenvectors_low(&p).unwrap();
        let (vals, vecs) = eig(&build_liouvillian(&p)).unwrap();
        let lam = analytic_vals[1];
        let pair: Vec<usize> = (0..LDIM)
            .filter(|&k| (vals[k] - lam).norm() < 1e-9)
            .collect();
        assert_eq!(pair.len(), 2);
        // Orthonormalize both pairs and compare projectors.
        let proj = |a: &SuperVector, b: &SuperVector| {
            let e1 = a.normalize();
            let mut e2 = b - e1 * e1.dotc(b);
            e2.normalize_mut();
            e1 * e1.adjoint() + e2 * e2.adjoint()
        };
        let p_analytic = proj(&vs[1], &vs[2]);
        let p_numeric = proj(&vecs[pair[0]], &vecs[pair[1]]);
        assert!((p_analytic - p_numeric).norm() < 1e-9);
    }
}
