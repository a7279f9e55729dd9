//! Physical model: a driven two-level system exchanging a single excitation
//! with a damped auxiliary mode.
//!
//! Truncated to at most one excitation, the composite state space is spanned
//! by three kets — index 0: both subsystems in their ground state, index 1:
//! qubit excited, index 2: one excitation in the lossy mode.  Density
//! matrices are 3×3; the master-equation generator acting on their
//! row-stacked vectorization is a 9×9 complex matrix built here, together
//! with the closed-form expressions for its nine eigenvalues and for the
//! first five eigenvectors.

use nalgebra::{Matrix3, SMatrix, SVector};
use num_complex::Complex64;

use crate::CoreError;

/// Hilbert-space dimension of the truncated model.
pub const DIM: usize = 3;
/// Dimension of the vectorized (superoperator) space.
pub const LDIM: usize = 9;

/// A 3×3 complex density matrix (or, more generally, a 3×3 eigenmatrix of
/// the generator — those are traceless and need not be positive).
pub type DensityMatrix = Matrix3<Complex64>;
/// A row-stacked 3×3 matrix: `v[3i + j] = ρ[(i, j)]`.
pub type SuperVector = SVector<Complex64, LDIM>;
/// The 9×9 matrix representation of the master-equation generator.
pub type LiouvillianMatrix = SMatrix<Complex64, LDIM, LDIM>;

/// Control parameters of the model: drive amplitude Ω, detuning Δ (both
/// angular frequencies) and the mode decay rate κ.
///
/// The library convention is κ = 1 with Ω and Δ quoted in units of κ; any
/// unit conversion happens at the boundary (CLI), not here.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemParams {
    pub omega: f64,
    pub delta: f64,
    pub kappa: f64,
}

impl SystemParams {
    pub fn new(omega: f64, delta: f64, kappa: f64) -> Result<SystemParams, CoreError> {
        if !(omega.is_finite() && delta.is_finite() && kappa.is_finite()) {
            return Err(CoreError::InvalidParams(
                "parameters must be finite".into(),
            ));
        }
        if kappa <= 0.0 {
            return Err(CoreError::InvalidParams(format!(
                "decay rate must be positive, got {kappa}"
            )));
        }
        Ok(SystemParams {
            omega,
            delta,
            kappa,
        })
    }

    /// Convenience constructor with κ = 1 (the canonical normalization).
    pub fn normalized(omega: f64, delta: f64) -> SystemParams {
        SystemParams {
            omega,
            delta,
            kappa: 1.0,
        }
    }
}

/// The constants entering the closed-form eigenvalues: η± = (−κ ± 2iΔ)/4,
/// α = κ²/8 − Δ²/2 − 2Ω², β = √(α² + Δ²κ²/4) (principal root, hence real
/// and non-negative; β = |α| at Δ = 0).
#[derive(Clone, Copy, Debug)]
pub struct SpectralConstants {
    pub eta_plus: Complex64,
    pub eta_minus: Complex64,
    pub alpha: f64,
    pub beta: Complex64,
}

pub fn spectral_constants(params: &SystemParams) -> SpectralConstants {
    // The Δ² coefficient is −1/2: fixed by requiring the closed forms to
    // match the numeric spectrum of the generator off the Δ = 0 axis (a
    // −1/3 coefficient misses by ~1e-1 there; see the regression test).
    constants_with_delta_coeff(params, 0.5)
}

/// [`spectral_constants`] with an explicit Δ² coefficient in α.  The
/// diagnostic hook behind the verification report's coefficient
/// resolution: the rejected 1/3 variant must fail the numeric cross-check
/// by a demonstrable margin.
pub(crate) fn constants_with_delta_coeff(
    params: &SystemParams,
    delta_coeff: f64,
) -> SpectralConstants {
    let SystemParams {
        omega,
        delta,
        kappa,
    } = *params;
    let eta_plus = Complex64::new(-kappa / 4.0, delta / 2.0);
    let eta_minus = Complex64::new(-kappa / 4.0, -delta / 2.0);
    let alpha = kappa * kappa / 8.0 - delta_coeff * (delta * delta) - 2.0 * omega * omega;
    let beta = Complex64::new(alpha * alpha + delta * delta * kappa * kappa / 4.0, 0.0).sqrt();
    SpectralConstants {
        eta_plus,
        eta_minus,
        alpha,
        beta,
    }
}

/// Principal square root with the branch cut approached consistently from
/// above: a negative real argument carrying an imaginary part of −0.0
/// (an artifact of squaring, not a physical sign) would otherwise land on
/// the −i side and break the exact λ1 = λ2 degeneracy at zero detuning.
fn principal_sqrt(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        Complex64::new(z.re, 0.0).sqrt()
    } else {
        z.sqrt()
    }
}

/// Row-stack a 3×3 matrix into a length-9 vector.
pub fn vec_density(rho: &DensityMatrix) -> SuperVector {
    let mut v = SuperVector::zeros();
    for i in 0..DIM {
        for j in 0..DIM {
            v[DIM * i + j] = rho[(i, j)];
        }
    }
    v
}

/// Inverse of [`vec_density`].
pub fn unvec_density(v: &SuperVector) -> DensityMatrix {
    let mut rho = DensityMatrix::zeros();
    for i in 0..DIM {
        for j in 0..DIM {
            rho[(i, j)] = v[DIM * i + j];
        }
    }
    rho
}

/// Annihilation operator of the lossy mode, restricted to the truncated
/// basis: it maps state 2 (one mode excitation) to state 0 and kills the
/// rest.
fn mode_lowering() -> Matrix3<Complex64> {
    let mut b = Matrix3::zeros();
    b[(0, 2)] = Complex64::new(1.0, 0.0);
    b
}

/// Qubit–mode exchange Hamiltonian in the truncated basis:
/// H = Ω(|1⟩⟨2| + |2⟩⟨1|) + Δ|1⟩⟨1|.
///
/// The exchange term is the composite operator "mode-up ⊗ qubit-down" (and
/// its adjoint) written directly in the three retained states; factoring it
/// through the individual subsystem operators would silently vanish because
/// the intermediate doubly-excited state lies outside the basis.
pub fn build_hamiltonian(params: &SystemParams) -> Matrix3<Complex64> {
    let mut h = Matrix3::zeros();
    h[(1, 1)] = Complex64::new(params.delta, 0.0);
    h[(1, 2)] = Complex64::new(params.omega, 0.0);
    h[(2, 1)] = Complex64::new(params.omega, 0.0);
    h
}

/// Effective non-Hermitian Hamiltonian: H − (iκ/2)·n̂, with n̂ the mode
/// number operator (diag(0, 0, 1) in the truncated basis).
pub fn build_nh_hamiltonian(params: &SystemParams) -> Matrix3<Complex64> {
    let mut h = build_hamiltonian(params);
    h[(2, 2)] += Complex64::new(0.0, -params.kappa / 2.0);
    h
}

/// Master-equation generator as a 9×9 matrix acting on row-stacked density
/// matrices:
///
///   L = −i(H⊗I − I⊗Hᵀ) + (κ/2)(2 b⊗b − b†b⊗I − I⊗b†b)
///
/// where b is the truncated mode lowering operator.  Under row stacking,
/// vec(AρB) = (A ⊗ Bᵀ)vec(ρ), which fixes the placement of the transposes
/// above (b and b†b are real, so their transposes are written plainly).
pub fn build_liouvillian(params: &SystemParams) -> LiouvillianMatrix {
    let h = build_hamiltonian(params);
    let b = mode_lowering();
    let n = b.adjoint() * b;
    let id = Matrix3::<Complex64>::identity();
    let minus_i = Complex64::new(0.0, -1.0);
    let half_kappa = Complex64::new(params.kappa / 2.0, 0.0);

    let coherent = (h.kronecker(&id) - id.kronecker(&h.transpose())) * minus_i;
    let dissipative =
        (b.kronecker(&b) * Complex64::new(2.0, 0.0) - n.kronecker(&id) - id.kronecker(&n))
            * half_kappa;
    coherent + dissipative
}

/// The nine closed-form eigenvalues λ0..λ8 of the generator, in formula
/// order (not sorted):
///
///   λ0 = 0
///   λ1/λ3 = η₋ ∓ √(η₊² − Ω²)      λ2/λ4 = η₊ ∓ √(η₋² − Ω²)
///   λ5/λ6 = −κ/2 ± √(α + β)       λ7/λ8 = −κ/2 ± √(α − β)
///
/// with principal square roots throughout.  Branch continuity along
/// parameter loops is the tracking module's job, not this function's.
pub fn analytic_eigenvalues(params: &SystemParams) -> [Complex64; 9] {
    eigenvalues_from_constants(params, &spectral_constants(params))
}

/// Closed-form eigenvalues with an explicit Δ² coefficient in α (only
/// λ5..λ8 depend on it); see [`constants_with_delta_coeff`].
pub(crate) fn analytic_eigenvalues_with_delta_coeff(
    params: &SystemParams,
    delta_coeff: f64,
) -> [Complex64; 9] {
    eigenvalues_from_constants(params, &constants_with_delta_coeff(params, delta_coeff))
}

fn eigenvalues_from_constants(params: &SystemParams, sc: &SpectralConstants) -> [Complex64; 9] {
    let om2 = Complex64::new(params.omega * params.omega, 0.0);
    let s_plus = principal_sqrt(sc.eta_plus * sc.eta_plus - om2);
    let s_minus = principal_sqrt(sc.eta_minus * sc.eta_minus - om2);
    let half_kappa = Complex64::new(-params.kappa / 2.0, 0.0);
    let alpha = Complex64::new(sc.alpha, 0.0);
    let root_sum = principal_sqrt(alpha + sc.beta);
    let root_diff = principal_sqrt(alpha - sc.beta);
    [
        Complex64::new(0.0, 0.0),
        sc.eta_minus - s_plus,
        sc.eta_plus - s_minus,
        sc.eta_minus + s_plus,
        sc.eta_plus + s_minus,
        half_kappa + root_sum,
        half_kappa - root_sum,
        half_kappa + root_diff,
        half_kappa - root_diff,
    ]
}

/// Closed-form right eigenvectors V0..V4, each normalized to unit 2-norm.
///
/// V0 is the vectorized steady state |0⟩⟨0|.  V1–V4 live in the two 2-dim
/// coordinate blocks {3, 6} and {1, 2} of the vectorized space and have Ω
/// in one component, so the printed forms collapse at Ω = 0.
pub fn analytic_eigenvectors_low(params: &SystemParams) -> Result<[SuperVector; 5], CoreError> {
    if params.omega == 0.0 {
        return Err(CoreError::DegenerateParameterization);
    }
    let sc = spectral_constants(params);
    let om2 = Complex64::new(params.omega * params.omega, 0.0);
    let s_plus = principal_sqrt(sc.eta_plus * sc.eta_plus - om2);
    let s_minus = principal_sqrt(sc.eta_minus * sc.eta_minus - om2);
    let om = Complex64::new(params.omega, 0.0);
    let i = Complex64::i();

    let mut v0 = SuperVector::zeros();
    v0[0] = Complex64::new(1.0, 0.0);

    let mut v1 = SuperVector::zeros();
    v1[3] = -i * (sc.eta_plus + s_plus);
    v1[6] = om;

    let mut v2 = SuperVector::zeros();
    v2[1] = i * (sc.eta_minus + s_minus);
    v2[2] = om;

    let mut v3 = SuperVector::zeros();
    v3[3] = -i * (sc.eta_plus - s_plus);
    v3[6] = om;

    let mut v4 = SuperVector::zeros();
    v4[1] = i * (sc.eta_minus - s_minus);
    v4[2] = om;

    for v in [&mut v1, &mut v2, &mut v3, &mut v4] {
        let n = v.norm();
        *v /= Complex64::new(n, 0.0);
    }
    Ok([v0, v1, v2, v3, v4])
}

/// Hermiticity defect ‖ρ − ρ†‖_max.
pub fn hermiticity_defect(rho: &DensityMatrix) -> f64 {
    let d = rho - rho.adjoint();
    d.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// |tr ρ − 1|.
pub fn trace_defect(rho: &DensityMatrix) -> f64 {
    (rho.trace() - Complex64::new(1.0, 0.0)).norm()
}

/// Smallest eigenvalue of the Hermitian part of ρ, via the real symmetric
/// 6×6 embedding [[Re, −Im], [Im, Re]] (whose spectrum doubles ρ's).
pub fn min_density_eigenvalue(rho: &DensityMatrix) -> f64 {
    let h = (rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    let mut m = SMatrix::<f64, 6, 6>::zeros();
    for i in 0..DIM {
        for j in 0..DIM {
            m[(i, j)] = h[(i, j)].re;
            m[(i, j + DIM)] = -h[(i, j)].im;
            m[(i + DIM, j)] = h[(i, j)].im;
            m[(i + DIM, j + DIM)] = h[(i, j)].re;
        }
    }
    m.symmetric_eigenvalues().min()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_params(rng: &mut ChaCha8Rng) -> SystemParams {
        SystemParams::normalized(rng.gen_range(0.0..2.0), rng.gen_range(-1.0..1.0))
    }

    fn random_density(rng: &mut ChaCha8Rng) -> DensityMatrix {
        let mut a = Matrix3::<Complex64>::zeros();
        for i in 0..DIM {
            for j in 0..DIM {
                a[(i, j)] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        let rho = a * a.adjoint();
        let tr = rho.trace();
        rho / tr
    }

    #[test]
    fn hamiltonian_entries_match_operator_definition() {
        let h = build_hamiltonian(&SystemParams::normalized(0.5, 0.3));
        assert_eq!(h[(1, 1)], Complex64::new(0.3, 0.0));
        assert_eq!(h[(1, 2)], Complex64::new(0.5, 0.0));
        assert_eq!(h[(2, 1)], Complex64::new(0.5, 0.0));
        let nonzero: usize = h.iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!(nonzero, 3);
    }

    #[test]
    fn hamiltonian_vanishes_with_couplings_off() {
        let h = build_hamiltonian(&SystemParams::normalized(0.0, 0.0));
        assert_eq!(h, Matrix3::zeros());
    }

    #[test]
    fn hamiltonian_is_exactly_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let h = build_hamiltonian(&random_params(&mut rng));
            assert_eq!(h, h.adjoint());
        }
    }

    #[test]
    fn nh_hamiltonian_adds_mode_decay() {
        let p = SystemParams::normalized(0.5, 0.3);
        let h = build_nh_hamiltonian(&p);
        assert_eq!(h[(2, 2)], Complex64::new(0.0, -0.5));
        assert_eq!(h[(1, 1)], Complex64::new(0.3, 0.0));

        let trivial = build_nh_hamiltonian(&SystemParams::normalized(0.0, 0.0));
        let mut expect = Matrix3::zeros();
        expect[(2, 2)] = Complex64::new(0.0, -0.5);
        assert_eq!(trivial, expect);
    }

    #[test]
    fn nh_hamiltonian_hermitian_after_removing_decay() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..50 {
            let p = random_params(&mut rng);
            let mut h = build_nh_hamiltonian(&p);
            h[(2, 2)] += Complex64::new(0.0, p.kappa / 2.0);
            assert!((h - h.adjoint()).norm() == 0.0);
        }
    }

    #[test]
    fn liouvillian_spot_entries() {
        let p = SystemParams::normalized(0.5, 0.3);
        let l = build_liouvillian(&p);
        assert!((l[(0, 8)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((l[(2, 2)] - Complex64::new(-0.5, 0.0)).norm() < 1e-15);
        assert!((l[(1, 2)] - Complex64::new(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn liouvillian_with_couplings_off_is_pure_decay() {
        let l = build_liouvillian(&SystemParams::normalized(0.0, 0.0));
        let mut expect = LiouvillianMatrix::zeros();
        expect[(0, 8)] = Complex64::new(1.0, 0.0);
        for d in [2, 5, 6, 7] {
            expect[(d, d)] = Complex64::new(-0.5, 0.0);
        }
        expect[(8, 8)] = Complex64::new(-1.0, 0.0);
        assert!((l - expect).norm() == 0.0);
    }

    #[test]
    fn liouvillian_action_matches_direct_master_equation() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let b = mode_lowering();
        let n = b.adjoint() * b;
        for _ in 0..100 {
            let p = random_params(&mut rng);
            let l = build_liouvillian(&p);
            let h = build_hamiltonian(&p);
            for _ in 0..10 {
                let rho = random_density(&mut rng);
                let lhs = unvec_density(&(l * vec_density(&rho)));
                let comm = h * rho - rho * h;
                let rhs = comm * Complex64::new(0.0, -1.0)
                    + b * rho * b.adjoint() * Complex64::new(p.kappa, 0.0)
                    - (n * rho + rho * n) * Complex64::new(p.kappa / 2.0, 0.0);
                assert!((lhs - rhs).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn liouvillian_preserves_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let id_vec = vec_density(&Matrix3::identity());
        for _ in 0..100 {
            let l = build_liouvillian(&random_params(&mut rng));
            let row = l.adjoint() * id_vec;
            assert!(row.norm() < 1e-12);
        }
    }

    #[test]
    fn vec_unvec_roundtrip_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        for _ in 0..20 {
            let rho = random_density(&mut rng);
            assert_eq!(unvec_density(&vec_density(&rho)), rho);
        }
    }

    #[test]
    fn eigenvalue_zero_is_always_present() {
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        for _ in 0..100 {
            let ev = analytic_eigenvalues(&random_params(&mut rng));
            assert_eq!(ev[0], Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn eigenvalues_coalesce_at_the_degeneracy_point() {
        let ev = analytic_eigenvalues(&SystemParams::normalized(0.25, 0.0));
        assert!((ev[1] - Complex64::new(-0.25, 0.0)).norm() < 1e-15);
        assert!((ev[3] - Complex64::new(-0.25, 0.0)).norm() < 1e-15);
        let sc = spectral_constants(&SystemParams::normalized(0.25, 0.0));
        assert!(sc.alpha.abs() < 1e-15);
        assert!(sc.beta.norm() < 1e-15);
        for j in 5..9 {
            assert!((ev[j] - Complex64::new(-0.5, 0.0)).norm() < 1e-8);
        }
    }

    /// Regression pin: eigenvalues at two reference points, checked against
    /// values computed independently at 40-digit precision.
    #[test]
    fn eigenvalues_match_frozen_high_precision_references() {
        let cases: [(f64, f64, [(&str, &str); 9]); 2] = [
            (
                0.5,
                0.3,
                [
                    ("0", "0"),
                    ("-0.3305947616467025195432115", "0.3152907860734927463341052"),
                    ("-0.3305947616467025195432115", "-0.3152907860734927463341052"),
                    ("-0.1694052383532974804567885", "-0.6152907860734927463341052"),
                    ("-0.1694052383532974804567885", "0.6152907860734927463341052"),
                    ("-0.3388104767065949609135771", "0"),
                    ("-0.6611895232934050390864229", "0"),
                    ("-0.5", "0.9305815721469854926682105"),
                    ("-0.5", "-0.9305815721469854926682105"),
                ],
            ),
            (
                0.7791,
                0.1885,
                [
                    ("0", "0"),
                    ("-0.2816458720686799854231454", "0.6503178838890294629251884"),
                    ("-0.2816458720686799854231454", "-0.6503178838890294629251884"),
                    ("-0.2183541279313200145768546", "-0.8388178838890294629251884"),
                    ("-0.2183541279313200145768546", "0.8388178838890294629251884"),
                    ("-0.4367082558626400291537092", "0"),
                    ("-0.5632917441373599708462908", "0"),
                    ("-0.5", "1.489135767778058925850377"),
                    ("-0.5", "-1.489135767778058925850377"),
                ],
            ),
        ];
        for (omega, delta, expected) in cases {
            let ev = analytic_eigenvalues(&SystemParams::normalized(omega, delta));
            for (j, (re, im)) in expected.iter().enumerate() {
                let want = Complex64::new(re.parse().unwrap(), im.parse().unwrap());
                assert!(
                    (ev[j] - want).norm() < 5e-15,
                    "eigenvalue {j} at ({omega}, {delta}): {} vs {}",
                    ev[j],
                    want
                );
            }
        }
    }

    #[test]
    fn spectrum_is_closed_under_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        for _ in 0..100 {
            let ev = analytic_eigenvalues(&random_params(&mut rng));
            for v in &ev {
                let best = ev.iter().map(|w| (w - v.conj()).norm()).fold(f64::MAX, f64::min);
                assert!(best < 1e-12);
            }
        }
    }

    #[test]
    fn zero_detuning_degeneracy_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(28);
        for _ in 0..50 {
            let omega = rng.gen_range(0.05..1.0);
            let ev = analytic_eigenvalues(&SystemParams::normalized(omega, 0.0));
            assert!((ev[1] - ev[2]).norm() < 1e-14);
            assert!((ev[3] - ev[4]).norm() < 1e-14);
            let half = Complex64::new(-0.5, 0.0);
            if omega < 0.25 {
                assert!((ev[7] - half).norm() < 1e-14 && (ev[8] - half).norm() < 1e-14);
            } else if omega > 0.25 {
                assert!((ev[5] - half).norm() < 1e-14 && (ev[6] - half).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn beta_reduces_to_abs_alpha_at_zero_detuning() {
        for omega in [0.1, 0.25, 0.4, 0.9] {
            let sc = spectral_constants(&SystemParams::normalized(omega, 0.0));
            assert!((sc.beta - Complex64::new(sc.alpha.abs(), 0.0)).norm() < 1e-15);
            assert!(sc.beta.im == 0.0);
        }
    }

    #[test]
    fn closed_form_eigenvectors_have_tiny_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..50 {
            let mut p = random_params(&mut rng);
            if p.omega < 0.05 {
                p.omega += 0.1;
            }
            let l = build_liouvillian(&p);
            let ev = analytic_eigenvalues(&p);
            let vs = analytic_eigenvectors_low(&p).unwrap();
            let scale = l.norm();
            for (j, v) in vs.iter().enumerate() {
                assert!((v.norm() - 1.0).abs() < 1e-14);
                let r = (l * v - v * ev[j]).norm() / scale;
                assert!(r < 1e-10, "residual {r} for eigenvector {j}");
            }
        }
    }

    #[test]
    fn steady_eigenvector_is_the_empty_state() {
        let vs = analytic_eigenvectors_low(&SystemParams::normalized(0.5, 0.3)).unwrap();
        let mut e0 = SuperVector::zeros();
        e0[0] = Complex64::new(1.0, 0.0);
        assert_eq!(vs[0], e0);
    }

    #[test]
    fn eigenvectors_reject_zero_drive() {
        let r = analytic_eigenvectors_low(&SystemParams::normalized(0.0, 0.3));
        assert!(matches!(r, Err(CoreError::DegenerateParameterization)));
    }

    #[test]
    fn params_validation() {
        assert!(SystemParams::new(0.5, 0.3, 1.0).is_ok());
        assert!(SystemParams::new(0.5, 0.3, 0.0).is_err());
        assert!(SystemParams::new(0.5, 0.3, -1.0).is_err());
        assert!(SystemParams::new(f64::NAN, 0.3, 1.0).is_err());
    }

    #[test]
    fn physicality_helpers_agree_on_a_pure_state() {
        let mut rho = DensityMatrix::zeros();
        rho[(0, 0)] = Complex64::new(1.0, 0.0);
        assert_eq!(hermiticity_defect(&rho), 0.0);
        assert_eq!(trace_defect(&rho), 0.0);
        assert!(min_density_eigenvalue(&rho).abs() < 1e-15);
    }
}
