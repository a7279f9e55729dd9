//! Matrix exponential by scaling-and-squaring with a degree-13 Padé
//! approximant (Higham's method, fixed order).
//!
//! Time evolution uses exp(L·t) directly rather than an eigendecomposition
//! so it stays exact (to roundoff) at exceptional points, where the
//! eigenbasis is defective and a spectral propagator would break down.

use num_complex::Complex64;

use crate::model::LiouvillianMatrix;

/// Padé-13 numerator coefficients.
const B: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// 1-norm (maximum column sum), the norm Higham's scaling bound is stated
/// in.
fn one_norm(m: &LiouvillianMatrix) -> f64 {
    (0..9)
        .map(|j| (0..9).map(|i| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// exp(M) for a 9×9 complex matrix.
pub fn expm(m: &LiouvillianMatrix) -> LiouvillianMatrix {
    // Scale so the 1-norm is below the Padé-13 accuracy radius θ₁₃ ≈ 5.37.
    let theta13 = 5.371920351148152;
    let nrm = one_norm(m);
    let s = if nrm > theta13 {
        ((nrm / theta13).log2().ceil() as i32).max(0)
    } else {
        0
    };
    let a = m / Complex64::new(2f64.powi(s), 0.0);

    let a2 = a * a;
    let a4 = a2 * a2;
    let a6 = a2 * a4;
    let id = LiouvillianMatrix::identity();

    let u_inner = a6 * Complex64::new(B[13], 0.0)
        + a4 * Complex64::new(B[11], 0.0)
        + a2 * Complex64::new(B[9], 0.0);
    let u_outer = a6 * Complex64::new(B[7], 0.0)
        + a4 * Complex64::new(B[5], 0.0)
        + a2 * Complex64::new(B[3], 0.0)
        + id * Complex64::new(B[1], 0.0);
    let u = a * (a6 * u_inner + u_outer);

    let v_inner = a6 * Complex64::new(B[12], 0.0)
        + a4 * Complex64::new(B[10], 0.0)
        + a2 * Complex64::new(B[8], 0.0);
    let v = a6 * v_inner
        + a6 * Complex64::new(B[6], 0.0)
        + a4 * Complex64::new(B[4], 0.0)
        + a2 * Complex64::new(B[2], 0.0)
        + id * Complex64::new(B[0], 0.0);

    // exp(A) ≈ (V − U)⁻¹(V + U), then undo the scaling by squaring.
    let mut f = (v - u)
        .lu()
        .solve(&(v + u))
        .expect("Padé denominator is nonsingular for a scaled matrix");
    for _ in 0..s {
        f = f * f;
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_liouvillian, SystemParams};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exponential_of_zero_is_identity() {
        let e = expm(&LiouvillianMatrix::zeros());
        assert!((e - LiouvillianMatrix::identity()).norm() < 1e-15);
    }

    #[test]
    fn diagonal_exponential_is_entrywise() {
        let mut m = LiouvillianMatrix::zeros();
        for i in 0..9 {
            m[(i, i)] = Complex64::new(-(i as f64) * 0.3, 0.7 * i as f64);
        }
        let e = expm(&m);
        for i in 0..9 {
            assert!((e[(i, i)] - m[(i, i)].exp()).norm() < 1e-13);
        }
    }

    #[test]
    fn group_property_on_random_generators() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for _ in 0..10 {
            let p = SystemParams::normalized(rng.gen_range(0.0..2.0), rng.gen_range(-1.0..1.0));
            let l = build_liouvillian(&p);
            let t1: f64 = rng.gen_range(0.1..2.0);
            let t2: f64 = rng.gen_range(0.1..2.0);
            let e1 = expm(&(l * Complex64::new(t1, 0.0)));
            let e2 = expm(&(l * Complex64::new(t2, 0.0)));
            let e12 = expm(&(l * Complex64::new(t1 + t2, 0.0)));
            assert!((e1 * e2 - e12).norm() < 1e-12);
        }
    }

    #[test]
    fn matches_taylor_series_for_small_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        let mut m = LiouvillianMatrix::zeros();
        for i in 0..9 {
            for j in 0..9 {
                m[(i, j)] =
                    Complex64::new(rng.gen_range(-0.01..0.01), rng.gen_range(-0.01..0.01));
            }
        }
        let mut taylor = LiouvillianMatrix::identity();
        let mut term = LiouvillianMatrix::identity();
        for k in 1..20 {
            term = term * m / Complex64::new(k as f64, 0.0);
            taylor += term;
        }
        assert!((expm(&m) - taylor).norm() < 1e-15);
    }
}
