//! Double-double arithmetic.
//!
//! An eigenvalue λ of algebraic multiplicity two that sits at a defective
//! (exceptional) point is perturbed by O(√ε) when the matrix is perturbed by
//! O(ε), so plain f64 linear algebra caps out around 1e-8 accuracy right
//! where this library needs 1e-9 or better.  Representing each real number
//! as an unevaluated sum `hi + lo` of two f64 values (~31 significant
//! digits) pushes that floor to ~1e-15, far below every tolerance used here.
//!
//! The error-free transforms below are the classic Dekker/Knuth kernels.
//! Products are split with Dekker's 2^27+1 splitter rather than FMA so the
//! code runs identically on targets without a fused multiply-add.

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Knuth's two-sum: returns `(s, e)` with `s = fl(a + b)` and `a + b = s + e`
/// exactly.
#[inline(always)]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Fast two-sum, valid when `|a| >= |b|`.
#[inline(always)]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

/// Dekker's split of a double into two 26-bit halves.
#[inline(always)]
fn split(a: f64) -> (f64, f64) {
    const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1
    let t = SPLITTER * a;
    let hi = t - (t - a);
    let lo = a - hi;
    (hi, lo)
}

/// Dekker's two-product: `(p, e)` with `p = fl(a * b)` and `a * b = p + e`
/// exactly.
#[inline(always)]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ahi, alo) = split(a);
    let (bhi, blo) = split(b);
    let e = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo;
    (p, e)
}

/// A double-double number: the unevaluated sum `hi + lo` with
/// `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    /// Unit roundoff of the format, ~4.93e-32.
    pub const EPS: f64 = 4.93038065763132e-32; // 2^-104

    #[inline(always)]
    pub fn new(hi: f64, lo: f64) -> Dd {
        Dd { hi, lo }
    }

    #[inline(always)]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline(always)]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline(always)]
    pub fn is_zero(self) -> bool {
        self.hi == 0.0
    }

    #[inline(always)]
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    pub fn sqr(self) -> Dd {
        let (p1, mut p2) = two_prod(self.hi, self.hi);
        p2 += 2.0 * self.hi * self.lo;
        p2 += self.lo * self.lo;
        let (s, e) = quick_two_sum(p1, p2);
        Dd::new(s, e)
    }

    /// Square root via one Karp–Markstein correction of the f64 estimate.
    pub fn sqrt(self) -> Dd {
        if self.is_zero() {
            return Dd::ZERO;
        }
        debug_assert!(self.hi > 0.0, "sqrt of negative double-double");
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let err = (self - Dd::from_f64(ax).sqr()).hi;
        Dd::from_f64(ax) + Dd::from_f64(err * (x * 0.5))
    }

    pub fn recip(self) -> Dd {
        Dd::ONE / self
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Dd {
        Dd::from_f64(x)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Dd) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline(always)]
    fn neg(self) -> Dd {
        Dd::new(-self.hi, -self.lo)
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, rhs: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, rhs.hi);
        let (t1, t2) = two_sum(self.lo, rhs.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (s1, s2) = quick_two_sum(s1, s2 + t2);
        Dd::new(s1, s2)
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline(always)]
    fn sub(self, rhs: Dd) -> Dd {
        self + (-rhs)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, rhs: Dd) -> Dd {
        let (p1, mut p2) = two_prod(self.hi, rhs.hi);
        p2 += self.hi * rhs.lo + self.lo * rhs.hi;
        let (s, e) = quick_two_sum(p1, p2);
        Dd::new(s, e)
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, rhs: Dd) -> Dd {
        // Long division with three quotient terms, then renormalize.
        let q1 = self.hi / rhs.hi;
        let mut r = self - rhs * Dd::from_f64(q1);
        let q2 = r.hi / rhs.hi;
        r = r - rhs * Dd::from_f64(q2);
        let q3 = r.hi / rhs.hi;
        let (s1, s2) = quick_two_sum(q1, q2);
        Dd::new(s1, s2) + Dd::from_f64(q3)
    }
}

impl Add<f64> for Dd {
    type Output = Dd;
    fn add(self, rhs: f64) -> Dd {
        let (s1, s2) = two_sum(self.hi, rhs);
        let (s1, s2) = quick_two_sum(s1, s2 + self.lo);
        Dd::new(s1, s2)
    }
}

impl Sub<f64> for Dd {
    type Output = Dd;
    fn sub(self, rhs: f64) -> Dd {
        self + (-rhs)
    }
}

impl Mul<f64> for Dd {
    type Output = Dd;
    fn mul(self, rhs: f64) -> Dd {
        let (p1, p2) = two_prod(self.hi, rhs);
        let (s, e) = quick_two_sum(p1, p2 + self.lo * rhs);
        Dd::new(s, e)
    }
}

impl Div<f64> for Dd {
    type Output = Dd;
    fn div(self, rhs: f64) -> Dd {
        self / Dd::from_f64(rhs)
    }
}

/// A complex number with double-double real and imaginary parts.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CDd {
    pub re: Dd,
    pub im: Dd,
}

impl CDd {
    pub const ZERO: CDd = CDd {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };
    pub const ONE: CDd = CDd {
        re: Dd::ONE,
        im: Dd::ZERO,
    };

    #[inline(always)]
    pub fn new(re: Dd, im: Dd) -> CDd {
        CDd { re, im }
    }

    #[inline(always)]
    pub fn from_f64s(re: f64, im: f64) -> CDd {
        CDd {
            re: Dd::from_f64(re),
            im: Dd::from_f64(im),
        }
    }

    pub fn from_c64(z: num_complex::Complex64) -> CDd {
        CDd::from_f64s(z.re, z.im)
    }

    pub fn to_c64(self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    #[inline(always)]
    pub fn is_zero(self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    #[inline(always)]
    pub fn conj(self) -> CDd {
        CDd::new(self.re, -self.im)
    }

    pub fn norm_sqr(self) -> Dd {
        self.re.sqr() + self.im.sqr()
    }

    pub fn abs(self) -> Dd {
        self.norm_sqr().sqrt()
    }

    pub fn scale(self, s: f64) -> CDd {
        CDd::new(self.re * s, self.im * s)
    }

    /// Principal square root (non-negative real part; branch cut on the
    /// negative real axis with the cut mapped to the positive imaginary
    /// axis).
    pub fn sqrt(self) -> CDd {
        if self.is_zero() {
            return CDd::ZERO;
        }
        let m = self.abs();
        let half = Dd::from_f64(0.5);
        if self.re.hi >= 0.0 {
            let w = ((m + self.re) * half).sqrt();
            CDd::new(w, self.im / (w * 2.0))
        } else {
            let w = ((m - self.re) * half).sqrt();
            let im_nonneg = self.im.hi > 0.0 || (self.im.hi == 0.0 && self.im.lo >= 0.0);
            if im_nonneg {
                CDd::new(self.im / (w * 2.0), w)
            } else {
                CDd::new(-(self.im / (w * 2.0)), -w)
            }
        }
    }
}

impl Neg for CDd {
    type Output = CDd;
    #[inline(always)]
    fn neg(self) -> CDd {
        CDd::new(-self.re, -self.im)
    }
}

impl Add for CDd {
    type Output = CDd;
    #[inline(always)]
    fn add(self, rhs: CDd) -> CDd {
        CDd::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for CDd {
    type Output = CDd;
    #[inline(always)]
    fn sub(self, rhs: CDd) -> CDd {
        CDd::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Mul for CDd {
    type Output = CDd;
    fn mul(self, rhs: CDd) -> CDd {
        CDd::new(
            self.re * rhs.re - self.im * rhs.im,
            self.re * rhs.im + self.im * rhs.re,
        )
    }
}

impl Div for CDd {
    type Output = CDd;
    /// Smith's algorithm; avoids overflow in the intermediate products.
    fn div(self, rhs: CDd) -> CDd {
        if rhs.re.abs() >= rhs.im.abs() {
            let r = rhs.im / rhs.re;
            let den = rhs.re + rhs.im * r;
            CDd::new((self.re + self.im * r) / den, (self.im - self.re * r) / den)
        } else {
            let r = rhs.re / rhs.im;
            let den = rhs.im + rhs.re * r;
            CDd::new((self.re * r + self.im) / den, (self.im * r - self.re) / den)
        }
    }
}

impl Mul<Dd> for CDd {
    type Output = CDd;
    fn mul(self, rhs: Dd) -> CDd {
        CDd::new(self.re * rhs, self.im * rhs)
    }
}

impl Div<Dd> for CDd {
    type Output = CDd;
    fn div(self, rhs: Dd) -> CDd {
        CDd::new(self.re / rhs, self.im / rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_dd(rng: &mut ChaCha8Rng) -> Dd {
        let hi: f64 = rng.gen_range(-2.0..2.0);
        let lo = hi * 1e-18 * rng.gen_range(-1.0..1.0);
        Dd::from_f64(hi) + Dd::from_f64(lo)
    }

    #[test]
    fn error_free_sum_and_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let a: f64 = rng.gen_range(-1e8..1e8);
            let b: f64 = rng.gen_range(-1e-8..1e-8);
            let (s, e) = two_sum(a, b);
            // Exact identity in f64: s + e == a + b with no rounding.
            assert_eq!(s, a + b);
            assert_eq!(Dd::new(s, e).to_f64(), a + b);
            let (p, e) = two_prod(a, b);
            assert_eq!(p, a * b);
            // The error term must be below one ulp of the product.
            assert!(e.abs() <= (a * b).abs() * f64::EPSILON);
        }
    }

    #[test]
    fn keeps_small_addends_that_f64_drops() {
        let big = Dd::from_f64(1e16);
        let s = big + Dd::from_f64(1.0) - big;
        assert_eq!(s.to_f64(), 1.0);
    }

    #[test]
    fn mul_div_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..2000 {
            let a = rand_dd(&mut rng);
            let mut b = rand_dd(&mut rng);
            if b.hi.abs() < 1e-3 {
                b = b + 1.0;
            }
            let r = a * b / b - a;
            assert!(r.to_f64().abs() < 1e-29, "residual {}", r.to_f64());
        }
    }

    #[test]
    fn sqrt_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..2000 {
            let a = rand_dd(&mut rng).abs() + 1e-3;
            let r = a.sqrt().sqr() - a;
            assert!(r.to_f64().abs() < 1e-30);
        }
        // sqrt(2) to 31 digits: 1.414213562373095048801688724210
        let s = Dd::from_f64(2.0).sqrt();
        assert!((s.hi - std::f64::consts::SQRT_2).abs() < 1e-16);
        assert!((s.to_f64() - 2.0_f64.sqrt()).abs() < 1e-16);
        assert!((s.sqr() - Dd::from_f64(2.0)).to_f64().abs() < 1e-31);
    }

    #[test]
    fn complex_division_inverts_multiplication() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..2000 {
            let a = CDd::new(rand_dd(&mut rng), rand_dd(&mut rng));
            let mut b = CDd::new(rand_dd(&mut rng), rand_dd(&mut rng));
            if b.abs().to_f64() < 1e-3 {
                b = b + CDd::ONE;
            }
            let r = a * b / b - a;
            assert!(r.abs().to_f64() < 1e-29);
        }
    }

    #[test]
    fn complex_sqrt_is_principal() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..2000 {
            let z = CDd::new(rand_dd(&mut rng), rand_dd(&mut rng));
            let s = z.sqrt();
            assert!(s.re.hi >= 0.0, "principal branch has Re >= 0");
            let r = s * s - z;
            assert!(r.abs().to_f64() < 1e-30);
        }
        // Negative real axis maps onto the positive imaginary axis.
        let s = CDd::from_f64s(-4.0, 0.0).sqrt();
        assert!(s.re.to_f64().abs() < 1e-31);
        assert!((s.im.to_f64() - 2.0).abs() < 1e-31);
    }

    #[test]
    fn smith_division_handles_skewed_magnitudes() {
        let a = CDd::from_f64s(1.0, 1.0);
        let b = CDd::from_f64s(1e150, 1e150);
        let q = a / b;
        assert!((q.re.to_f64() - 1e-150).abs() < 1e-160);
        assert!(q.im.to_f64().abs() < 1e-160);
    }

    #[test]
    fn ordering_is_lexicographic_on_components() {
        let a = Dd::from_f64(1.0);
        let b = Dd::from_f64(1.0) + Dd::from_f64(1e-20);
        assert!(b > a);
        assert!(a < b);
        assert!((-a).abs() == a);
    }
}
