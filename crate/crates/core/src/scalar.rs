//! Scalar abstraction for the numeric layer.
//!
//! All hyperbolic-geometry code is generic over [`Real`], a small field-like
//! trait built on `num-traits`. Two implementations ship: plain `f64`
//! (binary64, the default) and [`Dd`], an unevaluated double-double pair
//! carrying roughly 106 mantissa bits for long twist-power products.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

/// Field operations plus the transcendental functions the geometry needs.
pub trait Real:
    Copy
    + PartialOrd
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Sum<Self>
    + Send
    + Sync
    + 'static
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn cosh(self) -> Self;
    fn sinh(self) -> Self;
    /// Inverse hyperbolic cosine; callers guarantee the argument is >= 1.
    fn acosh(self) -> Self;
    fn max(self, other: Self) -> Self {
        if self > other {
            self
        } else {
            other
        }
    }
    fn min(self, other: Self) -> Self {
        if self < other {
            self
        } else {
            other
        }
    }
    fn is_finite(self) -> bool;
    /// Number of mantissa bits carried by this scalar format.
    fn mantissa_bits() -> u32;
    /// Reconstruct from an unevaluated double-double pair.
    fn from_dd(hi: f64, lo: f64) -> Self {
        Self::from_f64(hi) + Self::from_f64(lo)
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn acosh(self) -> Self {
        f64::acosh(self)
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn mantissa_bits() -> u32 {
        53
    }
}

/// Double-double scalar: value = `hi + lo` with `|lo| <= ulp(hi)/2`.
///
/// Same exponent range as `f64`, about twice the precision. The error-free
/// transforms follow the usual two-sum / FMA two-product recipes.
#[derive(Clone, Copy, Debug, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    // requires |a| >= |b|
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = f64::mul_add(a, b, -p);
    (p, err)
}

impl Dd {
    pub const fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn renorm(hi: f64, lo: f64) -> Self {
        let (s, e) = quick_two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }

    /// ln(2) to double-double precision.
    const LN2: Dd = Dd::new(std::f64::consts::LN_2, 2.3190468138462996e-17);

    fn exp_taylor(self) -> Self {
        // |self| <= ln(2)/2 assumed; plain Taylor summation.
        let mut term = Dd::from_f64(1.0);
        let mut sum = Dd::from_f64(1.0);
        for k in 1..32 {
            term = term * self / Dd::from_f64(k as f64);
            sum = sum + term;
            if term.hi.abs() < 1e-35 * sum.hi.abs() {
                break;
            }
        }
        sum
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.hi)
    }
}

impl PartialEq for Dd {
    fn eq(&self, other: &Self) -> bool {
        self.hi == other.hi && self.lo == other.lo
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        let d = *self - *other;
        if d.hi == 0.0 && d.lo == 0.0 {
            Some(std::cmp::Ordering::Equal)
        } else if d.hi > 0.0 || (d.hi == 0.0 && d.lo > 0.0) {
            Some(std::cmp::Ordering::Greater)
        } else {
            Some(std::cmp::Ordering::Less)
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, rhs: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let e = e + self.lo + rhs.lo;
        Dd::renorm(s, e)
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, rhs: Dd) -> Dd {
        self + (-rhs)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, rhs: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + self.hi * rhs.lo + self.lo * rhs.hi;
        Dd::renorm(p, e)
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi / rhs.hi;
        let r = self - rhs * Dd::from_f64(q1);
        let q2 = r.hi / rhs.hi;
        let r2 = r - rhs * Dd::from_f64(q2);
        let q3 = r2.hi / rhs.hi;
        Dd::renorm(q1, q2) + Dd::from_f64(q3)
    }
}

impl AddAssign for Dd {
    fn add_assign(&mut self, rhs: Dd) {
        *self = *self + rhs;
    }
}
impl SubAssign for Dd {
    fn sub_assign(&mut self, rhs: Dd) {
        *self = *self - rhs;
    }
}
impl MulAssign for Dd {
    fn mul_assign(&mut self, rhs: Dd) {
        *self = *self * rhs;
    }
}
impl DivAssign for Dd {
    fn div_assign(&mut self, rhs: Dd) {
        *self = *self / rhs;
    }
}

impl Sum for Dd {
    fn sum<I: Iterator<Item = Dd>>(iter: I) -> Dd {
        iter.fold(Dd::from_f64(0.0), |a, b| a + b)
    }
}

impl Zero for Dd {
    fn zero() -> Self {
        Dd::from_f64(0.0)
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl One for Dd {
    fn one() -> Self {
        Dd::from_f64(1.0)
    }
}

impl Real for Dd {
    fn from_f64(x: f64) -> Self {
        Dd::from_f64(x)
    }

    fn to_f64(self) -> f64 {
        self.hi
    }

    fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    fn sqrt(self) -> Self {
        if self.is_zero() {
            return Dd::from_f64(0.0);
        }
        // Newton refinement of the f64 seed; two steps reach full precision.
        let mut x = Dd::from_f64(self.hi.sqrt());
        for _ in 0..2 {
            x = (x + self / x) * Dd::from_f64(0.5);
        }
        x
    }

    fn exp(self) -> Self {
        if self.hi > 709.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::from_f64(0.0);
        }
        let k = (self.hi / std::f64::consts::LN_2).round();
        let r = self - Dd::LN2 * Dd::from_f64(k);
        let e = r.exp_taylor();
        // scale by 2^k exactly
        let scale = f64::powi(2.0, k as i32);
        Dd {
            hi: e.hi * scale,
            lo: e.lo * scale,
        }
    }

    fn ln(self) -> Self {
        // Newton: x_{n+1} = x_n + a*exp(-x_n) - 1
        let mut x = Dd::from_f64(self.hi.ln());
        for _ in 0..2 {
            let e = (-x).exp();
            x = x + self * e - Dd::from_f64(1.0);
        }
        x
    }

    fn cosh(self) -> Self {
        let e = self.exp();
        (e + Dd::from_f64(1.0) / e) * Dd::from_f64(0.5)
    }

    fn sinh(self) -> Self {
        if self.hi.abs() < 0.5 {
            // series near zero avoids cancellation
            let x2 = self * self;
            let mut term = self;
            let mut sum = self;
            for k in 1..20 {
                let d = ((2 * k) * (2 * k + 1)) as f64;
                term = term * x2 / Dd::from_f64(d);
                sum = sum + term;
                if term.hi.abs() < 1e-35 * sum.hi.abs() {
                    break;
                }
            }
            sum
        } else {
            let e = self.exp();
            (e - Dd::from_f64(1.0) / e) * Dd::from_f64(0.5)
        }
    }

    fn acosh(self) -> Self {
        let one = Dd::from_f64(1.0);
        if self <= one {
            return Dd::from_f64(0.0);
        }
        (self + (self * self - one).sqrt()).ln()
    }

    fn is_finite(self) -> bool {
        self.hi.is_finite()
    }

    fn mantissa_bits() -> u32 {
        106
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Dd, b: f64, tol: f64) -> bool {
        (a.to_f64() - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn dd_arithmetic_has_extended_precision() {
        let third = Dd::from_f64(1.0) / Dd::from_f64(3.0);
        let back = third * Dd::from_f64(3.0) - Dd::from_f64(1.0);
        assert!(back.hi.abs() < 1e-31, "residual {:e}", back.hi);
    }

    #[test]
    fn dd_sqrt_exp_ln_roundtrip() {
        let x = Dd::from_f64(7.25);
        assert!(close(x.sqrt() * x.sqrt(), 7.25, 1e-30));
        let y = x.exp().ln();
        assert!((y - x).hi.abs() < 1e-28);
    }

    #[test]
    fn dd_cosh_matches_f64_at_f64_scale() {
        for &t in &[0.1, 1.0, 3.5, 20.0] {
            let d = Dd::from_f64(t).cosh().to_f64();
            assert!((d - t.cosh()).abs() <= 1e-12 * t.cosh());
        }
    }

    #[test]
    fn dd_acosh_inverts_cosh() {
        for &t in &[0.5, 1.0, 2.0, 11.0] {
            let c = Dd::from_f64(t).cosh();
            let back = c.acosh();
            assert!((back.to_f64() - t).abs() < 1e-25, "t={t} got {}", back);
        }
    }

    #[test]
    fn dd_exp_large_argument_tracks_f64_range() {
        let x = Dd::from_f64(100.0).exp();
        assert!((x.to_f64().ln() - 100.0).abs() < 1e-12);
    }
}
