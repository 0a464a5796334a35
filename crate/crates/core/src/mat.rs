//! Real 2x2 matrices acting on the upper half-plane.

use std::ops::Mul;

use crate::scalar::Real;

/// Row-major 2x2 matrix over a [`Real`] scalar.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2<R: Real> {
    pub a: R,
    pub b: R,
    pub c: R,
    pub d: R,
}

impl<R: Real> Mat2<R> {
    pub fn new(a: R, b: R, c: R, d: R) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn identity() -> Self {
        Mat2::new(R::one(), R::zero(), R::zero(), R::one())
    }

    pub fn from_f64s(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2::new(R::from_f64(a), R::from_f64(b), R::from_f64(c), R::from_f64(d))
    }

    /// diag(e^{t/2}, e^{-t/2}): translation by `t` along the imaginary axis.
    pub fn axis_translation(t: R) -> Self {
        let half = t / R::from_f64(2.0);
        Mat2::new(half.exp(), R::zero(), R::zero(), (-half).exp())
    }

    /// Order-two rotation about i; reverses the imaginary axis and swaps its sides.
    pub fn half_turn_at_i() -> Self {
        Mat2::new(R::zero(), R::one(), -R::one(), R::zero())
    }

    pub fn det(&self) -> R {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> R {
        self.a + self.d
    }

    /// Inverse assuming det = 1.
    pub fn inverse_unimodular(&self) -> Self {
        Mat2::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn max_abs_entry(&self) -> R {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }

    /// Rescale so the determinant is exactly 1 again; counters rounding
    /// drift in long products. Requires det > 0.
    pub fn renormalized(&self) -> Self {
        let s = R::one() / self.det().sqrt();
        Mat2::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    /// Entrywise distance to +/- identity, whichever is closer.
    pub fn dist_to_pm_identity(&self) -> R {
        let dist = |s: R| -> R {
            (self.a - s).abs().max((self.d - s).abs()).max(self.b.abs()).max(self.c.abs())
        };
        dist(R::one()).min(dist(-R::one()))
    }

    /// Normalize the projective sign so the first nonzero entry is positive.
    pub fn pm_normalized(&self) -> Self {
        let lead = if self.a.abs() > R::from_f64(1e-300) {
            self.a
        } else if self.b.abs() > R::from_f64(1e-300) {
            self.b
        } else {
            self.c
        };
        if lead < R::zero() {
            Mat2::new(-self.a, -self.b, -self.c, -self.d)
        } else {
            *self
        }
    }

    pub fn to_f64(&self) -> Mat2<f64> {
        Mat2::new(self.a.to_f64(), self.b.to_f64(), self.c.to_f64(), self.d.to_f64())
    }

    /// True if |trace| > 2 + margin.
    pub fn is_hyperbolic(&self, margin: R) -> bool {
        self.trace().abs() > R::from_f64(2.0) + margin
    }

    /// Translation length of a hyperbolic element: 2 acosh(|tr|/2).
    pub fn translation_length(&self) -> R {
        let half = self.trace().abs() / R::from_f64(2.0);
        half.acosh() * R::from_f64(2.0)
    }

    /// Fixed points on the boundary of the upper half-plane.
    ///
    /// Returns (attracting, repelling) as extended reals; `None` encodes the
    /// point at infinity. Caller guarantees the element is hyperbolic.
    pub fn axis_endpoints(&self) -> (Option<R>, Option<R>) {
        let two = R::from_f64(2.0);
        let tr = self.trace();
        let disc = (tr * tr - R::from_f64(4.0)).sqrt();
        // Eigenvalues (tr +/- disc)/2; attracting has |lambda| > 1.
        let (l_att, l_rep) = if tr > R::zero() {
            ((tr + disc) / two, (tr - disc) / two)
        } else {
            ((tr - disc) / two, (tr + disc) / two)
        };
        let fix = |lambda: R| -> Option<R> {
            // Eigenvector (x, y) of [[a,b],[c,d]]; boundary point x/y.
            // Choose the numerically robust formula.
            let r1 = (lambda - self.d, self.c);
            let r2 = (self.b, lambda - self.a);
            let (x, y) = if r1.0.abs().max(r1.1.abs()) > r2.0.abs().max(r2.1.abs()) {
                r1
            } else {
                r2
            };
            if y.abs() <= x.abs() * R::from_f64(1e-14) {
                None
            } else {
                Some(x / y)
            }
        };
        (fix(l_att), fix(l_rep))
    }

    /// Unimodular frame whose columns are the attracting / repelling
    /// eigenvectors; conjugates the element to diag(l, 1/l) with |l| > 1.
    ///
    /// Deterministic: columns are unit-norm with positive leading entry,
    /// then jointly rescaled so the determinant is +1.
    pub fn eigenframe(&self) -> Mat2<R> {
        let two = R::from_f64(2.0);
        let tr = self.trace();
        let disc = (tr * tr - R::from_f64(4.0)).sqrt();
        let (l_att, l_rep) = if tr > R::zero() {
            ((tr + disc) / two, (tr - disc) / two)
        } else {
            ((tr - disc) / two, (tr + disc) / two)
        };
        let col = |lambda: R| -> (R, R) {
            let r1 = (lambda - self.d, self.c);
            let r2 = (self.b, lambda - self.a);
            let (x, y) = if r1.0.abs().max(r1.1.abs()) > r2.0.abs().max(r2.1.abs()) {
                r1
            } else {
                r2
            };
            let n = (x * x + y * y).sqrt();
            let (x, y) = (x / n, y / n);
            if x < R::zero() || (x == R::zero() && y < R::zero()) {
                (-x, -y)
            } else {
                (x, y)
            }
        };
        let (x1, y1) = col(l_att);
        let (x2, y2) = col(l_rep);
        let det = x1 * y2 - x2 * y1;
        // det can be negative; flip the repelling column's sign to fix it.
        let (x2, y2, det) = if det < R::zero() { (-x2, -y2, -det) } else { (x2, y2, det) };
        let s = det.sqrt();
        Mat2::new(x1 / s, x2 / s, y1 / s, y2 / s)
    }
}

impl<R: Real> Mul for Mat2<R> {
    type Output = Mat2<R>;
    fn mul(self, rhs: Mat2<R>) -> Mat2<R> {
        Mat2::new(
            self.a * rhs.a + self.b * rhs.c,
            self.a * rhs.b + self.b * rhs.d,
            self.c * rhs.a + self.d * rhs.c,
            self.c * rhs.b + self.d * rhs.d,
        )
    }
}

/// Point of the open upper half-plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HPoint<R: Real> {
    pub x: R,
    pub y: R,
}

impl<R: Real> HPoint<R> {
    pub fn new(x: R, y: R) -> Self {
        HPoint { x, y }
    }

    pub fn i() -> Self {
        HPoint::new(R::zero(), R::one())
    }

    /// Moebius action of a unimodular matrix.
    pub fn apply(&self, m: &Mat2<R>) -> HPoint<R> {
        // (a z + b)(conj(c z + d)) / |c z + d|^2
        let (x, y) = (self.x, self.y);
        let re_num = m.a * x + m.b;
        let im_num = m.a * y;
        let re_den = m.c * x + m.d;
        let im_den = m.c * y;
        let den = re_den * re_den + im_den * im_den;
        HPoint::new(
            (re_num * re_den + im_num * im_den) / den,
            (im_num * re_den - re_num * im_den) / den,
        )
    }

    pub fn dist(&self, other: &HPoint<R>) -> R {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let two = R::from_f64(2.0);
        let arg = R::one() + (dx * dx + dy * dy) / (two * self.y * other.y);
        arg.acosh()
    }

    /// Distance to the geodesic with boundary endpoints `u`, `v`
    /// (`None` = infinity).
    pub fn dist_to_geodesic(&self, u: Option<R>, v: Option<R>) -> R {
        match (u, v) {
            (Some(u), Some(v)) => {
                // The Moebius map w = (z-u)/(z-v) sends the geodesic to the
                // imaginary axis, where sinh(dist) = |Re w| / |Im w|.
                let (x, y) = (self.x, self.y);
                let den = (x - v) * (x - v) + y * y;
                let re_w = ((x - u) * (x - v) + y * y) / den;
                let im_w = y * (u - v) / den;
                (re_w / im_w).abs().asinh_via_ln()
            }
            (Some(u), None) | (None, Some(u)) => {
                // vertical line at u: sinh d = |x - u| / y
                ((self.x - u) / self.y).abs().asinh_via_ln()
            }
            (None, None) => R::from_f64(f64::INFINITY),
        }
    }
}

/// asinh through ln, keeping the Real trait surface small.
trait AsinhViaLn: Real {
    fn asinh_via_ln(self) -> Self {
        (self + (self * self + Self::one()).sqrt()).ln()
    }
}
impl<R: Real> AsinhViaLn for R {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn translation_has_expected_length_and_axis() {
        let m: Mat2<f64> = Mat2::axis_translation(1.6);
        assert!((m.translation_length() - 1.6).abs() < 1e-12);
        let (att, rep) = m.axis_endpoints();
        assert!(att.is_none());
        assert!((rep.unwrap() - 0.0).abs() < 1e-12);
    }

    #[test]
    fn eigenframe_diagonalizes() {
        let g: Mat2<f64> = Mat2::new(2.0, 1.0, 1.0, 1.0); // trace 3, hyperbolic
        let n = g.eigenframe();
        assert!((n.det() - 1.0).abs() < 1e-12);
        let d = n.inverse_unimodular() * g * n;
        assert!(d.b.abs() < 1e-10 && d.c.abs() < 1e-10, "{d:?}");
        assert!(d.a.abs() > 1.0, "attracting eigenvalue first: {d:?}");
    }

    #[test]
    fn point_distance_and_geodesic_distance_agree_on_axis() {
        let p: HPoint<f64> = HPoint::new(0.0, 1.0);
        let q = HPoint::new(0.0, std::f64::consts::E);
        assert!((p.dist(&q) - 1.0).abs() < 1e-12);
        // distance from i to the geodesic (-1, 1) is acosh(sqrt(2))-ish:
        // the geodesic is the unit semicircle through i, so distance is 0.
        let d = p.dist_to_geodesic(Some(-1.0), Some(1.0));
        assert!(d.abs() < 1e-12);
        // distance from 2i to the unit semicircle is ln 2.
        let d2 = HPoint::new(0.0, 2.0).dist_to_geodesic(Some(-1.0), Some(1.0));
        assert!((d2 - 2.0_f64.ln()).abs() < 1e-9, "{d2}");
    }

    #[test]
    fn moebius_action_matches_translation() {
        let m: Mat2<f64> = Mat2::axis_translation(2.0);
        let p = HPoint::i().apply(&m);
        assert!((p.x - 0.0).abs() < 1e-12);
        assert!((p.y - 2.0f64.exp()).abs() < 1e-12);
    }
}
