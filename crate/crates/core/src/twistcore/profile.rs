use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::TwistError;

/// Flat bump `h(t) = 2πe·(t−b)·exp(−1/(1−((t−b)/w)²))` on `|t−b| < w`,
/// zero elsewhere, with `w = min(a−b, a+b)`. Every derivative vanishes at the
/// ends of the support and `h'(b) = 2π`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwistProfile {
    pub half_width: f64,
    pub center: f64,
    pub bump_width: f64,
}

pub fn make_profile(a: f64, b: f64) -> Result<TwistProfile, TwistError> {
    if !(a > 0.0 && b > -a && b < a) {
        return Err(TwistError::ProfileCenter { a, b });
    }
    Ok(TwistProfile { half_width: a, center: b, bump_width: (a - b).min(a + b) })
}

impl TwistProfile {
    fn scaled(&self, t: f64) -> Option<f64> {
        let u = (t - self.center) / self.bump_width;
        (u.abs() < 1.0).then_some(u)
    }

    pub fn h(&self, t: f64) -> f64 {
        match self.scaled(t) {
            Some(u) => TAU * (t - self.center) * (-u * u / (1.0 - u * u)).exp(),
            None => 0.0,
        }
    }

    /// `h'(t) = 2π·exp(−u²/(1−u²))·(1 − 2u²/(1−u²)²)`, exactly `2π` at `u = 0`.
    pub fn dh(&self, t: f64) -> f64 {
        match self.scaled(t) {
            Some(u) => {
                let q = 1.0 - u * u;
                TAU * (-u * u / q).exp() * (1.0 - 2.0 * u * u / (q * q))
            }
            None => 0.0,
        }
    }

    pub fn d2h(&self, t: f64) -> f64 {
        match self.scaled(t) {
            Some(u) => {
                let q = 1.0 - u * u;
                let e = (-u * u / q).exp();
                // d/du of e·(1 − 2u²/q²), divided by w.
                let de = e * (-2.0 * u / (q * q));
                let g = 1.0 - 2.0 * u * u / (q * q);
                let dg = -4.0 * u / (q * q) - 8.0 * u * u * u / (q * q * q);
                TAU * (de * g + e * dg) / self.bump_width
            }
            None => 0.0,
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.bump_width, self.center + self.bump_width)
    }

    pub fn sup_abs_h(&self) -> f64 {
        // |h| peaks where d/du (u·exp(−u²/(1−u²))) = 0, i.e. (1−u²)² = 2u².
        let u = (6f64.sqrt() - 2f64.sqrt()) / 2.0;
        self.h(self.center + u * self.bump_width).abs()
    }
}

/// Time-`τ` flow of `H(s, t) = h(t)` on `S¹ × [−a, a]` with `ds∧dt`.
pub fn product_twist(profile: &TwistProfile, tau: f64, s: f64, t: f64) -> Result<(f64, f64), TwistError> {
    if t.abs() > profile.half_width {
        return Err(TwistError::OutsideAnnulus { t, a: profile.half_width });
    }
    Ok(((s + tau * profile.dh(t)).rem_euclid(TAU), t))
}

/// Lifted angular coordinate (no reduction mod 2π).
pub fn product_twist_lifted(profile: &TwistProfile, tau: f64, s: f64, t: f64) -> f64 {
    s + tau * profile.dh(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn slope_is_two_pi_at_center() {
        let p = make_profile(0.5, 0.0).unwrap();
        assert_eq!(p.dh(0.0), TAU);
        let q = make_profile(0.5, 0.2).unwrap();
        assert_eq!(q.dh(0.2), TAU);
        let (lo, hi) = q.support();
        assert!((lo + 0.1).abs() < 1e-15 && hi == 0.5);
        let fd = (q.h(0.2 + 1e-6) - q.h(0.2 - 1e-6)) / 2e-6;
        assert!((fd - TAU).abs() < 1e-6);
    }

    #[test]
    fn flat_at_ends() {
        let p = make_profile(0.5, 0.0).unwrap();
        for t in [-0.5, 0.5] {
            assert_eq!(p.h(t), 0.0);
            assert!(p.dh(t).abs() < 1e-12);
        }
        assert!(p.dh(0.4999).abs() < 1e-12);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let p = make_profile(0.5, 0.1).unwrap();
        for i in 1..40 {
            let t = -0.3 + 0.7 * i as f64 / 40.0;
            let e = 1e-6;
            let fd1 = (p.h(t + e) - p.h(t - e)) / (2.0 * e);
            let fd2 = (p.dh(t + e) - p.dh(t - e)) / (2.0 * e);
            assert!((fd1 - p.dh(t)).abs() < 1e-6, "t={t}");
            assert!((fd2 - p.d2h(t)).abs() < 1e-4 * (1.0 + p.d2h(t).abs()), "t={t}");
        }
    }

    #[test]
    fn rejects_center_outside() {
        assert!(make_profile(0.5, 0.5).is_err());
        assert!(make_profile(0.5, -0.7).is_err());
    }

    #[test]
    fn product_twist_examples() {
        let p = make_profile(0.5, 0.0).unwrap();
        let (s, t) = product_twist(&p, 1.0, 1.0, 0.0).unwrap();
        assert!((s - 1.0).abs() < 1e-12 && t == 0.0);
        assert!((product_twist_lifted(&p, 1.0, 1.0, 0.0) - (1.0 + TAU)).abs() < 1e-15);
        let (s, _) = product_twist(&p, 0.5, 0.25, 0.0).unwrap();
        assert!((s - (0.25 + PI)).abs() < 1e-12);
        for tau in [0.3, 2.0, -1.7] {
            assert_eq!(product_twist(&p, tau, 0.7, 0.5).unwrap().0, 0.7);
        }
        assert!(product_twist(&p, 1.0, 0.0, 0.6).is_err());
    }

    #[test]
    fn sup_is_attained() {
        let p = make_profile(0.5, 0.0).unwrap();
        let grid = (0..2001).map(|i| p.h(-0.5 + i as f64 / 2000.0).abs()).fold(0.0, f64::max);
        assert!(p.sup_abs_h() >= grid - 1e-12);
    }
}
