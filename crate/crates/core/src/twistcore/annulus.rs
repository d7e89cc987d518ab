use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::profile::{make_profile, TwistProfile};
use super::TwistError;

/// `{ r_inner ≤ |z − center| ≤ r_outer }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundAnnulus {
    pub center: Complex64,
    pub r_inner: f64,
    pub r_outer: f64,
}

impl RoundAnnulus {
    pub fn new(center: Complex64, r_inner: f64, r_outer: f64) -> Result<Self, TwistError> {
        if !(r_inner > 0.0 && r_inner < r_outer && r_outer.is_finite()) {
            return Err(TwistError::BadAnnulus { r_inner, r_outer });
        }
        Ok(Self { center, r_inner, r_outer })
    }

    /// Annulus whose area-middle circle has radius `r` and whose inner
    /// radius is `r − width`.
    pub fn around_circle(center: Complex64, r: f64, width: f64) -> Result<Self, TwistError> {
        let r_outer = (r * r + 2.0 * r * width - width * width).sqrt();
        Self::new(center, r - width, r_outer)
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI * (self.r_outer.powi(2) - self.r_inner.powi(2))
    }

    /// Radius of the circle `t = 0` of the area chart.
    pub fn central_radius(&self) -> f64 {
        ((self.r_inner.powi(2) + self.r_outer.powi(2)) / 2.0).sqrt()
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let r = (z - self.center).norm();
        r >= self.r_inner && r <= self.r_outer
    }

    /// Euclidean distance from `z` to the closed annulus.
    pub fn distance(&self, z: Complex64) -> f64 {
        let r = (z - self.center).norm();
        (self.r_inner - r).max(r - self.r_outer).max(0.0)
    }

    /// Closed annuli meet iff some pair of radii from the two ranges gives
    /// intersecting circles.
    pub fn intersects(&self, other: &RoundAnnulus) -> bool {
        let d = (self.center - other.center).norm();
        let gap = (self.r_inner - other.r_outer).max(other.r_inner - self.r_outer).max(0.0);
        d <= self.r_outer + other.r_outer && gap <= d
    }

    pub fn chart(&self) -> AreaChart {
        AreaChart { annulus: *self }
    }
}

/// `s = θ`, `t = (r² − (r_in² + r_out²)/2)/2`, onto `S¹ × [−a, a]` with
/// `a = (r_out² − r_in²)/4`. As measures `ds dt = r dr dθ`; the map
/// reverses orientation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaChart {
    pub annulus: RoundAnnulus,
}

impl AreaChart {
    pub fn half_width(&self) -> f64 {
        (self.annulus.r_outer.powi(2) - self.annulus.r_inner.powi(2)) / 4.0
    }

    pub fn to_product(&self, z: Complex64) -> (f64, f64) {
        let d = z - self.annulus.center;
        let mid = self.annulus.central_radius().powi(2);
        (d.arg().rem_euclid(TAU), (d.norm_sqr() - mid) / 2.0)
    }

    pub fn from_product(&self, s: f64, t: f64) -> Complex64 {
        let mid = self.annulus.central_radius().powi(2);
        let r = (2.0 * t + mid).max(0.0).sqrt();
        self.annulus.center + Complex64::from_polar(r, s)
    }

    /// `t` as a function of the point (no angle computation).
    pub fn height(&self, z: Complex64) -> f64 {
        let mid = self.annulus.central_radius().powi(2);
        ((z - self.annulus.center).norm_sqr() - mid) / 2.0
    }
}

/// A map of the plane with known inverse and support.
pub trait PlaneMap: Send + Sync {
    fn apply(&self, z: Complex64) -> Complex64;
    fn apply_inverse(&self, z: Complex64) -> Complex64;
    /// Points outside the support are returned unchanged, bit for bit.
    fn in_support(&self, z: Complex64) -> bool;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TwistPart {
    Full,
    /// The half on the outer side of the central circle (`t > 0`).
    Plus,
    /// The half on the inner side, central circle included (`t ≤ 0`).
    Minus,
}

/// Closed-form double Dehn twist: the time-`τ` flow of `h(t)` carried to a
/// round annulus by its area chart, extended by the identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusTwist {
    pub annulus: RoundAnnulus,
    pub profile: TwistProfile,
    pub tau: f64,
    pub part: TwistPart,
}

pub fn double_dehn_twist(annulus: RoundAnnulus, tau: f64) -> AnnulusTwist {
    let a = annulus.chart().half_width();
    let profile = make_profile(a, 0.0).expect("centred profile");
    AnnulusTwist { annulus, profile, tau, part: TwistPart::Full }
}

impl AnnulusTwist {
    pub fn half(&self, part: TwistPart) -> AnnulusTwist {
        AnnulusTwist { part, ..*self }
    }

    pub fn with_tau(&self, tau: f64) -> AnnulusTwist {
        AnnulusTwist { tau, ..*self }
    }

    /// Rotation angle applied at height `t`, before reduction mod 2π.
    pub fn angle(&self, t: f64) -> f64 {
        let active = match self.part {
            TwistPart::Full => true,
            TwistPart::Plus => t > 0.0,
            TwistPart::Minus => t <= 0.0,
        };
        if active {
            self.tau * self.profile.dh(t)
        } else {
            0.0
        }
    }

    /// Plane hamiltonian `H = −h(t(z))` whose `X_H = (H_y, −H_x)` flow for
    /// time `τ` is this map (the chart reverses orientation).
    pub fn hamiltonian(&self, z: Complex64) -> f64 {
        if !self.annulus.contains(z) {
            return 0.0;
        }
        -self.profile.h(self.annulus.chart().height(z))
    }

    /// `(H_x, H_y)` as a complex number.
    pub fn hamiltonian_gradient(&self, z: Complex64) -> Complex64 {
        if !self.annulus.contains(z) {
            return Complex64::new(0.0, 0.0);
        }
        let t = self.annulus.chart().height(z);
        // ∇t = z − c.
        -(z - self.annulus.center) * self.profile.dh(t)
    }

    fn rotate(&self, z: Complex64, sign: f64) -> Complex64 {
        let d = z - self.annulus.center;
        let r2 = d.norm_sqr();
        if r2 <= self.annulus.r_inner.powi(2) || r2 >= self.annulus.r_outer.powi(2) {
            return z;
        }
        let t = self.annulus.chart().height(z);
        // Reduce to [−π, π] so that `f` and `f⁻¹` treat a point alike;
        // rotations below rounding level are the identity.
        let raw = sign * self.angle(t);
        let delta = raw - TAU * (raw / TAU).round();
        if delta.abs() <= 4.0 * f64::EPSILON {
            return z;
        }
        self.annulus.center + d * Complex64::from_polar(1.0, delta)
    }
}

impl PlaneMap for AnnulusTwist {
    fn apply(&self, z: Complex64) -> Complex64 {
        self.rotate(z, 1.0)
    }

    fn apply_inverse(&self, z: Complex64) -> Complex64 {
        self.rotate(z, -1.0)
    }

    fn in_support(&self, z: Complex64) -> bool {
        let r2 = (z - self.annulus.center).norm_sqr();
        r2 > self.annulus.r_inner.powi(2) && r2 < self.annulus.r_outer.powi(2)
    }
}

/// Central-difference Jacobian determinant of a plane map.
pub fn jacobian_det<M: PlaneMap + ?Sized>(map: &M, z: Complex64, step: f64) -> f64 {
    // Fourth-order central differences.
    let d = |e: Complex64| {
        (map.apply(z - e * 2.0) - map.apply(z + e * 2.0) + (map.apply(z + e) - map.apply(z - e)) * 8.0)
            / (12.0 * step)
    };
    let fx = d(Complex64::new(step, 0.0));
    let fy = d(Complex64::new(0.0, step));
    fx.re * fy.im - fx.im * fy.re
}
