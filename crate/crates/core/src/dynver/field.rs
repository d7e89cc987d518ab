use num_complex::Complex64;

use super::HamiltonianField;
use crate::twistcore::AnnulusTwist;

/// `H ≡ 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroField;

impl HamiltonianField for ZeroField {
    fn value(&self, _: Complex64) -> f64 {
        0.0
    }

    fn gradient(&self, _: Complex64) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }

    fn in_support(&self, _: Complex64) -> bool {
        false
    }
}

/// `H = (ω/2)|z − c|²`; its flow turns clockwise about `c` at speed `ω`.
#[derive(Debug, Clone, Copy)]
pub struct RotationField {
    pub center: Complex64,
    pub speed: f64,
}

impl HamiltonianField for RotationField {
    fn value(&self, z: Complex64) -> f64 {
        0.5 * self.speed * (z - self.center).norm_sqr()
    }

    fn gradient(&self, z: Complex64) -> Complex64 {
        (z - self.center) * self.speed
    }

    fn in_support(&self, _: Complex64) -> bool {
        true
    }
}

/// The hamiltonian of a closed-form twist; its time-`τ` flow is the twist
/// with parameter `τ`.
#[derive(Debug, Clone, Copy)]
pub struct TwistField(pub AnnulusTwist);

impl HamiltonianField for TwistField {
    fn value(&self, z: Complex64) -> f64 {
        self.0.hamiltonian(z)
    }

    fn gradient(&self, z: Complex64) -> Complex64 {
        self.0.hamiltonian_gradient(z)
    }

    fn in_support(&self, z: Complex64) -> bool {
        self.0.annulus.contains(z)
    }
}

impl<F: HamiltonianField + ?Sized> HamiltonianField for std::sync::Arc<F> {
    fn value(&self, z: Complex64) -> f64 {
        (**self).value(z)
    }

    fn gradient(&self, z: Complex64) -> Complex64 {
        (**self).gradient(z)
    }

    fn in_support(&self, z: Complex64) -> bool {
        (**self).in_support(z)
    }
}

/// Largest relative gap between the gradient and central differences of
/// the value with step `h`, over `pts`.
pub fn gradient_gap<F: HamiltonianField + ?Sized>(field: &F, pts: &[Complex64], h: f64) -> f64 {
    pts.iter()
        .map(|&z| {
            let dx = Complex64::new(h, 0.0);
            let dy = Complex64::new(0.0, h);
            let fd = Complex64::new(
                (field.value(z + dx) - field.value(z - dx)) / (2.0 * h),
                (field.value(z + dy) - field.value(z - dy)) / (2.0 * h),
            );
            let g = field.gradient(z);
            (g - fd).norm() / g.norm().max(fd.norm()).max(f64::MIN_POSITIVE)
        })
        .filter(|x| x.is_finite())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::twistcore::{double_dehn_twist, RoundAnnulus};

    #[test]
    fn gradients_match_differences() {
        let rot = RotationField { center: Complex64::new(0.1, 0.2), speed: 3.0 };
        let pts: Vec<Complex64> = (0..10).map(|k| Complex64::from_polar(0.5, k as f64)).collect();
        assert!(gradient_gap(&rot, &pts, 1e-6) < 1e-5);
        let a = RoundAnnulus::around_circle(Complex64::new(0.0, 0.0), 0.5, 0.1).unwrap();
        let tw = TwistField(double_dehn_twist(a, 1.0));
        let pts: Vec<Complex64> = (0..10).map(|k| Complex64::from_polar(0.45 + 0.01 * k as f64, k as f64)).collect();
        assert!(gradient_gap(&tw, &pts, 1e-7) < 1e-5);
        assert_eq!(ZeroField.gradient(Complex64::new(1.0, 1.0)), Complex64::new(0.0, 0.0));
    }
}
