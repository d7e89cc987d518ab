use std::f64::consts::TAU;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::mobius::GroupElement;
use super::HyperError;
use crate::twistcore::RoundAnnulus;

const RADIAL_NODES: usize = 24;
const ANGULAR_PANELS: usize = 8;
const ANGULAR_NODES: usize = 16;

fn legendre(n: usize) -> GaussLegendre {
    GaussLegendre::new(NonZeroUsize::new(n).unwrap())
}

/// `∫_A |σ′|² dA`, the Euclidean area of `σ(A)`: periodic trapezoid rule in
/// the angle (doubled until it settles to `tol`), Gauss–Legendre in the radius.
pub fn lambda_scale(sigma: &GroupElement, annulus: &RoundAnnulus, tol: f64) -> Result<f64, HyperError> {
    if annulus.center.norm() + annulus.r_outer >= 1.0 {
        return Err(HyperError::AnnulusOutsideDisk);
    }
    let gl = legendre(RADIAL_NODES);
    let radial = |phi: f64| {
        let e = Complex64::from_polar(1.0, phi);
        gl.integrate(annulus.r_inner, annulus.r_outer, |r| {
            sigma.map.derivative(annulus.center + e * r).norm_sqr() * r
        })
    };
    let mut n = 32;
    let mut prev = (0..n).map(|k| radial(k as f64 * TAU / n as f64)).sum::<f64>() * TAU / n as f64;
    while n < 1 << 16 {
        n *= 2;
        let odd: f64 = (0..n / 2).map(|k| radial((2 * k + 1) as f64 * TAU / n as f64)).sum();
        let next = 0.5 * prev + odd * TAU / n as f64;
        if (next - prev).abs() <= tol * next.abs() {
            return Ok(next);
        }
        prev = next;
    }
    Err(HyperError::Quadrature("lambda_scale"))
}

/// Normalised bump `g(x) = 630 x⁴(1−x)⁴` on `[0, 1]` and its primitive.
fn bump(x: f64) -> f64 {
    if !(0.0..=1.0).contains(&x) {
        return 0.0;
    }
    630.0 * (x * (1.0 - x)).powi(4)
}

fn bump_primitive(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x.powi(5) * (126.0 + x * (-420.0 + x * (540.0 + x * (-315.0 + x * 70.0))))
}

/// Measure-preserving chart `(A, ω_{v,σ}) → S¹ × [−½, ½]` carrying the
/// central circle to the level `t = b`.
///
/// With `ρ = λ⁻²|σ′|²` in polar coordinates `(φ, r)` about the annulus
/// centre, write `m(φ) = ∫ρ r dr` over the annulus and `m_in(φ)` for the
/// part inside the central circle, so `b + ½ = ∫m_in dφ`. The height `t` is
/// the root of `(t+½)m(φ) + Γ(t)E(φ) = ∫_{r_in}^{r} ρ r dr` where
/// `E = m_in − (b+½)m` and `Γ` is a smooth bump primitive with `Γ(b) = 1`,
/// `Γ(±½) = 0`; the angle is `s = 2π ∫_0^φ (m + Γ′(t)E) dφ`. Then
/// `ds dt = 2π ρ r dr dφ`, so the chart reverses orientation and scales
/// `ω_{v,σ}` by `2π`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransportChart {
    pub annulus: RoundAnnulus,
    pub element: GroupElement,
    pub lambda2: f64,
    pub b: f64,
}

impl TransportChart {
    pub fn new(annulus: RoundAnnulus, element: GroupElement, tol: f64) -> Result<Self, HyperError> {
        if element.map.a == Complex64::new(0.0, 0.0) {
            if annulus.center.norm() + annulus.r_outer >= 1.0 {
                return Err(HyperError::AnnulusOutsideDisk);
            }
            return Ok(TransportChart { annulus, element, lambda2: annulus.area(), b: 0.0 });
        }
        let lambda2 = lambda_scale(&element, &annulus, tol)?;
        let mut chart = TransportChart { annulus, element, lambda2, b: 0.0 };
        let inner = chart.angular_integral(TAU, |phi| chart.inner_marginal(phi));
        let b = inner - 0.5;
        if !(b > -0.5 && b < 0.5) {
            return Err(HyperError::Quadrature("central height"));
        }
        chart.b = b;
        // The angular density m + γE must stay positive.
        for k in 0..64 {
            let phi = k as f64 * TAU / 64.0;
            let (m, e) = (chart.marginal(phi), chart.excess(phi));
            let worst = [chart.gamma_max_below(), chart.gamma_max_above()]
                .iter()
                .map(|g| m - g * e.abs())
                .fold(f64::INFINITY, f64::min);
            if worst <= 0.0 {
                return Err(HyperError::DensityNotPositive { phi });
            }
        }
        Ok(chart)
    }

    fn gamma_max_below(&self) -> f64 {
        bump(0.5) / (self.b + 0.5)
    }

    fn gamma_max_above(&self) -> f64 {
        bump(0.5) / (0.5 - self.b)
    }

    /// Rotations about the origin have constant `|σ′|`, and the chart is
    /// the rescaled area chart.
    fn uniform(&self) -> bool {
        self.element.map.a == Complex64::new(0.0, 0.0)
    }

    pub fn central_radius(&self) -> f64 {
        self.annulus.central_radius()
    }

    /// Normalised density `λ⁻²|σ′(w)|²` at a point of the annulus.
    pub fn density(&self, w: Complex64) -> f64 {
        self.element.map.derivative(w).norm_sqr() / self.lambda2
    }

    /// `∂ρ/∂φ = −2ρ q′/q` with `q = |1 − āw|²` and `∂w/∂φ = i(w − c)`.
    fn density_dphi(&self, w: Complex64) -> f64 {
        let a = self.element.map.a;
        let q = (Complex64::new(1.0, 0.0) - a.conj() * w).norm_sqr();
        let dw = Complex64::new(0.0, 1.0) * (w - self.annulus.center);
        let dq = -2.0 * (a.conj() * dw * (Complex64::new(1.0, 0.0) - a * w.conj())).re;
        -2.0 * self.density(w) * dq / q
    }

    fn point(&self, phi: f64, r: f64) -> Complex64 {
        self.annulus.center + Complex64::from_polar(r, phi)
    }

    fn radial<F: Fn(Complex64) -> f64>(&self, phi: f64, r0: f64, r1: f64, f: F) -> f64 {
        legendre(RADIAL_NODES).integrate(r0, r1, |r| f(self.point(phi, r)) * r)
    }

    fn angular_integral<F: Fn(f64) -> f64>(&self, phi: f64, f: F) -> f64 {
        let gl = legendre(ANGULAR_NODES);
        let h = phi / ANGULAR_PANELS as f64;
        (0..ANGULAR_PANELS).map(|k| gl.integrate(k as f64 * h, (k + 1) as f64 * h, &f)).sum()
    }

    pub fn marginal(&self, phi: f64) -> f64 {
        self.radial(phi, self.annulus.r_inner, self.annulus.r_outer, |w| self.density(w))
    }

    pub fn inner_marginal(&self, phi: f64) -> f64 {
        self.radial(phi, self.annulus.r_inner, self.central_radius(), |w| self.density(w))
    }

    fn excess(&self, phi: f64) -> f64 {
        self.inner_marginal(phi) - (self.b + 0.5) * self.marginal(phi)
    }

    fn gamma(&self, t: f64) -> f64 {
        if t <= self.b {
            bump((t + 0.5) / (self.b + 0.5)) / (self.b + 0.5)
        } else {
            -bump((t - self.b) / (0.5 - self.b)) / (0.5 - self.b)
        }
    }

    fn gamma_primitive(&self, t: f64) -> f64 {
        if t <= self.b {
            bump_primitive((t + 0.5) / (self.b + 0.5))
        } else {
            1.0 - bump_primitive((t - self.b) / (0.5 - self.b))
        }
    }

    fn polar(&self, w: Complex64) -> (f64, f64) {
        let d = w - self.annulus.center;
        (d.arg().rem_euclid(TAU), d.norm())
    }

    /// Height coordinate of a point of the annulus.
    pub fn height(&self, w: Complex64) -> f64 {
        if self.uniform() {
            let (ri, ro) = (self.annulus.r_inner, self.annulus.r_outer);
            return ((w - self.annulus.center).norm_sqr() - ri * ri) / (ro * ro - ri * ri) - 0.5;
        }
        let (phi, r) = self.polar(w);
        let target = self.radial(phi, self.annulus.r_inner, r, |x| self.density(x));
        let (m, e) = (self.marginal(phi), self.excess(phi));
        self.solve_height(m, e, target)
    }

    fn solve_height(&self, m: f64, e: f64, target: f64) -> f64 {
        let p = |t: f64| (t + 0.5) * m + self.gamma_primitive(t) * e - target;
        let (mut lo, mut hi) = (-0.5, 0.5);
        let mut t = (target / m - 0.5).clamp(lo, hi);
        for _ in 0..200 {
            let v = p(t);
            if v == 0.0 {
                return t;
            }
            if v > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            if hi - lo <= 4.0 * f64::EPSILON {
                break;
            }
            let next = t - v / (m + self.gamma(t) * e);
            if next > lo && next < hi {
                if (next - t).abs() <= 1e-17 {
                    return next;
                }
                t = next;
            } else {
                t = 0.5 * (lo + hi);
            }
        }
        t
    }

    /// `(s, t)` coordinates of a point of the annulus.
    pub fn coords(&self, w: Complex64) -> (f64, f64) {
        let (phi, _) = self.polar(w);
        let t = self.height(w);
        let g = self.gamma(t);
        let s = TAU * self.angular_integral(phi, |x| self.marginal(x) + g * self.excess(x));
        (s, t)
    }

    /// Euclidean gradient of `t`, as `t_x + i t_y`.
    pub fn height_gradient(&self, w: Complex64) -> Complex64 {
        if self.uniform() {
            let (ri, ro) = (self.annulus.r_inner, self.annulus.r_outer);
            return (w - self.annulus.center) * (2.0 / (ro * ro - ri * ri));
        }
        let (phi, r) = self.polar(w);
        let t = self.height(w);
        let (m, e) = (self.marginal(phi), self.excess(phi));
        let p = m + self.gamma(t) * e;
        let (ri, rc, ro) = (self.annulus.r_inner, self.central_radius(), self.annulus.r_outer);
        let dm = self.radial(phi, ri, ro, |x| self.density_dphi(x));
        let dm_in = self.radial(phi, ri, rc, |x| self.density_dphi(x));
        let de = dm_in - (self.b + 0.5) * dm;
        let df = self.radial(phi, ri, r, |x| self.density_dphi(x));
        let t_r = self.density(w) * r / p;
        let t_phi = (df - (t + 0.5) * dm - self.gamma_primitive(t) * de) / p;
        Complex64::from_polar(1.0, phi) * Complex64::new(t_r, t_phi / r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperlift::{enumerate_group, schottky_pair, MobiusMap};
    use crate::raagwords::Word;
    use std::f64::consts::PI;

    fn annulus() -> RoundAnnulus {
        RoundAnnulus::new(Complex64::new(0.0, 0.0), 0.15, (0.08f64 - 0.0225).sqrt()).unwrap()
    }

    fn elements() -> Vec<GroupElement> {
        enumerate_group(&schottky_pair(0.8).unwrap(), 3)
    }

    /// Area between the image circles, from three-point circumcircles.
    fn image_area(e: &GroupElement, a: &RoundAnnulus) -> f64 {
        let (_, ro) = e.map.image_circle(a.center, a.r_outer);
        let (_, ri) = e.map.image_circle(a.center, a.r_inner);
        PI * (ro * ro - ri * ri)
    }

    #[test]
    fn primitive_is_consistent() {
        assert!((bump_primitive(1.0) - 1.0).abs() < 1e-14);
        for k in 1..20 {
            let x = k as f64 / 20.0;
            let fd = (bump_primitive(x + 1e-6) - bump_primitive(x - 1e-6)) / 2e-6;
            assert!((fd - bump(x)).abs() < 1e-7);
        }
    }

    #[test]
    fn lambda_matches_image_area() {
        let a = annulus();
        for e in elements() {
            let l = lambda_scale(&e, &a, 1e-12).unwrap();
            assert!((l - image_area(&e, &a)).abs() < 1e-10 * l.max(1e-3), "{}", e.word);
        }
        let id = GroupElement { map: MobiusMap::identity(), word: Word::empty() };
        assert!((lambda_scale(&id, &a, 1e-12).unwrap() - a.area()).abs() < 1e-13);
        let rot = GroupElement { map: MobiusMap::rotation(1.3), word: Word::empty() };
        assert!((lambda_scale(&rot, &a, 1e-12).unwrap() - a.area()).abs() < 1e-13);
    }

    #[test]
    fn identity_chart_is_the_area_chart() {
        let a = annulus();
        let id = GroupElement { map: MobiusMap::identity(), word: Word::empty() };
        let ch = TransportChart::new(a, id, 1e-12).unwrap();
        assert!(ch.b.abs() < 1e-13);
        let w = Complex64::new(0.1, 0.17);
        let t = ch.height(w);
        let expect = (w.norm_sqr() - a.r_inner.powi(2)) / (a.r_outer.powi(2) - a.r_inner.powi(2)) - 0.5;
        assert!((t - expect).abs() < 1e-13);
        let (s, _) = ch.coords(w);
        assert!((s - w.arg()).abs() < 1e-12);
    }

    #[test]
    fn mass_balance_and_product_form() {
        let a = annulus();
        for e in elements().into_iter().skip(1).step_by(7) {
            let ch = TransportChart::new(a, e, 1e-12).unwrap();
            let total = ch.angular_integral(TAU, |phi| ch.marginal(phi));
            assert!((total - 1.0).abs() < 1e-8);
            assert!(ch.b > -0.5 && ch.b < 0.5);
            // The central circle lands on t = b.
            for k in 0..8 {
                let w = ch.point(k as f64 * 0.7 + 0.1, ch.central_radius());
                assert!((ch.height(w) - ch.b).abs() < 1e-9);
            }
            // ds∧dt = −2π ρ dx∧dy.
            for k in 0..6 {
                let w = ch.point(0.3 + k as f64, a.r_inner + (0.1 + 0.15 * k as f64) * (a.r_outer - a.r_inner));
                let st = |z: Complex64| ch.coords(z);
                let h = 1e-6;
                let (sx1, tx1) = st(w + h);
                let (sx0, tx0) = st(w - h);
                let (sy1, ty1) = st(w + Complex64::new(0.0, h));
                let (sy0, ty0) = st(w - Complex64::new(0.0, h));
                let jac = ((sx1 - sx0) * (ty1 - ty0) - (tx1 - tx0) * (sy1 - sy0)) / (4.0 * h * h);
                assert!((jac + TAU * ch.density(w)).abs() < 1e-4 * TAU * ch.density(w), "{jac}");
                let g = ch.height_gradient(w);
                let gx = (tx1 - tx0) / (2.0 * h);
                let gy = (ty1 - ty0) / (2.0 * h);
                assert!((g - Complex64::new(gx, gy)).norm() < 1e-5 * g.norm());
            }
        }
    }
}
