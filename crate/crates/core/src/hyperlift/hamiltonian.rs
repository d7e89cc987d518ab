use std::f64::consts::{FRAC_PI_2, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chart::TransportChart;
use super::mobius::{GroupElement, MobiusMap};
use super::HyperError;
use crate::dynver::HamiltonianField;
use crate::graphs::VertexId;
use crate::twistcore::{make_profile, RoundAnnulus, TwistProfile};

/// `H_{v,σ}(z) = −(λ²/2π)·h_b(t(σ⁻¹z))` on `σ(A)`, zero elsewhere. The
/// factor `λ²/2π` undoes the chart's scaling of `σ*ω₀`, so the time-1 map
/// turns `σ(C_v)` once.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrectedHamiltonian {
    pub chart: TransportChart,
    pub profile: TwistProfile,
    pub outer: (Complex64, f64),
    pub inner: (Complex64, f64),
    inverse: MobiusMap,
}

pub fn corrected_hamiltonian(
    element: &GroupElement,
    annulus: &RoundAnnulus,
    tol: f64,
) -> Result<CorrectedHamiltonian, HyperError> {
    let chart = TransportChart::new(*annulus, element.clone(), tol)?;
    let profile = make_profile(0.5, chart.b).map_err(|_| HyperError::Quadrature("central height"))?;
    Ok(CorrectedHamiltonian {
        outer: element.map.image_circle(annulus.center, annulus.r_outer),
        inner: element.map.image_circle(annulus.center, annulus.r_inner),
        inverse: element.map.inverse(),
        chart,
        profile,
    })
}

impl CorrectedHamiltonian {
    pub fn element(&self) -> &GroupElement {
        &self.chart.element
    }

    pub fn lambda2(&self) -> f64 {
        self.chart.lambda2
    }

    fn scale(&self) -> f64 {
        self.chart.lambda2 / TAU
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.outer.0).norm() < self.outer.1 && (z - self.inner.0).norm() > self.inner.1
    }

    pub fn sup_abs(&self) -> f64 {
        self.scale() * self.profile.sup_abs_h()
    }

    pub fn diameter(&self) -> f64 {
        2.0 * self.outer.1
    }

    pub fn value(&self, z: Complex64) -> f64 {
        if !self.contains(z) {
            return 0.0;
        }
        -self.scale() * self.profile.h(self.chart.height(self.inverse.apply(z)))
    }

    /// `H_x + i H_y`.
    pub fn gradient(&self, z: Complex64) -> Complex64 {
        if !self.contains(z) {
            return Complex64::new(0.0, 0.0);
        }
        let w = self.inverse.apply(z);
        let dh = self.profile.dh(self.chart.height(w));
        if dh == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        // For real f(w) with w = g(z) holomorphic, ∇_z f = ∇_w f · conj(g′(z)).
        -self.chart.height_gradient(w) * self.inverse.derivative(z).conj() * (self.scale() * dh)
    }

    /// Image under `σ` of the point of `C_v` at polar angle `phi`.
    pub fn central_point(&self, phi: f64) -> Complex64 {
        let a = &self.chart.annulus;
        self.chart.element.map.apply(a.center + Complex64::from_polar(a.central_radius(), phi))
    }
}

/// `H_v`, equal to `H_{v,σ}` on each enumerated `σ(A)` and zero elsewhere.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AssembledHamiltonian {
    pub vertex: VertexId,
    pub annulus: RoundAnnulus,
    pub parts: Vec<CorrectedHamiltonian>,
}

/// Builds the per-element charts in parallel and checks that the translated
/// outer disks are pairwise disjoint.
pub fn assemble_hv(
    vertex: VertexId,
    elements: &[GroupElement],
    annulus: &RoundAnnulus,
    tol: f64,
) -> Result<AssembledHamiltonian, HyperError> {
    let parts = elements
        .par_iter()
        .map(|e| corrected_hamiltonian(e, annulus, tol))
        .collect::<Result<Vec<_>, _>>()?;
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            let (ci, ri) = parts[i].outer;
            let (cj, rj) = parts[j].outer;
            if (ci - cj).norm() <= ri + rj {
                return Err(HyperError::RegionOverlap(
                    parts[i].element().word.to_string(),
                    parts[j].element().word.to_string(),
                ));
            }
        }
    }
    Ok(AssembledHamiltonian { vertex, annulus: *annulus, parts })
}

impl AssembledHamiltonian {
    fn part_at(&self, z: Complex64) -> Option<&CorrectedHamiltonian> {
        if z.norm() >= 1.0 {
            return None;
        }
        self.parts.iter().find(|p| p.contains(z))
    }

    pub fn max_length(&self) -> usize {
        self.parts.iter().map(|p| p.element().length()).max().unwrap_or(0)
    }

    /// `max |H|` over `samples` points on each of a few circles in
    /// `1 − 10⁻³ ≤ |z| ≤ 1`.
    pub fn boundary_sup(&self, samples: usize) -> f64 {
        [1.0 - 1e-3, 1.0 - 5e-4, 1.0]
            .iter()
            .flat_map(|&r| (0..samples).map(move |k| Complex64::from_polar(r, k as f64 * TAU / samples as f64)))
            .map(|z| self.value(z).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `λ²` among elements of each word length.
    pub fn lambda_by_length(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.max_length() + 1];
        for p in &self.parts {
            let l = p.element().length();
            out[l] = f64::max(out[l], p.lambda2());
        }
        out
    }
}

impl HamiltonianField for AssembledHamiltonian {
    fn value(&self, z: Complex64) -> f64 {
        self.part_at(z).map_or(0.0, |p| p.value(z))
    }

    fn gradient(&self, z: Complex64) -> Complex64 {
        self.part_at(z).map_or(Complex64::new(0.0, 0.0), |p| p.gradient(z))
    }

    fn in_support(&self, z: Complex64) -> bool {
        self.part_at(z).is_some()
    }
}

/// `η_ε(z) = exp(−ε tan²(π|z|/2))` inside the unit disk, zero outside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mollifier {
    pub eps: f64,
}

impl Mollifier {
    pub fn new(eps: f64) -> Result<Self, HyperError> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(HyperError::BadEpsilon(eps));
        }
        Ok(Self { eps })
    }

    pub fn value(&self, z: Complex64) -> f64 {
        let x = z.norm();
        if x >= 1.0 {
            return 0.0;
        }
        let y = (FRAC_PI_2 * x).tan();
        (-self.eps * y * y).exp()
    }

    pub fn gradient(&self, z: Complex64) -> Complex64 {
        let x = z.norm();
        let eta = self.value(z);
        if eta == 0.0 || x == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let y = (FRAC_PI_2 * x).tan();
        // d/dx of −ε y² is −2εy·(1 + y²)·π/2.
        let d = -self.eps * y * (1.0 + y * y) * std::f64::consts::PI * eta;
        z * (d / x)
    }
}

/// `H_v^{(ε)} = η_ε H_v`.
#[derive(Debug, Clone)]
pub struct SmoothedHamiltonian {
    pub base: Arc<AssembledHamiltonian>,
    pub mollifier: Mollifier,
}

pub fn smooth_hv(base: Arc<AssembledHamiltonian>, eps: f64) -> Result<SmoothedHamiltonian, HyperError> {
    Ok(SmoothedHamiltonian { base, mollifier: Mollifier::new(eps)? })
}

impl HamiltonianField for SmoothedHamiltonian {
    fn value(&self, z: Complex64) -> f64 {
        match self.base.part_at(z) {
            Some(p) => self.mollifier.value(z) * p.value(z),
            None => 0.0,
        }
    }

    fn gradient(&self, z: Complex64) -> Complex64 {
        match self.base.part_at(z) {
            Some(p) => p.gradient(z) * self.mollifier.value(z) + self.mollifier.gradient(z) * p.value(z),
            None => Complex64::new(0.0, 0.0),
        }
    }

    fn in_support(&self, z: Complex64) -> bool {
        self.base.part_at(z).is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperlift::{default_annulus, enumerate_group, schottky_pair};
    use crate::twistcore::double_dehn_twist;

    fn parts(len: usize) -> Vec<GroupElement> {
        enumerate_group(&schottky_pair(0.8).unwrap(), len)
    }

    fn rk4_flow(p: &CorrectedHamiltonian, z: Complex64, time: f64, steps: usize) -> Complex64 {
        let field = |z: Complex64| {
            let g = p.gradient(z);
            Complex64::new(g.im, -g.re)
        };
        let h = time / steps as f64;
        let mut z = z;
        for _ in 0..steps {
            let k1 = field(z);
            let k2 = field(z + k1 * (h / 2.0));
            let k3 = field(z + k2 * (h / 2.0));
            let k4 = field(z + k3 * h);
            z += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        }
        z
    }

    #[test]
    fn identity_part_is_the_double_dehn_hamiltonian() {
        let a = default_annulus();
        let p = corrected_hamiltonian(&parts(0)[0], &a, 1e-12).unwrap();
        let f = double_dehn_twist(a, 1.0);
        for k in 0..20 {
            let z = Complex64::from_polar(0.15 + 0.0045 * k as f64, 0.4 * k as f64);
            assert!((p.value(z) - f.hamiltonian(z)).abs() < 1e-12);
            assert!((p.gradient(z) - f.hamiltonian_gradient(z)).norm() < 1e-9);
        }
    }

    #[test]
    fn translated_gradient_and_bound() {
        let a = default_annulus();
        for e in parts(2).iter().skip(1).step_by(3) {
            let p = corrected_hamiltonian(e, &a, 1e-12).unwrap();
            assert!(p.sup_abs() <= p.lambda2() * p.profile.sup_abs_h());
            for k in 0..10 {
                let z = p.central_point(0.6 * k as f64);
                let z = z + (z - p.outer.0) * (0.02 * (k as f64 - 5.0) / 5.0);
                assert!(p.value(z).abs() <= p.sup_abs() * (1.0 + 1e-12));
                let h = 1e-7 * p.outer.1;
                let gx = (p.value(z + h) - p.value(z - h)) / (2.0 * h);
                let gy = (p.value(z + Complex64::new(0.0, h)) - p.value(z - Complex64::new(0.0, h))) / (2.0 * h);
                let g = p.gradient(z);
                assert!((g - Complex64::new(gx, gy)).norm() <= 1e-5 * g.norm().max(1e-12), "{} {g}", e.word);
            }
        }
    }

    #[test]
    fn central_circle_turns_once() {
        let a = default_annulus();
        let e = &parts(2)[7];
        let p = corrected_hamiltonian(e, &a, 1e-12).unwrap();
        for k in 0..8 {
            let z = p.central_point(k as f64 * TAU / 8.0);
            let end = rk4_flow(&p, z, 1.0, 4000);
            assert!((end - z).norm() < 1e-4, "{}", (end - z).norm());
            let half = rk4_flow(&p, z, 0.5, 2000);
            assert!((half - z).norm() > 1e-2 * p.outer.1);
        }
    }

    #[test]
    fn assembled_support_and_overlap() {
        let a = default_annulus();
        let h0 = assemble_hv(0, &parts(0), &a, 1e-10).unwrap();
        assert_eq!(h0.parts.len(), 1);
        let z = Complex64::new(0.2, 0.0) * Complex64::from_polar(1.0, 0.3);
        assert!(h0.in_support(z));
        assert_eq!(h0.value(Complex64::new(0.5, 0.0)), 0.0);
        let h2 = assemble_hv(0, &parts(2), &a, 1e-10).unwrap();
        for k in 0..50 {
            let z = Complex64::from_polar(1.0 + 0.01 * (k % 3) as f64, k as f64);
            assert_eq!(h2.value(z), 0.0);
        }
        assert_eq!(h2.boundary_sup(256), 0.0);
        let lam = h2.lambda_by_length();
        assert!(lam[2] < lam[1] && lam[1] < lam[0]);
        let close = [MobiusMap::translation(Complex64::new(0.1, 0.0)).unwrap()];
        let err = assemble_hv(0, &enumerate_group(&close, 1), &a, 1e-10).unwrap_err();
        assert!(matches!(err, HyperError::RegionOverlap(..)));
    }

    #[test]
    fn mollifier_examples() {
        let m = Mollifier::new(0.3).unwrap();
        assert_eq!(m.value(Complex64::new(0.0, 0.0)), 1.0);
        assert!((m.value(Complex64::new(0.5, 0.0)) - (-0.3f64).exp()).abs() < 1e-15);
        assert_eq!(m.value(Complex64::new(0.6, 0.8)), 0.0);
        assert_eq!(m.value(Complex64::new(2.0, 0.0)), 0.0);
        assert!(Mollifier::new(0.0).is_err());
        let mut prev = 1.0;
        for k in 1..100 {
            let z = Complex64::from_polar(k as f64 / 100.0, 1.0);
            let v = m.value(z);
            assert!((0.0..=prev).contains(&v));
            assert!(Mollifier::new(0.1).unwrap().value(z) >= v);
            prev = v;
            let h = 1e-7;
            let g = m.gradient(z);
            let gx = (m.value(z + h) - m.value(z - h)) / (2.0 * h);
            assert!((g.re - gx).abs() < 1e-6 * (1.0 + g.re.abs()));
        }
        assert_eq!(m.gradient(Complex64::new(0.0, 0.0)), Complex64::new(0.0, 0.0));
        assert_eq!(m.gradient(Complex64::new(0.999999, 0.0)).norm(), 0.0);
    }
}
