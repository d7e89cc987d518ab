use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::flow::{flow_point, hamiltonian_vector, implicit_midpoint, FlowOptions, FlowResult};
use super::{DynError, HamiltonianField};
use crate::hyperlift::Mollifier;

/// `h(z₁, …, zₙ) = k(z₁) η(z₂) ⋯ η(zₙ)` on the polydisk with the form
/// `c·ω₀ ⊕ ω₀ ⊕ ⋯ ⊕ ω₀`.
#[derive(Clone)]
pub struct PolydiskField {
    pub k: Arc<dyn HamiltonianField>,
    pub n: usize,
    pub c: f64,
    pub eta: Mollifier,
}

pub fn polydisk_extend(k: Arc<dyn HamiltonianField>, n: usize, c: f64) -> Result<PolydiskField, DynError> {
    if n < 2 {
        return Err(DynError::BadArgument(format!("polydisk dimension must be at least 2, got {n}")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(DynError::BadArgument(format!("form weight must be positive, got {c}")));
    }
    Ok(PolydiskField { k, n, c, eta: Mollifier { eps: 1.0 } })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceReport {
    pub points: usize,
    pub time: f64,
    /// `max |h(z₁,0,…,0) − k(z₁)|`.
    pub value_gap: f64,
    /// `max |∂h/∂z₁ − dk|` on the slice.
    pub gradient_gap: f64,
    /// `max |∂h/∂z_j|`, `j ≥ 2`, on the slice.
    pub transverse_gradient: f64,
    /// Distance between the first coordinate of the `h`-flow and the `k`-flow.
    pub flow_gap: f64,
    /// Largest transverse coordinate reached by the `h`-flow.
    pub transverse_drift: f64,
}

impl PolydiskField {
    fn check(&self, z: &[Complex64]) -> Result<(), DynError> {
        if z.len() != self.n {
            return Err(DynError::BadArgument(format!("expected {} coordinates, got {}", self.n, z.len())));
        }
        Ok(())
    }

    pub fn value(&self, z: &[Complex64]) -> f64 {
        self.k.value(z[0]) * z[1..].iter().map(|&w| self.eta.value(w)).product::<f64>()
    }

    /// Partial gradients `∂h/∂x_j + i ∂h/∂y_j`.
    pub fn gradient(&self, z: &[Complex64]) -> Vec<Complex64> {
        let k = self.k.value(z[0]);
        let etas: Vec<f64> = z[1..].iter().map(|&w| self.eta.value(w)).collect();
        let others = |skip: usize| etas.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, e)| e).product::<f64>();
        let mut g = Vec::with_capacity(self.n);
        g.push(self.k.gradient(z[0]) * etas.iter().product::<f64>());
        for j in 1..self.n {
            g.push(self.eta.gradient(z[j]) * (k * others(j - 1)));
        }
        g
    }

    fn vector_field(&self, z: &[Complex64]) -> Vec<Complex64> {
        self.gradient(z)
            .into_iter()
            .enumerate()
            .map(|(j, g)| {
                let x = Complex64::new(g.im, -g.re);
                if j == 0 {
                    x / self.c
                } else {
                    x
                }
            })
            .collect()
    }

    pub fn flow(&self, z0: &[Complex64], time: f64, opts: &FlowOptions) -> Result<FlowResult, DynError> {
        self.check(z0)?;
        implicit_midpoint(|z| self.vector_field(z), |z| self.value(z), z0, time, opts)
    }

    /// Compares `h` with `k` on the slice `D × 0 × ⋯ × 0`, including their
    /// time-`T` flows (the `k`-flow runs for `T/c`).
    pub fn slice_check(&self, pts: &[Complex64], time: f64, opts: &FlowOptions) -> Result<SliceReport, DynError> {
        let rows = pts
            .par_iter()
            .map(|&z1| {
                let mut z = vec![Complex64::new(0.0, 0.0); self.n];
                z[0] = z1;
                let g = self.gradient(&z);
                let value_gap = (self.value(&z) - self.k.value(z1)).abs();
                let gradient_gap = (g[0] - self.k.gradient(z1)).norm();
                let transverse = g[1..].iter().map(|x| x.norm()).fold(0.0, f64::max);
                let fh = self.flow(&z, time, opts)?.final_point;
                let fk = flow_point(self.k.as_ref(), z1, time / self.c, opts)?;
                let drift = fh[1..].iter().map(|x| x.norm()).fold(0.0, f64::max);
                Ok([value_gap, gradient_gap, transverse, (fh[0] - fk).norm(), drift])
            })
            .collect::<Result<Vec<_>, DynError>>()?;
        let col = |i: usize| rows.iter().map(|r| r[i]).fold(0.0, f64::max);
        Ok(SliceReport {
            points: pts.len(),
            time,
            value_gap: col(0),
            gradient_gap: col(1),
            transverse_gradient: col(2),
            flow_gap: col(3),
            transverse_drift: col(4),
        })
    }

    /// `X_h` restricted to the first factor at a slice point.
    pub fn slice_vector(&self, z1: Complex64) -> Complex64 {
        hamiltonian_vector(self.k.as_ref(), z1) / self.c
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynver::TwistField;
    use crate::twistcore::{double_dehn_twist, RoundAnnulus};

    fn twist() -> Arc<dyn HamiltonianField> {
        let a = RoundAnnulus::around_circle(Complex64::new(0.1, -0.05), 0.4, 0.1).unwrap();
        Arc::new(TwistField(double_dehn_twist(a, 1.0)))
    }

    #[test]
    fn rejects_small_dimension() {
        assert!(polydisk_extend(twist(), 1, 1.0).is_err());
        assert!(polydisk_extend(twist(), 2, 0.0).is_err());
    }

    #[test]
    fn slice_matches_disk() {
        let pts: Vec<Complex64> =
            (0..12).map(|k| Complex64::new(0.1, -0.05) + Complex64::from_polar(0.37 + 0.005 * k as f64, k as f64)).collect();
        for n in [2, 3] {
            let h = polydisk_extend(twist(), n, 1.0).unwrap();
            let rep = h.slice_check(&pts, 2.0, &FlowOptions::with_steps(500)).unwrap();
            assert_eq!(rep.value_gap, 0.0);
            assert!(rep.gradient_gap <= 1e-9 && rep.transverse_gradient <= 1e-9, "{rep:?}");
            assert!(rep.flow_gap <= 1e-12 && rep.transverse_drift == 0.0, "{rep:?}");
        }
    }

    #[test]
    fn transverse_partials_off_the_slice() {
        let h = polydisk_extend(twist(), 2, 1.0).unwrap();
        let z = [Complex64::new(0.5, -0.05), Complex64::new(0.3, 0.2)];
        let g = h.gradient(&z);
        let e = 1e-6;
        let dx = (h.value(&[z[0], z[1] + e]) - h.value(&[z[0], z[1] - e])) / (2.0 * e);
        let dy = (h.value(&[z[0], z[1] + Complex64::new(0.0, e)]) - h.value(&[z[0], z[1] - Complex64::new(0.0, e)])) / (2.0 * e);
        assert!((g[1] - Complex64::new(dx, dy)).norm() < 1e-6 * g[1].norm().max(1e-3));
    }
}
