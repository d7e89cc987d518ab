use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{DynError, HamiltonianField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowOptions {
    /// Number of steps; `None` uses a step of `10⁻³·T`.
    pub steps: Option<usize>,
    /// Fixed-point tolerance of each implicit-midpoint step.
    pub tol: f64,
    pub max_iter: usize,
    /// How many times a step may be halved after a failed solve.
    pub max_halvings: usize,
    /// Keep every `k`-th point of the trajectory (0 keeps none).
    pub record_every: usize,
    pub scheme: Scheme,
}

/// `Midpoint` is second order; `TripleJump` composes three midpoint steps
/// of lengths `γ₁h, γ₂h, γ₁h` into a fourth-order symmetric step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Scheme {
    #[default]
    Midpoint,
    TripleJump,
}

impl Scheme {
    fn fractions(self) -> &'static [f64] {
        const CBRT2: f64 = 1.259_921_049_894_873_2;
        const G1: f64 = 1.0 / (2.0 - CBRT2);
        const G2: f64 = -CBRT2 / (2.0 - CBRT2);
        match self {
            Scheme::Midpoint => &[1.0],
            Scheme::TripleJump => &[G1, G2, G1],
        }
    }
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self { steps: None, tol: 1e-12, max_iter: 50, max_halvings: 8, record_every: 0, scheme: Scheme::Midpoint }
    }
}

impl FlowOptions {
    pub fn with_steps(steps: usize) -> Self {
        Self { steps: Some(steps), ..Default::default() }
    }

    pub fn fourth_order(steps: usize) -> Self {
        Self { steps: Some(steps), scheme: Scheme::TripleJump, ..Default::default() }
    }

    fn step_count(&self, time: f64) -> usize {
        self.steps.unwrap_or_else(|| (time.abs() / (1e-3 * time.abs().max(1e-300))).round() as usize).max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowResult {
    pub trajectory: Vec<Vec<Complex64>>,
    pub final_point: Vec<Complex64>,
    /// `max |H(z_k) − H(z_0)|` along the run.
    pub energy_drift: f64,
    pub steps: usize,
    pub halvings: usize,
}

/// Implicit midpoint for `ż = f(z)` on `ℂⁿ`, solved by fixed-point
/// iteration. A step whose iteration does not settle is split in two.
pub fn implicit_midpoint<F, E>(
    rhs: F,
    energy: E,
    z0: &[Complex64],
    time: f64,
    opts: &FlowOptions,
) -> Result<FlowResult, DynError>
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
    E: Fn(&[Complex64]) -> f64,
{
    let n = opts.step_count(time);
    let h = time / n as f64;
    let e0 = energy(z0);
    let mut z = z0.to_vec();
    let mut drift: f64 = 0.0;
    let mut trajectory = Vec::new();
    let mut halvings = 0;
    if opts.record_every > 0 {
        trajectory.push(z.clone());
    }
    let mut mid = vec![Complex64::new(0.0, 0.0); z.len()];
    for k in 0..n {
        let mut stack: Vec<(f64, usize)> = opts.scheme.fractions().iter().rev().map(|g| (g * h, 0)).collect();
        while let Some((dt, depth)) = stack.pop() {
            match midpoint_step(&rhs, &z, dt, opts, &mut mid) {
                Some(next) => z = next,
                None if depth < opts.max_halvings => {
                    halvings += 1;
                    stack.push((dt / 2.0, depth + 1));
                    stack.push((dt / 2.0, depth + 1));
                }
                None => return Err(DynError::Divergence { time: k as f64 * h }),
            }
        }
        if z.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
            return Err(DynError::Divergence { time: (k + 1) as f64 * h });
        }
        drift = drift.max((energy(&z) - e0).abs());
        if opts.record_every > 0 && (k + 1) % opts.record_every == 0 {
            trajectory.push(z.clone());
        }
    }
    Ok(FlowResult { trajectory, final_point: z, energy_drift: drift, steps: n, halvings })
}

fn midpoint_step<F: Fn(&[Complex64]) -> Vec<Complex64>>(
    rhs: &F,
    z: &[Complex64],
    dt: f64,
    opts: &FlowOptions,
    mid: &mut [Complex64],
) -> Option<Vec<Complex64>> {
    let mut k = rhs(z);
    for _ in 0..opts.max_iter {
        for i in 0..z.len() {
            mid[i] = z[i] + k[i] * (0.5 * dt);
        }
        let next = rhs(mid);
        let change = next.iter().zip(&k).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) * dt.abs();
        k = next;
        if change <= opts.tol {
            return Some(z.iter().zip(&k).map(|(a, b)| a + b * dt).collect());
        }
    }
    None
}

/// `X_H = (H_y, −H_x)` as a complex number.
pub fn hamiltonian_vector(field: &(impl HamiltonianField + ?Sized), z: Complex64) -> Complex64 {
    let g = field.gradient(z);
    Complex64::new(g.im, -g.re)
}

/// Time-`T` flow of a plane hamiltonian. Points where the field vanishes
/// identically nearby are returned unchanged.
pub fn flow_map<F: HamiltonianField + ?Sized>(
    field: &F,
    z0: Complex64,
    time: f64,
    opts: &FlowOptions,
) -> Result<FlowResult, DynError> {
    if time == 0.0 || (!field.in_support(z0) && field.gradient(z0) == Complex64::new(0.0, 0.0)) {
        return Ok(FlowResult {
            trajectory: if opts.record_every > 0 { vec![vec![z0]] } else { Vec::new() },
            final_point: vec![z0],
            energy_drift: 0.0,
            steps: 0,
            halvings: 0,
        });
    }
    implicit_midpoint(
        |z: &[Complex64]| vec![hamiltonian_vector(field, z[0])],
        |z: &[Complex64]| field.value(z[0]),
        &[z0],
        time,
        opts,
    )
}

pub fn flow_point<F: HamiltonianField + ?Sized>(
    field: &F,
    z0: Complex64,
    time: f64,
    opts: &FlowOptions,
) -> Result<Complex64, DynError> {
    Ok(flow_map(field, z0, time, opts)?.final_point[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynver::{RotationField, TwistField, ZeroField};
    use crate::twistcore::{double_dehn_twist, PlaneMap, RoundAnnulus};
    use std::f64::consts::TAU;

    #[test]
    fn zero_field_is_identity() {
        let r = flow_map(&ZeroField, Complex64::new(0.3, 0.1), 1.0, &FlowOptions::default()).unwrap();
        assert_eq!(r.final_point[0], Complex64::new(0.3, 0.1));
        assert_eq!(r.energy_drift, 0.0);
    }

    #[test]
    fn quarter_turn_clockwise() {
        // H = π(x² + y²).
        let f = RotationField { center: Complex64::new(0.0, 0.0), speed: TAU };
        let r = flow_map(&f, Complex64::new(1.0, 0.0), 0.25, &FlowOptions::default()).unwrap();
        assert!((r.final_point[0] - Complex64::new(0.0, -1.0)).norm() < 1e-6);
        assert!(r.energy_drift < 1e-8);
        assert_eq!(r.steps, 1000);
    }

    #[test]
    fn integrated_twist_matches_closed_form() {
        let a = RoundAnnulus::around_circle(Complex64::new(0.1, 0.0), 0.5, 0.08).unwrap();
        let tw = double_dehn_twist(a, 1.0);
        let field = TwistField(tw);
        for k in 0..12 {
            let r = a.r_inner + (k as f64 + 0.5) / 12.0 * (a.r_outer - a.r_inner);
            let z = a.center + Complex64::from_polar(r, 0.5 * k as f64);
            let got = flow_point(&field, z, 1.0, &FlowOptions::with_steps(20000)).unwrap();
            assert!((got - tw.apply(z)).norm() < 1e-5, "{}", (got - tw.apply(z)).norm());
            let fast = flow_point(&field, z, 1.0, &FlowOptions::fourth_order(2000)).unwrap();
            assert!((fast - tw.apply(z)).norm() < 1e-6, "{}", (fast - tw.apply(z)).norm());
        }
    }

    #[test]
    fn failed_solves_split_the_step() {
        let f = RotationField { center: Complex64::new(0.0, 0.0), speed: 2000.0 };
        let opts = FlowOptions { steps: Some(1), max_halvings: 20, ..Default::default() };
        let r = flow_map(&f, Complex64::new(1.0, 0.0), 0.01, &opts).unwrap();
        assert!(r.halvings > 0);
        let strict = FlowOptions { steps: Some(1), max_halvings: 0, ..Default::default() };
        assert!(matches!(flow_map(&f, Complex64::new(1.0, 0.0), 0.01, &strict), Err(DynError::Divergence { .. })));
    }
}
