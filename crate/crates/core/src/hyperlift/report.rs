use std::f64::consts::TAU;
use std::fmt::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chart::lambda_scale;
use super::hamiltonian::{AssembledHamiltonian, CorrectedHamiltonian, Mollifier};
use super::mobius::{enumerate_group, MobiusMap};
use super::HyperError;

/// One row per word length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthRow {
    pub word_length: usize,
    pub max_lambda2: f64,
    pub sup_h: f64,
    pub max_diameter: f64,
    /// Smallest `1 − |z|` over the sampled points of the translates.
    pub min_r: f64,
    /// Largest sampled `|∂ⁿH|` for `n = 1, 2, 3`.
    pub sup_derivative: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub rows: Vec<LengthRow>,
    pub lambda_decreasing: bool,
    /// Growth exponents `s_n` fitted to `sup|∂ⁿH| ~ r^{−s_n}`.
    pub slopes: [f64; 3],
    pub slope_ok: [bool; 3],
    pub first_derivative_vanishes: bool,
    pub second_derivative_bounded: bool,
    /// `λ²_max(L+1) · sup|ĥ|/2π`, a bound for the dropped translates.
    pub tail_bound: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct ReportOptions {
    pub angles: usize,
    pub heights: usize,
    pub step_factor: f64,
    pub tol: f64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self { angles: 12, heights: 3, step_factor: 1e-3, tol: 1e-10 }
    }
}

/// Finite-difference `n`-th derivatives of `f` at `z`: the largest absolute
/// pure or mixed partial, central stencils with step `h`.
fn max_partials<F: Fn(Complex64) -> f64>(f: &F, z: Complex64, h: f64) -> [f64; 3] {
    let at = |i: i32, j: i32| f(z + Complex64::new(i as f64 * h, j as f64 * h));
    let c = at(0, 0);
    let d1 = [(at(1, 0) - at(-1, 0)) / (2.0 * h), (at(0, 1) - at(0, -1)) / (2.0 * h)];
    let d2 = [
        (at(1, 0) - 2.0 * c + at(-1, 0)) / (h * h),
        (at(0, 1) - 2.0 * c + at(0, -1)) / (h * h),
        (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h * h),
    ];
    let third = |a: &dyn Fn(i32) -> f64| (a(2) - 2.0 * a(1) + 2.0 * a(-1) - a(-2)) / (2.0 * h * h * h);
    let xxy = |i: i32, j: i32| at(i, j);
    let d3 = [
        third(&|k| at(k, 0)),
        third(&|k| at(0, k)),
        // ∂x²∂y and ∂x∂y².
        ((xxy(1, 1) - 2.0 * xxy(0, 1) + xxy(-1, 1)) - (xxy(1, -1) - 2.0 * xxy(0, -1) + xxy(-1, -1)))
            / (2.0 * h * h * h),
        ((xxy(1, 1) - 2.0 * xxy(1, 0) + xxy(1, -1)) - (xxy(-1, 1) - 2.0 * xxy(-1, 0) + xxy(-1, -1)))
            / (2.0 * h * h * h),
    ];
    let m = |v: &[f64]| v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    [m(&d1), m(&d2), m(&d3)]
}

/// Sample points of `σ(A)` inside the active part of the profile.
fn samples(part: &CorrectedHamiltonian, opts: &ReportOptions) -> Vec<Complex64> {
    let a = &part.chart.annulus;
    let map = &part.chart.element.map;
    let mut out = Vec::new();
    for j in 0..opts.heights {
        let f = (j as f64 + 1.0) / (opts.heights as f64 + 1.0);
        let r = a.r_inner + f * (a.r_outer - a.r_inner);
        for k in 0..opts.angles {
            let phi = (k as f64 + 0.5) * std::f64::consts::TAU / opts.angles as f64;
            out.push(map.apply(a.center + Complex64::from_polar(r, phi)));
        }
    }
    out
}

/// Least-squares slope of `y` against `x`.
fn regression_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Decay of `λ²`, derivative growth toward the boundary circle, and the
/// truncation tail for an assembled hamiltonian.
pub fn analytic_report(
    hv: &AssembledHamiltonian,
    generators: &[MobiusMap],
    opts: &ReportOptions,
) -> Result<EstimateReport, HyperError> {
    let max_len = hv.max_length();
    if max_len < 4 {
        return Err(HyperError::InsufficientData(max_len));
    }
    // Per translate: (length, r, [sup |∂ⁿH|]).
    let per_part: Vec<(usize, f64, [f64; 3])> = hv
        .parts
        .par_iter()
        .map(|p| {
            let mut d = [0.0f64; 3];
            let mut r_min = f64::INFINITY;
            for z in samples(p, opts) {
                let r = 1.0 - z.norm();
                r_min = r_min.min(r);
                let v = max_partials(&|x| p.value(x), z, opts.step_factor * r);
                for n in 0..3 {
                    d[n] = d[n].max(v[n]);
                }
            }
            (p.element().length(), r_min, d)
        })
        .collect();

    let mut rows: Vec<LengthRow> = (0..=max_len)
        .map(|l| LengthRow {
            word_length: l,
            max_lambda2: 0.0,
            sup_h: 0.0,
            max_diameter: 0.0,
            min_r: f64::INFINITY,
            sup_derivative: [0.0; 3],
        })
        .collect();
    for (p, &(l, r, d)) in hv.parts.iter().zip(&per_part) {
        let row = &mut rows[l];
        row.max_lambda2 = row.max_lambda2.max(p.lambda2());
        row.sup_h = row.sup_h.max(p.sup_abs());
        row.max_diameter = row.max_diameter.max(p.diameter());
        row.min_r = row.min_r.min(r);
        for n in 0..3 {
            row.sup_derivative[n] = row.sup_derivative[n].max(d[n]);
        }
    }

    let lambda_decreasing = rows[1..].windows(2).skip(1).all(|w| w[1].max_lambda2 < w[0].max_lambda2);

    // Translates only: the untranslated annulus sits far from the circle.
    let fit: Vec<&(usize, f64, [f64; 3])> = per_part.iter().filter(|x| x.0 >= 1).collect();
    let xs: Vec<f64> = fit.iter().map(|x| x.1.ln()).collect();
    let mut slopes = [0.0; 3];
    for n in 0..3 {
        let ys: Vec<f64> = fit.iter().map(|x| x.2[n].max(1e-300).ln()).collect();
        slopes[n] = -regression_slope(&xs, &ys);
    }
    let slope_ok = std::array::from_fn(|n| slopes[n] <= (n as f64 - 1.0).max(0.0) + 0.3);
    let first_derivative_vanishes =
        rows[1..].windows(2).all(|w| w[1].sup_derivative[0] < w[0].sup_derivative[0]);
    let d2_head = rows[..=1].iter().map(|r| r.sup_derivative[1]).fold(0.0, f64::max);
    let second_derivative_bounded = rows.iter().all(|r| r.sup_derivative[1] <= 10.0 * d2_head);

    let next = enumerate_group(generators, max_len + 1);
    let tail_lambda = next
        .par_iter()
        .filter(|e| e.length() == max_len + 1)
        .map(|e| lambda_scale(e, &hv.annulus, opts.tol))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let sup_profile = hv.parts.first().map_or(0.0, |p| p.profile.sup_abs_h());
    let tail_bound = tail_lambda * sup_profile / std::f64::consts::TAU;

    Ok(EstimateReport {
        rows,
        lambda_decreasing,
        slopes,
        slope_ok,
        first_derivative_vanishes,
        second_derivative_bounded,
        tail_bound,
    })
}

impl EstimateReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "word_length,max_lambda2,sup_H,max_diameter,min_r,sup_d1,sup_d2,sup_d3,slope_1,slope_2,slope_3\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{},{},{}",
                r.word_length,
                r.max_lambda2,
                r.sup_h,
                r.max_diameter,
                r.min_r,
                r.sup_derivative[0],
                r.sup_derivative[1],
                r.sup_derivative[2],
                self.slopes[0],
                self.slopes[1],
                self.slopes[2]
            );
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingRow {
    pub eps: f64,
    pub eta_at_zero: f64,
    /// `max η_ε` over sampled points with `|z| ≥ 1`.
    pub eta_outside: f64,
    /// `max |η_ε H − H|` over sampled support points with `|z| ≤ radius`.
    pub sup_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothingStudy {
    pub radius: f64,
    pub points: usize,
    pub rows: Vec<SmoothingRow>,
    /// `sup_gap` strictly decreases along the given order of `eps`.
    pub decreasing: bool,
}

/// Compares `H_v^{(ε)}` with `H_v` on a polar grid of every translate
/// (`radial × angular` points each), restricted to `|z| ≤ radius`.
pub fn smoothing_study(
    hv: &AssembledHamiltonian,
    eps: &[f64],
    radius: f64,
    radial: usize,
    angular: usize,
) -> Result<SmoothingStudy, HyperError> {
    let mollifiers = eps.iter().map(|&e| Mollifier::new(e)).collect::<Result<Vec<_>, _>>()?;
    let samples: Vec<(Complex64, f64)> = hv
        .parts
        .par_iter()
        .flat_map_iter(|p| {
            let a = p.chart.annulus;
            (0..radial).flat_map(move |i| {
                let r = a.r_inner + (i as f64 + 0.5) / radial as f64 * (a.r_outer - a.r_inner);
                (0..angular).map(move |k| {
                    let z = p.element().map.apply(a.center + Complex64::from_polar(r, k as f64 * TAU / angular as f64));
                    (z, p.value(z))
                })
            })
        })
        .filter(|(z, _)| z.norm() <= radius)
        .collect();
    let outside: Vec<Complex64> = (0..angular).map(|k| Complex64::from_polar(1.0 + 0.01 * (k % 3) as f64, k as f64)).collect();
    let rows: Vec<SmoothingRow> = mollifiers
        .iter()
        .map(|m| SmoothingRow {
            eps: m.eps,
            eta_at_zero: m.value(Complex64::new(0.0, 0.0)),
            eta_outside: outside.iter().map(|&z| m.value(z)).fold(0.0, f64::max),
            sup_gap: samples.iter().map(|&(z, h)| ((m.value(z) - 1.0) * h).abs()).fold(0.0, f64::max),
        })
        .collect();
    let decreasing = rows.windows(2).all(|w| w[1].sup_gap < w[0].sup_gap);
    Ok(SmoothingStudy { radius, points: samples.len(), rows, decreasing })
}

impl SmoothingStudy {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("eps,eta_at_zero,eta_outside,sup_gap\n");
        for r in &self.rows {
            let _ = writeln!(s, "{:e},{},{},{:e}", r.eps, r.eta_at_zero, r.eta_outside, r.sup_gap);
        }
        s
    }
}

/// Translated annuli in the unit disk.
pub fn translates_svg(hv: &AssembledHamiltonian) -> String {
    let size = 800.0;
    let map = |z: Complex64| ((z.re + 1.0) * size / 2.0, (1.0 - z.im) * size / 2.0);
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\">\n"
    );
    let _ = writeln!(
        s,
        "<circle cx=\"{c}\" cy=\"{c}\" r=\"{c}\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>",
        c = size / 2.0
    );
    for p in &hv.parts {
        for (c, r) in [p.outer, p.inner] {
            let (x, y) = map(c);
            let _ = writeln!(
                s,
                "<circle cx=\"{x:.4}\" cy=\"{y:.4}\" r=\"{:.4}\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"0.5\"/>",
                r * size / 2.0
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperlift::{assemble_hv, default_annulus, schottky_pair, QUAD_TOL};

    #[test]
    fn regression_on_a_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        assert!((regression_slope(&x, &y) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn partials_of_a_cubic() {
        let f = |z: Complex64| z.re.powi(3) + 2.0 * z.re * z.im;
        let d = max_partials(&f, Complex64::new(0.5, 0.25), 1e-3);
        // ∂x = 3x² + 2y = 1.25, ∂y = 2x = 1; ∂xx = 6x = 3, ∂xy = 2; ∂xxx = 6.
        assert!((d[0] - 1.25).abs() < 1e-5 && (d[1] - 3.0).abs() < 1e-5 && (d[2] - 6.0).abs() < 1e-4);
    }

    #[test]
    fn depth_four_report() {
        let gens = schottky_pair(0.8).unwrap();
        let hv = assemble_hv(0, &enumerate_group(&gens, 4), &default_annulus(), QUAD_TOL).unwrap();
        let rep = analytic_report(&hv, &gens, &ReportOptions::default()).unwrap();
        assert!(rep.lambda_decreasing && rep.slope_ok.iter().all(|&x| x));
        assert!(rep.first_derivative_vanishes && rep.second_derivative_bounded);
        assert!(rep.tail_bound > 0.0 && rep.tail_bound < rep.rows[4].sup_h);
        assert_eq!(rep.to_csv().lines().count(), 6);
        let shallow = assemble_hv(0, &enumerate_group(&gens, 2), &default_annulus(), QUAD_TOL).unwrap();
        assert!(matches!(
            analytic_report(&shallow, &gens, &ReportOptions::default()),
            Err(HyperError::InsufficientData(2))
        ));
        assert!(translates_svg(&hv).contains("<circle"));
    }

    #[test]
    fn smoothing_gap_shrinks_with_eps() {
        let a = default_annulus();
        let elements = enumerate_group(&schottky_pair(0.8).unwrap(), 2);
        let hv = assemble_hv(0, &elements, &a, QUAD_TOL).unwrap();
        let st = smoothing_study(&hv, &[1e-1, 1e-2, 1e-3], 0.9, 4, 16).unwrap();
        assert!(st.decreasing, "{st:?}");
        assert!(st.rows.iter().all(|r| r.eta_at_zero == 1.0 && r.eta_outside == 0.0));
        assert!(smoothing_study(&hv, &[0.0], 0.9, 2, 2).is_err());
    }
}
