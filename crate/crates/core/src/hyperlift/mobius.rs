use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::HyperError;
use crate::raagwords::{Letter, Word};

/// Disk automorphism `σ(z) = e^{iθ}(z − a)/(−āz + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap {
    pub theta: f64,
    pub a: Complex64,
    /// `[[e^{iθ}, −a e^{iθ}], [−ā, 1]]`, normalised so the (2,2) entry is 1.
    matrix: [Complex64; 4],
}

fn matrix_of(theta: f64, a: Complex64) -> [Complex64; 4] {
    let e = Complex64::from_polar(1.0, theta);
    [e, -a * e, -a.conj(), Complex64::new(1.0, 0.0)]
}

impl MobiusMap {
    pub fn new(theta: f64, a: Complex64) -> Result<Self, HyperError> {
        if !(a.norm() < 1.0) {
            return Err(HyperError::NotAutomorphism(a.norm()));
        }
        let theta = theta.rem_euclid(std::f64::consts::TAU);
        Ok(Self { theta, a, matrix: matrix_of(theta, a) })
    }

    pub fn identity() -> Self {
        Self::new(0.0, Complex64::new(0.0, 0.0)).unwrap()
    }

    pub fn rotation(theta: f64) -> Self {
        Self::new(theta, Complex64::new(0.0, 0.0)).unwrap()
    }

    /// Hyperbolic translation moving `0` to `p` along the diameter through it.
    pub fn translation(p: Complex64) -> Result<Self, HyperError> {
        Self::new(0.0, -p)
    }

    pub fn matrix(&self) -> [Complex64; 4] {
        self.matrix
    }

    fn from_matrix(m: [Complex64; 4]) -> Self {
        let p = m[0] / m[3];
        let q = m[1] / m[3];
        let theta = p.arg();
        let a = -q / p;
        Self { theta: theta.rem_euclid(std::f64::consts::TAU), a, matrix: matrix_of(theta, a) }
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        let m = &self.matrix;
        (m[0] * z + m[1]) / (m[2] * z + m[3])
    }

    /// `σ′(z) = (1 − |a|²) e^{iθ} / (−āz + 1)²`.
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let d = -self.a.conj() * z + 1.0;
        Complex64::from_polar(1.0 - self.a.norm_sqr(), self.theta) / (d * d)
    }

    pub fn eval(&self, z: Complex64) -> (Complex64, Complex64) {
        (self.apply(z), self.derivative(z))
    }

    pub fn inverse(&self) -> Self {
        let m = &self.matrix;
        Self::from_matrix([m[3], -m[1], -m[2], m[0]])
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MobiusMap) -> Self {
        let (x, y) = (&self.matrix, &other.matrix);
        Self::from_matrix([
            x[0] * y[0] + x[1] * y[2],
            x[0] * y[1] + x[1] * y[3],
            x[2] * y[0] + x[3] * y[2],
            x[2] * y[1] + x[3] * y[3],
        ])
    }

    /// Image of the circle `|z − c| = r` (which must avoid the pole).
    pub fn image_circle(&self, c: Complex64, r: f64) -> (Complex64, f64) {
        let pts: Vec<Complex64> = (0..3)
            .map(|k| self.apply(c + Complex64::from_polar(r, k as f64 * std::f64::consts::TAU / 3.0)))
            .collect();
        circumcircle(pts[0], pts[1], pts[2])
    }
}

pub(crate) fn circumcircle(p: Complex64, q: Complex64, r: Complex64) -> (Complex64, f64) {
    let (b, c) = (q - p, r - p);
    let d = 2.0 * (b.re * c.im - b.im * c.re);
    let (b2, c2) = (b.norm_sqr(), c.norm_sqr());
    let ux = (c.im * b2 - b.im * c2) / d;
    let uy = (b.re * c2 - c.re * b2) / d;
    let u = Complex64::new(ux, uy);
    (p + u, u.norm())
}

/// An enumerated element with its freely reduced word.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    pub map: MobiusMap,
    pub word: Word,
}

impl GroupElement {
    pub fn length(&self) -> usize {
        self.word.len()
    }

    /// Re-multiplies the word and compares at three points.
    pub fn check_word(&self, generators: &[MobiusMap], tol: f64) -> bool {
        let mut m = MobiusMap::identity();
        for l in self.word.letters() {
            let g = if l.inverse { generators[l.vertex].inverse() } else { generators[l.vertex] };
            m = m.compose(&g);
        }
        [0.0, 0.3, -0.4]
            .iter()
            .map(|&x| Complex64::new(x, 0.5 * x))
            .all(|z| (m.apply(z) - self.map.apply(z)).norm() <= tol)
    }
}

/// Rank-2 Schottky group: translations by `s` along the real and imaginary
/// axes. For `s > 1/√2` the four isometric circles (centres `±1/s`, `±i/s`,
/// radius `√(1/s² − 1)`) are disjoint and the disk `|z| < (1 − √(1 − s²))/s`
/// lies in the fundamental domain.
pub fn schottky_pair(s: f64) -> Result<[MobiusMap; 2], HyperError> {
    Ok([MobiusMap::new(0.0, Complex64::new(s, 0.0))?, MobiusMap::new(0.0, Complex64::new(0.0, s))?])
}

/// Side pairings of the regular hyperbolic octagon (genus 2): translations
/// with `cosh(ℓ/2) = 1 + √2` in the directions `e^{ikπ/4}`, `k = 0..3`.
pub fn octagon_generators() -> [MobiusMap; 4] {
    let c = 1.0 + 2f64.sqrt();
    let t = (c * c - 1.0).sqrt() / c;
    std::array::from_fn(|k| {
        MobiusMap::new(0.0, Complex64::from_polar(t, k as f64 * std::f64::consts::FRAC_PI_4)).unwrap()
    })
}

/// All freely reduced words of length `≤ max_len`, by length and then in
/// generator order (`g_0, g_0⁻¹, g_1, …`).
pub fn enumerate_group(generators: &[MobiusMap], max_len: usize) -> Vec<GroupElement> {
    let letters: Vec<Letter> =
        (0..generators.len()).flat_map(|v| [Letter::gen(v), Letter::inv(v)]).collect();
    let maps: Vec<MobiusMap> = letters
        .iter()
        .map(|l| if l.inverse { generators[l.vertex].inverse() } else { generators[l.vertex] })
        .collect();
    let mut out = vec![GroupElement { map: MobiusMap::identity(), word: Word::empty() }];
    let mut frontier = 0..1;
    for _ in 0..max_len {
        let start = out.len();
        for i in frontier.clone() {
            for (l, m) in letters.iter().zip(&maps) {
                let word = &out[i].word;
                if word.letters().last().is_some_and(|&last| last == l.inverted()) {
                    continue;
                }
                let mut w = word.0.clone();
                w.push(*l);
                let map = out[i].map.compose(m);
                out.push(GroupElement { map, word: Word(w) });
            }
        }
        frontier = start..out.len();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, TAU};

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    #[test]
    fn closed_form_examples() {
        let rot = MobiusMap::new(FRAC_PI_2, c(0.0, 0.0)).unwrap();
        let (w, d) = rot.eval(c(0.5, 0.0));
        assert!((w - c(0.0, 0.5)).norm() < 1e-15 && (d - c(0.0, 1.0)).norm() < 1e-15);
        let m = MobiusMap::new(0.0, c(0.5, 0.0)).unwrap();
        assert!(m.apply(c(0.5, 0.0)).norm() < 1e-15);
        assert!((m.derivative(c(0.0, 0.0)) - c(0.75, 0.0)).norm() < 1e-15);
        assert!(MobiusMap::new(0.0, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let m = MobiusMap::new(1.1, c(0.3, -0.6)).unwrap();
        for z in [c(0.1, 0.2), c(-0.5, 0.3), c(0.0, -0.7)] {
            let e = 1e-6;
            let fd = (m.apply(z + e) - m.apply(z - e)) / (2.0 * e);
            assert!((fd - m.derivative(z)).norm() < 1e-8);
        }
    }

    #[test]
    fn preserves_circle_and_composes() {
        let f = MobiusMap::new(0.4, c(0.5, 0.2)).unwrap();
        let g = MobiusMap::new(2.0, c(-0.1, 0.7)).unwrap();
        for k in 0..32 {
            let z = Complex64::from_polar(1.0, k as f64 * TAU / 32.0);
            assert!((f.apply(z).norm() - 1.0).abs() < 1e-12);
            assert!((f.compose(&g).apply(z) - f.apply(g.apply(z))).norm() < 1e-9);
            let w = z * 0.6;
            assert!((f.inverse().apply(f.apply(w)) - w).norm() < 1e-12);
            assert!(f.apply(w).norm() < 1.0);
        }
    }

    #[test]
    fn free_group_counts() {
        let gens = schottky_pair(0.8).unwrap();
        assert_eq!(enumerate_group(&gens, 0).len(), 1);
        assert_eq!(enumerate_group(&gens, 1).len(), 5);
        assert_eq!(enumerate_group(&gens, 3).len(), 53);
        let all = enumerate_group(&gens, 4);
        let expected: usize = 1 + (1..=4).map(|k| 4 * 3usize.pow(k - 1)).sum::<usize>();
        assert_eq!(all.len(), expected);
        let probe = c(0.1, 0.05);
        for (i, x) in all.iter().enumerate() {
            assert!(x.check_word(&gens, 1e-9));
            for y in &all[i + 1..] {
                assert!((x.map.apply(probe) - y.map.apply(probe)).norm() > 1e-9);
            }
        }
    }

    #[test]
    fn image_circle_of_translation() {
        let m = MobiusMap::translation(c(0.5, 0.0)).unwrap();
        let (ctr, r) = m.image_circle(c(0.0, 0.0), 0.5);
        // Real diameter [-0.5, 0.5] goes to [0, 0.8].
        assert!((ctr - c(0.4, 0.0)).norm() < 1e-12 && (r - 0.4).abs() < 1e-12);
    }
}
