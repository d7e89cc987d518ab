//! Disks, crossing circles, thin annuli and punctures realizing a planar
//! graph as the intersection pattern of curves in the unit disk.

use std::collections::VecDeque;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use rayon::prelude::*;

use super::annulus::RoundAnnulus;
use super::packing::{tangency_packing, Circle, PackingOptions, PackingStats};
use super::TwistError;
use crate::graphs::{incidence_nerve, PlanarEmbedding, SimplicialGraph, VertexId};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigOptions {
    /// Radius of the disk the packing is scaled into.
    pub fit_radius: f64,
    pub max_inflation: f64,
    /// Flood-fill grid resolution on `[−1, 1]²`.
    pub grid: usize,
    pub packing_tolerance: f64,
}

impl Default for ConfigOptions {
    fn default() -> Self {
        Self { fit_radius: 0.7, max_inflation: 0.2, grid: 1024, packing_tolerance: 1e-10 }
    }
}

/// Engineering constants chosen during the build.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub inflation: f64,
    /// Non-adjacent circles keep at least this fraction of their tangency gap.
    pub gap_fraction: f64,
    pub triple_fraction: f64,
    pub widths: Vec<f64>,
    pub packing: PackingStats,
    pub grid: usize,
    pub complementary_components: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub graph: SimplicialGraph,
    /// `C_v`; the disk `B(v)` is the region it bounds.
    pub circles: Vec<Circle>,
    /// `A(v)`, whose area-middle circle is `C_v`.
    pub annuli: Vec<RoundAnnulus>,
    /// Two points on each `C_v` off all other annuli.
    pub p1: Vec<[Complex64; 2]>,
    /// Two points in each complementary component of the annuli.
    pub p2: Vec<[Complex64; 2]>,
    pub q: Complex64,
    pub basepoint: Complex64,
    pub provenance: Provenance,
}

const GAP_FRACTION: f64 = 0.5;
const TRIPLE_FRACTION: f64 = 0.2;

fn circle_intersections(a: &Circle, b: &Circle) -> Option<[Complex64; 2]> {
    let d = (b.center - a.center).norm();
    if d >= a.radius + b.radius || d <= (a.radius - b.radius).abs() {
        return None;
    }
    let x = (d * d + a.radius * a.radius - b.radius * b.radius) / (2.0 * d);
    let y = (a.radius * a.radius - x * x).max(0.0).sqrt();
    let e = (b.center - a.center) / d;
    let base = a.center + e * x;
    let perp = e * Complex64::new(0.0, 1.0);
    Some([base + perp * y, base - perp * y])
}

fn inflated(circles: &[Circle], delta: f64) -> Vec<Circle> {
    circles.iter().map(|c| Circle { center: c.center, radius: c.radius * (1.0 + delta) }).collect()
}

fn triangles(g: &SimplicialGraph) -> Vec<[VertexId; 3]> {
    let mut out = Vec::new();
    for (u, v) in g.edges() {
        for w in g.neighbors(v) {
            if w > v && g.has_edge(u, w) {
                out.push([u, v, w]);
            }
        }
    }
    out
}

/// Smallest distance by which a pairwise crossing point of the triangle
/// stays outside the third disk (negative if inside). For tangent circles
/// the tangency point is used.
fn triple_margin(c: &[Circle], t: [VertexId; 3]) -> f64 {
    let mut m = f64::INFINITY;
    for k in 0..3 {
        let (a, b, w) = (t[k], t[(k + 1) % 3], t[(k + 2) % 3]);
        let points = match circle_intersections(&c[a], &c[b]) {
            Some(p) => p.to_vec(),
            None => {
                let e = (c[b].center - c[a].center).unscale((c[b].center - c[a].center).norm());
                vec![c[a].center + e * c[a].radius]
            }
        };
        for p in points {
            m = m.min((p - c[w].center).norm() - c[w].radius);
        }
    }
    m
}

struct Geometry<'a> {
    g: &'a SimplicialGraph,
    base: &'a [Circle],
    tris: Vec<[VertexId; 3]>,
    base_gap: Vec<((VertexId, VertexId), f64)>,
    base_triple: Vec<f64>,
}

impl Geometry<'_> {
    fn feasible(&self, delta: f64) -> bool {
        let c = inflated(self.base, delta);
        for (u, v) in self.g.edges() {
            let d = (c[u].center - c[v].center).norm();
            if !(d < c[u].radius + c[v].radius && d > (c[u].radius - c[v].radius).abs()) {
                return false;
            }
        }
        for &((u, v), gap0) in &self.base_gap {
            let d = (c[u].center - c[v].center).norm();
            if d - c[u].radius - c[v].radius < GAP_FRACTION * gap0 {
                return false;
            }
        }
        self.tris
            .iter()
            .zip(&self.base_triple)
            .all(|(&t, &m0)| triple_margin(&c, t) >= TRIPLE_FRACTION * m0)
    }
}

/// Largest inflation `δ ≤ max` keeping the crossing, gap and triple-point
/// constraints, by bisection.
fn choose_inflation(g: &SimplicialGraph, base: &[Circle], max: f64) -> Result<f64, TwistError> {
    let n = g.vertex_count();
    let mut base_gap = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if !g.has_edge(u, v) {
                let d = (base[u].center - base[v].center).norm();
                base_gap.push(((u, v), d - base[u].radius - base[v].radius));
            }
        }
    }
    let tris = triangles(g);
    let base_triple = tris.iter().map(|&t| triple_margin(base, t)).collect();
    let geo = Geometry { g, base, tris, base_gap, base_triple };
    if geo.feasible(max) {
        return Ok(max);
    }
    let (mut lo, mut hi) = (0.0, max);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if geo.feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if g.edge_count() > 0 && lo < 1e-9 {
        return Err(TwistError::NoInflation);
    }
    Ok(lo)
}

fn annulus_widths(g: &SimplicialGraph, c: &[Circle]) -> Vec<f64> {
    let n = g.vertex_count();
    let tris = triangles(g);
    let mut clear: Vec<f64> = c.iter().map(|x| 0.5 * x.radius).collect();
    let mut crossings: Vec<Vec<(VertexId, Complex64)>> = vec![Vec::new(); n];
    for u in 0..n {
        for v in u + 1..n {
            let d = (c[u].center - c[v].center).norm();
            let (ru, rv) = (c[u].radius, c[v].radius);
            let bound = if g.has_edge(u, v) {
                let [p, q] = circle_intersections(&c[u], &c[v]).expect("adjacent circles cross");
                crossings[u].push((v, p));
                crossings[u].push((v, q));
                crossings[v].push((u, p));
                crossings[v].push((u, q));
                let cos_phi = ((ru * ru + rv * rv - d * d) / (2.0 * ru * rv)).clamp(-1.0, 1.0);
                let sin_phi = (1.0 - cos_phi * cos_phi).sqrt();
                // Chord between the crossings, and the thickness of the
                // lens and of both crescents.
                ((p - q).norm() * sin_phi).min(ru + rv - d).min(d - (ru - rv).abs())
            } else {
                d - ru - rv
            };
            clear[u] = clear[u].min(bound);
            clear[v] = clear[v].min(bound);
        }
    }
    for (v, pts) in crossings.iter().enumerate() {
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                if pts[i].0 != pts[j].0 {
                    clear[v] = clear[v].min((pts[i].1 - pts[j].1).norm());
                }
            }
        }
    }
    for &t in &tris {
        let m = triple_margin(c, t);
        for v in t {
            clear[v] = clear[v].min(m);
        }
    }
    clear.into_iter().map(|x| 0.25 * x).collect()
}

/// Angular intervals `(centre, half-width)` of `C_v` inside the outer disks
/// of the neighbouring annuli.
fn covered_arcs(v: VertexId, g: &SimplicialGraph, c: &[Circle], annuli: &[RoundAnnulus]) -> Vec<(f64, f64)> {
    let r = c[v].radius;
    g.neighbors(v)
        .map(|u| {
            let e = annuli[u].center - c[v].center;
            let d = e.norm();
            let ro = annuli[u].r_outer;
            let cos_a = ((d * d + r * r - ro * ro) / (2.0 * d * r)).clamp(-1.0, 1.0);
            (e.arg(), cos_a.acos())
        })
        .collect()
}

/// Two points at 1/3 and 2/3 of the longest arc of `C_v` outside all
/// neighbouring annuli.
fn place_p1(v: VertexId, g: &SimplicialGraph, c: &[Circle], annuli: &[RoundAnnulus]) -> Result<[Complex64; 2], TwistError> {
    let arcs = covered_arcs(v, g, c, annuli);
    let (start, len) = if arcs.is_empty() {
        (0.0, TAU)
    } else {
        let mut ints: Vec<(f64, f64)> =
            arcs.iter().map(|&(m, h)| ((m - h).rem_euclid(TAU), 2.0 * h)).collect();
        ints.sort_by(|a, b| a.0.total_cmp(&b.0));
        // Merge cyclically; walk from the first interval start.
        let origin = ints[0].0;
        let mut covered_to = origin + ints[0].1;
        let mut best = (0.0, 0.0);
        for &(s, l) in ints.iter().skip(1) {
            let s = if s < origin { s + TAU } else { s };
            if s > covered_to && s - covered_to > best.1 {
                best = (covered_to, s - covered_to);
            }
            covered_to = covered_to.max(s + l);
        }
        let wrap = origin + TAU - covered_to;
        if wrap > best.1 {
            best = (covered_to, wrap);
        }
        best
    };
    if len <= 0.0 {
        return Err(TwistError::NoFreeArc(v));
    }
    let at = |f: f64| c[v].center + Complex64::from_polar(c[v].radius, start + f * len);
    Ok([at(1.0 / 3.0), at(2.0 / 3.0)])
}

fn clearance(z: Complex64, annuli: &[RoundAnnulus]) -> f64 {
    annuli.iter().map(|a| a.distance(z)).fold(f64::INFINITY, f64::min)
}

fn circle_distance(z: Complex64, circles: &[Circle]) -> f64 {
    circles.iter().map(|c| ((z - c.center).norm() - c.radius).abs()).fold(f64::INFINITY, f64::min)
}

/// Square `[-half, half]²` cut into `n × n` cells.
#[derive(Clone, Copy)]
struct Grid {
    n: usize,
    half: f64,
}

impl Grid {
    fn step(&self) -> f64 {
        2.0 * self.half / self.n as f64
    }

    fn center(&self, i: u32) -> Complex64 {
        let (row, col) = (i as usize / self.n, i as usize % self.n);
        let h = self.step();
        Complex64::new(-self.half + (col as f64 + 0.5) * h, -self.half + (row as f64 + 0.5) * h)
    }
}

const MAX_GRID: usize = 4096;

/// Grid over the bounding square of the annuli with cells no wider than
/// 0.7 of the thinnest annulus, so every complementary region, being at
/// least four widths across, contains cells well away from the circles.
fn flood_grid(annuli: &[RoundAnnulus], widths: &[f64], requested: usize) -> Result<Grid, TwistError> {
    let half = annuli
        .iter()
        .map(|a| a.center.re.abs().max(a.center.im.abs()) + a.r_outer)
        .fold(0.0, f64::max);
    let half = (half + 0.05).min(1.0);
    let w = widths.iter().copied().fold(f64::INFINITY, f64::min);
    let mut n = requested.max(16);
    if w.is_finite() {
        let need = (2.0 * half / (0.7 * w)).ceil() as usize;
        while n < need {
            n *= 2;
        }
    }
    if n > MAX_GRID {
        return Err(TwistError::InvalidConfiguration(format!(
            "annulus width {w:.3e} needs a {n} grid, above {MAX_GRID}"
        )));
    }
    Ok(Grid { n, half })
}

struct FloodFill {
    components: Vec<Vec<u32>>,
    unbounded: usize,
}

/// Components of the complement of the central circles; each matches one
/// component of the complement of the annuli.
fn flood_fill(circles: &[Circle], grid: Grid) -> FloodFill {
    let n = grid.n;
    let h = grid.step();
    let dist: Vec<f32> =
        (0..(n * n) as u32).into_par_iter().map(|i| circle_distance(grid.center(i), circles) as f32).collect();
    let blocked = |i: usize| dist[i] as f64 <= 0.75 * h;
    let mut seen = vec![false; n * n];
    let mut components = Vec::new();
    let mut unbounded = usize::MAX;
    for s in 0..n * n {
        if blocked(s) || seen[s] {
            continue;
        }
        let mut members = vec![s as u32];
        let mut touches_edge = false;
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        while let Some(x) = q.pop_front() {
            let (r, c) = (x / n, x % n);
            if r == 0 || c == 0 || r == n - 1 || c == n - 1 {
                touches_edge = true;
            }
            let nb = [
                (r > 0).then(|| x - n),
                (r + 1 < n).then(|| x + n),
                (c > 0).then(|| x - 1),
                (c + 1 < n).then(|| x + 1),
            ];
            for y in nb.into_iter().flatten() {
                if !blocked(y) && !seen[y] {
                    seen[y] = true;
                    members.push(y as u32);
                    q.push_back(y);
                }
            }
        }
        // Where two circles cross, the grid leaves stray cells cut off
        // from the region; a genuine region has cells far from every circle.
        let thick = members.iter().any(|&i| dist[i as usize] as f64 > 2.0 * h);
        if touches_edge {
            unbounded = components.len();
        }
        if thick || touches_edge {
            components.push(members);
        }
    }
    FloodFill { components, unbounded }
}

/// Builds the configuration for a planar straight-line embedding.
pub fn build_configuration(
    emb: &PlanarEmbedding,
    opts: &ConfigOptions,
) -> Result<Configuration, TwistError> {
    let g = &emb.graph;
    let (base, packing) = tangency_packing(
        emb,
        opts.fit_radius / (1.0 + opts.max_inflation),
        PackingOptions { tolerance: opts.packing_tolerance, ..Default::default() },
    )?;
    let delta = choose_inflation(g, &base, opts.max_inflation)?;
    let circles = inflated(&base, delta);
    let widths = annulus_widths(g, &circles);
    let annuli = circles
        .iter()
        .zip(&widths)
        .map(|(c, &w)| RoundAnnulus::around_circle(c.center, c.radius, w))
        .collect::<Result<Vec<_>, _>>()?;
    let p1 = (0..g.vertex_count())
        .map(|v| place_p1(v, g, &circles, &annuli))
        .collect::<Result<Vec<_>, _>>()?;

    let grid = flood_grid(&annuli, &widths, opts.grid)?;
    let ff = flood_fill(&circles, grid);
    let expected = 2 * g.edge_count() + 1 + g.components().len();
    let expected = if g.vertex_count() == 0 { 1 } else { expected };
    if ff.components.len() != expected {
        return Err(TwistError::ComplementMismatch { found: ff.components.len(), expected });
    }
    let inside = |z: Complex64| z.norm() <= 0.95;
    let mut p2 = Vec::with_capacity(ff.components.len());
    let mut q = None;
    for (id, cells) in ff.components.iter().enumerate() {
        let pts: Vec<Complex64> =
            cells.iter().map(|&i| grid.center(i)).filter(|&z| inside(z)).collect();
        let score1 = |z: Complex64| clearance(z, &annuli);
        let first = argmax(&pts, score1).ok_or(TwistError::EmptyComponent(id))?;
        let second = argmax(&pts, |z| score1(z).min(0.5 * (z - first).norm()))
            .ok_or(TwistError::EmptyComponent(id))?;
        if id == ff.unbounded {
            let outside_disks = |z: Complex64| {
                circles.iter().map(|c| (z - c.center).norm() - c.radius).fold(f64::INFINITY, f64::min)
            };
            q = argmax(&pts, |z| {
                outside_disks(z)
                    .min(score1(z))
                    .min(0.5 * (z - first).norm())
                    .min(0.5 * (z - second).norm())
            });
        }
        p2.push([first, second]);
    }
    let q = q.ok_or(TwistError::EmptyComponent(ff.unbounded))?;
    let cfg = Configuration {
        graph: g.clone(),
        circles,
        annuli,
        p1,
        p2,
        q,
        basepoint: q,
        provenance: Provenance {
            inflation: delta,
            gap_fraction: GAP_FRACTION,
            triple_fraction: TRIPLE_FRACTION,
            widths,
            packing,
            grid: grid.n,
            complementary_components: ff.components.len(),
        },
    };
    cfg.validate()?;
    Ok(cfg)
}

fn argmax<F: Fn(Complex64) -> f64>(pts: &[Complex64], f: F) -> Option<Complex64> {
    let mut best: Option<(f64, Complex64)> = None;
    for &z in pts {
        let s = f(z);
        if best.is_none_or(|(b, _)| s > b) {
            best = Some((s, z));
        }
    }
    best.map(|(_, z)| z)
}

impl Configuration {
    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    /// `P = P₁ ∪ P₂ ∪ {q}`.
    pub fn punctures(&self) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = self.p1.iter().flatten().copied().collect();
        out.extend(self.p2.iter().flatten().copied());
        out.push(self.q);
        out
    }

    pub fn disk_nerve(&self) -> SimplicialGraph {
        let n = self.vertex_count();
        let flags: Vec<Vec<bool>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        i != j
                            && (self.circles[i].center - self.circles[j].center).norm()
                                <= self.circles[i].radius + self.circles[j].radius
                    })
                    .collect()
            })
            .collect();
        incidence_nerve(self.graph.names().to_vec(), &flags).expect("symmetric flags")
    }

    pub fn annulus_nerve(&self) -> SimplicialGraph {
        let n = self.vertex_count();
        let flags: Vec<Vec<bool>> = (0..n)
            .map(|i| (0..n).map(|j| i != j && self.annuli[i].intersects(&self.annuli[j])).collect())
            .collect();
        incidence_nerve(self.graph.names().to_vec(), &flags).expect("symmetric flags")
    }

    /// Intersection points of `C_u` and `C_v`, if they cross.
    pub fn crossing_points(&self, u: VertexId, v: VertexId) -> Option<[Complex64; 2]> {
        circle_intersections(&self.circles[u], &self.circles[v])
    }

    /// Checks every structural invariant.
    pub fn validate(&self) -> Result<(), TwistError> {
        let bad = |m: String| Err(TwistError::InvalidConfiguration(m));
        if self.disk_nerve() != self.graph {
            return bad("disk intersection pattern differs from the graph".into());
        }
        if self.annulus_nerve() != self.graph {
            return bad("annulus nerve differs from the graph".into());
        }
        if !self.annulus_nerve().is_isomorphic(&self.graph) {
            return bad("annulus nerve not isomorphic to the graph".into());
        }
        for (u, v) in self.graph.edges() {
            if self.crossing_points(u, v).is_none() {
                return bad(format!("circles {u} and {v} do not cross transversally"));
            }
        }
        let outer: Vec<Circle> = self
            .annuli
            .iter()
            .map(|a| Circle { center: a.center, radius: a.r_outer })
            .collect();
        for t in triangles(&self.graph) {
            if triple_margin(&self.circles, t) <= 0.0 || triple_margin(&outer, t) <= 0.0 {
                return bad(format!("triple intersection at {t:?}"));
            }
        }
        for (v, pts) in self.p1.iter().enumerate() {
            for &p in pts {
                let on = ((p - self.circles[v].center).norm() - self.circles[v].radius).abs();
                if on > 1e-12 {
                    return bad(format!("P_{v} point off its circle by {on}"));
                }
                for (u, a) in self.annuli.iter().enumerate() {
                    if u != v && a.distance(p) <= 0.0 {
                        return bad(format!("P_{v} point inside annulus {u}"));
                    }
                }
            }
        }
        for &p in self.p2.iter().flatten().chain(std::iter::once(&self.q)) {
            if clearance(p, &self.annuli) <= 0.0 {
                return bad("puncture inside an annulus".into());
            }
        }
        for c in &self.circles {
            if (self.q - c.center).norm() <= c.radius {
                return bad("q lies in a disk".into());
            }
        }
        let all = self.punctures();
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                if all[i] == all[j] {
                    return bad("repeated puncture".into());
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serializes")
    }

    /// SVG drawing in the unit disk; `orbits` are optional polylines.
    pub fn to_svg(&self, orbits: &[Vec<Complex64>]) -> String {
        let mut s = String::from(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-1.05 -1.05 2.1 2.1\" width=\"800\" height=\"800\">\n\
             <g transform=\"scale(1,-1)\">\n\
             <circle cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" stroke=\"#888\" stroke-width=\"0.004\"/>\n",
        );
        for a in &self.annuli {
            let (cx, cy) = (a.center.re, a.center.im);
            s.push_str(&format!(
                "<path fill-rule=\"evenodd\" fill=\"#4a7fb5\" fill-opacity=\"0.35\" d=\"M {x1:.6} {cy:.6} a {ro:.6} {ro:.6} 0 1 0 {d1:.6} 0 a {ro:.6} {ro:.6} 0 1 0 {d2:.6} 0 Z M {x3:.6} {cy:.6} a {ri:.6} {ri:.6} 0 1 0 {d3:.6} 0 a {ri:.6} {ri:.6} 0 1 0 {d4:.6} 0 Z\"/>\n",
                x1 = cx - a.r_outer,
                ro = a.r_outer,
                d1 = 2.0 * a.r_outer,
                d2 = -2.0 * a.r_outer,
                x3 = cx - a.r_inner,
                ri = a.r_inner,
                d3 = 2.0 * a.r_inner,
                d4 = -2.0 * a.r_inner,
            ));
        }
        for c in &self.circles {
            s.push_str(&format!(
                "<circle cx=\"{:.6}\" cy=\"{:.6}\" r=\"{:.6}\" fill=\"none\" stroke=\"#1d3557\" stroke-width=\"0.002\"/>\n",
                c.center.re, c.center.im, c.radius
            ));
        }
        for orbit in orbits {
            let pts: Vec<String> =
                orbit.iter().map(|z| format!("{:.6},{:.6}", z.re, z.im)).collect();
            s.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"#2a9d8f\" stroke-width=\"0.002\" points=\"{}\"/>\n",
                pts.join(" ")
            ));
        }
        for (i, p) in self.punctures().iter().enumerate() {
            let colour = if *p == self.q { "#e63946" } else if i < 2 * self.p1.len() { "#f4a261" } else { "#264653" };
            s.push_str(&format!(
                "<circle cx=\"{:.6}\" cy=\"{:.6}\" r=\"0.008\" fill=\"{colour}\"/>\n",
                p.re, p.im
            ));
        }
        s.push_str("</g>\n</svg>\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{planarity, Planarity};

    fn build(g: &SimplicialGraph) -> Configuration {
        let emb = match planarity(g) {
            Planarity::Planar(e) => e,
            _ => panic!("nonplanar"),
        };
        build_configuration(&emb, &ConfigOptions { grid: 256, ..Default::default() }).unwrap()
    }

    #[test]
    fn single_vertex_has_seven_punctures() {
        let cfg = build(&SimplicialGraph::empty(1));
        assert_eq!(cfg.punctures().len(), 7);
        assert_eq!(cfg.p2.len(), 2);
    }

    #[test]
    fn edge_gives_crossing_annuli() {
        let g = SimplicialGraph::path(2);
        let cfg = build(&g);
        assert_eq!(cfg.annulus_nerve(), g);
        assert_eq!(cfg.p2.len(), 4);
    }

    #[test]
    fn path_keeps_ends_apart() {
        let g = SimplicialGraph::path(3);
        let cfg = build(&g);
        assert!(!cfg.annuli[0].intersects(&cfg.annuli[2]));
        assert!(cfg.annulus_nerve().is_isomorphic(&g));
    }

    // A small circle crossing a large one leaves a thin crescent that the
    // annuli must not cover.
    #[test]
    fn longer_paths_keep_crescents() {
        for n in [4, 5] {
            let cfg = build(&SimplicialGraph::path(n));
            assert_eq!(cfg.provenance.complementary_components, 2 * (n - 1) + 2);
        }
    }

    #[test]
    fn triangle_and_square() {
        for g in [SimplicialGraph::complete(3), SimplicialGraph::cycle(4), SimplicialGraph::complete(4)] {
            let cfg = build(&g);
            assert_eq!(cfg.annulus_nerve(), g);
            assert_eq!(cfg.p2.len(), 2 * g.edge_count() + 2);
            assert!(cfg.provenance.inflation > 0.0);
        }
    }

    #[test]
    fn json_round_trip() {
        let cfg = build(&SimplicialGraph::path(2));
        let back: Configuration = serde_json::from_str(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
        assert!(cfg.to_svg(&[]).starts_with("<svg"));
    }
}
