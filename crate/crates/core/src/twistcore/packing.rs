//! Tangency circle packings by angle-sum relaxation.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::TwistError;
use crate::graphs::{augment_faces, PlanarEmbedding, RotationSystem, SimplicialGraph};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Complex64,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackingStats {
    pub sweeps: usize,
    pub angle_residual: f64,
    pub auxiliary_circles: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct PackingOptions {
    pub tolerance: f64,
    pub max_sweeps: usize,
}

impl Default for PackingOptions {
    fn default() -> Self {
        Self { tolerance: 1e-10, max_sweeps: 2_000_000 }
    }
}

/// Angle at a circle of radius `r` in the triangle of mutually tangent
/// circles with radii `r`, `a`, `b`.
fn corner_angle(r: f64, a: f64, b: f64) -> f64 {
    2.0 * ((a * b) / ((r + a) * (r + b))).sqrt().min(1.0).asin()
}

/// Packs a triangulated sphere with `outer` as the unbounded face. Boundary
/// radii stay at 1; interior radii relax until every angle sum is 2π.
pub fn pack_triangulation(
    n: usize,
    triangles: &[[usize; 3]],
    outer: usize,
    opts: PackingOptions,
) -> Result<(Vec<Circle>, PackingStats), TwistError> {
    let boundary = triangles[outer];
    let mut incident: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (i, t) in triangles.iter().enumerate() {
        if i == outer {
            continue;
        }
        for k in 0..3 {
            incident[t[k]].push((t[(k + 1) % 3], t[(k + 2) % 3]));
        }
    }
    let interior: Vec<usize> = (0..n).filter(|v| !boundary.contains(v)).collect();
    let mut r = vec![1.0f64; n];
    let angle_sum = |r: &[f64], v: usize| -> f64 {
        incident[v].iter().map(|&(a, b)| corner_angle(r[v], r[a], r[b])).sum()
    };

    let mut sweeps = 0;
    let mut residual = f64::INFINITY;
    while sweeps < opts.max_sweeps {
        sweeps += 1;
        for &v in &interior {
            let k = incident[v].len() as f64;
            let theta = angle_sum(&r, v);
            let beta = (theta / (2.0 * k)).sin();
            let delta = (PI / k).sin();
            let rho = r[v] * beta / (1.0 - beta);
            r[v] = rho * (1.0 - delta) / delta;
        }
        if sweeps % 16 == 0 || interior.is_empty() {
            residual = interior.iter().map(|&v| (angle_sum(&r, v) - TAU).abs()).fold(0.0, f64::max);
            if residual < opts.tolerance {
                break;
            }
        }
    }
    if residual >= opts.tolerance {
        return Err(TwistError::PackingDiverged { sweeps, residual });
    }

    for sign in [1.0, -1.0] {
        if let Some(centers) = layout(n, triangles, outer, &r, sign) {
            let circles: Vec<Circle> =
                centers.into_iter().zip(&r).map(|(c, &radius)| Circle { center: c, radius }).collect();
            if packing_is_univalent(&circles, triangles) {
                return Ok((
                    circles,
                    PackingStats { sweeps, angle_residual: residual, auxiliary_circles: 0 },
                ));
            }
        }
    }
    Err(TwistError::PackingLayout)
}

fn layout(
    n: usize,
    triangles: &[[usize; 3]],
    outer: usize,
    r: &[f64],
    sign: f64,
) -> Option<Vec<Complex64>> {
    let mut pos: Vec<Option<Complex64>> = vec![None; n];
    let [o0, o1, _] = triangles[outer];
    pos[o0] = Some(Complex64::new(0.0, 0.0));
    pos[o1] = Some(Complex64::new(r[o0] + r[o1], 0.0));
    let mut progress = true;
    while progress {
        progress = false;
        for (i, t) in triangles.iter().enumerate() {
            let s = if i == outer { -sign } else { sign };
            for k in 0..3 {
                let (a, b, c) = (t[k], t[(k + 1) % 3], t[(k + 2) % 3]);
                if let (Some(pa), Some(pb), None) = (pos[a], pos[b], pos[c]) {
                    let alpha = corner_angle(r[a], r[b], r[c]);
                    let dir = (pb - pa).arg() + s * alpha;
                    pos[c] = Some(pa + Complex64::from_polar(r[a] + r[c], dir));
                    progress = true;
                }
            }
        }
    }
    pos.into_iter().collect()
}

fn packing_is_univalent(circles: &[Circle], triangles: &[[usize; 3]]) -> bool {
    let mut adjacent = std::collections::HashSet::new();
    for t in triangles {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            adjacent.insert((a.min(b), a.max(b)));
        }
    }
    for i in 0..circles.len() {
        for j in i + 1..circles.len() {
            let d = (circles[i].center - circles[j].center).norm();
            let s = circles[i].radius + circles[j].radius;
            if adjacent.contains(&(i, j)) {
                if (d - s).abs() > 1e-7 * s {
                    return false;
                }
            } else if d < s * (1.0 - 1e-9) {
                return false;
            }
        }
    }
    true
}

/// Signed area of a polygon given by vertex indices.
fn signed_area(face: &[usize], pos: &[[f64; 2]]) -> f64 {
    let k = face.len();
    (0..k)
        .map(|i| {
            let (p, q) = (pos[face[i]], pos[face[(i + 1) % k]]);
            p[0] * q[1] - p[1] * q[0]
        })
        .sum::<f64>()
        / 2.0
}

/// Tangency packing of a connected graph drawn in the plane; circles of the
/// original vertices only.
fn pack_component(
    g: &SimplicialGraph,
    pos: &[[f64; 2]],
    opts: PackingOptions,
) -> Result<(Vec<Circle>, PackingStats), TwistError> {
    match g.vertex_count() {
        1 => {
            return Ok((
                vec![Circle { center: Complex64::new(0.0, 0.0), radius: 1.0 }],
                PackingStats { sweeps: 0, angle_residual: 0.0, auxiliary_circles: 0 },
            ))
        }
        2 => {
            return Ok((
                vec![
                    Circle { center: Complex64::new(-1.0, 0.0), radius: 1.0 },
                    Circle { center: Complex64::new(1.0, 0.0), radius: 1.0 },
                ],
                PackingStats { sweeps: 0, angle_residual: 0.0, auxiliary_circles: 0 },
            ))
        }
        _ => {}
    }
    let rot = RotationSystem::from_positions(g, pos);
    let faces = rot.faces();
    let aug = augment_faces(g, &faces, true);
    let outer_face = (0..faces.len())
        .min_by(|&a, &b| signed_area(&faces[a], pos).total_cmp(&signed_area(&faces[b], pos)))
        .expect("connected graph with an edge has faces");
    let outer_triangle = match &aug.rings[outer_face] {
        None => {
            let f = &faces[outer_face];
            aug.triangles.iter().position(|t| t == &[f[0], f[1], f[2]]).expect("kept face")
        }
        Some((centre, ring)) => aug
            .triangles
            .iter()
            .position(|t| t == &[*centre, ring[0], ring[1]])
            .expect("ring triangle"),
    };
    let (circles, mut stats) =
        pack_triangulation(aug.vertex_count, &aug.triangles, outer_triangle, opts)?;
    stats.auxiliary_circles = aug.vertex_count - g.vertex_count();
    Ok((circles[..g.vertex_count()].to_vec(), stats))
}

/// Tangency packing for every component, components side by side, scaled
/// into the disk of radius `fit_radius` about the origin. Circles are
/// tangent exactly along edges and disjoint otherwise.
pub fn tangency_packing(
    emb: &PlanarEmbedding,
    fit_radius: f64,
    opts: PackingOptions,
) -> Result<(Vec<Circle>, PackingStats), TwistError> {
    let g = &emb.graph;
    let mut out = vec![Circle { center: Complex64::new(0.0, 0.0), radius: 0.0 }; g.vertex_count()];
    let mut stats = PackingStats { sweeps: 0, angle_residual: 0.0, auxiliary_circles: 0 };
    let mut cursor = 0.0;
    for comp in g.components() {
        let (sub, map) = g.induced(&comp);
        let local_pos: Vec<[f64; 2]> = map.iter().map(|&v| emb.positions[v]).collect();
        let (circles, st) = pack_component(&sub, &local_pos, opts)?;
        stats.sweeps = stats.sweeps.max(st.sweeps);
        stats.angle_residual = stats.angle_residual.max(st.angle_residual);
        stats.auxiliary_circles += st.auxiliary_circles;
        let (lo, hi) = bbox(&circles);
        let scale = 2.0 / (hi.re - lo.re).max(hi.im - lo.im);
        let mid_y = (lo.im + hi.im) / 2.0;
        for (i, c) in circles.iter().enumerate() {
            let center = Complex64::new(
                cursor + (c.center.re - lo.re) * scale,
                (c.center.im - mid_y) * scale,
            );
            out[map[i]] = Circle { center, radius: c.radius * scale };
        }
        cursor += (hi.re - lo.re) * scale + 0.5;
    }
    if !out.is_empty() {
        let (lo, hi) = bbox(&out);
        let mid = (lo + hi) / 2.0;
        let extent = out.iter().map(|c| (c.center - mid).norm() + c.radius).fold(0.0, f64::max);
        let s = fit_radius / extent;
        for c in &mut out {
            c.center = (c.center - mid) * s;
            c.radius *= s;
        }
    }
    Ok((out, stats))
}

fn bbox(circles: &[Circle]) -> (Complex64, Complex64) {
    let mut lo = Complex64::new(f64::MAX, f64::MAX);
    let mut hi = Complex64::new(f64::MIN, f64::MIN);
    for c in circles {
        lo.re = lo.re.min(c.center.re - c.radius);
        lo.im = lo.im.min(c.center.im - c.radius);
        hi.re = hi.re.max(c.center.re + c.radius);
        hi.im = hi.im.max(c.center.im + c.radius);
    }
    (lo, hi)
}

/// Pairwise tangency pattern of a set of circles (`tol` relative).
pub fn tangency_graph(circles: &[Circle], tol: f64) -> BTreeMap<(usize, usize), bool> {
    let mut out = BTreeMap::new();
    for i in 0..circles.len() {
        for j in i + 1..circles.len() {
            let d = (circles[i].center - circles[j].center).norm();
            let s = circles[i].radius + circles[j].radius;
            out.insert((i, j), (d - s).abs() <= tol * s);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{planarity, Planarity};

    fn embed(g: &SimplicialGraph) -> PlanarEmbedding {
        match planarity(g) {
            Planarity::Planar(e) => e,
            _ => panic!("nonplanar"),
        }
    }

    fn check(g: &SimplicialGraph) {
        let (circles, _) = tangency_packing(&embed(g), 0.7, PackingOptions::default()).unwrap();
        let pattern = tangency_graph(&circles, 1e-7);
        for ((i, j), tangent) in pattern {
            assert_eq!(tangent, g.has_edge(i, j), "pair {i},{j}");
            let d = (circles[i].center - circles[j].center).norm();
            assert!(d >= (circles[i].radius + circles[j].radius) * (1.0 - 1e-7));
        }
        for c in &circles {
            assert!(c.center.norm() + c.radius <= 0.7 + 1e-12);
        }
    }

    #[test]
    fn packs_small_graphs() {
        check(&SimplicialGraph::complete(3));
        check(&SimplicialGraph::complete(4));
        check(&SimplicialGraph::cycle(4));
        check(&SimplicialGraph::path(3));
        check(&SimplicialGraph::path(2));
        check(&SimplicialGraph::empty(1));
        check(&SimplicialGraph::empty(3));
    }

    #[test]
    fn packs_octahedron_and_disconnected() {
        let oct = SimplicialGraph::with_indices(
            6,
            [
                (0, 1), (0, 2), (0, 3), (0, 4), (5, 1), (5, 2), (5, 3), (5, 4),
                (1, 2), (2, 3), (3, 4), (4, 1),
            ],
        )
        .unwrap();
        check(&oct);
        check(&SimplicialGraph::cycle(5).disjoint_union(&SimplicialGraph::path(2)));
    }
}
