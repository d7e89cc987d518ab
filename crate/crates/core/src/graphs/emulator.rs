//! Planar emulators from cyclic voltage lifts, and the valence-6 obstruction.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::planarity::{planarity, PlanarEmbedding, Planarity};
use super::{check_orbicover, GraphMorphism, SimplicialGraph, VertexId};

/// Voltages in `Z/k` on the edges of a base graph, read on `(u, v)` with
/// `u < v` in the order of [`SimplicialGraph::edges`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoltageAssignment {
    pub base: SimplicialGraph,
    pub group_order: usize,
    pub voltages: Vec<usize>,
}

/// Derived lift: vertex `(v, i)` has index `v·k + i` and name `v.i`. The
/// lifted edge over `(u, v)` joins `(u, i)` to `(v, i + α)`.
pub fn lift_voltages(va: &VoltageAssignment) -> (SimplicialGraph, GraphMorphism) {
    let k = va.group_order;
    let base = &va.base;
    let names = base
        .names()
        .iter()
        .flat_map(|n| (0..k).map(move |i| format!("{n}.{i}")))
        .collect();
    let edges = base
        .edges()
        .into_iter()
        .zip(&va.voltages)
        .flat_map(|((u, v), &a)| (0..k).map(move |i| (u * k + i, v * k + (i + a) % k)))
        .collect::<Vec<_>>();
    let cover = SimplicialGraph::new(names, edges).expect("voltage lift is simplicial");
    let map = (0..cover.vertex_count()).map(|x| x / k).collect();
    let proj = GraphMorphism { source: cover.clone(), target: base.clone(), vertex_map: map };
    (cover, proj)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmulatorOptions {
    pub max_sheets: usize,
    /// Accept the base graph itself (one sheet) when it is planar.
    pub allow_identity: bool,
    /// Upper bound on assignments examined per component and group order.
    pub search_cap: u64,
}

impl Default for EmulatorOptions {
    fn default() -> Self {
        Self { max_sheets: 2, allow_identity: true, search_cap: 1 << 22 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarEmulator {
    pub cover: SimplicialGraph,
    pub projection: GraphMorphism,
    pub embedding: PlanarEmbedding,
    /// One entry per component of the base graph.
    pub voltages: Vec<VoltageAssignment>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EmulatorSearch {
    Found(Box<PlanarEmulator>),
    /// `exhausted` is true when every admissible assignment was examined.
    NotFound { exhausted: bool, examined: u64 },
}

/// Searches tree-normalised `Z/k` voltage assignments, `k = 2..=max_sheets`,
/// per connected component; the least successful assignment in
/// lexicographic order wins.
pub fn find_planar_emulator(g: &SimplicialGraph, opts: &EmulatorOptions) -> EmulatorSearch {
    assert!(opts.max_sheets >= 2, "max_sheets must be at least 2");
    if !opts.allow_identity && matches!(planarity(g), Planarity::Planar(_)) {
        let va = VoltageAssignment {
            base: g.clone(),
            group_order: 2,
            voltages: vec![0; g.edge_count()],
        };
        let (cover, projection) = lift_voltages(&va);
        return match planarity(&cover) {
            Planarity::Planar(embedding) => EmulatorSearch::Found(Box::new(PlanarEmulator {
                cover,
                projection,
                embedding,
                voltages: vec![va],
            })),
            Planarity::Nonplanar(_) => unreachable!("two copies of a planar graph are planar"),
        };
    }

    let mut examined = 0;
    let mut parts: Vec<(VoltageAssignment, Vec<VertexId>)> = Vec::new();
    for comp in g.components() {
        let (sub, map) = g.induced(&comp);
        match search_component(&sub, opts) {
            Ok((va, n)) => {
                examined += n;
                parts.push((va, map));
            }
            Err((exhausted, n)) => {
                return EmulatorSearch::NotFound { exhausted, examined: examined + n };
            }
        }
    }

    // Assemble the cover in lexicographic (base vertex, sheet) order.
    let mut sheets = vec![0usize; g.vertex_count()];
    for (va, map) in &parts {
        for &v in map {
            sheets[v] = va.group_order;
        }
    }
    let mut offset = vec![0usize; g.vertex_count() + 1];
    for v in 0..g.vertex_count() {
        offset[v + 1] = offset[v] + sheets[v];
    }
    let mut names = Vec::with_capacity(offset[g.vertex_count()]);
    let mut vertex_map = Vec::with_capacity(names.capacity());
    for v in 0..g.vertex_count() {
        for i in 0..sheets[v] {
            names.push(if sheets[v] == 1 {
                g.name(v).to_string()
            } else {
                format!("{}.{i}", g.name(v))
            });
            vertex_map.push(v);
        }
    }
    let mut edges = Vec::new();
    for (va, map) in &parts {
        let k = va.group_order;
        for ((a, b), &alpha) in va.base.edges().into_iter().zip(&va.voltages) {
            let (u, v) = (map[a], map[b]);
            for i in 0..k {
                edges.push((offset[u] + i, offset[v] + (i + alpha) % k));
            }
        }
    }
    let cover = SimplicialGraph::new(names, edges).expect("union of lifts is simplicial");
    let projection =
        GraphMorphism { source: cover.clone(), target: g.clone(), vertex_map };
    debug_assert!(check_orbicover(&projection).is_ok());
    match planarity(&cover) {
        Planarity::Planar(embedding) => EmulatorSearch::Found(Box::new(PlanarEmulator {
            cover,
            projection,
            embedding,
            voltages: parts.into_iter().map(|(va, _)| va).collect(),
        })),
        Planarity::Nonplanar(_) => unreachable!("disjoint union of planar lifts"),
    }
}

/// Spanning tree edges (BFS from vertex 0) of a connected graph, as indices
/// into `g.edges()`.
fn tree_edge_mask(g: &SimplicialGraph) -> Vec<bool> {
    let edges = g.edges();
    let mut mask = vec![false; edges.len()];
    if g.vertex_count() == 0 {
        return mask;
    }
    let mut seen = vec![false; g.vertex_count()];
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    while let Some(u) = queue.pop_front() {
        for w in g.neighbors(u) {
            if !seen[w] {
                seen[w] = true;
                let e = (u.min(w), u.max(w));
                mask[edges.binary_search(&e).unwrap()] = true;
                queue.push_back(w);
            }
        }
    }
    mask
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Ok((assignment, examined)) or Err((exhausted, examined)).
fn search_component(
    g: &SimplicialGraph,
    opts: &EmulatorOptions,
) -> Result<(VoltageAssignment, u64), (bool, u64)> {
    if opts.allow_identity && matches!(planarity(g), Planarity::Planar(_)) {
        let va = VoltageAssignment { base: g.clone(), group_order: 1, voltages: vec![0; g.edge_count()] };
        return Ok((va, 1));
    }
    let (v, e) = (g.vertex_count(), g.edge_count());
    let tree = tree_edge_mask(g);
    let free: Vec<usize> = (0..e).filter(|&i| !tree[i]).collect();
    let mut examined = 0u64;
    let mut exhausted = true;
    for k in 2..=opts.max_sheets {
        // A planar simple graph on kv ≥ 3 vertices has at most 3kv − 6 edges.
        if k * e + 6 > 3 * k * v {
            continue;
        }
        let total = (k as u128).checked_pow(free.len() as u32).unwrap_or(u128::MAX);
        let budget = opts.search_cap.saturating_sub(examined) as u128;
        let span = total.min(budget) as u64;
        if (span as u128) < total {
            exhausted = false;
        }
        let decode = |mut idx: u64| {
            let mut volt = vec![0usize; e];
            for &slot in free.iter().rev() {
                volt[slot] = (idx % k as u64) as usize;
                idx /= k as u64;
            }
            volt
        };
        let hit = (0..span).into_par_iter().find_first(|&idx| {
            let volt = decode(idx);
            if free.iter().fold(k, |acc, &i| gcd(acc, volt[i])) != 1 {
                return false;
            }
            let va = VoltageAssignment { base: g.clone(), group_order: k, voltages: volt };
            let (cover, _) = lift_voltages(&va);
            super::planarity::is_planar(&cover)
        });
        match hit {
            Some(idx) => {
                examined += idx + 1;
                let va = VoltageAssignment { base: g.clone(), group_order: k, voltages: decode(idx) };
                return Ok((va, examined));
            }
            None => examined += span,
        }
    }
    Err((exhausted, examined))
}

/// Euler-count certificate that no planar emulator exists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoEmulatorCertificate {
    pub vertices: usize,
    pub edges: usize,
    pub min_valence: usize,
}

impl NoEmulatorCertificate {
    /// Human-readable argument.
    pub fn statement(&self) -> String {
        format!(
            "every vertex has valence >= {m} >= 6; local surjectivity lifts this bound to any \
             finite cover D (v' vertices, e' edges), so 2e' >= 6v'. A planar D would satisfy \
             2 = v' - e' + f' <= v' - e'/3 <= 0, a contradiction",
            m = self.min_valence
        )
    }

    /// Checks the inequalities a candidate cover would have to violate.
    pub fn refutes(&self, cover: &SimplicialGraph) -> bool {
        let (v, e) = (cover.vertex_count() as i64, cover.edge_count() as i64);
        cover.min_degree().unwrap_or(0) >= 6 && 3 * v - e <= 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum NoEmulatorVerdict {
    Certificate(NoEmulatorCertificate),
    NotApplicable { reason: String },
}

pub fn certificate_no_emulator(g: &SimplicialGraph) -> NoEmulatorVerdict {
    match g.min_degree() {
        None => NoEmulatorVerdict::NotApplicable { reason: "empty graph".into() },
        Some(m) if m < 6 => NoEmulatorVerdict::NotApplicable {
            reason: format!("minimum valence {m} is below 6"),
        },
        Some(m) => NoEmulatorVerdict::Certificate(NoEmulatorCertificate {
            vertices: g.vertex_count(),
            edges: g.edge_count(),
            min_valence: m,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{double, planarity::validate_straight_line};

    fn found(g: &SimplicialGraph, opts: &EmulatorOptions) -> PlanarEmulator {
        match find_planar_emulator(g, opts) {
            EmulatorSearch::Found(e) => *e,
            other => panic!("no emulator: {other:?}"),
        }
    }

    #[test]
    fn zero_voltage_on_edge_gives_two_copies() {
        let g = SimplicialGraph::path(2);
        let (cover, proj) = lift_voltages(&VoltageAssignment {
            base: g.clone(),
            group_order: 2,
            voltages: vec![0],
        });
        assert_eq!(cover.edges(), vec![(0, 2), (1, 3)]);
        assert!(check_orbicover(&proj).is_ok());
        assert_eq!(cover.names(), ["0.0", "0.1", "1.0", "1.1"]);
    }

    #[test]
    fn k5_double_cover() {
        let k5 = SimplicialGraph::complete(5);
        let em = found(&k5, &EmulatorOptions { max_sheets: 2, ..Default::default() });
        assert_eq!((em.cover.vertex_count(), em.cover.edge_count()), (10, 20));
        assert!(em.cover.is_connected());
        assert!(check_orbicover(&em.projection).is_ok());
        validate_straight_line(&em.cover, &em.embedding.positions).unwrap();
    }

    #[test]
    fn k6_double_cover_is_triangulation() {
        let k6 = SimplicialGraph::complete(6);
        let em = found(&k6, &EmulatorOptions { max_sheets: 2, ..Default::default() });
        let (v, e) = (em.cover.vertex_count(), em.cover.edge_count());
        assert_eq!((v, e), (12, 30));
        assert_eq!(e, 3 * v - 6);
    }

    #[test]
    fn planar_graph_identity_or_disjoint_double() {
        let c4 = SimplicialGraph::cycle(4);
        let em = found(&c4, &EmulatorOptions::default());
        assert_eq!(em.cover, c4);
        let em = found(&c4, &EmulatorOptions { allow_identity: false, ..Default::default() });
        assert_eq!(em.cover.vertex_count(), 8);
        assert_eq!(em.cover.components().len(), 2);
    }

    #[test]
    fn disconnected_base_searched_per_component() {
        let g = SimplicialGraph::complete(5).disjoint_union(&SimplicialGraph::path(2));
        let em = found(&g, &EmulatorOptions::default());
        assert_eq!(em.cover.vertex_count(), 12);
        assert!(check_orbicover(&em.projection).is_ok());
    }

    #[test]
    fn six_regular_graph_has_certificate_and_no_emulator() {
        let g = SimplicialGraph::torus_triangulation(3, 3);
        assert!(matches!(certificate_no_emulator(&g), NoEmulatorVerdict::Certificate(_)));
        assert!(matches!(
            find_planar_emulator(&g, &EmulatorOptions { max_sheets: 3, ..Default::default() }),
            EmulatorSearch::NotFound { exhausted: true, .. }
        ));
    }

    #[test]
    fn certificate_not_applicable_cases() {
        assert!(matches!(
            certificate_no_emulator(&SimplicialGraph::complete(5)),
            NoEmulatorVerdict::NotApplicable { .. }
        ));
        assert!(matches!(
            certificate_no_emulator(&SimplicialGraph::empty(0)),
            NoEmulatorVerdict::NotApplicable { .. }
        ));
        let NoEmulatorVerdict::Certificate(c) = certificate_no_emulator(&SimplicialGraph::complete(7))
        else {
            panic!()
        };
        assert!(c.refutes(&double(&SimplicialGraph::complete(7))));
    }
}
