//! Finite simplicial graphs, graph morphisms and orbi-covers.
//!
//! A [`SimplicialGraph`] has no loops and no multiple edges. Vertex order is
//! fixed at construction; it is the order used by normal forms and by the
//! lexicographic lift of orders to covers.

mod emulator;
mod planarity;

pub use emulator::{
    certificate_no_emulator, find_planar_emulator, lift_voltages, EmulatorOptions,
    EmulatorSearch, NoEmulatorCertificate, NoEmulatorVerdict, PlanarEmulator, VoltageAssignment,
};
pub(crate) use planarity::augment_faces;
pub use planarity::{
    is_planar, kuratowski_subgraph, planarity, segments_cross, validate_straight_line,
    KuratowskiKind, NonplanarWitness, PlanarEmbedding, Planarity, RotationSystem,
};

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type VertexId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("loop at vertex `{0}`")]
    Loop(String),
    #[error("repeated edge {{{0}, {1}}}")]
    RepeatedEdge(String, String),
    #[error("vertex index {index} out of range for a graph with {count} vertices")]
    VertexOutOfRange { index: usize, count: usize },
    #[error("duplicate vertex name `{0}`")]
    DuplicateName(String),
    #[error("unknown vertex name `{0}`")]
    UnknownVertex(String),
    #[error("intersection flags are not symmetric at ({0}, {1})")]
    AsymmetricFlags(usize, usize),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A finite graph without loops or bigons.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicialGraph {
    names: Vec<String>,
    adjacency: Vec<BTreeSet<VertexId>>,
}

impl SimplicialGraph {
    /// Builds a graph from vertex names and index pairs. Loops and repeated
    /// edges are rejected.
    pub fn new<I>(names: Vec<String>, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut seen = BTreeSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(GraphError::DuplicateName(name.clone()));
            }
        }
        let count = names.len();
        let mut adjacency = vec![BTreeSet::new(); count];
        for (u, v) in edges {
            for x in [u, v] {
                if x >= count {
                    return Err(GraphError::VertexOutOfRange { index: x, count });
                }
            }
            if u == v {
                return Err(GraphError::Loop(names[u].clone()));
            }
            if !adjacency[u].insert(v) {
                return Err(GraphError::RepeatedEdge(names[u].clone(), names[v].clone()));
            }
            adjacency[v].insert(u);
        }
        Ok(Self { names, adjacency })
    }

    /// Graph on vertices named `0..n`.
    pub fn with_indices<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        Self::new((0..n).map(|i| i.to_string()).collect(), edges)
    }

    pub fn from_names(names: &[&str], edges: &[(&str, &str)]) -> Result<Self, GraphError> {
        let owned: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let index: BTreeMap<&str, usize> =
            names.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let mut pairs = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            let u = *index.get(a).ok_or_else(|| GraphError::UnknownVertex(a.to_string()))?;
            let v = *index.get(b).ok_or_else(|| GraphError::UnknownVertex(b.to_string()))?;
            pairs.push((u, v));
        }
        Self::new(owned, pairs)
    }

    pub fn empty(n: usize) -> Self {
        Self::with_indices(n, std::iter::empty()).expect("no edges")
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Self::with_indices(n, edges).expect("complete graph is simplicial")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a simplicial cycle needs at least 3 vertices");
        Self::with_indices(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle is simplicial")
    }

    pub fn path(n: usize) -> Self {
        Self::with_indices(n, (1..n).map(|i| (i - 1, i))).expect("path is simplicial")
    }

    /// Triangulated `rows x cols` torus grid; every vertex has degree 6 when
    /// both sides are at least 3.
    pub fn torus_triangulation(rows: usize, cols: usize) -> Self {
        assert!(rows >= 3 && cols >= 3);
        let id = |i: usize, j: usize| (i % rows) * cols + (j % cols);
        let mut edges = BTreeSet::new();
        for i in 0..rows {
            for j in 0..cols {
                let a = id(i, j);
                for b in [id(i + 1, j), id(i, j + 1), id(i + 1, j + 1)] {
                    edges.insert((a.min(b), a.max(b)));
                }
            }
        }
        let names = (0..rows * cols).map(|k| format!("t{}_{}", k / cols, k % cols)).collect();
        Self::new(names, edges).expect("torus grid is simplicial")
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v]
    }

    pub fn index_of(&self, name: &str) -> Option<VertexId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.adjacency[v].iter().copied()
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v].len()
    }

    pub fn min_degree(&self) -> Option<usize> {
        (0..self.vertex_count()).map(|v| self.degree(v)).min()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.adjacency.get(u).is_some_and(|a| a.contains(&v))
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, adj)| adj.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
            .collect()
    }

    /// Vertex sets of connected components, each sorted, ordered by least vertex.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let n = self.vertex_count();
        let mut label = vec![usize::MAX; n];
        let mut out = Vec::new();
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut comp = vec![start];
            label[start] = id;
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for w in self.neighbors(u) {
                    if label[w] == usize::MAX {
                        label[w] = id;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Subgraph induced on `vertices` (kept in the given order), plus the map
    /// from new indices to old ones.
    pub fn induced(&self, vertices: &[VertexId]) -> (SimplicialGraph, Vec<VertexId>) {
        let pos: BTreeMap<VertexId, usize> =
            vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let names = vertices.iter().map(|&v| self.names[v].clone()).collect();
        let edges = self
            .edges()
            .into_iter()
            .filter_map(|(u, v)| Some((*pos.get(&u)?, *pos.get(&v)?)));
        let g = SimplicialGraph::new(names, edges).expect("induced subgraph is simplicial");
        (g, vertices.to_vec())
    }

    /// Same vertex set, only the listed edges.
    pub fn spanning_subgraph(&self, edges: &[(VertexId, VertexId)]) -> SimplicialGraph {
        SimplicialGraph::new(self.names.clone(), edges.iter().copied())
            .expect("edge subset of a simplicial graph")
    }

    /// Disjoint union; vertex names of `other` get `suffix` appended when they
    /// collide with names already present.
    pub fn disjoint_union(&self, other: &SimplicialGraph) -> SimplicialGraph {
        let offset = self.vertex_count();
        let mut names = self.names.clone();
        let taken: BTreeSet<String> = names.iter().cloned().collect();
        for n in &other.names {
            let mut candidate = n.clone();
            while taken.contains(&candidate) || names.contains(&candidate) {
                candidate.push('\'');
            }
            names.push(candidate);
        }
        let edges = self
            .edges()
            .into_iter()
            .chain(other.edges().into_iter().map(|(u, v)| (u + offset, v + offset)));
        SimplicialGraph::new(names, edges).expect("union of simplicial graphs")
    }

    pub fn is_isomorphic(&self, other: &SimplicialGraph) -> bool {
        if self.vertex_count() != other.vertex_count() || self.edge_count() != other.edge_count()
        {
            return false;
        }
        petgraph::algo::is_isomorphic(&self.to_petgraph(), &other.to_petgraph())
    }

    fn to_petgraph(&self) -> petgraph::graph::UnGraph<(), ()> {
        let edges: Vec<(u32, u32)> =
            self.edges().into_iter().map(|(u, v)| (u as u32, v as u32)).collect();
        let mut g = petgraph::graph::UnGraph::<(), ()>::with_capacity(self.vertex_count(), 0);
        for _ in 0..self.vertex_count() {
            g.add_node(());
        }
        g.extend_with_edges(edges);
        g
    }

    /// Parses the text format:
    ///
    /// ```text
    /// vertices 3
    /// a b c
    /// edge a b
    /// edge b c
    /// ```
    ///
    /// Blank lines and `#` comments are ignored. Lines starting with `map` are
    /// skipped so that a cover file can carry its projection.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line_no, header) = lines.next().ok_or(GraphError::Parse {
            line: 1,
            msg: "missing `vertices <n>` header".into(),
        })?;
        let mut parts = header.split_whitespace();
        let count = match (parts.next(), parts.next().map(str::parse::<usize>), parts.next()) {
            (Some("vertices"), Some(Ok(n)), None) => n,
            _ => {
                return Err(GraphError::Parse {
                    line: line_no,
                    msg: format!("expected `vertices <n>`, found `{header}`"),
                })
            }
        };
        let mut names: Vec<String> = Vec::with_capacity(count);
        let mut pending: Vec<(usize, String, String)> = Vec::new();
        for (line_no, line) in lines {
            let tokens: Vec<&str> = line.split_whitespace().collect();
            match tokens.first().copied() {
                Some("edge") => {
                    if tokens.len() != 3 {
                        return Err(GraphError::Parse {
                            line: line_no,
                            msg: "expected `edge <u> <v>`".into(),
                        });
                    }
                    pending.push((line_no, tokens[1].to_string(), tokens[2].to_string()));
                }
                Some("map") => {}
                Some(_) if names.len() < count && pending.is_empty() => {
                    names.extend(tokens.iter().map(|t| t.to_string()));
                    if names.len() > count {
                        return Err(GraphError::Parse {
                            line: line_no,
                            msg: format!("more than {count} vertex names"),
                        });
                    }
                }
                Some(other) => {
                    return Err(GraphError::Parse {
                        line: line_no,
                        msg: format!("unexpected token `{other}`"),
                    })
                }
                None => {}
            }
        }
        if names.len() != count {
            return Err(GraphError::Parse {
                line: line_no,
                msg: format!("header declares {count} vertices, {} names given", names.len()),
            });
        }
        let lookup: BTreeMap<&str, usize> =
            names.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let mut edges = Vec::with_capacity(pending.len());
        for (line, a, b) in &pending {
            let u = lookup.get(a.as_str()).ok_or_else(|| GraphError::Parse {
                line: *line,
                msg: format!("unknown vertex `{a}`"),
            })?;
            let v = lookup.get(b.as_str()).ok_or_else(|| GraphError::Parse {
                line: *line,
                msg: format!("unknown vertex `{b}`"),
            })?;
            edges.push((*u, *v));
        }
        Self::new(names, edges)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("vertices {}\n{}\n", self.vertex_count(), self.names.join(" "));
        for (u, v) in self.edges() {
            out.push_str(&format!("edge {} {}\n", self.names[u], self.names[v]));
        }
        out
    }
}

impl fmt::Display for SimplicialGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// The double: vertices `v+`, `v-` for each `v`, both copies of every edge
/// plus the crossed edges `{v×i, w×j}`, `i ≠ j`.
///
/// Vertex `v` of `g` becomes indices `2v` (`v+`) and `2v + 1` (`v-`).
pub fn double(g: &SimplicialGraph) -> SimplicialGraph {
    let names = g.names().iter().flat_map(|n| [format!("{n}+"), format!("{n}-")]).collect();
    let mut edges = Vec::with_capacity(4 * g.edge_count());
    for (v, w) in g.edges() {
        let (vp, vm, wp, wm) = (2 * v, 2 * v + 1, 2 * w, 2 * w + 1);
        edges.extend([(vp, wp), (vm, wm), (vp, wm), (vm, wp)]);
    }
    SimplicialGraph::new(names, edges).expect("double of a simplicial graph is simplicial")
}

/// A vertex map between graphs; the edge map is induced by endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphMorphism {
    pub source: SimplicialGraph,
    pub target: SimplicialGraph,
    pub vertex_map: Vec<VertexId>,
}

impl GraphMorphism {
    pub fn new(
        source: SimplicialGraph,
        target: SimplicialGraph,
        vertex_map: Vec<VertexId>,
    ) -> Result<Self, GraphError> {
        if vertex_map.len() != source.vertex_count() {
            return Err(GraphError::Parse {
                line: 0,
                msg: format!(
                    "vertex map covers {} of {} source vertices",
                    vertex_map.len(),
                    source.vertex_count()
                ),
            });
        }
        if let Some(&bad) = vertex_map.iter().find(|&&y| y >= target.vertex_count()) {
            return Err(GraphError::VertexOutOfRange { index: bad, count: target.vertex_count() });
        }
        Ok(Self { source, target, vertex_map })
    }

    pub fn identity(g: &SimplicialGraph) -> Self {
        Self { source: g.clone(), target: g.clone(), vertex_map: (0..g.vertex_count()).collect() }
    }

    /// The natural projection `DΓ → Γ`.
    pub fn double_projection(g: &SimplicialGraph) -> Self {
        let d = double(g);
        let map = (0..d.vertex_count()).map(|x| x / 2).collect();
        Self { source: d, target: g.clone(), vertex_map: map }
    }

    pub fn image(&self, x: VertexId) -> VertexId {
        self.vertex_map[x]
    }

    /// Fiber over `v`, in source vertex order.
    pub fn fiber(&self, v: VertexId) -> Vec<VertexId> {
        (0..self.source.vertex_count()).filter(|&x| self.vertex_map[x] == v).collect()
    }

    /// Parses `map <x> <y>` lines against known source/target graphs.
    pub fn parse(
        text: &str,
        source: &SimplicialGraph,
        target: &SimplicialGraph,
    ) -> Result<Self, GraphError> {
        let mut map = vec![None; source.vertex_count()];
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.first() != Some(&"map") {
                continue;
            }
            if tokens.len() != 3 {
                return Err(GraphError::Parse { line: i + 1, msg: "expected `map <x> <y>`".into() });
            }
            let x = source
                .index_of(tokens[1])
                .ok_or_else(|| GraphError::UnknownVertex(tokens[1].to_string()))?;
            let y = target
                .index_of(tokens[2])
                .ok_or_else(|| GraphError::UnknownVertex(tokens[2].to_string()))?;
            map[x] = Some(y);
        }
        let vertex_map = map
            .into_iter()
            .enumerate()
            .map(|(x, y)| {
                y.ok_or_else(|| GraphError::Parse {
                    line: 0,
                    msg: format!("no `map` line for vertex `{}`", source.name(x)),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(source.clone(), target.clone(), vertex_map)
    }

    pub fn to_text(&self) -> String {
        (0..self.source.vertex_count())
            .map(|x| {
                format!("map {} {}\n", self.source.name(x), self.target.name(self.vertex_map[x]))
            })
            .collect()
    }
}

/// Proof that a morphism is locally surjective: for every source vertex, the
/// edge of the source chosen as lift of each target edge at its image.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbicoverCertificate {
    /// `(x, target edge (p(x), w), lifted neighbour y)` for every required lift.
    pub lifts: Vec<(VertexId, (VertexId, VertexId), VertexId)>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrbicoverViolation {
    /// Endpoint inconsistency: a source edge does not map onto a target edge.
    #[error("source edge {{{0}, {1}}} does not map to an edge of the target")]
    Malformed(VertexId, VertexId),
    /// Local surjectivity fails at `vertex` for the target edge `edge`.
    #[error("no edge at source vertex {vertex} lifts target edge {edge:?}")]
    MissingLift { vertex: VertexId, edge: (VertexId, VertexId) },
}

/// Checks that `m` is a graph morphism and locally surjective.
pub fn check_orbicover(m: &GraphMorphism) -> Result<OrbicoverCertificate, OrbicoverViolation> {
    for (x, y) in m.source.edges() {
        if !m.target.has_edge(m.image(x), m.image(y)) {
            return Err(OrbicoverViolation::Malformed(x, y));
        }
    }
    let mut lifts = Vec::new();
    for x in 0..m.source.vertex_count() {
        let v = m.image(x);
        for w in m.target.neighbors(v) {
            match m.source.neighbors(x).find(|&y| m.image(y) == w) {
                Some(y) => lifts.push((x, (v, w), y)),
                None => return Err(OrbicoverViolation::MissingLift { vertex: x, edge: (v, w) }),
            }
        }
    }
    Ok(OrbicoverCertificate { lifts })
}

/// Incidence graph of a family of curves: one vertex per curve, an edge for
/// each intersecting pair.
pub fn incidence_nerve(
    names: Vec<String>,
    intersects: &[Vec<bool>],
) -> Result<SimplicialGraph, GraphError> {
    let n = names.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if intersects[i][j] != intersects[j][i] {
                return Err(GraphError::AsymmetricFlags(i, j));
            }
            if intersects[i][j] {
                edges.push((i, j));
            }
        }
    }
    SimplicialGraph::new(names, edges)
}
