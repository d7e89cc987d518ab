//! Planarity testing by path addition, straight-line drawings by Tutte's
//! barycentric method, and Kuratowski witnesses.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{SimplicialGraph, VertexId};

/// Cyclic neighbour order at every vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RotationSystem {
    pub rot: Vec<Vec<VertexId>>,
}

impl RotationSystem {
    /// Rotation read off a straight-line drawing: neighbours sorted
    /// counter-clockwise by angle.
    pub fn from_positions(g: &SimplicialGraph, positions: &[[f64; 2]]) -> Self {
        let rot = (0..g.vertex_count())
            .map(|v| {
                let [x, y] = positions[v];
                let mut nb: Vec<(f64, VertexId)> = g
                    .neighbors(v)
                    .map(|w| ((positions[w][1] - y).atan2(positions[w][0] - x), w))
                    .collect();
                nb.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                nb.into_iter().map(|(_, w)| w).collect()
            })
            .collect();
        Self { rot }
    }

    /// The neighbour preceding `u` in the cyclic order at `v`.
    fn pred(&self, v: VertexId, u: VertexId) -> VertexId {
        let r = &self.rot[v];
        let i = r.iter().position(|&x| x == u).expect("dart present in rotation");
        r[(i + r.len() - 1) % r.len()]
    }

    /// Face boundary walks. Arriving at `v` from `u`, a walk continues to the
    /// neighbour preceding `u` at `v`; with counter-clockwise rotations the
    /// bounded faces come out counter-clockwise.
    pub fn faces(&self) -> Vec<Vec<VertexId>> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for u in 0..self.rot.len() {
            for &v in &self.rot[u] {
                if seen.contains(&(u, v)) {
                    continue;
                }
                let mut face = Vec::new();
                let (mut a, mut b) = (u, v);
                loop {
                    seen.insert((a, b));
                    face.push(a);
                    let c = self.pred(b, a);
                    (a, b) = (b, c);
                    if (a, b) == (u, v) {
                        break;
                    }
                }
                out.push(face);
            }
        }
        out
    }

    /// Euler characteristic check per component: `v − e + f = 2`.
    pub fn is_spherical(&self, g: &SimplicialGraph) -> bool {
        let faces = self.faces();
        let comps = g.components();
        let mut comp_of = vec![0; g.vertex_count()];
        for (i, c) in comps.iter().enumerate() {
            for &v in c {
                comp_of[v] = i;
            }
        }
        let mut f = vec![0i64; comps.len()];
        for face in &faces {
            f[comp_of[face[0]]] += 1;
        }
        comps.iter().enumerate().all(|(i, c)| {
            let e: usize = c.iter().map(|&v| g.degree(v)).sum::<usize>() / 2;
            let faces_here = if e == 0 { 1 } else { f[i] };
            c.len() as i64 - e as i64 + faces_here == 2
        })
    }
}

/// A straight-line drawing of a planar graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarEmbedding {
    pub graph: SimplicialGraph,
    pub positions: Vec<[f64; 2]>,
}

impl PlanarEmbedding {
    pub fn rotation(&self) -> RotationSystem {
        RotationSystem::from_positions(&self.graph, &self.positions)
    }

    pub fn validate(&self) -> Result<(), String> {
        validate_straight_line(&self.graph, &self.positions)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KuratowskiKind {
    K5,
    K33,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum NonplanarWitness {
    /// `e > 3v − 6` with `v ≥ 3`.
    EdgeBound { vertices: usize, edges: usize },
    /// Edge set of a subdivision of `K5` or `K3,3`.
    Kuratowski { kind: KuratowskiKind, edges: Vec<(VertexId, VertexId)> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Planarity {
    Planar(PlanarEmbedding),
    Nonplanar(NonplanarWitness),
}

pub fn is_planar(g: &SimplicialGraph) -> bool {
    combinatorial_embedding(g).is_some()
}

/// Planar straight-line embedding or a witness of non-planarity.
pub fn planarity(g: &SimplicialGraph) -> Planarity {
    let (v, e) = (g.vertex_count(), g.edge_count());
    if v >= 3 && e > 3 * v - 6 {
        return Planarity::Nonplanar(NonplanarWitness::EdgeBound { vertices: v, edges: e });
    }
    match combinatorial_embedding(g) {
        Some(rot) => {
            let positions = straight_line_drawing(g, &rot);
            let emb = PlanarEmbedding { graph: g.clone(), positions };
            debug_assert!(emb.validate().is_ok(), "{:?}", emb.validate());
            Planarity::Planar(emb)
        }
        None => {
            let (kind, edges) = kuratowski_subgraph(g).expect("nonplanar graph has a witness");
            Planarity::Nonplanar(NonplanarWitness::Kuratowski { kind, edges })
        }
    }
}

/// Deletes edges while the graph stays nonplanar; what remains is a
/// subdivision of `K5` or `K3,3`. Returns `None` for planar graphs.
pub fn kuratowski_subgraph(
    g: &SimplicialGraph,
) -> Option<(KuratowskiKind, Vec<(VertexId, VertexId)>)> {
    if is_planar(g) {
        return None;
    }
    let mut edges = g.edges();
    let mut i = 0;
    while i < edges.len() {
        let mut trial = edges.clone();
        trial.remove(i);
        if is_planar(&g.spanning_subgraph(&trial)) {
            i += 1;
        } else {
            edges = trial;
        }
    }
    let h = g.spanning_subgraph(&edges);
    let branch: Vec<usize> =
        (0..h.vertex_count()).map(|v| h.degree(v)).filter(|&d| d >= 3).collect();
    let kind = if branch.len() == 5 && branch.iter().all(|&d| d == 4) {
        KuratowskiKind::K5
    } else {
        debug_assert!(branch.len() == 6 && branch.iter().all(|&d| d == 3));
        KuratowskiKind::K33
    };
    Some((kind, edges))
}

/// Checks that the drawing has distinct vertices, no vertex on a foreign
/// edge, and no two edges meeting except at a shared endpoint.
pub fn validate_straight_line(g: &SimplicialGraph, pos: &[[f64; 2]]) -> Result<(), String> {
    if pos.len() != g.vertex_count() {
        return Err("position count does not match vertex count".into());
    }
    if pos.iter().flatten().any(|c| !c.is_finite()) {
        return Err("non-finite coordinate".into());
    }
    let scale = pos.iter().flatten().fold(1e-300f64, |m, c| m.max(c.abs()));
    let eps = 1e-13 * scale;
    for i in 0..pos.len() {
        for j in i + 1..pos.len() {
            if dist(pos[i], pos[j]) <= eps {
                return Err(format!("vertices {i} and {j} coincide"));
            }
        }
    }
    let edges = g.edges();
    for &(a, b) in &edges {
        for w in 0..pos.len() {
            if w != a && w != b && on_segment(pos[w], pos[a], pos[b], eps * scale) {
                return Err(format!("vertex {w} lies on edge {{{a}, {b}}}"));
            }
        }
    }
    for (i, &(a, b)) in edges.iter().enumerate() {
        for &(c, d) in &edges[i + 1..] {
            let shared = [a, b].iter().filter(|x| **x == c || **x == d).count();
            if shared == 0 && segments_cross(pos[a], pos[b], pos[c], pos[d], eps * scale) {
                return Err(format!("edges {{{a}, {b}}} and {{{c}, {d}}} cross"));
            }
        }
    }
    Ok(())
}

fn dist(p: [f64; 2], q: [f64; 2]) -> f64 {
    (p[0] - q[0]).hypot(p[1] - q[1])
}

fn orient(p: [f64; 2], q: [f64; 2], r: [f64; 2]) -> f64 {
    (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
}

fn on_segment(p: [f64; 2], a: [f64; 2], b: [f64; 2], eps: f64) -> bool {
    orient(a, b, p).abs() <= eps
        && p[0] >= a[0].min(b[0]) - eps
        && p[0] <= a[0].max(b[0]) + eps
        && p[1] >= a[1].min(b[1]) - eps
        && p[1] <= a[1].max(b[1]) + eps
}

/// Closed segments `pq` and `rs` intersect (touching counts).
pub fn segments_cross(p: [f64; 2], q: [f64; 2], r: [f64; 2], s: [f64; 2], eps: f64) -> bool {
    let d1 = orient(r, s, p);
    let d2 = orient(r, s, q);
    let d3 = orient(p, q, r);
    let d4 = orient(p, q, s);
    if ((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps))
        && ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps))
    {
        return true;
    }
    on_segment(p, r, s, eps)
        || on_segment(q, r, s, eps)
        || on_segment(r, p, q, eps)
        || on_segment(s, p, q, eps)
}

/// Biconnected blocks as edge lists (Tarjan).
fn blocks(g: &SimplicialGraph) -> Vec<Vec<(VertexId, VertexId)>> {
    struct State {
        disc: Vec<usize>,
        low: Vec<usize>,
        time: usize,
        stack: Vec<(VertexId, VertexId)>,
        out: Vec<Vec<(VertexId, VertexId)>>,
    }
    fn dfs(g: &SimplicialGraph, u: VertexId, parent: Option<VertexId>, st: &mut State) {
        st.disc[u] = st.time;
        st.low[u] = st.time;
        st.time += 1;
        for v in g.neighbors(u) {
            if st.disc[v] == usize::MAX {
                st.stack.push((u, v));
                dfs(g, v, Some(u), st);
                st.low[u] = st.low[u].min(st.low[v]);
                if st.low[v] >= st.disc[u] {
                    let mut block = Vec::new();
                    while let Some(e) = st.stack.pop() {
                        block.push(e);
                        if e == (u, v) {
                            break;
                        }
                    }
                    st.out.push(block);
                }
            } else if Some(v) != parent && st.disc[v] < st.disc[u] {
                st.stack.push((u, v));
                st.low[u] = st.low[u].min(st.disc[v]);
            }
        }
    }
    let n = g.vertex_count();
    let mut st =
        State { disc: vec![usize::MAX; n], low: vec![0; n], time: 0, stack: vec![], out: vec![] };
    for v in 0..n {
        if st.disc[v] == usize::MAX {
            dfs(g, v, None, &mut st);
        }
    }
    st.out
}

/// Path-addition embedding of a biconnected graph with at least 3 vertices.
/// Returns consistently oriented face cycles, or `None` if nonplanar.
fn embed_block(adj: &[Vec<usize>]) -> Option<Vec<Vec<usize>>> {
    let n = adj.len();
    let key = |u: usize, v: usize| (u.min(v), u.max(v));

    // Initial cycle: remove edge 0–a, shortest path a → 0, close it up.
    let a = adj[0][0];
    let mut parent = vec![usize::MAX; n];
    parent[a] = a;
    let mut queue = VecDeque::from([a]);
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if parent[y] == usize::MAX && !(x == a && y == 0) {
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }
    let mut cycle = vec![0];
    let mut x = 0;
    while x != a {
        x = parent[x];
        cycle.push(x);
    }

    let mut in_h = vec![false; n];
    let mut h_edges = HashSet::new();
    for i in 0..cycle.len() {
        in_h[cycle[i]] = true;
        h_edges.insert(key(cycle[i], cycle[(i + 1) % cycle.len()]));
    }
    let mut faces = vec![cycle.clone(), cycle.iter().rev().copied().collect::<Vec<_>>()];

    loop {
        // Fragments: (attachments, path between two attachments).
        let mut fragments: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        for u in 0..n {
            for &v in &adj[u] {
                if u < v && in_h[u] && in_h[v] && !h_edges.contains(&key(u, v)) {
                    fragments.push((vec![u, v], vec![u, v]));
                }
            }
        }
        let mut comp = vec![usize::MAX; n];
        for s in 0..n {
            if in_h[s] || comp[s] != usize::MAX {
                continue;
            }
            let id = s;
            comp[s] = id;
            let mut members = vec![s];
            let mut q = VecDeque::from([s]);
            let mut attach = BTreeSet::new();
            while let Some(x) = q.pop_front() {
                for &y in &adj[x] {
                    if in_h[y] {
                        attach.insert(y);
                    } else if comp[y] == usize::MAX {
                        comp[y] = id;
                        members.push(y);
                        q.push_back(y);
                    }
                }
            }
            let attach: Vec<usize> = attach.into_iter().collect();
            let start = attach[0];
            // BFS from `start` through the component to another attachment.
            let mut prev: BTreeMap<usize, usize> = BTreeMap::new();
            let mut q = VecDeque::new();
            for &y in &adj[start] {
                if !in_h[y] && comp[y] == id && !prev.contains_key(&y) {
                    prev.insert(y, start);
                    q.push_back(y);
                }
            }
            let mut path = None;
            'bfs: while let Some(x) = q.pop_front() {
                for &y in &adj[x] {
                    if in_h[y] && y != start {
                        let mut p = vec![y, x];
                        let mut c = x;
                        while let Some(&pp) = prev.get(&c) {
                            p.push(pp);
                            if pp == start {
                                break;
                            }
                            c = pp;
                        }
                        p.reverse();
                        path = Some(p);
                        break 'bfs;
                    }
                    if !in_h[y] && !prev.contains_key(&y) {
                        prev.insert(y, x);
                        q.push_back(y);
                    }
                }
            }
            fragments.push((attach, path.expect("biconnected block has two attachments")));
        }
        if fragments.is_empty() {
            return Some(faces);
        }

        let admissible: Vec<Vec<usize>> = fragments
            .iter()
            .map(|(attach, _)| {
                faces
                    .iter()
                    .enumerate()
                    .filter(|(_, f)| attach.iter().all(|x| f.contains(x)))
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect();
        if admissible.iter().any(Vec::is_empty) {
            return None;
        }
        let pick = admissible.iter().position(|a| a.len() == 1).unwrap_or(0);
        let face_idx = admissible[pick][0];
        let path = &fragments[pick].1;

        let face = faces[face_idx].clone();
        let k = face.len();
        let (pa, pb) = (path[0], *path.last().unwrap());
        let i = face.iter().position(|&x| x == pa).unwrap();
        let j = face.iter().position(|&x| x == pb).unwrap();
        let interior = &path[1..path.len() - 1];

        let mut f1 = Vec::new();
        let mut t = i;
        loop {
            f1.push(face[t]);
            if t == j {
                break;
            }
            t = (t + 1) % k;
        }
        f1.extend(interior.iter().rev());
        let mut f2 = Vec::new();
        let mut t = j;
        loop {
            f2.push(face[t]);
            if t == i {
                break;
            }
            t = (t + 1) % k;
        }
        f2.extend(interior.iter());
        faces[face_idx] = f1;
        faces.push(f2);

        for w in path.windows(2) {
            h_edges.insert(key(w[0], w[1]));
        }
        for &x in path {
            in_h[x] = true;
        }
    }
}

/// A planar rotation system for `g`, or `None` when `g` is nonplanar.
pub(crate) fn combinatorial_embedding(g: &SimplicialGraph) -> Option<RotationSystem> {
    let (n, e) = (g.vertex_count(), g.edge_count());
    if n >= 3 && e > 3 * n - 6 {
        return None;
    }
    let mut rot: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    for block in blocks(g) {
        if block.len() == 1 {
            let (u, v) = block[0];
            rot[u].push(v);
            rot[v].push(u);
            continue;
        }
        let verts: BTreeSet<VertexId> = block.iter().flat_map(|&(u, v)| [u, v]).collect();
        let verts: Vec<VertexId> = verts.into_iter().collect();
        let local: BTreeMap<VertexId, usize> =
            verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut adj = vec![Vec::new(); verts.len()];
        for &(u, v) in &block {
            adj[local[&u]].push(local[&v]);
            adj[local[&v]].push(local[&u]);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        if verts.len() >= 3 && block.len() > 3 * verts.len() - 6 {
            return None;
        }
        let faces = embed_block(&adj)?;
        // In a face walk u → v → w, w precedes u at v.
        let mut succ: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); verts.len()];
        for f in &faces {
            let k = f.len();
            for t in 0..k {
                let (u, v, w) = (f[t], f[(t + 1) % k], f[(t + 2) % k]);
                succ[v].insert(w, u);
            }
        }
        for (lv, s) in succ.iter().enumerate() {
            let start = adj[lv][0];
            let mut cur = start;
            let mut order = Vec::with_capacity(adj[lv].len());
            loop {
                order.push(verts[cur]);
                cur = s[&cur];
                if cur == start {
                    break;
                }
            }
            if order.len() != adj[lv].len() {
                return None;
            }
            rot[verts[lv]].extend(order);
        }
    }
    let rs = RotationSystem { rot };
    if rs.is_spherical(g) {
        Some(rs)
    } else {
        None
    }
}

/// Triangulates every face of a spherical rotation system by inserting a
/// ring of new vertices inside it plus a centre vertex. Faces listed in
/// `skip` (indices into `faces`) that are already triangles are left alone.
///
/// Returns the augmented edge list (original vertices keep their indices),
/// the new vertex count, the triangles, and for every original face the
/// `(centre, ring)` vertices that were inserted.
pub(crate) struct Augmented {
    pub vertex_count: usize,
    pub edges: Vec<(usize, usize)>,
    pub triangles: Vec<[usize; 3]>,
    pub rings: Vec<Option<(usize, Vec<usize>)>>,
}

pub(crate) fn augment_faces(
    g: &SimplicialGraph,
    faces: &[Vec<VertexId>],
    keep_triangles: bool,
) -> Augmented {
    let mut next = g.vertex_count();
    let mut edges = g.edges();
    let mut triangles = Vec::new();
    let mut rings = Vec::with_capacity(faces.len());
    for f in faces {
        let k = f.len();
        if keep_triangles && k == 3 {
            triangles.push([f[0], f[1], f[2]]);
            rings.push(None);
            continue;
        }
        let ring: Vec<usize> = (next..next + k).collect();
        let centre = next + k;
        next += k + 1;
        for i in 0..k {
            let (c, cn) = (ring[i], ring[(i + 1) % k]);
            let (x, xn) = (f[i], f[(i + 1) % k]);
            edges.extend([(x, c), (xn, c), (c, cn), (centre, c)]);
            triangles.push([x, xn, c]);
            triangles.push([c, xn, cn]);
            triangles.push([centre, c, cn]);
        }
        rings.push(Some((centre, ring)));
    }
    Augmented { vertex_count: next, edges, triangles, rings }
}

/// Tutte barycentric drawing of each component; components side by side.
fn straight_line_drawing(g: &SimplicialGraph, rot: &RotationSystem) -> Vec<[f64; 2]> {
    let mut positions = vec![[0.0, 0.0]; g.vertex_count()];
    let mut x_offset = 0.0;
    for comp in g.components() {
        let (sub, map) = g.induced(&comp);
        let local: BTreeMap<VertexId, usize> =
            map.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let sub_rot = RotationSystem {
            rot: map.iter().map(|&v| rot.rot[v].iter().map(|w| local[w]).collect()).collect(),
        };
        let pts = tutte_component(&sub, &sub_rot);
        let (mut lo, mut hi) = ([f64::MAX; 2], [f64::MIN; 2]);
        for p in &pts {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-300);
        for (i, p) in pts.iter().enumerate() {
            let sx = if hi[0] > lo[0] { (p[0] - lo[0]) / span } else { 0.5 };
            let sy = if hi[1] > lo[1] { (p[1] - lo[1]) / span } else { 0.5 };
            positions[map[i]] = [x_offset + sx, sy];
        }
        x_offset += 1.5;
    }
    positions
}

fn tutte_component(g: &SimplicialGraph, rot: &RotationSystem) -> Vec<[f64; 2]> {
    match g.vertex_count() {
        1 => return vec![[0.0, 0.0]],
        2 => return vec![[0.0, 0.0], [1.0, 0.0]],
        _ => {}
    }
    let faces = rot.faces();
    let aug = augment_faces(g, &faces, false);
    let longest = (0..faces.len()).max_by_key(|&i| (faces[i].len(), usize::MAX - i)).unwrap();
    let (centre, ring) = aug.rings[longest].clone().expect("all faces ringed");
    let outer = [centre, ring[0], ring[1]];
    let fixed = [[0.0, 0.0], [1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]];

    let n = aug.vertex_count;
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in &aug.edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut m = DMatrix::<f64>::zeros(n, n);
    let mut bx = DVector::<f64>::zeros(n);
    let mut by = DVector::<f64>::zeros(n);
    for v in 0..n {
        if let Some(k) = outer.iter().position(|&o| o == v) {
            m[(v, v)] = 1.0;
            bx[v] = fixed[k][0];
            by[v] = fixed[k][1];
        } else {
            m[(v, v)] = adj[v].len() as f64;
            for &w in &adj[v] {
                m[(v, w)] -= 1.0;
            }
        }
    }
    let lu = m.lu();
    let xs = lu.solve(&bx).expect("Tutte system is nonsingular");
    let ys = lu.solve(&by).expect("Tutte system is nonsingular");
    (0..g.vertex_count()).map(|v| [xs[v], ys[v]]).collect()
}
