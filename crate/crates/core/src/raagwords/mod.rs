//! Words in right-angled Artin groups.
//!
//! Convention: generators `g_u`, `g_v` commute exactly when `{u, v}` is NOT
//! an edge of the Artin graph. Letters are ordered by vertex index, with
//! `g_v < g_v^-1`; normal forms are shortlex-least reduced representatives.

mod hom;

pub use hom::{
    check_no_cancellation, hom_diagonal, hom_pullback, hom_retraction, Homomorphism,
};

use std::collections::{HashSet, VecDeque};
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphs::{OrbicoverViolation, SimplicialGraph, VertexId};

/// Closure size limit of the reference oracle.
pub const DEFAULT_CLOSURE_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RaagError {
    #[error("shuffle closure exceeded {limit} words")]
    ResourceCap { limit: usize },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("letter references vertex {0}, outside the Artin graph")]
    VertexOutOfRange(VertexId),
    #[error("word is over a different Artin graph than the homomorphism source")]
    GraphMismatch,
    #[error("images of g_{u} and g_{v} do not commute in the target group")]
    NotWellDefined { u: VertexId, v: VertexId },
    #[error("projection is not an orbi-cover: {0}")]
    NotOrbicover(OrbicoverViolation),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub vertex: VertexId,
    pub inverse: bool,
}

impl Letter {
    pub fn gen(vertex: VertexId) -> Self {
        Self { vertex, inverse: false }
    }

    pub fn inv(vertex: VertexId) -> Self {
        Self { vertex, inverse: true }
    }

    pub fn inverted(self) -> Self {
        Self { inverse: !self.inverse, ..self }
    }

    fn code(self) -> u32 {
        2 * self.vertex as u32 + self.inverse as u32
    }

    fn from_code(c: u32) -> Self {
        Self { vertex: (c / 2) as usize, inverse: c % 2 == 1 }
    }
}

/// A finite sequence of letters. Ordering is shortlex.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverted()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// `a b a^-1 b^-1`.
    pub fn commutator(a: &Word, b: &Word) -> Word {
        a.concat(b).concat(&a.inverse()).concat(&b.inverse())
    }

    pub fn gen(v: VertexId) -> Word {
        Word(vec![Letter::gen(v)])
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

/// A canonical representative produced by [`Raag::normal_form`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NormalForm {
    pub word: Word,
    pub canonical: bool,
}

/// The right-angled Artin group of a graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Raag {
    pub graph: SimplicialGraph,
}

impl Raag {
    pub fn new(graph: SimplicialGraph) -> Self {
        Self { graph }
    }

    pub fn rank(&self) -> usize {
        self.graph.vertex_count()
    }

    /// Distinct generators that commute (a non-edge).
    pub fn commute(&self, u: VertexId, v: VertexId) -> bool {
        u != v && !self.graph.has_edge(u, v)
    }

    pub fn check(&self, w: &Word) -> Result<(), RaagError> {
        match w.0.iter().find(|l| l.vertex >= self.rank()) {
            Some(l) => Err(RaagError::VertexOutOfRange(l.vertex)),
            None => Ok(()),
        }
    }

    /// Consecutive pairs `g_y^± g_x^±` with `y > x` and `{x, y}` a non-edge.
    pub fn inversion_count(&self, w: &Word) -> usize {
        w.0.windows(2)
            .filter(|p| p[0].vertex > p[1].vertex && self.commute(p[0].vertex, p[1].vertex))
            .count()
    }

    /// Freely reduces `w`: a letter cancels against an inverse reachable to
    /// its left through letters it commutes with.
    pub fn reduce(&self, w: &Word) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(w.len());
        for &x in &w.0 {
            let mut j = out.len();
            let mut cancelled = false;
            while j > 0 {
                let y = out[j - 1];
                if y.vertex == x.vertex {
                    if y.inverse != x.inverse {
                        out.remove(j - 1);
                        cancelled = true;
                    }
                    break;
                }
                if !self.commute(y.vertex, x.vertex) {
                    break;
                }
                j -= 1;
            }
            if !cancelled {
                out.push(x);
            }
        }
        Word(out)
    }

    /// Shortlex-least shuffle of `w` (no cancellation): greedy least letter
    /// among those that commute with everything still to their left.
    pub fn least_shuffle(&self, w: &Word) -> Word {
        let mut rest = w.0.clone();
        let mut out = Vec::with_capacity(rest.len());
        while !rest.is_empty() {
            let mut best: Option<usize> = None;
            for i in 0..rest.len() {
                let free = rest[..i].iter().all(|y| self.commute(y.vertex, rest[i].vertex));
                if free && best.is_none_or(|b| rest[i] < rest[b]) {
                    best = Some(i);
                }
            }
            out.push(rest.remove(best.expect("first letter is always free")));
        }
        Word(out)
    }

    pub fn normal_form(&self, w: &Word) -> NormalForm {
        NormalForm { word: self.least_shuffle(&self.reduce(w)), canonical: true }
    }

    pub fn geodesic_length(&self, w: &Word) -> usize {
        self.reduce(w).len()
    }

    pub fn equal(&self, a: &Word, b: &Word) -> bool {
        self.normal_form(a) == self.normal_form(b)
    }

    fn closure_reduce(&self, w: &Word, cap: usize) -> Result<(Vec<Vec<u32>>, usize), RaagError> {
        let mut current: Vec<u32> = w.0.iter().map(|l| l.code()).collect();
        'restart: loop {
            let mut seen: HashSet<Vec<u32>> = HashSet::new();
            let mut order = Vec::new();
            let mut queue = VecDeque::new();
            seen.insert(current.clone());
            queue.push_back(current.clone());
            while let Some(word) = queue.pop_front() {
                if let Some(i) = word.windows(2).position(|p| p[0] ^ 1 == p[1]) {
                    let mut next = word;
                    next.drain(i..i + 2);
                    current = next;
                    continue 'restart;
                }
                for i in 0..word.len().saturating_sub(1) {
                    let (a, b) = (word[i] / 2, word[i + 1] / 2);
                    if self.commute(a as usize, b as usize) {
                        let mut next = word.clone();
                        next.swap(i, i + 1);
                        if seen.insert(next.clone()) {
                            if seen.len() > cap {
                                return Err(RaagError::ResourceCap { limit: cap });
                            }
                            queue.push_back(next);
                        }
                    }
                }
                order.push(word);
            }
            let len = current.len();
            return Ok((order, len));
        }
    }

    /// Reference normal form: shuffle closure with cancellation restarts,
    /// then the shortlex-least closure member.
    pub fn closure_normal_form(&self, w: &Word, cap: usize) -> Result<NormalForm, RaagError> {
        let (members, _) = self.closure_reduce(w, cap)?;
        let best = members
            .into_iter()
            .map(|c| Word(c.into_iter().map(Letter::from_code).collect()))
            .min()
            .unwrap_or_default();
        Ok(NormalForm { word: best, canonical: true })
    }

    /// Decides `a = b` in the group by shuffle closure of `a·b^-1`.
    pub fn oracle_equal_capped(&self, a: &Word, b: &Word, cap: usize) -> Result<bool, RaagError> {
        let (_, len) = self.closure_reduce(&a.concat(&b.inverse()), cap)?;
        Ok(len == 0)
    }

    pub fn oracle_equal(&self, a: &Word, b: &Word) -> Result<bool, RaagError> {
        self.oracle_equal_capped(a, b, DEFAULT_CLOSURE_CAP)
    }

    /// All normal forms of length exactly `1..=max_len`, sorted shortlex.
    pub fn enumerate_normal_forms(
        &self,
        max_len: usize,
        cap: usize,
    ) -> Result<Vec<Word>, RaagError> {
        let mut all = Vec::new();
        let mut layer: Vec<Word> = vec![Word::empty()];
        for _ in 0..max_len {
            let mut next = HashSet::new();
            for w in &layer {
                for v in 0..self.rank() {
                    for l in [Letter::gen(v), Letter::inv(v)] {
                        let mut x = w.clone();
                        x.0.push(l);
                        let nf = self.normal_form(&x).word;
                        if nf.len() == w.len() + 1 {
                            next.insert(nf);
                        }
                    }
                }
                if next.len() + all.len() > cap {
                    return Err(RaagError::ResourceCap { limit: cap });
                }
            }
            let mut layer_sorted: Vec<Word> = next.into_iter().collect();
            layer_sorted.sort();
            all.extend(layer_sorted.iter().cloned());
            layer = layer_sorted;
        }
        Ok(all)
    }

    pub fn random_word<R: Rng>(&self, rng: &mut R, len: usize) -> Word {
        (0..len)
            .map(|_| Letter { vertex: rng.gen_range(0..self.rank()), inverse: rng.gen_bool(0.5) })
            .collect()
    }

    /// Tokens `v` and `v^-1`, whitespace separated.
    pub fn parse_word(&self, text: &str) -> Result<Word, RaagError> {
        parse_word(&self.graph, text)
    }

    pub fn format_word(&self, w: &Word) -> String {
        format_word(&self.graph, w)
    }
}

pub fn parse_word(g: &SimplicialGraph, text: &str) -> Result<Word, RaagError> {
    let body: String = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .collect::<Vec<_>>()
        .join(" ");
    body.split_whitespace()
        .map(|tok| {
            let (name, inverse) = match tok.strip_suffix("^-1") {
                Some(n) => (n, true),
                None => (tok, false),
            };
            g.index_of(name)
                .map(|vertex| Letter { vertex, inverse })
                .ok_or_else(|| RaagError::UnknownGenerator(name.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Word)
}

pub fn format_word(g: &SimplicialGraph, w: &Word) -> String {
    w.0.iter()
        .map(|l| {
            if l.inverse {
                format!("{}^-1", g.name(l.vertex))
            } else {
                g.name(l.vertex).to_string()
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|l| if l.inverse { format!("{}^-1", l.vertex) } else { l.vertex.to_string() })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two_isolated() -> Raag {
        Raag::new(SimplicialGraph::from_names(&["u", "v"], &[]).unwrap())
    }

    fn edge() -> Raag {
        Raag::new(SimplicialGraph::from_names(&["u", "v"], &[("u", "v")]).unwrap())
    }

    fn w(r: &Raag, s: &str) -> Word {
        r.parse_word(s).unwrap()
    }

    #[test]
    fn inversion_counts() {
        let r = two_isolated();
        assert_eq!(r.inversion_count(&Word::empty()), 0);
        assert_eq!(r.inversion_count(&w(&r, "v u")), 1);
        let e = edge();
        assert_eq!(e.inversion_count(&w(&e, "v u")), 0);
    }

    #[test]
    fn normal_form_examples() {
        let r = two_isolated();
        assert_eq!(r.normal_form(&w(&r, "v u")).word, w(&r, "u v"));
        let e = edge();
        assert_eq!(e.normal_form(&w(&e, "v u")).word, w(&e, "v u"));
        assert!(e.normal_form(&w(&e, "u u^-1")).word.is_empty());
        assert_eq!(r.closure_normal_form(&w(&r, "v u"), 100).unwrap().word, w(&r, "u v"));
    }

    #[test]
    fn generator_precedes_its_inverse() {
        let r = two_isolated();
        assert_eq!(r.normal_form(&w(&r, "v^-1 v^-1 u")).word, w(&r, "u v^-1 v^-1"));
        assert!(Letter::gen(0) < Letter::inv(0));
        assert!(Letter::inv(0) < Letter::gen(1));
    }

    #[test]
    fn oracle_on_commutators() {
        let r = two_isolated();
        let c = w(&r, "u v u^-1 v^-1");
        assert!(r.oracle_equal(&c, &Word::empty()).unwrap());
        let e = edge();
        let c = w(&e, "u v u^-1 v^-1");
        assert!(!e.oracle_equal(&c, &Word::empty()).unwrap());
    }

    #[test]
    fn geodesic_lengths() {
        let r = two_isolated();
        assert_eq!(r.geodesic_length(&Word::empty()), 0);
        assert_eq!(r.geodesic_length(&w(&r, "v u v^-1")), 1);
        let e = edge();
        assert_eq!(e.geodesic_length(&w(&e, "v u v^-1")), 3);
    }

    #[test]
    fn oracle_reports_cap() {
        let r = Raag::new(SimplicialGraph::empty(4));
        let long = w(&r, "0 1 2 3 0 1 2 3 0 1 2 3");
        let shuffled = w(&r, "3 2 1 0 3 2 1 0 3 2 1 0");
        assert!(matches!(
            r.oracle_equal_capped(&long, &shuffled.concat(&Word::gen(0)), 50),
            Err(RaagError::ResourceCap { limit: 50 })
        ));
    }

    #[test]
    fn normal_form_counts_on_small_graphs() {
        // Free group of rank 2: 4·3^(k-1) reduced words of length k.
        assert_eq!(edge().enumerate_normal_forms(2, 1000).unwrap().len(), 4 + 12);
        // Z^2: 4k elements at word length k.
        assert_eq!(two_isolated().enumerate_normal_forms(3, 1000).unwrap().len(), 4 + 8 + 12);
    }

    #[test]
    fn word_text_round_trip() {
        let r = edge();
        let x = w(&r, "u v^-1  u^-1 # trailing");
        assert_eq!(r.format_word(&x), "u v^-1 u^-1");
        assert!(matches!(r.parse_word("u z"), Err(RaagError::UnknownGenerator(_))));
    }

    fn graph_strategy() -> impl Strategy<Value = SimplicialGraph> {
        (1usize..=5).prop_flat_map(|n| {
            let pairs: Vec<(usize, usize)> =
                (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
            proptest::collection::vec(any::<bool>(), pairs.len()).prop_map(move |mask| {
                let edges = pairs.iter().zip(&mask).filter(|(_, m)| **m).map(|(p, _)| *p);
                SimplicialGraph::with_indices(n, edges).unwrap()
            })
        })
    }

    fn word_strategy(n: usize) -> impl Strategy<Value = Word> {
        proptest::collection::vec((0..n, any::<bool>()), 0..9)
            .prop_map(|v| v.into_iter().map(|(vertex, inverse)| Letter { vertex, inverse }).collect())
    }

    proptest! {
        #[test]
        fn fast_and_closure_normal_forms_agree(
            (g, x) in graph_strategy().prop_flat_map(|g| {
                let n = g.vertex_count();
                (Just(g), word_strategy(n))
            })
        ) {
            let r = Raag::new(g);
            let fast = r.normal_form(&x);
            prop_assert_eq!(&fast, &r.closure_normal_form(&x, DEFAULT_CLOSURE_CAP).unwrap());
            prop_assert_eq!(&r.normal_form(&fast.word), &fast);
            prop_assert!(fast.word.len() <= x.len());
            prop_assert!(r.oracle_equal(&x, &fast.word).unwrap());
        }

        #[test]
        fn normal_form_has_no_smaller_neighbour(
            (g, x) in graph_strategy().prop_flat_map(|g| {
                let n = g.vertex_count();
                (Just(g), word_strategy(n))
            })
        ) {
            let r = Raag::new(g);
            let nf = r.normal_form(&x).word;
            for i in 0..nf.len().saturating_sub(1) {
                if r.commute(nf.0[i].vertex, nf.0[i + 1].vertex) {
                    let mut y = nf.clone();
                    y.0.swap(i, i + 1);
                    prop_assert!(y > nf);
                }
            }
        }
    }
}
