//! Homomorphisms between RAAGs given by generator images.

use serde::{Deserialize, Serialize};

use super::{format_word, parse_word, Letter, Raag, RaagError, Word};
use crate::graphs::{check_orbicover, double, GraphMorphism, SimplicialGraph};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Homomorphism {
    pub source: SimplicialGraph,
    pub target: SimplicialGraph,
    /// Image of `g_v` for each source vertex `v`.
    pub images: Vec<Word>,
}

impl Homomorphism {
    pub fn new(
        source: SimplicialGraph,
        target: SimplicialGraph,
        images: Vec<Word>,
    ) -> Result<Self, RaagError> {
        if images.len() != source.vertex_count() {
            return Err(RaagError::GraphMismatch);
        }
        let t = Raag::new(target.clone());
        for w in &images {
            t.check(w)?;
        }
        Ok(Self { source, target, images })
    }

    pub fn identity(g: &SimplicialGraph) -> Self {
        let images = (0..g.vertex_count()).map(Word::gen).collect();
        Self { source: g.clone(), target: g.clone(), images }
    }

    /// Letterwise substitution; `g_v^-1` maps to the inverse image word.
    pub fn apply(&self, w: &Word) -> Result<Word, RaagError> {
        let mut out = Vec::new();
        for l in &w.0 {
            let img = self.images.get(l.vertex).ok_or(RaagError::GraphMismatch)?;
            if l.inverse {
                out.extend(img.0.iter().rev().map(|x| x.inverted()));
            } else {
                out.extend_from_slice(&img.0);
            }
        }
        Ok(Word(out))
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Homomorphism) -> Result<Homomorphism, RaagError> {
        if self.target != other.source {
            return Err(RaagError::GraphMismatch);
        }
        let images = self.images.iter().map(|w| other.apply(w)).collect::<Result<_, _>>()?;
        Ok(Homomorphism { source: self.source.clone(), target: other.target.clone(), images })
    }

    /// For every non-edge `{u, v}` of the source, the images must commute in
    /// the target group (decided by the shuffle-closure oracle).
    pub fn check_well_defined(&self) -> Result<(), RaagError> {
        let t = Raag::new(self.target.clone());
        let n = self.source.vertex_count();
        for u in 0..n {
            for v in u + 1..n {
                if self.source.has_edge(u, v) {
                    continue;
                }
                let c = Word::commutator(&self.images[u], &self.images[v]);
                if !t.oracle_equal(&c, &Word::empty())? {
                    return Err(RaagError::NotWellDefined { u, v });
                }
            }
        }
        Ok(())
    }

    /// Lines `image <v> := <word>`.
    pub fn parse(
        text: &str,
        source: &SimplicialGraph,
        target: &SimplicialGraph,
    ) -> Result<Self, RaagError> {
        let mut images = vec![None; source.vertex_count()];
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| RaagError::Parse { line: i + 1, msg: msg.to_string() };
            let rest = line.strip_prefix("image").ok_or_else(|| err("expected `image`"))?;
            let (name, word) = rest.split_once(":=").ok_or_else(|| err("expected `:=`"))?;
            let v = source
                .index_of(name.trim())
                .ok_or_else(|| RaagError::UnknownGenerator(name.trim().to_string()))?;
            images[v] = Some(parse_word(target, word)?);
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(v, w)| {
                w.ok_or_else(|| RaagError::Parse {
                    line: 0,
                    msg: format!("no image for `{}`", source.name(v)),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(source.clone(), target.clone(), images)
    }

    pub fn to_text(&self) -> String {
        self.images
            .iter()
            .enumerate()
            .map(|(v, w)| {
                format!("image {} := {}\n", self.source.name(v), format_word(&self.target, w))
            })
            .collect()
    }
}

/// `δ(g_v) = g_{v+} g_{v-}` into the double.
pub fn hom_diagonal(g: &SimplicialGraph) -> Homomorphism {
    let images =
        (0..g.vertex_count()).map(|v| Word(vec![Letter::gen(2 * v), Letter::gen(2 * v + 1)])).collect();
    Homomorphism { source: g.clone(), target: double(g), images }
}

/// `π(g_{v+}) = g_v`, `π(g_{v-}) = 1`.
pub fn hom_retraction(g: &SimplicialGraph) -> Homomorphism {
    let images = (0..2 * g.vertex_count())
        .map(|x| if x % 2 == 0 { Word::gen(x / 2) } else { Word::empty() })
        .collect();
    Homomorphism { source: double(g), target: g.clone(), images }
}

/// `p*(g_v)` is the product of the fibre generators in cover vertex order.
pub fn hom_pullback(p: &GraphMorphism) -> Result<Homomorphism, RaagError> {
    check_orbicover(p).map_err(RaagError::NotOrbicover)?;
    let images = (0..p.target.vertex_count())
        .map(|v| p.fiber(v).into_iter().map(Letter::gen).collect())
        .collect();
    Ok(Homomorphism { source: p.target.clone(), target: p.source.clone(), images })
}

/// Length additivity: `|h(w)|` in the target equals the sum of the image
/// lengths of the letters of `w`. A letter with trivial image counts as a
/// cancellation, so collapsing maps never pass.
pub fn check_no_cancellation(h: &Homomorphism, w: &Word) -> Result<bool, RaagError> {
    if w.0.iter().any(|l| h.images.get(l.vertex).is_some_and(Word::is_empty)) {
        return Ok(false);
    }
    let t = Raag::new(h.target.clone());
    let expected: usize = w.0.iter().map(|l| h.images[l.vertex].len()).sum();
    Ok(t.geodesic_length(&h.apply(w)?) == expected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn diagonal_on_single_vertex() {
        let g = SimplicialGraph::empty(1);
        let d = hom_diagonal(&g);
        let img = d.apply(&Word::gen(0)).unwrap();
        assert_eq!(Raag::new(d.target.clone()).geodesic_length(&img), 2);
        assert_eq!(format_word(&d.target, &img), "0+ 0-");
    }

    #[test]
    fn diagonal_well_defined_and_edge_images_do_not_commute() {
        let pair = SimplicialGraph::from_names(&["u", "v"], &[]).unwrap();
        hom_diagonal(&pair).check_well_defined().unwrap();
        let edge = SimplicialGraph::from_names(&["u", "v"], &[("u", "v")]).unwrap();
        let d = hom_diagonal(&edge);
        let t = Raag::new(d.target.clone());
        let c = Word::commutator(&d.images[0], &d.images[1]);
        assert!(!t.oracle_equal(&c, &Word::empty()).unwrap());
    }

    #[test]
    fn substitution_examples() {
        let g = SimplicialGraph::from_names(&["u", "v"], &[("u", "v")]).unwrap();
        let d = hom_diagonal(&g);
        let img = d.apply(&Word(vec![Letter::gen(0), Letter::gen(1)])).unwrap();
        assert_eq!(format_word(&d.target, &img), "u+ u- v+ v-");
        let p = hom_retraction(&g);
        let x = parse_word(&p.source, "u+ v-").unwrap();
        assert_eq!(p.apply(&x).unwrap(), Word::gen(0));
        assert_eq!(p.apply(&Word::empty()).unwrap(), Word::empty());
        assert!(p.apply(&parse_word(&p.source, "u-").unwrap()).unwrap().is_empty());
    }

    #[test]
    fn retraction_after_diagonal_is_identity() {
        let g = SimplicialGraph::from_names(&["a", "b", "c"], &[("a", "b")]).unwrap();
        let r = Raag::new(g.clone());
        let composite = hom_diagonal(&g).then(&hom_retraction(&g)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for len in 0..10 {
            let w = r.random_word(&mut rng, len);
            assert_eq!(r.normal_form(&composite.apply(&w).unwrap()), r.normal_form(&w));
        }
    }

    #[test]
    fn pullback_of_double_projection_matches_diagonal() {
        let g = SimplicialGraph::complete(3);
        let p = hom_pullback(&GraphMorphism::double_projection(&g)).unwrap();
        let d = hom_diagonal(&g);
        let t = Raag::new(d.target.clone());
        for v in 0..3 {
            assert!(t.oracle_equal(&p.images[v], &d.images[v]).unwrap());
        }
        let id = hom_pullback(&GraphMorphism::identity(&g)).unwrap();
        assert_eq!(id, Homomorphism::identity(&g));
    }

    #[test]
    fn pullback_rejects_non_cover() {
        let square = SimplicialGraph::cycle(4);
        let path = SimplicialGraph::path(3);
        let m = GraphMorphism::new(square, path, vec![0, 1, 0, 1]).unwrap();
        assert!(matches!(hom_pullback(&m), Err(RaagError::NotOrbicover(_))));
    }

    #[test]
    fn trivial_map_fails_length_additivity() {
        let g = SimplicialGraph::path(2);
        let h = Homomorphism::new(g.clone(), g.clone(), vec![Word::empty(), Word::empty()]).unwrap();
        assert!(!check_no_cancellation(&h, &Word::gen(0)).unwrap());
        let d = hom_diagonal(&g);
        let w = Raag::new(g).normal_form(&Word(vec![Letter::gen(0), Letter::inv(1)])).word;
        assert!(check_no_cancellation(&d, &w).unwrap());
    }

    #[test]
    fn text_round_trip() {
        let g = SimplicialGraph::path(3);
        let d = hom_diagonal(&g);
        assert_eq!(Homomorphism::parse(&d.to_text(), &d.source, &d.target).unwrap(), d);
    }
}
