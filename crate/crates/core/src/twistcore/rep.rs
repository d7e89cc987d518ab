use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::annulus::{double_dehn_twist, AnnulusTwist, PlaneMap};
use super::config::{build_configuration, ConfigOptions, Configuration};
use super::TwistError;
use crate::graphs::{
    find_planar_emulator, planarity, EmulatorOptions, EmulatorSearch, PlanarEmulator,
    Planarity, SimplicialGraph, VertexId,
};
use crate::raagwords::{hom_pullback, Homomorphism, Letter, Word};

/// `ψ_N(g_v) = f_v^N`, possibly precomposed with `p*` for a planar emulator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Representation {
    /// The Artin graph whose words are evaluated.
    pub artin: SimplicialGraph,
    /// Configuration of the Artin graph, or of its emulator.
    pub config: Configuration,
    pub n: u32,
    pub pullback: Option<Homomorphism>,
    /// `f_v^N` for every vertex of the configuration graph.
    pub twists: Vec<AnnulusTwist>,
}

/// Builds the representation; nonplanar graphs go through an emulator
/// (the supplied one, else a 2-sheet search).
pub fn build_representation(
    gamma: &SimplicialGraph,
    n: u32,
    emulator: Option<&PlanarEmulator>,
    opts: &ConfigOptions,
) -> Result<Representation, TwistError> {
    if n < 2 {
        return Err(TwistError::PowerTooSmall(n));
    }
    let (config, pullback) = match (emulator, planarity(gamma)) {
        (None, Planarity::Planar(emb)) => (build_configuration(&emb, opts)?, None),
        (Some(em), _) => {
            let p = hom_pullback(&em.projection).map_err(|e| TwistError::Emulator(e.to_string()))?;
            (build_configuration(&em.embedding, opts)?, Some(p))
        }
        (None, Planarity::Nonplanar(_)) => {
            match find_planar_emulator(gamma, &EmulatorOptions::default()) {
                EmulatorSearch::Found(em) => {
                    let p = hom_pullback(&em.projection)
                        .map_err(|e| TwistError::Emulator(e.to_string()))?;
                    (build_configuration(&em.embedding, opts)?, Some(p))
                }
                EmulatorSearch::NotFound { .. } => return Err(TwistError::NoEmulator),
            }
        }
    };
    let twists = config.annuli.iter().map(|&a| double_dehn_twist(a, n as f64)).collect();
    Ok(Representation { artin: gamma.clone(), config, n, pullback, twists })
}

impl Representation {
    /// The word over the configuration graph that `w` is sent to.
    pub fn config_word(&self, w: &Word) -> Result<Word, TwistError> {
        match &self.pullback {
            Some(p) => p.apply(w).map_err(|e| TwistError::Emulator(e.to_string())),
            None => Ok(w.clone()),
        }
    }

    pub fn generator(&self, v: VertexId) -> &AnnulusTwist {
        &self.twists[v]
    }

    fn letter(&self, l: Letter, z: Complex64) -> Complex64 {
        let f = &self.twists[l.vertex];
        if l.inverse {
            f.apply_inverse(z)
        } else {
            f.apply(z)
        }
    }

    /// Evaluates a configuration-graph word right to left. A letter that
    /// undoes the most recent moving letter restores the stored point, so
    /// `f ∘ f⁻¹` is the identity bit for bit.
    pub fn apply_config_word(&self, w: &Word, z: Complex64) -> Complex64 {
        let mut stack: Vec<(Letter, Complex64)> = Vec::new();
        let mut p = z;
        for &l in w.letters().iter().rev() {
            if let Some(&(top, before)) = stack.last() {
                if top == l.inverted() {
                    stack.pop();
                    p = before;
                    continue;
                }
            }
            let next = self.letter(l, p);
            if next != p {
                stack.push((l, p));
                p = next;
            }
        }
        p
    }

    pub fn apply_word(&self, w: &Word, z: Complex64) -> Result<Complex64, TwistError> {
        Ok(self.apply_config_word(&self.config_word(w)?, z))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> ConfigOptions {
        ConfigOptions { grid: 256, ..Default::default() }
    }

    #[test]
    fn power_one_is_rejected() {
        let g = SimplicialGraph::empty(2);
        assert!(matches!(build_representation(&g, 1, None, &opts()), Err(TwistError::PowerTooSmall(1))));
    }

    #[test]
    fn non_adjacent_generators_commute_exactly() {
        let g = SimplicialGraph::empty(2);
        let rep = build_representation(&g, 2, None, &opts()).unwrap();
        let c = Word::commutator(&Word::gen(0), &Word::gen(1));
        for a in &rep.config.annuli {
            for k in 0..16 {
                let z = a.center + Complex64::from_polar(a.central_radius() * 1.01, k as f64);
                assert_eq!(rep.apply_word(&c, z).unwrap(), z);
            }
        }
    }

    #[test]
    fn edge_commutator_moves_overlap_point() {
        let g = SimplicialGraph::path(2);
        let rep = build_representation(&g, 2, None, &opts()).unwrap();
        let c = Word::commutator(&Word::gen(0), &Word::gen(1));
        let [p, _] = rep.config.crossing_points(0, 1).unwrap();
        let a = &rep.config.annuli[0];
        let z = p + (p - a.center) * (0.3 * rep.config.provenance.widths[0] / a.central_radius());
        assert!((rep.apply_word(&c, z).unwrap() - z).norm() > 1e-3);
    }

    #[test]
    fn k5_goes_through_its_cover() {
        let rep = build_representation(&SimplicialGraph::complete(5), 2, None, &opts()).unwrap();
        assert_eq!(rep.config.vertex_count(), 10);
        let p = rep.pullback.as_ref().unwrap();
        assert!(p.images.iter().all(|w| w.len() == 2));
    }
}
