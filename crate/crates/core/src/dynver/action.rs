use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use super::field::TwistField;
use super::flow::{flow_point, FlowOptions};
use super::{DynError, HamiltonianField};
use crate::hyperlift::{assemble_hv, enumerate_group, smooth_hv, MobiusMap};
use crate::raagwords::{Letter, Word};
use crate::twistcore::{Configuration, Representation};

/// A way of evaluating the image of a word at a point.
pub trait WordAction: Sync {
    fn representation(&self) -> &Representation;

    /// Evaluates a word over the configuration graph.
    fn act_config(&self, w: &Word, z: Complex64) -> Result<Complex64, DynError>;

    /// Evaluates a word over the Artin graph, through `p*` if present.
    fn act(&self, w: &Word, z: Complex64) -> Result<Complex64, DynError> {
        let cw = self.representation().config_word(w)?;
        self.act_config(&cw, z)
    }
}

impl WordAction for Representation {
    fn representation(&self) -> &Representation {
        self
    }

    fn act_config(&self, w: &Word, z: Complex64) -> Result<Complex64, DynError> {
        Ok(self.apply_config_word(w, z))
    }
}

/// Generators realised as time-`N` flows of hamiltonian fields, one per
/// vertex of the configuration graph.
#[derive(Clone)]
pub struct IntegratedAction {
    pub rep: Representation,
    pub fields: Vec<Arc<dyn HamiltonianField>>,
    pub flow: FlowOptions,
    /// Points farther than this from the origin are reported as escaped.
    pub domain_radius: f64,
}

impl IntegratedAction {
    pub fn new(
        rep: Representation,
        fields: Vec<Arc<dyn HamiltonianField>>,
        flow: FlowOptions,
    ) -> Result<Self, DynError> {
        if fields.len() != rep.twists.len() {
            return Err(DynError::FieldCount { expected: rep.twists.len(), found: fields.len() });
        }
        Ok(Self { rep, fields, flow, domain_radius: 10.0 })
    }

    fn letter(&self, l: Letter, z: Complex64) -> Result<Complex64, DynError> {
        let n = self.rep.n as f64;
        let time = if l.inverse { -n } else { n };
        let out = flow_point(self.fields[l.vertex].as_ref(), z, time, &self.flow)?;
        if out.norm() > self.domain_radius {
            return Err(DynError::Escaped(out));
        }
        Ok(out)
    }
}

impl WordAction for IntegratedAction {
    fn representation(&self) -> &Representation {
        &self.rep
    }

    /// Same cancellation rule as the closed-form route: a letter undoing the
    /// last moving letter restores the stored point.
    fn act_config(&self, w: &Word, z: Complex64) -> Result<Complex64, DynError> {
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
            let next = self.letter(l, p)?;
            if next != p {
                stack.push((l, p));
                p = next;
            }
        }
        Ok(p)
    }
}

/// Applies `w` to every point, in parallel; output order follows `pts`.
pub fn rep_apply<A: WordAction + ?Sized>(action: &A, w: &Word, pts: &[Complex64]) -> Result<Vec<Complex64>, DynError> {
    let cw = action.representation().config_word(w)?;
    pts.par_iter().map(|&z| action.act_config(&cw, z)).collect()
}

/// The twist hamiltonians of a configuration at unit parameter, so that
/// their time-`N` flows are the generators `f_v^N`.
pub fn twist_fields(rep: &Representation) -> Vec<Arc<dyn HamiltonianField>> {
    rep.twists.iter().map(|t| Arc::new(TwistField(t.with_tau(1.0))) as Arc<dyn HamiltonianField>).collect()
}

/// `H_v^{(ε)}` for every annulus of `config`, lifted along the group
/// generated by `generators` up to word length `depth`. The configuration
/// must sit inside the fundamental domain.
pub fn lifted_fields(
    config: &Configuration,
    generators: &[MobiusMap],
    depth: usize,
    eps: f64,
    tol: f64,
) -> Result<Vec<Arc<dyn HamiltonianField>>, DynError> {
    let elements = enumerate_group(generators, depth);
    config
        .annuli
        .iter()
        .enumerate()
        .map(|(v, a)| {
            let hv = assemble_hv(v, &elements, a, tol)?;
            Ok(Arc::new(smooth_hv(Arc::new(hv), eps)?) as Arc<dyn HamiltonianField>)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::SimplicialGraph;
    use crate::twistcore::{build_representation, ConfigOptions};

    fn edge_rep() -> Representation {
        let g = SimplicialGraph::path(2);
        build_representation(&g, 2, None, &ConfigOptions { grid: 256, ..Default::default() }).unwrap()
    }

    #[test]
    fn empty_word_is_identity() {
        let rep = edge_rep();
        let pts: Vec<Complex64> = (0..8).map(|k| Complex64::from_polar(0.3, k as f64)).collect();
        assert_eq!(rep_apply(&rep, &Word::empty(), &pts).unwrap(), pts);
    }

    #[test]
    fn composition_is_pointwise() {
        let rep = edge_rep();
        let w1 = Word(vec![Letter::gen(0), Letter::inv(1)]);
        let w2 = Word(vec![Letter::gen(1), Letter::gen(1), Letter::gen(0)]);
        let [x, _] = rep.config.crossing_points(0, 1).unwrap();
        let pts: Vec<Complex64> = (0..6).map(|k| x + Complex64::from_polar(0.002 * k as f64, k as f64)).collect();
        let once = rep_apply(&rep, &w1.concat(&w2), &pts).unwrap();
        let twice = rep_apply(&rep, &w1, &rep_apply(&rep, &w2, &pts).unwrap()).unwrap();
        for (a, b) in once.iter().zip(&twice) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn integrated_generators_follow_closed_form() {
        let rep = edge_rep();
        let fields = twist_fields(&rep);
        let act = IntegratedAction::new(rep.clone(), fields, FlowOptions::fourth_order(4000)).unwrap();
        let a = rep.config.annuli[0];
        let w = Word::gen(0);
        for k in 0..6 {
            let r = a.r_inner + (k as f64 + 0.5) / 6.0 * (a.r_outer - a.r_inner);
            let z = a.center + Complex64::from_polar(r, k as f64);
            let exact = rep.apply_word(&w, z).unwrap();
            let got = act.act(&w, z).unwrap();
            assert!((got - exact).norm() < 1e-5, "{} {}", k, (got - exact).norm());
        }
        assert!(IntegratedAction::new(rep, Vec::new(), FlowOptions::default()).is_err());
    }

    #[test]
    fn lifted_smoothed_generators_keep_the_relations() {
        use crate::dynver::{verify_relations, RelationTolerances};
        use crate::hyperlift::{schottky_pair, QUAD_TOL};
        let g = SimplicialGraph::path(3);
        let opts = ConfigOptions { grid: 256, fit_radius: 0.4, ..Default::default() };
        let rep = build_representation(&g, 2, None, &opts).unwrap();
        let fields = lifted_fields(&rep.config, &schottky_pair(0.8).unwrap(), 1, 1e-2, QUAD_TOL).unwrap();
        let act = IntegratedAction::new(rep, fields, FlowOptions::default()).unwrap();
        let report = verify_relations(&act, 40, 5, &RelationTolerances::smoothed()).unwrap();
        assert!(report.all_pass(), "{}", report.to_json());
        assert_eq!(report.non_edges[0].max_displacement, 0.0);
        assert!(report.puncture_residual > 0.0);
    }
}
