use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::action::WordAction;
use super::DynError;
use crate::graphs::VertexId;
use crate::raagwords::{Raag, RaagError, Word};
use crate::twistcore::{Configuration, RoundAnnulus};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelationTolerances {
    /// Largest allowed displacement of a non-edge commutator.
    pub commute: f64,
    /// Some overlap point must move farther than this under an edge commutator.
    pub edge_floor: f64,
    /// `None` records the puncture residual without judging it; mollified
    /// fields do not fix the punctures.
    pub puncture: Option<f64>,
}

impl RelationTolerances {
    pub fn closed_form() -> Self {
        Self { commute: 1e-9, edge_floor: 1e-3, puncture: Some(1e-9) }
    }

    pub fn integrated() -> Self {
        Self { commute: 1e-5, edge_floor: 1e-3, puncture: Some(1e-5) }
    }

    pub fn smoothed() -> Self {
        Self { puncture: None, ..Self::integrated() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairResidual {
    pub u: VertexId,
    pub v: VertexId,
    pub points: usize,
    pub max_displacement: f64,
    pub worst_point: Option<Complex64>,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobianStats {
    pub count: usize,
    pub mean_deviation: f64,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Nontrivial,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub word: String,
    pub length: usize,
    pub max_displacement: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeTable {
    pub max_len: usize,
    pub seed: u64,
    pub marked_points: usize,
    pub threshold: f64,
    pub enumerated: usize,
    pub random: usize,
    /// The enumeration hit its cap and only random words were probed.
    pub capped: bool,
    pub rows: Vec<ProbeRow>,
}

impl ProbeTable {
    pub fn nontrivial(&self) -> usize {
        self.rows.iter().filter(|r| r.verdict == Verdict::Nontrivial).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub samples: usize,
    pub n: u32,
    pub tolerances: RelationTolerances,
    pub non_edges: Vec<PairResidual>,
    pub edges: Vec<PairResidual>,
    pub puncture_residual: f64,
    pub punctures_pass: bool,
    /// Per Artin generator.
    pub jacobian: Vec<JacobianStats>,
    pub faithfulness: Option<ProbeTable>,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.non_edges.iter().all(|p| p.pass) && self.edges.iter().all(|p| p.pass) && self.punctures_pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Configuration vertices appearing in the image of `g_u`.
fn fiber<A: WordAction + ?Sized>(action: &A, u: VertexId) -> Result<Vec<VertexId>, DynError> {
    let w = action.representation().config_word(&Word::gen(u))?;
    let set: BTreeSet<VertexId> = w.letters().iter().map(|l| l.vertex).collect();
    Ok(set.into_iter().collect())
}

fn sample_annulus<R: Rng>(a: &RoundAnnulus, rng: &mut R) -> Complex64 {
    let r2 = rng.gen_range(a.r_inner.powi(2)..a.r_outer.powi(2));
    a.center + Complex64::from_polar(r2.sqrt(), rng.gen_range(0.0..TAU))
}

/// `count` points, area-uniform in a randomly chosen annulus of `fibers`.
fn support_samples(config: &Configuration, fibers: &[VertexId], count: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let v = fibers[rng.gen_range(0..fibers.len())];
            sample_annulus(&config.annuli[v], &mut rng)
        })
        .collect()
}

/// Four points in each of the two lens regions where `A(u)` and `A(v)` meet.
fn overlap_points(config: &Configuration, u: VertexId, v: VertexId) -> Vec<Complex64> {
    let Some(cross) = config.crossing_points(u, v) else {
        return Vec::new();
    };
    let (a, b) = (config.annuli[u], config.annuli[v]);
    let delta = 0.25 * (a.r_outer - a.r_inner).min(b.r_outer - b.r_inner);
    let mut out = Vec::with_capacity(8);
    for x in cross {
        let nu = (x - a.center) / (x - a.center).norm();
        let nv = (x - b.center) / (x - b.center).norm();
        out.extend([x + nu * delta, x - nu * delta, x + nv * delta, x - nv * delta]);
    }
    out
}

fn max_displacement<A: WordAction + ?Sized>(
    action: &A,
    w: &Word,
    pts: &[Complex64],
) -> Result<(f64, Option<Complex64>), DynError> {
    let cw = action.representation().config_word(w)?;
    let moved: Vec<(f64, Complex64)> =
        pts.par_iter().map(|&z| Ok(((action.act_config(&cw, z)? - z).norm(), z))).collect::<Result<_, DynError>>()?;
    Ok(moved.into_iter().fold((0.0, None), |acc, (d, z)| if d > acc.0 { (d, Some(z)) } else { acc }))
}

/// Checks the defining relators, non-commutation across edges and
/// fixedness of the punctures. Every point is drawn from `seed`.
pub fn verify_relations<A: WordAction + ?Sized>(
    action: &A,
    samples: usize,
    seed: u64,
    tol: &RelationTolerances,
) -> Result<VerificationReport, DynError> {
    let rep = action.representation();
    let config = &rep.config;
    let artin = &rep.artin;
    let n = artin.vertex_count();
    let fibers: Vec<Vec<VertexId>> = (0..n).map(|u| fiber(action, u)).collect::<Result<_, _>>()?;
    let mut non_edges = Vec::new();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let c = Word::commutator(&Word::gen(u), &Word::gen(v));
            if artin.has_edge(u, v) {
                let mut pts = Vec::new();
                for &a in &fibers[u] {
                    for &b in &fibers[v] {
                        if config.graph.has_edge(a, b) {
                            pts.extend(overlap_points(config, a, b));
                        }
                    }
                }
                let (d, worst) = max_displacement(action, &c, &pts)?;
                edges.push(PairResidual { u, v, points: pts.len(), max_displacement: d, worst_point: worst, pass: d > tol.edge_floor });
            } else {
                let both: Vec<VertexId> = fibers[u].iter().chain(&fibers[v]).copied().collect();
                let pair_seed = seed ^ ((u as u64) << 32 | v as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
                let pts = support_samples(config, &both, samples, pair_seed);
                let (d, worst) = max_displacement(action, &c, &pts)?;
                non_edges.push(PairResidual { u, v, points: pts.len(), max_displacement: d, worst_point: worst, pass: d <= tol.commute });
            }
        }
    }
    let punctures = config.punctures();
    let mut puncture_residual: f64 = 0.0;
    for u in 0..n {
        for w in [Word::gen(u), Word::gen(u).inverse()] {
            puncture_residual = puncture_residual.max(max_displacement(action, &w, &punctures)?.0);
        }
    }
    Ok(VerificationReport {
        seed,
        samples,
        n: rep.n,
        tolerances: *tol,
        non_edges,
        edges,
        puncture_residual,
        punctures_pass: tol.puncture.map_or(true, |p| puncture_residual <= p),
        jacobian: Vec::new(),
        faithfulness: None,
    })
}

/// Jacobian statistics of every Artin generator at `count` seeded support points.
pub fn generator_jacobians<A: WordAction + ?Sized>(
    action: &A,
    count: usize,
    seed: u64,
    step: f64,
) -> Result<Vec<JacobianStats>, DynError> {
    let rep = action.representation();
    (0..rep.artin.vertex_count())
        .map(|u| {
            let f = fiber(action, u)?;
            let pts = support_samples(&rep.config, &f, count, seed.wrapping_add(u as u64));
            let cw = rep.config_word(&Word::gen(u))?;
            jacobian_probe(&|z| action.act_config(&cw, z), &pts, step)
        })
        .collect()
}

/// Fourth-order central-difference Jacobian determinant at each point and
/// its deviation from 1. The determinant is taken a second time in the
/// orthonormal frame of the least-stretched direction of the first
/// estimate, which keeps strong shears well conditioned.
pub fn jacobian_probe<F>(map: &F, pts: &[Complex64], step: f64) -> Result<JacobianStats, DynError>
where
    F: Fn(Complex64) -> Result<Complex64, DynError> + Sync,
{
    if !(step > 0.0) {
        return Err(DynError::BadArgument(format!("step must be positive, got {step}")));
    }
    let devs: Vec<f64> = pts
        .par_iter()
        .map(|&z| {
            let d = |e: Complex64| -> Result<Complex64, DynError> {
                let e = e * step;
                Ok((map(z - e * 2.0)? - map(z + e * 2.0)? + (map(z + e)? - map(z - e)?) * 8.0) / (12.0 * step))
            };
            let fx = d(Complex64::new(1.0, 0.0))?;
            let fy = d(Complex64::new(0.0, 1.0))?;
            // Smallest eigenvector of JᵀJ.
            let (a, b, c) = (fx.norm_sqr(), fx.re * fy.re + fx.im * fy.im, fy.norm_sqr());
            let v = Complex64::from_polar(1.0, 0.5 * (2.0 * b).atan2(a - c) + FRAC_PI_2);
            let fv = d(v)?;
            let fw = d(v * Complex64::i())?;
            Ok((fv.re * fw.im - fv.im * fw.re - 1.0).abs())
        })
        .collect::<Result<_, DynError>>()?;
    let count = devs.len();
    Ok(JacobianStats {
        count,
        mean_deviation: if count == 0 { 0.0 } else { devs.iter().sum::<f64>() / count as f64 },
        max_deviation: devs.iter().copied().fold(0.0, f64::max),
    })
}

/// 8 points on each central circle, 4 near each puncture and 4 in each
/// overlap region.
pub fn default_marked_points(config: &Configuration) -> Vec<Complex64> {
    let mut out = Vec::new();
    for c in &config.circles {
        // Offset so the points avoid the punctures placed on the circle.
        out.extend((0..8).map(|k| c.center + Complex64::from_polar(c.radius, (k as f64 + 0.37) * TAU / 8.0)));
    }
    let min_width = config.annuli.iter().map(|a| a.r_outer - a.r_inner).fold(f64::INFINITY, f64::min);
    let r = 0.1 * min_width;
    for p in config.punctures() {
        out.extend((0..4).map(|k| p + Complex64::from_polar(r, 0.3 + k as f64 * TAU / 4.0)));
    }
    for (u, v) in config.graph.edges() {
        let all = overlap_points(config, u, v);
        out.extend(all.into_iter().step_by(2));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeOptions {
    pub threshold: f64,
    /// Largest number of enumerated normal forms.
    pub cap: usize,
    /// Random words of length `max_len + 1 ..= 2·max_len`.
    pub random_words: usize,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self { threshold: 1e-6, cap: 20_000, random_words: 32 }
    }
}

/// Displacement of the marked points by every nontrivial normal form up to
/// `max_len`, plus seeded longer words. Words trivial in the group are
/// skipped.
pub fn faithfulness_probe<A: WordAction + ?Sized>(
    action: &A,
    max_len: usize,
    marked: &[Complex64],
    seed: u64,
    opts: &ProbeOptions,
) -> Result<ProbeTable, DynError> {
    if max_len == 0 {
        return Err(DynError::BadArgument("max_len must be at least 1".into()));
    }
    let rep = action.representation();
    let raag = Raag::new(rep.artin.clone());
    let (mut words, capped) = match raag.enumerate_normal_forms(max_len, opts.cap) {
        Ok(w) => (w, false),
        Err(RaagError::ResourceCap { .. }) => (Vec::new(), true),
        Err(e) => return Err(e.into()),
    };
    let enumerated = words.len();
    let mut seen: BTreeSet<Word> = words.iter().cloned().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut random = 0;
    for _ in 0..opts.random_words {
        let len = rng.gen_range(max_len + 1..=2 * max_len);
        let w = raag.normal_form(&raag.random_word(&mut rng, len)).word;
        if !w.is_empty() && seen.insert(w.clone()) {
            words.push(w);
            random += 1;
        }
    }
    let rows = words
        .par_iter()
        .map(|w| {
            let (d, _) = max_displacement_serial(action, w, marked)?;
            Ok(ProbeRow {
                word: raag.format_word(w),
                length: w.len(),
                max_displacement: d,
                verdict: if d > opts.threshold { Verdict::Nontrivial } else { Verdict::Inconclusive },
            })
        })
        .collect::<Result<Vec<_>, DynError>>()?;
    Ok(ProbeTable {
        max_len,
        seed,
        marked_points: marked.len(),
        threshold: opts.threshold,
        enumerated,
        random,
        capped,
        rows,
    })
}

fn max_displacement_serial<A: WordAction + ?Sized>(
    action: &A,
    w: &Word,
    pts: &[Complex64],
) -> Result<(f64, Option<Complex64>), DynError> {
    let cw = action.representation().config_word(w)?;
    let mut best = (0.0, None);
    for &z in pts {
        let d = (action.act_config(&cw, z)? - z).norm();
        if d > best.0 {
            best = (d, Some(z));
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::SimplicialGraph;
    use crate::twistcore::{build_representation, ConfigOptions, PlaneMap, Representation};

    fn rep(g: SimplicialGraph) -> Representation {
        build_representation(&g, 2, None, &ConfigOptions { grid: 256, ..Default::default() }).unwrap()
    }

    #[test]
    fn edgeless_graph_passes() {
        let r = rep(SimplicialGraph::empty(3));
        let report = verify_relations(&r, 200, 7, &RelationTolerances::closed_form()).unwrap();
        assert_eq!(report.non_edges.len(), 3);
        assert!(report.edges.is_empty());
        assert!(report.all_pass());
        for p in &report.non_edges {
            assert_eq!(p.max_displacement, 0.0, "{p:?}");
        }
    }

    #[test]
    fn single_edge_does_not_commute() {
        let r = rep(SimplicialGraph::path(2));
        let report = verify_relations(&r, 100, 7, &RelationTolerances::closed_form()).unwrap();
        assert_eq!(report.edges.len(), 1);
        assert!(report.edges[0].pass, "{:?}", report.edges[0]);
        assert!(report.all_pass());
        let again = verify_relations(&r, 100, 7, &RelationTolerances::closed_form()).unwrap();
        assert_eq!(report, again);
    }

    #[test]
    fn jacobian_of_identity_and_twist() {
        let pts: Vec<Complex64> = (0..10).map(|k| Complex64::from_polar(0.5, k as f64)).collect();
        let id = jacobian_probe(&|z| Ok(z), &pts, 1e-4).unwrap();
        assert!(id.max_deviation < 1e-12);
        let r = rep(SimplicialGraph::path(2));
        let tw = r.twists[0];
        let a = tw.annulus;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<Complex64> = (0..50).map(|_| sample_annulus(&a, &mut rng)).collect();
        let st = jacobian_probe(&|z| Ok(tw.apply(z)), &pts, 1e-6).unwrap();
        assert!(st.max_deviation < 1e-6, "{st:?}");
        assert!(jacobian_probe(&|z| Ok(z), &pts, 0.0).is_err());
    }

    #[test]
    fn probe_on_an_edge() {
        let r = rep(SimplicialGraph::path(2));
        let marked = default_marked_points(&r.config);
        let table = faithfulness_probe(&r, 2, &marked, 11, &ProbeOptions::default()).unwrap();
        assert_eq!(table.enumerated, 16);
        assert!(table.rows.iter().all(|row| row.verdict == Verdict::Nontrivial), "{table:?}");
        let g = faithfulness_probe(&r, 1, &marked, 11, &ProbeOptions { random_words: 0, ..Default::default() }).unwrap();
        assert_eq!(g.rows.len(), 4);
        assert!(g.rows[0].max_displacement > 1e-6);
    }
}
