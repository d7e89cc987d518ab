use std::path::Path;
use std::sync::Arc;

use anyhow::{Context, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use raagham::dynver::{
    default_marked_points, faithfulness_probe, generator_jacobians, lifted_fields, polydisk_extend, rep_apply,
    twist_fields, verify_relations, FlowOptions, HamiltonianField, IntegratedAction, ProbeOptions, RelationTolerances,
    WordAction,
};
use raagham::graphs::{
    certificate_no_emulator, check_orbicover, double, find_planar_emulator, planarity, EmulatorOptions,
    EmulatorSearch, GraphMorphism, NoEmulatorVerdict, PlanarEmulator, Planarity, SimplicialGraph,
};
use raagham::hyperlift::{
    analytic_report, assemble_hv, default_annulus, enumerate_group, schottky_pair, smooth_hv, smoothing_study,
    translates_svg, AssembledHamiltonian, MobiusMap, ReportOptions,
};
use raagham::raagwords::{hom_diagonal, hom_pullback, Raag, Word};
use raagham::twistcore::{build_representation, ConfigOptions, Representation};

use crate::config::RunConfig;
use crate::output::{json, Sink};
use crate::{Cli, Command, Exit, Route};

/// Configurations lifted to the disk must sit inside the fundamental domain.
const LIFTED_FIT_RADIUS: f64 = 0.4;
const SCHOTTKY_PARAMETER: f64 = 0.8;
const JACOBIAN_POINTS: usize = 100;
const JACOBIAN_STEP: f64 = 1e-6;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn required<'a, T>(value: &'a Option<T>, flag: &str) -> Result<&'a T> {
    value.as_ref().ok_or_else(|| Exit::Invalid(format!("missing {flag}")).into())
}

fn load_graph(cli: &Cli) -> Result<SimplicialGraph> {
    let path = required(&cli.graph, "--graph")?;
    SimplicialGraph::parse(&read(path)?).map_err(|e| Exit::Invalid(format!("{}: {e}", path.display())).into())
}

fn load_words(cli: &Cli, g: &SimplicialGraph, count: usize) -> Result<Vec<Word>> {
    if cli.word.len() != count {
        return Err(Exit::Invalid(format!("expected {count} --word file(s), got {}", cli.word.len())).into());
    }
    cli.word
        .iter()
        .map(|p| {
            raagham::raagwords::parse_word(g, &read(p)?)
                .map_err(|e| Exit::Invalid(format!("{}: {e}", p.display())).into())
        })
        .collect()
}

fn config_options(rc: &RunConfig, fit_radius: Option<f64>) -> ConfigOptions {
    let mut o = ConfigOptions { grid: rc.grid, ..Default::default() };
    if let Some(r) = fit_radius {
        o.fit_radius = r;
    }
    o
}

fn emulator_for(g: &SimplicialGraph, rc: &RunConfig) -> Result<Option<PlanarEmulator>> {
    if matches!(planarity(g), Planarity::Planar(_)) {
        return Ok(None);
    }
    match find_planar_emulator(g, &EmulatorOptions { max_sheets: rc.max_sheets, ..Default::default() }) {
        EmulatorSearch::Found(e) => Ok(Some(*e)),
        EmulatorSearch::NotFound { exhausted: true, .. } => {
            Err(Exit::Failed(format!("no planar emulator with at most {} sheets", rc.max_sheets)).into())
        }
        EmulatorSearch::NotFound { examined, .. } => {
            Err(Exit::Cap(format!("emulator search stopped after {examined} assignments")).into())
        }
    }
}

fn representation(g: &SimplicialGraph, rc: &RunConfig, fit_radius: Option<f64>) -> Result<Representation> {
    let em = emulator_for(g, rc)?;
    Ok(build_representation(g, rc.n, em.as_ref(), &config_options(rc, fit_radius))?)
}

fn schottky() -> Result<[MobiusMap; 2]> {
    Ok(schottky_pair(SCHOTTKY_PARAMETER)?)
}

/// The action for a route, with the tolerances it is judged by.
fn action(
    g: &SimplicialGraph,
    rc: &RunConfig,
    route: Route,
) -> Result<(Box<dyn WordAction + Send>, RelationTolerances)> {
    Ok(match route {
        Route::Closed => (Box::new(representation(g, rc, None)?), RelationTolerances::closed_form()),
        Route::Integrated => {
            let rep = representation(g, rc, None)?;
            let fields = twist_fields(&rep);
            let flow = FlowOptions::fourth_order(2000);
            (Box::new(IntegratedAction::new(rep, fields, flow)?), RelationTolerances::integrated())
        }
        Route::Smoothed => {
            let rep = representation(g, rc, Some(LIFTED_FIT_RADIUS))?;
            let depth = rc.depth.unwrap_or(1);
            let fields = lifted_fields(&rep.config, &schottky()?, depth, rc.eps[0], rc.tol)?;
            (Box::new(IntegratedAction::new(rep, fields, FlowOptions::default())?), RelationTolerances::smoothed())
        }
    })
}

fn lifted_default(rc: &RunConfig, depth: usize) -> Result<AssembledHamiltonian> {
    let elements = enumerate_group(&schottky()?, depth);
    Ok(assemble_hv(0, &elements, &default_annulus(), rc.tol)?)
}

#[derive(Serialize)]
struct WordEq {
    equal: bool,
    normal_forms: [String; 2],
}

#[derive(Serialize)]
struct CoverCheck {
    orbicover: bool,
    violation: Option<String>,
    lifts: usize,
    cover_planar: bool,
}

#[derive(Serialize)]
struct EmulatorMiss {
    found: bool,
    exhausted: bool,
    examined: u64,
    certificate: NoEmulatorVerdict,
}

pub fn run(cli: &Cli, rc: &RunConfig) -> Result<()> {
    let sink = Sink::new(rc.out.clone())?;
    match &cli.command {
        Command::NormalForm => {
            let g = load_graph(cli)?;
            let w = &load_words(cli, &g, 1)?[0];
            let raag = Raag::new(g);
            sink.primary("normal_form.txt", &raag.format_word(&raag.normal_form(w).word))
        }
        Command::WordEq => {
            let g = load_graph(cli)?;
            let ws = load_words(cli, &g, 2)?;
            let raag = Raag::new(g);
            let nf: Vec<Word> = ws.iter().map(|w| raag.normal_form(w).word).collect();
            let out = WordEq {
                equal: nf[0] == nf[1],
                normal_forms: [raag.format_word(&nf[0]), raag.format_word(&nf[1])],
            };
            sink.primary("word_eq.json", &json(&out))
        }
        Command::Double => {
            let g = load_graph(cli)?;
            sink.primary("double.txt", &double(&g).to_text())?;
            sink.extra("double_projection.txt", &GraphMorphism::double_projection(&g).to_text())?;
            sink.extra("diagonal.txt", &hom_diagonal(&g).to_text())
        }
        Command::CheckCover => {
            let base = load_graph(cli)?;
            let cover_path = required(&cli.cover, "--cover")?;
            let cover = SimplicialGraph::parse(&read(cover_path)?)
                .map_err(|e| Exit::Invalid(format!("{}: {e}", cover_path.display())))?;
            let map_path = required(&cli.map, "--map")?;
            let m = GraphMorphism::parse(&read(map_path)?, &cover, &base)
                .map_err(|e| Exit::Invalid(format!("{}: {e}", map_path.display())))?;
            let cover_planar = matches!(planarity(&cover), Planarity::Planar(_));
            let (report, ok) = match check_orbicover(&m) {
                Ok(c) => (CoverCheck { orbicover: true, violation: None, lifts: c.lifts.len(), cover_planar }, true),
                Err(v) => {
                    (CoverCheck { orbicover: false, violation: Some(v.to_string()), lifts: 0, cover_planar }, false)
                }
            };
            sink.primary("cover_check.json", &json(&report))?;
            if !ok {
                return Err(Exit::Failed("morphism is not an orbi-cover".into()).into());
            }
            Ok(())
        }
        Command::Emulator => {
            let g = load_graph(cli)?;
            match find_planar_emulator(&g, &EmulatorOptions { max_sheets: rc.max_sheets, ..Default::default() }) {
                EmulatorSearch::Found(e) => {
                    let cert = check_orbicover(&e.projection)
                        .map_err(|v| Exit::Failed(format!("emulator projection: {v}")))?;
                    sink.primary("emulator.json", &json(&e))?;
                    sink.extra("cover.txt", &e.cover.to_text())?;
                    sink.extra("projection.txt", &e.projection.to_text())?;
                    sink.extra("pullback.txt", &hom_pullback(&e.projection)?.to_text())?;
                    sink.extra("orbicover.json", &json(&cert))
                }
                EmulatorSearch::NotFound { exhausted, examined } => {
                    let miss = EmulatorMiss { found: false, exhausted, examined, certificate: certificate_no_emulator(&g) };
                    sink.primary("emulator.json", &json(&miss))?;
                    if exhausted {
                        Err(Exit::Failed(format!("no planar emulator with at most {} sheets", rc.max_sheets)).into())
                    } else {
                        Err(Exit::Cap(format!("search stopped after {examined} assignments")).into())
                    }
                }
            }
        }
        Command::Certificate => {
            let g = load_graph(cli)?;
            let verdict = certificate_no_emulator(&g);
            sink.primary("certificate.json", &json(&verdict))?;
            match verdict {
                NoEmulatorVerdict::Certificate(c) => sink.extra("certificate.txt", &c.statement()),
                NoEmulatorVerdict::NotApplicable { reason } => Err(Exit::Failed(reason).into()),
            }
        }
        Command::BuildConfig => {
            let g = load_graph(cli)?;
            let rep = representation(&g, rc, None)?;
            sink.primary("config.json", &rep.config.to_json())?;
            sink.extra("config.svg", &rep.config.to_svg(&[]))
        }
        Command::BuildRep => {
            let g = load_graph(cli)?;
            let rep = representation(&g, rc, None)?;
            sink.primary("representation.json", &json(&rep))
        }
        Command::Simulate { steps, route } => {
            let g = load_graph(cli)?;
            let w = load_words(cli, &g, 1)?.remove(0);
            let (act, _) = action(&g, rc, *route)?;
            let start = default_marked_points(&act.representation().config);
            let mut orbits: Vec<Vec<Complex64>> = start.iter().map(|&z| vec![z]).collect();
            let mut pts = start;
            for _ in 0..*steps {
                pts = rep_apply(act.as_ref(), &w, &pts)?;
                for (o, &z) in orbits.iter_mut().zip(&pts) {
                    o.push(z);
                }
            }
            let mut csv = String::from("point,iteration,x,y\n");
            for (i, o) in orbits.iter().enumerate() {
                for (k, z) in o.iter().enumerate() {
                    csv.push_str(&format!("{i},{k},{:e},{:e}\n", z.re, z.im));
                }
            }
            sink.primary("orbits.csv", &csv)?;
            sink.extra("orbits.svg", &act.representation().config.to_svg(&orbits))
        }
        Command::Verify { route } => {
            let g = load_graph(cli)?;
            let (act, tol) = action(&g, rc, *route)?;
            let mut report = verify_relations(act.as_ref(), rc.samples, rc.seed, &tol)?;
            report.jacobian = generator_jacobians(act.as_ref(), JACOBIAN_POINTS, rc.seed, JACOBIAN_STEP)?;
            sink.primary("verification.json", &report.to_json())?;
            if !report.all_pass() {
                return Err(Exit::Failed("relation checks did not all pass".into()).into());
            }
            Ok(())
        }
        Command::ProbeFaithful => {
            let g = load_graph(cli)?;
            let rep = representation(&g, rc, None)?;
            let marked = default_marked_points(&rep.config);
            let table = faithfulness_probe(&rep, rc.depth.unwrap_or(3), &marked, rc.seed, &ProbeOptions::default())?;
            sink.primary("probe.json", &json(&table))?;
            if table.capped {
                return Err(Exit::Cap("normal form enumeration exceeded its cap".into()).into());
            }
            Ok(())
        }
        Command::LambdaDecay => {
            let depth = rc.depth.unwrap_or(6);
            let hv = lifted_default(rc, depth)?;
            let opts = ReportOptions { tol: rc.tol, ..Default::default() };
            let report = analytic_report(&hv, &schottky()?, &opts)?;
            sink.primary("lambda.csv", &report.to_csv())?;
            sink.extra("lambda.json", &json(&report))?;
            sink.extra("translates.svg", &translates_svg(&hv))?;
            if !(report.lambda_decreasing && report.slope_ok.iter().all(|&ok| ok)) {
                return Err(Exit::Failed("decay or slope checks failed".into()).into());
            }
            Ok(())
        }
        Command::SmoothStudy => {
            let hv = lifted_default(rc, rc.depth.unwrap_or(3))?;
            let study = smoothing_study(&hv, &rc.eps, 0.9, 8, 32)?;
            sink.primary("smooth.csv", &study.to_csv())?;
            sink.extra("smooth.json", &json(&study))?;
            if !study.decreasing {
                return Err(Exit::Failed("smoothing gap is not decreasing in eps".into()).into());
            }
            Ok(())
        }
        Command::Polydisk { dim } => {
            let hv = Arc::new(lifted_default(rc, rc.depth.unwrap_or(2))?);
            let k: Arc<dyn HamiltonianField> = Arc::new(smooth_hv(hv, rc.eps[0])?);
            let h = polydisk_extend(k, *dim, 1.0).map_err(|e| Exit::Invalid(e.to_string()))?;
            let a = default_annulus();
            let mut rng = ChaCha8Rng::seed_from_u64(rc.seed);
            let pts: Vec<Complex64> = (0..rc.samples.min(100))
                .map(|_| {
                    let r2 = rng.gen_range(a.r_inner.powi(2)..a.r_outer.powi(2));
                    a.center + Complex64::from_polar(r2.sqrt(), rng.gen_range(0.0..std::f64::consts::TAU))
                })
                .collect();
            let report = h.slice_check(&pts, rc.n as f64, &FlowOptions::default())?;
            sink.primary("polydisk.json", &json(&report))?;
            if report.gradient_gap > 1e-9 || report.transverse_gradient > 1e-9 || report.flow_gap > 1e-5 {
                return Err(Exit::Failed("slice checks failed".into()).into());
            }
            Ok(())
        }
    }
}
