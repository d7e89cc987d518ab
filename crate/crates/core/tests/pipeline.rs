use num_complex::Complex64;
use proptest::prelude::*;

use raagham::dynver::{rep_apply, verify_relations, RelationTolerances, WordAction};
use raagham::graphs::SimplicialGraph;
use raagham::raagwords::{Letter, Raag, Word};
use raagham::twistcore::{build_representation, ConfigOptions};

fn letters(n: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..n, any::<bool>()), 0..10).prop_map(|v| {
        Word(v.into_iter().map(|(g, inv)| if inv { Letter::inv(g) } else { Letter::gen(g) }).collect())
    })
}

#[test]
fn path_graph_end_to_end() {
    let g = SimplicialGraph::path(4);
    let rep = build_representation(&g, 3, None, &ConfigOptions::default()).unwrap();
    let report = verify_relations(&rep, 200, 3, &RelationTolerances::closed_form()).unwrap();
    assert!(report.all_pass(), "{}", report.to_json());
    assert_eq!(report.non_edges.len(), 3);
    assert_eq!(report.edges.len(), 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // Equal group elements act identically on sample points.
    #[test]
    fn equal_words_act_equally(w in letters(3)) {
        let g = SimplicialGraph::path(3);
        let raag = Raag::new(g.clone());
        let rep = build_representation(&g, 2, None, &ConfigOptions { grid: 256, ..Default::default() }).unwrap();
        let nf = raag.normal_form(&w).word;
        let pts: Vec<Complex64> = rep.config.annuli.iter().map(|a| a.center + a.central_radius() * 0.999).collect();
        let a = rep_apply(&rep, &w, &pts).unwrap();
        let b = rep_apply(&rep, &nf, &pts).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).norm() < 1e-9);
        }
        let _ = rep.representation();
    }
}
