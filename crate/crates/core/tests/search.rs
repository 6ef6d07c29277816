use std::collections::BTreeSet;

use girthforge::classify::check_lemma26;
use girthforge::construct::{binom2, f8, phi11_value};
use girthforge::search::{
    self, check_bcw_instance_with, check_ch_instance_with, solve, Checkpoint, Mode, PruneConfig, SearchError,
    SearchParams, Status,
};
use girthforge::verify::oracle;
use girthforge::{are_isomorphic, canonical_form, ClassSpec};

fn spec(n: usize, k: usize, xi: usize, zeta: usize) -> ClassSpec {
    ClassSpec::new(n, k, xi, zeta).unwrap()
}

fn canon_set(out: &search::SearchOutcome) -> BTreeSet<Vec<u8>> {
    out.extremal.iter().map(|d| canonical_form(d).bytes).collect()
}

#[test]
fn exact_matches_naive_enumeration() {
    for n in 2..=5 {
        let specs: Vec<ClassSpec> = [2, 3]
            .into_iter()
            .flat_map(|k| [(1, 1), (2, 1), (1, 2), (2, 2), (3, 1)].map(|(x, z)| spec(n, k, x, z)))
            .collect();
        let naive = oracle::naive_extremal(n, &specs);
        for (s, (phi, classes)) in specs.iter().zip(naive) {
            let out = solve(&SearchParams::exact(*s)).unwrap();
            assert_eq!(out.phi, Some(phi), "{s}");
            assert_eq!(canon_set(&out), classes, "{s}");
            let want = if phi == 0 { Status::Empty } else { Status::Proved };
            assert_eq!(out.status, want, "{s}");
        }
    }
}

#[test]
fn disabling_any_single_prune_keeps_results() {
    let suite = [spec(5, 3, 1, 1), spec(6, 3, 1, 1), spec(6, 2, 1, 1), spec(7, 3, 2, 1), spec(7, 3, 1, 1), spec(6, 3, 2, 1)];
    let variants: Vec<PruneConfig> = (0..5)
        .map(|i| {
            let mut p = PruneConfig::default();
            match i {
                0 => p.short_cycle = false,
                1 => p.gamma_budget = false,
                2 => p.degree = false,
                3 => p.strong_necessary = false,
                _ => p.symmetry = false,
            }
            p
        })
        .collect();
    for s in suite {
        let base = solve(&SearchParams::exact(s)).unwrap();
        for p in &variants {
            let out = solve(&SearchParams::exact(s).with_prunes(*p)).unwrap();
            assert_eq!(out.phi, base.phi, "{s} {p:?}");
            assert_eq!(out.status, base.status, "{s} {p:?}");
            assert_eq!(canon_set(&out), canon_set(&base), "{s} {p:?}");
        }
    }
}

#[test]
fn out_in_one_values_match_closed_form() {
    for (n, k) in [(4, 3), (5, 3), (6, 3), (7, 3), (8, 3), (4, 2), (5, 2), (6, 2)] {
        let out = solve(&SearchParams::exact(spec(n, k, 1, 1))).unwrap();
        assert_eq!(out.phi.map(|p| p as u64), Some(phi11_value(n, k).unwrap()), "n={n} k={k}");
    }
}

#[test]
fn phi_is_monotone_in_degree_bounds() {
    for n in 4..=8 {
        let get = |xi, zeta| solve(&SearchParams::exact(spec(n, 3, xi, zeta))).unwrap().phi.unwrap();
        let (a11, a21, a12, a22) = (get(1, 1), get(2, 1), get(1, 2), get(2, 2));
        assert!(a21 <= a11 && a12 <= a11 && a22 <= a21 && a22 <= a12, "n={n}");
        // Reversal swaps the two degree bounds.
        assert_eq!(a21, a12, "n={n}");
    }
}

#[test]
fn order_eight_and_nine_values() {
    let out = solve(&SearchParams::exact(spec(8, 3, 2, 1)).with_workers(2)).unwrap();
    assert_eq!(out.phi, Some(20));
    assert_eq!(out.extremal.len(), 1);
    assert!(are_isomorphic(&out.extremal[0], &f8()));
    let out = solve(&SearchParams::exact(spec(9, 3, 2, 1)).with_workers(2)).unwrap();
    assert_eq!(out.phi, Some(26));
    assert_eq!(out.phi, Some(binom2(8) - 2));
    for d in &out.extremal {
        assert!(check_lemma26(d).unwrap());
    }
}

#[test]
fn emptiness_below_seven() {
    for n in 3..=6 {
        let out = solve(&SearchParams::emptiness(spec(n, 3, 2, 1))).unwrap();
        assert_eq!(out.status, Status::Empty);
        assert_eq!(out.phi, Some(0));
        assert!(out.extremal.is_empty());
    }
}

#[test]
fn outcome_is_independent_of_workers() {
    for p in [
        SearchParams::exact(spec(8, 3, 1, 1)),
        SearchParams::exact(spec(7, 3, 2, 1)),
        SearchParams::emptiness(spec(8, 3, 2, 1)),
        SearchParams::witness(spec(9, 3, 2, 1), 26).with_seed(11),
    ] {
        let a = solve(&p.clone().with_workers(1)).unwrap();
        let b = solve(&p.clone().with_workers(4)).unwrap();
        assert_eq!(a.status, b.status);
        assert_eq!(a.phi, b.phi);
        assert_eq!(a.canonical_strings(), b.canonical_strings());
        assert_eq!(a.stats, b.stats);
        assert_eq!(a.restart, b.restart);
    }
}

#[test]
fn witness_is_reproducible_per_seed() {
    let p = SearchParams::witness(spec(10, 3, 2, 1), 34).with_seed(7);
    let a = solve(&p).unwrap();
    let b = solve(&p).unwrap();
    assert_eq!(a.status, Status::WitnessFound);
    assert_eq!(a.extremal[0].arc_count(), 34);
    assert!(a.extremal[0].in_class(&p.spec).unwrap());
    assert_eq!(a.canonical_strings(), b.canonical_strings());
    assert_eq!(a.seed, Some(7));
}

#[test]
fn exhausted_witness_search_reports_empty() {
    let out = solve(&SearchParams::witness(spec(8, 3, 2, 1), 21)).unwrap();
    assert_eq!(out.status, Status::Empty);
    assert!(out.extremal.is_empty());
}

#[test]
fn conjecture_instances() {
    assert!(check_ch_instance_with(6, 2, 1).unwrap());
    assert!(check_ch_instance_with(7, 2, 1).unwrap());
    assert!(check_ch_instance_with(3, 1, 1).unwrap());
    assert!(check_bcw_instance_with(4, 1, 1).unwrap());
    assert!(check_bcw_instance_with(8, 2, 1).unwrap());
    assert!(check_ch_instance_with(9, 3, 1).unwrap());
    // The in-degree bound only shrinks the class.
    for (n, r) in [(5, 2), (7, 2), (8, 2), (9, 3)] {
        let ch = check_ch_instance_with(n, r, 1).unwrap();
        let bcw = check_bcw_instance_with(n, r, 1).unwrap();
        assert!(!ch || bcw);
    }
    assert!(matches!(check_ch_instance_with(13, 2, 1), Err(SearchError::Guardrail(_))));
}

#[test]
fn ch_instance_with_r_one_is_empty() {
    // k = n: any strong digraph on n vertices has a cycle of length at most n.
    for n in 2..=8 {
        assert!(check_ch_instance_with(n, 1, 1).unwrap());
    }
}

#[test]
fn guardrails_and_invalid_params() {
    assert!(matches!(solve(&SearchParams::exact(spec(13, 3, 1, 1))), Err(SearchError::Guardrail(_))));
    assert!(matches!(solve(&SearchParams::emptiness(spec(13, 3, 1, 1))), Err(SearchError::Guardrail(_))));
    assert!(matches!(solve(&SearchParams::witness(spec(21, 3, 1, 1), 1)), Err(SearchError::Guardrail(_))));
    assert!(matches!(
        solve(&SearchParams::witness(spec(6, 3, 1, 1), 16)),
        Err(SearchError::InvalidParams(_))
    ));
    assert!(matches!(
        solve(&SearchParams::exact(spec(6, 3, 1, 1)).with_workers(0)),
        Err(SearchError::InvalidParams(_))
    ));
}

#[test]
fn zero_time_limit_times_out() {
    let out = solve(&SearchParams::exact(spec(9, 3, 2, 1)).with_time_limit(0.0)).unwrap();
    assert_eq!(out.status, Status::Timeout);
    assert!(!out.resumable);
    assert_eq!(out.phi, None);
}

#[test]
fn checkpoint_resume_reaches_the_same_result() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.gfck");
    let s = spec(10, 3, 2, 1);
    let reference = solve(&SearchParams::exact(s)).unwrap();

    let mut interrupted = 0;
    let mut last = None;
    for _ in 0..500 {
        let p = SearchParams::exact(s).with_checkpoint(&path).with_time_limit(0.05);
        let out = solve(&p).unwrap();
        if out.status == Status::Timeout {
            assert!(out.resumable);
            assert!(path.exists());
            let cp = Checkpoint::load(&path).unwrap().unwrap();
            assert_eq!(cp.params_hash, p.hash());
            interrupted += 1;
            continue;
        }
        last = Some(out);
        break;
    }
    let out = last.expect("finished within the attempt limit");
    assert!(interrupted > 0);
    assert!(!path.exists());
    assert_eq!(out.status, Status::Proved);
    assert_eq!(out.phi, reference.phi);
    assert_eq!(out.canonical_strings(), reference.canonical_strings());
    assert_eq!(out.stats.nodes, reference.stats.nodes);
}

#[test]
fn checkpoint_validation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.gfck");
    let p = SearchParams::exact(spec(9, 3, 2, 1)).with_checkpoint(&path).with_time_limit(0.0);
    assert_eq!(solve(&p).unwrap().status, Status::Timeout);
    assert!(path.exists());

    let other = SearchParams::exact(spec(9, 3, 1, 1)).with_checkpoint(&path);
    assert!(matches!(solve(&other), Err(SearchError::Checkpoint(_))));

    let mut bytes = std::fs::read(&path).unwrap();
    bytes.truncate(bytes.len() - 3);
    std::fs::write(&path, &bytes).unwrap();
    let resume = SearchParams::exact(spec(9, 3, 2, 1)).with_checkpoint(&path);
    assert!(matches!(solve(&resume), Err(SearchError::Checkpoint(_))));

    std::fs::write(&path, b"GFCK0garbage").unwrap();
    assert!(matches!(solve(&resume), Err(SearchError::Checkpoint(_))));
}

#[test]
fn witness_found_in_emptiness_mode_is_a_member() {
    for s in [spec(7, 3, 2, 1), spec(9, 3, 2, 2), spec(8, 3, 1, 1)] {
        let out = solve(&SearchParams::emptiness(s).with_workers(2)).unwrap();
        assert_eq!(out.status, Status::WitnessFound, "{s}");
        assert!(out.extremal[0].in_class(&s).unwrap());
    }
    assert_eq!(SearchParams::exact(spec(5, 3, 1, 1)).mode, Mode::Exact);
}
