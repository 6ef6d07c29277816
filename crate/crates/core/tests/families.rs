use std::collections::BTreeSet;

use girthforge::classify::{check_prop22, classify_phi31, classify_phi31_at, Phi31Classification};
use girthforge::construct::{Family, build_phi31, build_phi31_with_layout, phi31_param_grid, Phi31Params};
use girthforge::search::{solve, SearchParams};
use girthforge::{bits, canonical_form, ClassSpec, Digraph};

fn extremal_31(n: usize) -> Vec<Digraph> {
    solve(&SearchParams::exact(ClassSpec::new(n, 3, 1, 1).unwrap())).unwrap().extremal
}

fn gamma_split(d: &Digraph, c: &Phi31Classification) -> usize {
    let hub = c.hub.unwrap();
    let internal: usize = [c.components.first().unwrap(), c.components.last().unwrap()]
        .into_iter()
        .filter(|comp| comp.len() > 1)
        .map(|comp| d.induced(bits::from_iter(comp.iter().copied())).unwrap().0.gamma())
        .sum();
    let hub_missing = d.order() - 1 - d.degree(hub);
    c.exception_pairs + internal + hub_missing
}

#[test]
fn generator_and_solver_agree() {
    for n in 5..=8 {
        let solver: BTreeSet<Vec<u8>> = extremal_31(n).iter().map(|d| canonical_form(d).bytes).collect();
        let grid: BTreeSet<Vec<u8>> = phi31_param_grid(n)
            .iter()
            .map(|p| canonical_form(&build_phi31(p).unwrap()).bytes)
            .collect();
        assert_eq!(solver, grid, "n={n}");
    }
}

#[test]
fn solver_members_classify_cleanly() {
    for n in 5..=8 {
        for d in extremal_31(n) {
            let c = classify_phi31(&d).unwrap();
            assert!(c.is_valid(), "n={n}: {:?}", c.violations);
            assert_eq!(c.gamma, n - 2);
            assert_eq!(gamma_split(&d, &c), c.gamma);
            let (a, b) = check_prop22(&d).unwrap();
            assert!(a != b && d.out_degree(a) == 1 && d.out_degree(b) == 1);
        }
    }
}

#[test]
fn classification_round_trips_the_grid() {
    for n in 5..=10 {
        for p in phi31_param_grid(n) {
            let (d, layout) = build_phi31_with_layout(&p).unwrap();
            let c = classify_phi31(&d).unwrap();
            assert!(c.is_valid(), "{}: {:?}", p.compact(), c.violations);
            assert_eq!(gamma_split(&d, &c), n - 2, "{}", p.compact());
            if d.degree(layout.hub) + 3 <= n {
                let at = classify_phi31_at(&d, layout.hub).unwrap();
                assert!(at.is_valid(), "{}: {:?}", p.compact(), at.violations);
                assert_eq!(at.family, Some(p.family), "{}", p.compact());
                let tags: Vec<_> = c.alternatives.iter().map(|a| a.family).chain(c.family).collect();
                assert!(tags.contains(&p.family), "{}", p.compact());
            }
        }
    }
}

#[test]
fn family_tags_depend_on_the_hub() {
    // The D4 member with orders 1,1,4 is also a D5 member around another hub.
    let p: Phi31Params = "family=D4 orders=1,1,4 roles=X".parse().unwrap();
    let d = build_phi31(&p).unwrap();
    let c = classify_phi31(&d).unwrap();
    assert!(c.is_valid());
    assert_eq!(c.family, Some(Family::D5));
}

#[test]
fn compact_form_round_trips() {
    for n in 5..=9 {
        for p in phi31_param_grid(n) {
            if p.first.sub.is_some() || p.last.sub.is_some() {
                continue;
            }
            let q: Phi31Params = p.compact().parse().unwrap();
            assert_eq!(build_phi31(&q).unwrap(), build_phi31(&p).unwrap(), "{}", p.compact());
        }
    }
}

#[test]
fn five_vertex_member_has_seven_arcs() {
    let p: Phi31Params = "family=D5 orders=1,1,1,1".parse().unwrap();
    let d = build_phi31(&p).unwrap();
    assert_eq!(d.order(), 5);
    assert_eq!(d.arc_count(), 7);
    let c = classify_phi31(&d).unwrap();
    assert_eq!(c.orders, vec![1, 1, 1, 1]);
    let (a, b) = check_prop22(&d).unwrap();
    let hub = c.hub.unwrap();
    let y = c.y.unwrap();
    let p_vertex = c.components[c.components.len() - 2][0];
    let partner = if d.has_arc(p_vertex, hub) { hub } else { p_vertex };
    assert_eq!((a, b), (partner.min(y), partner.max(y)));
}
