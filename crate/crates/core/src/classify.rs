//! Structural validators for extremal members of `D_n^3(1,1)` and `D_n^3(2,1)`.

use serde::Serialize;
use thiserror::Error;

use crate::bits::{self, VertexSet};
use crate::construct::{binom2, phi321_value, Family};
use crate::digraph::{ClassSpec, Digraph, DigraphError};

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Digraph(#[from] DigraphError),
}

/// A family tag produced by a hub other than the accepted one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HubTag {
    pub hub: usize,
    pub family: Family,
}

/// Hub, decomposition and verdict for an extremal member of `D_n^3(1,1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Phi31Classification {
    /// `None` when no hub yields a valid structure.
    pub family: Option<Family>,
    pub hub: Option<usize>,
    /// Vertex lists of `D_1, …, D_h` in acyclic order.
    pub components: Vec<Vec<usize>>,
    pub orders: Vec<usize>,
    /// Hub out-neighbours among the middle singletons.
    pub x_set: Vec<usize>,
    /// Hub in-neighbours among the middle singletons.
    pub y_set: Vec<usize>,
    /// Hub out-neighbour in `D_1` and in-neighbour in `D_h`.
    pub x: Option<usize>,
    pub y: Option<usize>,
    /// Failed clauses, e.g. `"II(2)"` or `"III(2.3)"`.
    pub violations: Vec<String>,
    /// Other hubs that also pass, with their tags.
    pub alternatives: Vec<HubTag>,
    pub disagreement: bool,
    /// Nonadjacent pairs between different components of `D − v`.
    pub exception_pairs: usize,
    pub gamma: usize,
    pub first_end: Option<Box<Phi31Classification>>,
    pub last_end: Option<Box<Phi31Classification>>,
}

impl Phi31Classification {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty() && self.family.is_some()
    }

    fn failed(d: &Digraph, violations: Vec<String>) -> Self {
        Self {
            family: None,
            hub: None,
            components: Vec::new(),
            orders: Vec::new(),
            x_set: Vec::new(),
            y_set: Vec::new(),
            x: None,
            y: None,
            violations,
            alternatives: Vec::new(),
            disagreement: false,
            exception_pairs: 0,
            gamma: d.gamma(),
            first_end: None,
            last_end: None,
        }
    }
}

fn is_phi31_member(d: &Digraph) -> Result<bool, DigraphError> {
    let n = d.order();
    Ok(d.in_class(&ClassSpec::new(n, 3, 1, 1)?)? && d.arc_count() == binom2(n - 1) + 1)
}

/// Classifies an extremal member of `D_n^3(1,1)` (`n ≥ 5`) into one of the
/// five families.
pub fn classify_phi31(d: &Digraph) -> Result<Phi31Classification, ClassifyError> {
    let n = d.order();
    if n < 5 {
        return Err(ClassifyError::Precondition(format!("order {n} is below 5")));
    }
    if !is_phi31_member(d)? {
        return Err(ClassifyError::Precondition(format!(
            "not a member of D_{n}^3(1,1) with {} arcs",
            binom2(n - 1) + 1
        )));
    }
    Ok(classify_rec(d, n))
}

/// Classifies with a fixed hub `v`, which must have degree at most `n − 3`.
pub fn classify_phi31_at(d: &Digraph, v: usize) -> Result<Phi31Classification, ClassifyError> {
    let n = d.order();
    classify_phi31(d)?;
    if v >= n || d.degree(v) + 3 > n {
        return Err(ClassifyError::Precondition(format!("vertex {v} is not a hub of degree at most {}", n - 3)));
    }
    Ok(with_hub(d, v, n))
}

fn classify_rec(d: &Digraph, depth: usize) -> Phi31Classification {
    let n = d.order();
    if depth == 0 {
        return Phi31Classification::failed(d, vec!["recursion depth".into()]);
    }
    let mut hubs: Vec<usize> = (0..n).filter(|&v| d.degree(v) + 3 <= n).collect();
    hubs.sort_by_key(|&v| (d.degree(v), v));
    if hubs.is_empty() {
        return Phi31Classification::failed(d, vec!["I".into()]);
    }
    let mut accepted: Option<Phi31Classification> = None;
    let mut first_attempt: Option<Phi31Classification> = None;
    let mut alternatives = Vec::new();
    for &v in &hubs {
        let c = with_hub(d, v, depth);
        if c.is_valid() {
            match &accepted {
                None => accepted = Some(c),
                Some(_) => alternatives.push(HubTag { hub: v, family: c.family.expect("valid") }),
            }
        } else if first_attempt.is_none() {
            first_attempt = Some(c);
        }
    }
    match accepted {
        Some(mut c) => {
            let fam = c.family;
            c.disagreement = alternatives.iter().any(|a| Some(a.family) != fam);
            c.alternatives = alternatives;
            c
        }
        None => first_attempt.expect("at least one hub tried"),
    }
}

fn members(set: VertexSet) -> Vec<usize> {
    bits::iter(set).collect()
}

/// Checks orders, end components and inter-component arcs with hub `v`.
fn with_hub(d: &Digraph, v: usize, depth: usize) -> Phi31Classification {
    let n = d.order();
    let (rest, map) = d.remove_vertex(v).expect("n ≥ 5");
    let dec = rest.strong_components();
    let lift = |set: VertexSet| bits::from_iter(bits::iter(set).map(|u| map[u]));
    let comps: Vec<VertexSet> = dec.components.iter().map(|&c| lift(c)).collect();
    let orders = dec.orders();
    let h = comps.len();
    let mut c = Phi31Classification::failed(d, Vec::new());
    c.hub = Some(v);
    c.components = comps.iter().map(|&s| members(s)).collect();
    c.orders = orders.clone();
    let mut viol: Vec<String> = Vec::new();
    let push = |label: &str, viol: &mut Vec<String>| {
        if !viol.iter().any(|l| l == label) {
            viol.push(label.to_string());
        }
    };

    // I: orders.
    if h < 2 {
        push("I", &mut viol);
        c.violations = viol;
        return c;
    }
    let family = Family::from_orders(&orders);
    if family.is_none() {
        let label = if h == 2 {
            "I(1)"
        } else if orders[1..h - 1].iter().any(|&o| o != 1) {
            "I(2)"
        } else {
            match (orders[0], orders[h - 1]) {
                (a, b) if a >= 4 && b >= 4 => "I(2.1)",
                (a, _) if a >= 4 => "I(2.2)",
                (_, b) if b >= 4 => "I(2.3)",
                _ => "I(2.4)",
            }
        };
        push(label, &mut viol);
        c.violations = viol;
        return c;
    }
    c.family = family;

    // II: the end components and the hub's arcs into them.
    let out_v = d.out_set(v);
    let in_v = d.in_set(v);
    let (first, last) = (comps[0], comps[h - 1]);
    let x_in_first = out_v & first;
    let y_in_last = in_v & last;
    c.x = bits::iter(x_in_first).next();
    c.y = bits::iter(y_in_last).next();
    if orders[0] == 1 && x_in_first != first {
        push("II(1)", &mut viol);
    }
    if orders[h - 1] == 1 && y_in_last != last {
        push("II(1)", &mut viol);
    }
    let mut ends: [Option<Box<Phi31Classification>>; 2] = [None, None];
    for (slot, (comp, is_first)) in [(first, true), (last, false)].into_iter().enumerate() {
        let ni = comp.count_ones() as usize;
        if ni < 4 {
            continue;
        }
        let (sub, _) = d.induced(comp).expect("nonempty");
        let (tilde, _) = d.induced(comp | bits::singleton(v)).expect("nonempty");
        let sub_ok = is_phi31_member(&sub).unwrap_or(false);
        let tilde_ok = is_phi31_member(&tilde).unwrap_or(false);
        let (outs, ins) = ((out_v & comp).count_ones() as usize, (in_v & comp).count_ones() as usize);
        let degrees_ok = if is_first { outs == 1 && ins == ni - 2 } else { outs == ni - 2 && ins == 1 };
        if !(sub_ok && tilde_ok && degrees_ok) {
            push("II(2)", &mut viol);
        } else if ni >= 5 {
            let inner = classify_rec(&sub, depth - 1);
            if !inner.is_valid() {
                push("II(2)", &mut viol);
            }
            ends[slot] = Some(Box::new(inner));
        }
    }
    let [first_end, last_end] = ends;
    c.first_end = first_end;
    c.last_end = last_end;

    // III: middle singletons and arcs between components.
    let middle: VertexSet = comps[1..h - 1].iter().fold(0, |a, &s| a | s);
    let x_set = out_v & middle;
    let y_set = in_v & middle;
    c.x_set = members(x_set);
    c.y_set = members(y_set);
    let pos = |u: usize| comps.iter().position(|&s| bits::contains(s, u)).expect("covered");
    if bits::iter(y_set).any(|r| bits::iter(x_set).any(|s| pos(r) > pos(s))) {
        push("III(1)", &mut viol);
    }
    let mut exception_pairs = 0;
    for i in 0..h {
        for j in i + 1..h {
            for a in bits::iter(comps[i]) {
                for b in bits::iter(comps[j]) {
                    let rule = if bits::contains(x_in_first, a) && bits::contains(y_in_last, b) {
                        Some("III(2.1)")
                    } else if bits::contains(x_in_first, a) && bits::contains(y_set, b) {
                        Some("III(2.2)")
                    } else if bits::contains(x_set, a) && bits::contains(y_in_last, b) {
                        Some("III(2.3)")
                    } else {
                        None
                    };
                    match (rule, d.has_arc(a, b)) {
                        (Some(label), true) => push(label, &mut viol),
                        (None, false) => push("III(2)", &mut viol),
                        _ => {}
                    }
                    if !d.adjacent(a, b) {
                        exception_pairs += 1;
                    }
                }
            }
        }
    }
    c.exception_pairs = exception_pairs;
    debug_assert!(n >= 5);
    c.violations = viol;
    c
}

/// Two vertices of out-degree 1 in an extremal member of `D_n^3(1,1)`
/// (`n ≥ 5`), checked against their predicted location.
pub fn check_prop22(d: &Digraph) -> Result<(usize, usize), ClassifyError> {
    let c = classify_phi31(d)?;
    let ones: Vec<usize> = (0..d.order()).filter(|&u| d.out_degree(u) == 1).collect();
    if ones.len() < 2 {
        return Err(ClassifyError::Invariant(format!(
            "only {} vertices of out-degree 1",
            ones.len()
        )));
    }
    if !c.is_valid() {
        return Err(ClassifyError::Invariant(format!(
            "structure unresolved: {}",
            c.violations.join(", ")
        )));
    }
    let hub = c.hub.expect("valid");
    let y = c.y.expect("valid");
    let last = c.components.last().expect("h ≥ 2");
    if last.len() >= 4 {
        let found: Vec<usize> = last.iter().copied().filter(|&u| u != y && d.out_degree(u) == 1).collect();
        if found.len() < 2 {
            return Err(ClassifyError::Invariant(
                "location (1): fewer than two out-degree-1 vertices in the last component besides y".into(),
            ));
        }
        return Ok((found[0], found[1]));
    }
    let p = c.components[c.components.len() - 2][0];
    let partner = if d.has_arc(p, hub) { hub } else { p };
    if d.out_degree(partner) != 1 || d.out_degree(y) != 1 {
        return Err(ClassifyError::Invariant(format!(
            "location (2): expected vertices {partner} and {y} to have out-degree 1"
        )));
    }
    Ok((partner.min(y), partner.max(y)))
}

/// Whether an extremal member of `D_n^3(2,1)` (`n ≥ 7`) has a vertex of
/// degree at most `n − 3`.
pub fn check_lemma26(d: &Digraph) -> Result<bool, ClassifyError> {
    let n = d.order();
    if n < 7 {
        return Err(ClassifyError::Precondition(format!("order {n} is below 7")));
    }
    let spec = ClassSpec::new(n, 3, 2, 1)?;
    if !d.in_class(&spec)? {
        return Err(ClassifyError::Precondition(format!("not a member of {spec}")));
    }
    if d.arc_count() as u64 != phi321_value(n) {
        return Err(ClassifyError::Precondition(format!(
            "{} arcs, extremal count is {}",
            d.arc_count(),
            phi321_value(n)
        )));
    }
    Ok(d.degree_profile().min_degree + 3 <= n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{build_phi31, circulant, f8, strong_tournament, Phi31Params};

    #[test]
    fn five_vertex_member() {
        let d = build_phi31(&Phi31Params::default_of_order(5).unwrap()).unwrap();
        let c = classify_phi31(&d).unwrap();
        assert!(c.is_valid(), "{:?}", c.violations);
        assert_eq!(c.family, Some(Family::D5));
        assert_eq!(c.orders, vec![1, 1, 1, 1]);
        assert_eq!(c.gamma, 3);
        let (a, b) = check_prop22(&d).unwrap();
        assert_ne!(a, b);
        assert_eq!(d.out_degree(a), 1);
        assert_eq!(d.out_degree(b), 1);
    }

    #[test]
    fn preconditions() {
        assert!(matches!(
            classify_phi31(&strong_tournament(5).unwrap()),
            Err(ClassifyError::Precondition(_))
        ));
        let c4 = crate::construct::directed_cycle(4).unwrap();
        assert!(matches!(check_prop22(&c4), Err(ClassifyError::Precondition(_))));
        assert!(matches!(check_lemma26(&c4), Err(ClassifyError::Precondition(_))));
    }

    #[test]
    fn small_degree_vertex() {
        assert!(check_lemma26(&circulant(7, &[1, 2]).unwrap()).unwrap());
        assert!(check_lemma26(&f8()).unwrap());
    }

    #[test]
    fn broken_structure_is_reported() {
        let p: Phi31Params = "family=D2 orders=4,1,4".parse().unwrap();
        let d = build_phi31(&p).unwrap();
        let c = classify_phi31(&d).unwrap();
        assert!(c.is_valid());
        assert_eq!(c.family, Some(Family::D2));
        // Moving one arc keeps the arc count but breaks membership or structure.
        let (a, b) = d.arcs().next().unwrap();
        let moved = d.without_arc(a, b);
        assert!(classify_phi31(&moved).is_err());
    }
}
