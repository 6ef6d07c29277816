//! Explicit digraph families and closed-form extremal values.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits;
use crate::digraph::{ClassSpec, Digraph, DigraphError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("formula needs n ≥ k + 1 and k ≥ 2 (got n = {n}, k = {k})")]
    OutOfRange { n: usize, k: usize },
    #[error(transparent)]
    Digraph(#[from] DigraphError),
}

fn invalid(msg: impl Into<String>) -> ConstructError {
    ConstructError::InvalidParams(msg.into())
}

/// `C(n, 2)`.
pub fn binom2(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// The circulant digraph on `0..n` with arcs `i → i + j (mod n)` for each jump `j`.
pub fn circulant(n: usize, jumps: &[usize]) -> Result<Digraph, ConstructError> {
    if n < 2 {
        return Err(invalid(format!("circulant order {n} < 2")));
    }
    if jumps.is_empty() {
        return Err(invalid("jump set is empty"));
    }
    let set: BTreeSet<usize> = jumps.iter().copied().collect();
    if let Some(&bad) = set.iter().find(|&&j| j == 0 || j >= n) {
        return Err(invalid(format!("jump {bad} outside 1..{}", n - 1)));
    }
    let mut arcs = Vec::with_capacity(n * set.len());
    for i in 0..n {
        for &j in &set {
            arcs.push((i, (i + j) % n));
        }
    }
    Ok(Digraph::from_arcs(n, &arcs)?)
}

/// The directed cycle `C_n`.
pub fn directed_cycle(n: usize) -> Result<Digraph, ConstructError> {
    circulant(n, &[1])
}

/// The 20-arc digraph F_8: for each `i ∈ 0..4`, arcs
/// `2i → 2i+1, 2i+2, 2i+3` and `2i+1 → 2i+2, 2i+3`, indices mod 8.
pub fn f8() -> Digraph {
    let mut arcs = Vec::with_capacity(20);
    for i in 0..4 {
        let (e, o) = (2 * i, 2 * i + 1);
        for (u, v) in [(e, e + 1), (e, e + 2), (e, e + 3), (o, o + 1), (o, o + 2)] {
            arcs.push((u % 8, v % 8));
        }
    }
    Digraph::from_arcs(8, &arcs).expect("F_8 arc list is valid")
}

/// A strong tournament: the transitive tournament `i → j (i < j)` with the
/// arc between the first and last vertex reversed.
pub fn strong_tournament(n: usize) -> Result<Digraph, ConstructError> {
    if n < 3 {
        return Err(invalid(format!("strong tournaments need n ≥ 3 (got {n})")));
    }
    let mut arcs = Vec::with_capacity(binom2(n));
    for i in 0..n {
        for j in i + 1..n {
            if (i, j) == (0, n - 1) {
                arcs.push((j, i));
            } else {
                arcs.push((i, j));
            }
        }
    }
    Ok(Digraph::from_arcs(n, &arcs)?)
}

/// `m(n, k) = (n² + (3 − 2k)n + k² − k) / 2`: the least size forcing a cycle
/// of length at most `k` in a strong digraph of order `n`.
pub fn m_value(n: usize, k: usize) -> Result<u64, ConstructError> {
    if k < 2 || n < k + 1 {
        return Err(ConstructError::OutOfRange { n, k });
    }
    let (n, k) = (n as i64, k as i64);
    let twice = n * n + (3 - 2 * k) * n + k * k - k;
    Ok((twice / 2) as u64)
}

/// Largest size of a strong digraph of order `n` with no cycle of length at most `k`.
pub fn phi11_value(n: usize, k: usize) -> Result<u64, ConstructError> {
    Ok(m_value(n, k)? - 1)
}

/// Largest size of a strong digraph of order `n` with no cycle of length at
/// most 3 and minimum out-degree 2 (zero when no such digraph exists).
pub fn phi321_value(n: usize) -> u64 {
    let base = binom2(n.saturating_sub(1)) as u64;
    match n {
        0..=6 => 0,
        7 | 8 => base - 1,
        _ => base - 2,
    }
}

/// The five families of extremal digraphs in `D_n^3(1,1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    D1,
    D2,
    D3,
    D4,
    D5,
}

impl Family {
    /// The family named by the end-component orders, or `None` if no family fits.
    pub fn from_orders(orders: &[usize]) -> Option<Family> {
        let h = orders.len();
        if h < 2 || orders.iter().any(|&o| o == 0 || o == 2 || o == 3) {
            return None;
        }
        let (first, last) = (orders[0], orders[h - 1]);
        if h == 2 {
            return (first >= 4 && last >= 4).then_some(Family::D1);
        }
        if orders[1..h - 1].iter().any(|&o| o != 1) {
            return None;
        }
        Some(match (first >= 4, last >= 4) {
            (true, true) => Family::D2,
            (true, false) => Family::D3,
            (false, true) => Family::D4,
            (false, false) => Family::D5,
        })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for Family {
    type Err = ConstructError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "D1" => Ok(Family::D1),
            "D2" => Ok(Family::D2),
            "D3" => Ok(Family::D3),
            "D4" => Ok(Family::D4),
            "D5" => Ok(Family::D5),
            _ => Err(invalid(format!("unknown family {s:?}"))),
        }
    }
}

/// How a middle singleton component attaches to the hub.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MiddleRole {
    /// In-neighbour of the hub (a member of `Y`).
    In,
    /// Out-neighbour of the hub (a member of `X`).
    Out,
    /// Not adjacent to the hub.
    Free,
}

impl MiddleRole {
    fn letter(self) -> char {
        match self {
            MiddleRole::In => 'Y',
            MiddleRole::Out => 'X',
            MiddleRole::Free => 'N',
        }
    }
}

/// Parameters for an end component of order at least 4.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct EndParams {
    /// Extremal digraph used for the component; `None` picks the default
    /// (the 4-cycle at order 4, the all-singleton D5 member above that).
    pub sub: Option<Box<Phi31Params>>,
    /// Vertex of the component joined to the hub by a single arc. It must
    /// have out-degree 1 inside the first component or in-degree 1 inside
    /// the last. `None` picks the smallest such vertex.
    pub attach: Option<usize>,
}

/// A member of one of the five extremal families, described by its
/// component orders `n_1, …, n_h` after removing the hub vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Phi31Params {
    pub family: Family,
    pub orders: Vec<usize>,
    /// Roles of the `h − 2` middle singletons in acyclic order; empty means all `Free`.
    pub middle: Vec<MiddleRole>,
    pub first: EndParams,
    pub last: EndParams,
}

impl Phi31Params {
    /// Parameters with all defaults; the family is inferred from the orders.
    pub fn from_orders(orders: Vec<usize>) -> Result<Self, ConstructError> {
        let family = Family::from_orders(&orders)
            .ok_or_else(|| invalid(format!("orders {orders:?} fit no family")))?;
        Ok(Self {
            family,
            orders,
            middle: Vec::new(),
            first: EndParams::default(),
            last: EndParams::default(),
        })
    }

    /// The smallest-parameter D5 member of order `n ≥ 5`.
    pub fn default_of_order(n: usize) -> Result<Self, ConstructError> {
        if n < 5 {
            return Err(invalid(format!("no D5 member of order {n}")));
        }
        Self::from_orders(vec![1; n - 1])
    }

    pub fn order(&self) -> usize {
        self.orders.iter().sum::<usize>() + 1
    }

    fn middle_roles(&self) -> Vec<MiddleRole> {
        if self.middle.is_empty() {
            vec![MiddleRole::Free; self.orders.len().saturating_sub(2)]
        } else {
            self.middle.clone()
        }
    }

    pub fn validate(&self) -> Result<(), ConstructError> {
        let fam = Family::from_orders(&self.orders)
            .ok_or_else(|| invalid(format!("orders {:?} fit no family", self.orders)))?;
        if fam != self.family {
            return Err(invalid(format!(
                "orders {:?} describe family {fam}, not {}",
                self.orders, self.family
            )));
        }
        let h = self.orders.len();
        if !self.middle.is_empty() && self.middle.len() != h - 2 {
            return Err(invalid(format!(
                "{} middle roles given for {} middle components",
                self.middle.len(),
                h - 2
            )));
        }
        let roles = self.middle_roles();
        if let Some(last_in) = roles.iter().rposition(|&r| r == MiddleRole::In) {
            if roles[..last_in].contains(&MiddleRole::Out) {
                return Err(invalid("every hub in-neighbour must precede every hub out-neighbour"));
            }
        }
        for (end, order) in [(&self.first, self.orders[0]), (&self.last, self.orders[h - 1])] {
            if let Some(sub) = &end.sub {
                if order < 5 {
                    return Err(invalid(format!("sub-parameters given for an end of order {order}")));
                }
                if sub.order() != order {
                    return Err(invalid(format!(
                        "sub-parameters have order {}, component has order {order}",
                        sub.order()
                    )));
                }
                sub.validate()?;
            } else if order == 1 && end.attach.is_some() {
                return Err(invalid("attach vertex given for a singleton end"));
            }
        }
        Ok(())
    }

    /// Compact text form, e.g. `family=D2 orders=4,1,1,5 roles=YN`.
    pub fn compact(&self) -> String {
        let orders: Vec<String> = self.orders.iter().map(|o| o.to_string()).collect();
        let mut s = format!("family={} orders={}", self.family, orders.join(","));
        if !self.middle.is_empty() {
            s.push_str(" roles=");
            s.extend(self.middle.iter().map(|r| r.letter()));
        }
        if let Some(a) = self.first.attach {
            s.push_str(&format!(" first-attach={a}"));
        }
        if let Some(a) = self.last.attach {
            s.push_str(&format!(" last-attach={a}"));
        }
        s
    }
}

impl FromStr for Phi31Params {
    type Err = ConstructError;

    /// Parses the compact form; `family` may be omitted and is then inferred.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut family = None;
        let mut orders = None;
        let mut middle = Vec::new();
        let mut first_attach = None;
        let mut last_attach = None;
        for token in s.split_whitespace() {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| invalid(format!("expected key=value, found {token:?}")))?;
            let number = |v: &str| {
                v.parse::<usize>()
                    .map_err(|_| invalid(format!("bad number {v:?} in {token:?}")))
            };
            match key {
                "family" => family = Some(value.parse::<Family>()?),
                "orders" => {
                    orders = Some(value.split(',').map(number).collect::<Result<Vec<_>, _>>()?)
                }
                "roles" => {
                    middle = value
                        .chars()
                        .map(|c| match c.to_ascii_uppercase() {
                            'Y' => Ok(MiddleRole::In),
                            'X' => Ok(MiddleRole::Out),
                            'N' => Ok(MiddleRole::Free),
                            other => Err(invalid(format!("unknown role {other:?}"))),
                        })
                        .collect::<Result<Vec<_>, _>>()?
                }
                "first-attach" => first_attach = Some(number(value)?),
                "last-attach" => last_attach = Some(number(value)?),
                _ => return Err(invalid(format!("unknown key {key:?}"))),
            }
        }
        let orders = orders.ok_or_else(|| invalid("missing orders"))?;
        let mut params = Phi31Params::from_orders(orders)?;
        if let Some(f) = family {
            params.family = f;
        }
        params.middle = middle;
        params.first.attach = first_attach;
        params.last.attach = last_attach;
        params.validate()?;
        Ok(params)
    }
}

/// A built end component: the digraph plus the vertex joined to the hub.
struct EndPiece {
    digraph: Digraph,
    attach: usize,
}

fn build_end(order: usize, params: &EndParams, is_first: bool) -> Result<EndPiece, ConstructError> {
    let digraph = match (&params.sub, order) {
        (_, 1) => Digraph::empty(1)?,
        (None, 4) => directed_cycle(4)?,
        (None, m) => build_phi31(&Phi31Params::default_of_order(m)?)?,
        (Some(sub), _) => build_phi31(sub)?,
    };
    let degree_one = |v: usize| {
        if is_first {
            digraph.out_degree(v) == 1
        } else {
            digraph.in_degree(v) == 1
        }
    };
    let attach = match params.attach {
        _ if order == 1 => 0,
        Some(a) if a < order && degree_one(a) => a,
        Some(a) => {
            return Err(invalid(format!(
                "attach vertex {a} must have {}-degree 1 in its component",
                if is_first { "out" } else { "in" }
            )))
        }
        None => (0..order)
            .find(|&v| degree_one(v))
            .ok_or_else(|| invalid("end component has no degree-one vertex"))?,
    };
    Ok(EndPiece { digraph, attach })
}

/// Vertex layout of a built family member: hub is vertex 0, then the
/// components in acyclic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Phi31Layout {
    pub hub: usize,
    pub components: Vec<bits::VertexSet>,
    /// Hub out-neighbour inside the first component.
    pub x: usize,
    /// Hub in-neighbour inside the last component.
    pub y: usize,
}

/// Builds a member of `Φ_n^3(1,1)` and self-checks it.
pub fn build_phi31(params: &Phi31Params) -> Result<Digraph, ConstructError> {
    build_phi31_with_layout(params).map(|(d, _)| d)
}

pub fn build_phi31_with_layout(params: &Phi31Params) -> Result<(Digraph, Phi31Layout), ConstructError> {
    params.validate()?;
    let n = params.order();
    let h = params.orders.len();
    let roles = params.middle_roles();
    let first = build_end(params.orders[0], &params.first, true)?;
    let last = build_end(params.orders[h - 1], &params.last, false)?;

    let hub = 0usize;
    let mut components = Vec::with_capacity(h);
    let mut next = 1usize;
    for &o in &params.orders {
        components.push(bits::full(o) << next);
        next += o;
    }
    let offset = |c: usize| components[c].trailing_zeros() as usize;
    let mut arcs: Vec<(usize, usize)> = Vec::new();

    // Inside the end components.
    for (piece, c) in [(&first, 0), (&last, h - 1)] {
        let base = offset(c);
        arcs.extend(piece.digraph.arcs().map(|(u, v)| (u + base, v + base)));
    }

    // Hub and first component.
    let x = offset(0) + first.attach;
    arcs.push((hub, x));
    if params.orders[0] >= 4 {
        let succ = bits::iter(first.digraph.out_set(first.attach)).next().unwrap() + offset(0);
        for w in bits::iter(components[0] & !bits::singleton(x) & !bits::singleton(succ)) {
            arcs.push((w, hub));
        }
    }
    // Hub and last component.
    let y = offset(h - 1) + last.attach;
    arcs.push((y, hub));
    if params.orders[h - 1] >= 4 {
        let pred = bits::iter(last.digraph.in_set(last.attach)).next().unwrap() + offset(h - 1);
        for w in bits::iter(components[h - 1] & !bits::singleton(y) & !bits::singleton(pred)) {
            arcs.push((hub, w));
        }
    }
    // Hub and middle singletons.
    let mut in_set = 0u64;
    let mut out_set = 0u64;
    for (i, role) in roles.iter().enumerate() {
        let m = offset(i + 1);
        match role {
            MiddleRole::In => {
                arcs.push((m, hub));
                in_set |= bits::singleton(m);
            }
            MiddleRole::Out => {
                arcs.push((hub, m));
                out_set |= bits::singleton(m);
            }
            MiddleRole::Free => {}
        }
    }
    // Forward arcs between components, minus the three exception types.
    for i in 0..h {
        for j in i + 1..h {
            for a in bits::iter(components[i]) {
                for b in bits::iter(components[j]) {
                    let excluded = (a == x && b == y)
                        || (a == x && bits::contains(in_set, b))
                        || (bits::contains(out_set, a) && b == y);
                    if !excluded {
                        arcs.push((a, b));
                    }
                }
            }
        }
    }
    let d = Digraph::from_arcs(n, &arcs)?;
    let spec = ClassSpec::new(n, 3, 1, 1)?;
    let membership = d.membership(&spec)?;
    if !membership.is_member() {
        return Err(invalid(format!(
            "{} does not yield a member of D_{n}^3(1,1): {}",
            params.compact(),
            membership.failures.join(", ")
        )));
    }
    let expected = binom2(n - 1) + 1;
    if d.arc_count() != expected {
        return Err(invalid(format!(
            "{} has {} arcs, expected {expected}",
            params.compact(),
            d.arc_count()
        )));
    }
    Ok((d, Phi31Layout { hub, components, x, y }))
}

/// Every parameter vector of order `n` (recursing into end components and
/// attach vertices) that builds successfully.
pub fn phi31_param_grid(n: usize) -> Vec<Phi31Params> {
    let mut out = Vec::new();
    if n < 5 {
        return out;
    }
    for orders in order_sequences(n - 1) {
        let Some(family) = Family::from_orders(&orders) else { continue };
        let h = orders.len();
        let firsts = end_choices(orders[0], true);
        let lasts = end_choices(orders[h - 1], false);
        for middle in role_sequences(h - 2) {
            for first in &firsts {
                for last in &lasts {
                    let p = Phi31Params {
                        family,
                        orders: orders.clone(),
                        middle: middle.clone(),
                        first: first.clone(),
                        last: last.clone(),
                    };
                    if build_phi31(&p).is_ok() {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

fn end_choices(order: usize, is_first: bool) -> Vec<EndParams> {
    let subs: Vec<Option<Box<Phi31Params>>> = match order {
        1 => return vec![EndParams::default()],
        4 => vec![None],
        m => phi31_param_grid(m).into_iter().map(|p| Some(Box::new(p))).collect(),
    };
    let mut out = Vec::new();
    for sub in subs {
        let d = match &sub {
            None => directed_cycle(4).expect("4-cycle"),
            Some(p) => build_phi31(p).expect("grid members build"),
        };
        for v in 0..order {
            let ok = if is_first { d.out_degree(v) == 1 } else { d.in_degree(v) == 1 };
            if ok {
                out.push(EndParams { sub: sub.clone(), attach: Some(v) });
            }
        }
    }
    out
}

/// Compositions of `total` into parts from {1} ∪ [4, ∞).
fn order_sequences(total: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            if cur.len() >= 2 {
                out.push(cur.clone());
            }
            return;
        }
        for part in (1..=rest).filter(|&p| p == 1 || p >= 4) {
            cur.push(part);
            rec(rest - part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, &mut Vec::new(), &mut out);
    out
}

/// Role sequences of length `len` with every `In` before every `Out`.
fn role_sequences(len: usize) -> Vec<Vec<MiddleRole>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for seq in &out {
            for r in [MiddleRole::In, MiddleRole::Out, MiddleRole::Free] {
                if r == MiddleRole::In && seq.contains(&MiddleRole::Out) {
                    continue;
                }
                let mut s: Vec<MiddleRole> = seq.clone();
                s.push(r);
                next.push(s);
            }
        }
        out = next;
    }
    out
}
