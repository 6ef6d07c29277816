//! Loop-free digraphs on at most 64 vertices and the structural checks used
//! throughout the crate: degrees, nonadjacent-pair counts, girth, strong
//! components and class membership.

use std::collections::BinaryHeap;
use std::cmp::Reverse;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{self, VertexSet};

/// Largest supported order. A vertex set is a single `u64`.
pub const MAX_ORDER: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DigraphError {
    #[error("order {0} is outside 1..=64")]
    BadOrder(usize),
    #[error("vertex {vertex} out of range for order {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate arc ({0}, {1})")]
    DuplicateArc(usize, usize),
    #[error("vertex set must be nonempty")]
    EmptyVertexSet,
    #[error("vertex sets are not disjoint")]
    OverlappingSets,
    #[error("digraph has order {actual}, class expects {expected}")]
    OrderMismatch { expected: usize, actual: usize },
    #[error("invalid class parameters: {0}")]
    BadClass(String),
}

/// A loop-free digraph with dense 0-based vertex labels.
///
/// Equality is labeled equality; see [`crate::canon`] for isomorphism.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Digraph {
    n: usize,
    out_adj: Vec<VertexSet>,
    in_adj: Vec<VertexSet>,
}

impl Digraph {
    /// The arcless digraph on `n` vertices.
    pub fn empty(n: usize) -> Result<Self, DigraphError> {
        if n == 0 || n > MAX_ORDER {
            return Err(DigraphError::BadOrder(n));
        }
        Ok(Self {
            n,
            out_adj: vec![0; n],
            in_adj: vec![0; n],
        })
    }

    /// Builds a digraph from an arc list, rejecting loops and repeated arcs.
    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Result<Self, DigraphError> {
        let mut d = Self::empty(n)?;
        for &(u, v) in arcs {
            d.insert_arc(u, v)?;
        }
        Ok(d)
    }

    /// Builds a digraph from out-neighbourhood bitsets.
    pub fn from_out_sets(out_adj: Vec<VertexSet>) -> Result<Self, DigraphError> {
        let n = out_adj.len();
        let mut d = Self::empty(n)?;
        for (u, &set) in out_adj.iter().enumerate() {
            for v in bits::iter(set) {
                d.insert_arc(u, v)?;
            }
        }
        Ok(d)
    }

    fn check_vertex(&self, v: usize) -> Result<(), DigraphError> {
        if v >= self.n {
            Err(DigraphError::VertexOutOfRange { vertex: v, n: self.n })
        } else {
            Ok(())
        }
    }

    fn insert_arc(&mut self, u: usize, v: usize) -> Result<(), DigraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(DigraphError::SelfLoop(u));
        }
        if bits::contains(self.out_adj[u], v) {
            return Err(DigraphError::DuplicateArc(u, v));
        }
        self.out_adj[u] |= bits::singleton(v);
        self.in_adj[v] |= bits::singleton(u);
        Ok(())
    }

    /// Returns a copy with the arc `(u, v)` added.
    pub fn with_arc(&self, u: usize, v: usize) -> Result<Self, DigraphError> {
        let mut d = self.clone();
        d.insert_arc(u, v)?;
        Ok(d)
    }

    /// Returns a copy with the arc `(u, v)` removed (no-op if absent).
    pub fn without_arc(&self, u: usize, v: usize) -> Self {
        let mut d = self.clone();
        if u < self.n && v < self.n {
            d.out_adj[u] &= !bits::singleton(v);
            d.in_adj[v] &= !bits::singleton(u);
        }
        d
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.out_adj.iter().map(|s| s.count_ones() as usize).sum()
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && bits::contains(self.out_adj[u], v)
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.has_arc(u, v) || self.has_arc(v, u)
    }

    pub fn out_set(&self, v: usize) -> VertexSet {
        self.out_adj[v]
    }

    pub fn in_set(&self, v: usize) -> VertexSet {
        self.in_adj[v]
    }

    pub fn neighbour_set(&self, v: usize) -> VertexSet {
        self.out_adj[v] | self.in_adj[v]
    }

    pub fn out_sets(&self) -> &[VertexSet] {
        &self.out_adj
    }

    pub fn vertex_set(&self) -> VertexSet {
        bits::full(self.n)
    }

    /// Arcs in lexicographic order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| bits::iter(self.out_adj[u]).map(move |v| (u, v)))
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_adj[v].count_ones() as usize
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_adj[v].count_ones() as usize
    }

    /// `d(v) = |N⁺(v) ∪ N⁻(v)|`.
    pub fn degree(&self, v: usize) -> usize {
        self.neighbour_set(v).count_ones() as usize
    }

    pub fn has_two_cycle(&self) -> bool {
        (0..self.n).any(|v| self.out_adj[v] & self.in_adj[v] != 0)
    }

    pub fn degree_profile(&self) -> DegreeProfile {
        DegreeProfile::of(self)
    }

    /// Relabels by `perm`: vertex `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n, "permutation length must equal the order");
        let mut out_adj = vec![0; self.n];
        let mut in_adj = vec![0; self.n];
        for (u, v) in self.arcs() {
            out_adj[perm[u]] |= bits::singleton(perm[v]);
            in_adj[perm[v]] |= bits::singleton(perm[u]);
        }
        Self { n: self.n, out_adj, in_adj }
    }

    /// The digraph with every arc reversed.
    pub fn reverse(&self) -> Self {
        Self {
            n: self.n,
            out_adj: self.in_adj.clone(),
            in_adj: self.out_adj.clone(),
        }
    }

    /// Length of a shortest directed cycle, or `None` when acyclic.
    pub fn girth(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for s in 0..self.n {
            // BFS from s; a cycle through s closes when the frontier hits an in-neighbour of s.
            let limit = best.map_or(self.n, |g| g - 1);
            let mut seen = bits::singleton(s);
            let mut frontier = bits::singleton(s);
            for dist in 1..=limit {
                if frontier & self.in_adj[s] != 0 {
                    best = Some(dist);
                    break;
                }
                let mut next = 0;
                for u in bits::iter(frontier) {
                    next |= self.out_adj[u];
                }
                next &= !seen;
                if next == 0 {
                    break;
                }
                seen |= next;
                frontier = next;
            }
        }
        best
    }

    /// True iff there is no directed cycle of length at most `k`.
    pub fn is_c_le_k_free(&self, k: usize) -> bool {
        self.girth().is_none_or(|g| g > k)
    }

    /// Vertices reachable from `v` (including `v`).
    pub fn reachable_from(&self, v: usize) -> VertexSet {
        bits::closure(&self.out_adj, v)
    }

    pub fn strong_components(&self) -> ComponentDecomposition {
        ComponentDecomposition::of(self)
    }

    pub fn is_strong(&self) -> bool {
        self.reachable_from(0) == self.vertex_set()
            && bits::closure(&self.in_adj, 0) == self.vertex_set()
    }

    /// Number of unordered nonadjacent pairs of distinct vertices.
    pub fn gamma(&self) -> usize {
        let full = self.vertex_set();
        (0..self.n)
            .map(|v| (full & !self.neighbour_set(v) & !bits::prefix(v + 1)).count_ones() as usize)
            .sum()
    }

    /// Nonadjacent pairs `{p, q}` with `p ∈ left`, `q ∈ right`.
    pub fn gamma_between(&self, left: VertexSet, right: VertexSet) -> Result<usize, DigraphError> {
        if left & right != 0 {
            return Err(DigraphError::OverlappingSets);
        }
        let full = self.vertex_set();
        if left & !full != 0 || right & !full != 0 {
            let bad = bits::iter((left | right) & !full).next().unwrap_or(self.n);
            return Err(DigraphError::VertexOutOfRange { vertex: bad, n: self.n });
        }
        Ok(bits::iter(left)
            .map(|p| (right & !self.neighbour_set(p)).count_ones() as usize)
            .sum())
    }

    /// Membership in the family named by `spec`.
    pub fn in_class(&self, spec: &ClassSpec) -> Result<bool, DigraphError> {
        Ok(self.membership(spec)?.is_member())
    }

    /// Membership verdict together with every failed condition.
    pub fn membership(&self, spec: &ClassSpec) -> Result<Membership, DigraphError> {
        if spec.n != self.n {
            return Err(DigraphError::OrderMismatch { expected: spec.n, actual: self.n });
        }
        let profile = self.degree_profile();
        let girth = self.girth();
        let strong = self.is_strong();
        let mut failures = Vec::new();
        if let Some(g) = girth.filter(|&g| g <= spec.k) {
            failures.push(format!("girth {g}"));
        }
        if !strong {
            failures.push("not strong".to_string());
        }
        if profile.min_out < spec.xi {
            failures.push(format!("δ⁺ = {}", profile.min_out));
        }
        if profile.min_in < spec.zeta {
            failures.push(format!("δ⁻ = {}", profile.min_in));
        }
        Ok(Membership { girth, strong, profile, failures })
    }

    /// Induced subdigraph on `keep`, relabelled to `0..|keep|` in ascending
    /// original order. The second value maps new labels to original ones.
    pub fn induced(&self, keep: VertexSet) -> Result<(Digraph, Vec<usize>), DigraphError> {
        if keep == 0 {
            return Err(DigraphError::EmptyVertexSet);
        }
        if keep & !self.vertex_set() != 0 {
            let bad = bits::iter(keep & !self.vertex_set()).next().unwrap_or(self.n);
            return Err(DigraphError::VertexOutOfRange { vertex: bad, n: self.n });
        }
        let map: Vec<usize> = bits::iter(keep).collect();
        let mut out_adj = Vec::with_capacity(map.len());
        for &u in &map {
            out_adj.push(bits::compress(self.out_adj[u], keep));
        }
        Ok((Digraph::from_out_sets(out_adj)?, map))
    }

    /// `D − v` with the label map back to `D`.
    pub fn remove_vertex(&self, v: usize) -> Result<(Digraph, Vec<usize>), DigraphError> {
        self.check_vertex(v)?;
        self.induced(self.vertex_set() & !bits::singleton(v))
    }
}

impl fmt::Debug for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digraph(n={}, arcs=[", self.n)?;
        for (i, (u, v)) in self.arcs().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{u}>{v}")?;
        }
        write!(f, "])")
    }
}

/// Per-vertex degrees and their extremes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeProfile {
    pub out_degree: Vec<usize>,
    pub in_degree: Vec<usize>,
    pub degree: Vec<usize>,
    pub min_out: usize,
    pub min_in: usize,
    pub min_degree: usize,
    pub max_out: usize,
    pub max_in: usize,
    pub max_degree: usize,
}

impl DegreeProfile {
    fn of(d: &Digraph) -> Self {
        let out_degree: Vec<usize> = (0..d.n).map(|v| d.out_degree(v)).collect();
        let in_degree: Vec<usize> = (0..d.n).map(|v| d.in_degree(v)).collect();
        let degree: Vec<usize> = (0..d.n).map(|v| d.degree(v)).collect();
        let min = |xs: &[usize]| xs.iter().copied().min().unwrap_or(0);
        let max = |xs: &[usize]| xs.iter().copied().max().unwrap_or(0);
        Self {
            min_out: min(&out_degree),
            min_in: min(&in_degree),
            min_degree: min(&degree),
            max_out: max(&out_degree),
            max_in: max(&in_degree),
            max_degree: max(&degree),
            out_degree,
            in_degree,
            degree,
        }
    }

    /// Whether `v` is an (α, β)-vertex.
    pub fn is_vertex_of_type(&self, v: usize, alpha: usize, beta: usize) -> bool {
        self.out_degree[v] == alpha && self.in_degree[v] == beta
    }
}

/// Strong components in a fixed acyclic order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentDecomposition {
    /// Vertex sets of `D_1, …, D_h`; every arc between components goes
    /// from a lower index to a higher one.
    pub components: Vec<VertexSet>,
    /// Component index of each vertex.
    pub comp_of: Vec<usize>,
}

impl ComponentDecomposition {
    fn of(d: &Digraph) -> Self {
        let n = d.n;
        let reach: Vec<VertexSet> = (0..n).map(|v| d.reachable_from(v)).collect();
        let mut raw: Vec<VertexSet> = Vec::new();
        let mut assigned = 0u64;
        for v in 0..n {
            if bits::contains(assigned, v) {
                continue;
            }
            let comp = bits::iter(reach[v])
                .filter(|&u| bits::contains(reach[u], v))
                .fold(0, |acc, u| acc | bits::singleton(u));
            assigned |= comp;
            raw.push(comp);
        }
        // Kahn's algorithm on the condensation; ties go to the component
        // holding the smallest original vertex.
        let h = raw.len();
        let mut raw_of = vec![0usize; n];
        for (i, &c) in raw.iter().enumerate() {
            for v in bits::iter(c) {
                raw_of[v] = i;
            }
        }
        let mut indeg = vec![0usize; h];
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); h];
        for i in 0..h {
            let mut targets = 0u64;
            for v in bits::iter(raw[i]) {
                for w in bits::iter(d.out_adj[v]) {
                    let j = raw_of[w];
                    if j != i {
                        targets |= bits::singleton(j);
                    }
                }
            }
            for j in bits::iter(targets) {
                succ[i].push(j);
                indeg[j] += 1;
            }
        }
        let key = |i: usize| raw[i].trailing_zeros() as usize;
        let mut heap: BinaryHeap<Reverse<(usize, usize)>> = (0..h)
            .filter(|&i| indeg[i] == 0)
            .map(|i| Reverse((key(i), i)))
            .collect();
        let mut components = Vec::with_capacity(h);
        while let Some(Reverse((_, i))) = heap.pop() {
            components.push(raw[i]);
            for &j in &succ[i] {
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    heap.push(Reverse((key(j), j)));
                }
            }
        }
        let mut comp_of = vec![0usize; n];
        for (idx, &c) in components.iter().enumerate() {
            for v in bits::iter(c) {
                comp_of[v] = idx;
            }
        }
        Self { components, comp_of }
    }

    /// Number of components `h`.
    pub fn count(&self) -> usize {
        self.components.len()
    }

    /// Component orders `n_1, …, n_h`.
    pub fn orders(&self) -> Vec<usize> {
        self.components.iter().map(|c| c.count_ones() as usize).collect()
    }
}

/// The family `D_n^k(ξ, ζ)`: strong digraphs on `n` vertices with no cycle of
/// length at most `k`, minimum out-degree `ξ` and minimum in-degree `ζ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassSpec {
    pub n: usize,
    pub k: usize,
    pub xi: usize,
    pub zeta: usize,
}

impl ClassSpec {
    pub fn new(n: usize, k: usize, xi: usize, zeta: usize) -> Result<Self, DigraphError> {
        if n == 0 || n > MAX_ORDER {
            return Err(DigraphError::BadOrder(n));
        }
        if k < 2 {
            return Err(DigraphError::BadClass(format!("k = {k} must be at least 2")));
        }
        if xi == 0 || zeta == 0 {
            return Err(DigraphError::BadClass("minimum degrees must be positive".into()));
        }
        Ok(Self { n, k, xi, zeta })
    }

    pub fn pair_count(&self) -> usize {
        self.n * (self.n - 1) / 2
    }
}

impl fmt::Display for ClassSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D_{}^{}({},{})", self.n, self.k, self.xi, self.zeta)
    }
}

/// Result of [`Digraph::membership`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Membership {
    pub girth: Option<usize>,
    pub strong: bool,
    pub profile: DegreeProfile,
    /// Human-readable failed conditions, e.g. `"δ⁺ = 1"` or `"girth 2"`.
    pub failures: Vec<String>,
}

impl Membership {
    pub fn is_member(&self) -> bool {
        self.failures.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Digraph {
        let arcs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Digraph::from_arcs(n, &arcs).unwrap()
    }

    #[test]
    fn rejects_loops_and_duplicates() {
        assert_eq!(Digraph::from_arcs(3, &[(1, 1)]), Err(DigraphError::SelfLoop(1)));
        assert_eq!(
            Digraph::from_arcs(3, &[(0, 1), (0, 1)]),
            Err(DigraphError::DuplicateArc(0, 1))
        );
        assert!(matches!(
            Digraph::from_arcs(3, &[(0, 3)]),
            Err(DigraphError::VertexOutOfRange { vertex: 3, n: 3 })
        ));
        assert_eq!(Digraph::empty(0), Err(DigraphError::BadOrder(0)));
        assert_eq!(Digraph::empty(65), Err(DigraphError::BadOrder(65)));
        assert!(Digraph::empty(64).is_ok());
    }

    #[test]
    fn girth_basics() {
        assert_eq!(cycle(4).girth(), Some(4));
        assert_eq!(Digraph::empty(1).unwrap().girth(), None);
        let two = Digraph::from_arcs(3, &[(0, 1), (1, 0), (1, 2)]).unwrap();
        assert_eq!(two.girth(), Some(2));
        assert!(!two.is_c_le_k_free(2));
        let path = Digraph::from_arcs(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(path.girth(), None);
        assert!(path.is_c_le_k_free(10));
    }

    #[test]
    fn strongness() {
        assert!(cycle(4).is_strong());
        assert!(!cycle(4).without_arc(3, 0).is_strong());
        assert!(Digraph::empty(1).unwrap().is_strong());
        assert!(!Digraph::empty(2).unwrap().is_strong());
    }

    #[test]
    fn components_forced_order() {
        // B = {0..3}, A = {4..7}; single arc A → B, so A must come first.
        let mut arcs = Vec::new();
        for i in 0..4 {
            arcs.push((i, (i + 1) % 4));
            arcs.push((4 + i, 4 + (i + 1) % 4));
        }
        arcs.push((5, 2));
        let d = Digraph::from_arcs(8, &arcs).unwrap();
        let dec = d.strong_components();
        assert_eq!(dec.count(), 2);
        assert_eq!(dec.components[0], 0b1111_0000);
        assert_eq!(dec.components[1], 0b0000_1111);
        assert_eq!(dec.comp_of, vec![1, 1, 1, 1, 0, 0, 0, 0]);
    }

    #[test]
    fn components_tie_break_by_smallest_vertex() {
        let d = Digraph::empty(3).unwrap();
        let dec = d.strong_components();
        assert_eq!(dec.components, vec![0b001, 0b010, 0b100]);
        let d = Digraph::from_arcs(3, &[(2, 0)]).unwrap();
        assert_eq!(d.strong_components().components, vec![0b010, 0b100, 0b001]);
    }

    #[test]
    fn gamma_and_degrees() {
        let d = Digraph::from_arcs(4, &[(0, 1), (1, 0), (1, 2)]).unwrap();
        assert_eq!(d.gamma(), 4);
        assert_eq!(d.degree(1), 2);
        assert_eq!(d.out_degree(1), 2);
        assert_eq!(d.in_degree(1), 1);
        assert!(d.has_two_cycle());
        let p = d.degree_profile();
        assert_eq!((p.min_out, p.max_out, p.min_in, p.max_in), (0, 2, 0, 1));
        assert_eq!((p.min_degree, p.max_degree), (0, 2));
        assert!(p.is_vertex_of_type(1, 2, 1));
    }

    #[test]
    fn gamma_between_cases() {
        let d = Digraph::from_arcs(4, &[(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        assert_eq!(d.gamma_between(0b0011, 0b1100), Ok(0));
        assert_eq!(d.gamma_between(0b0011, 0b0110), Err(DigraphError::OverlappingSets));
        // singleton {w} against the rest equals (n − 1) − d(w)
        for w in 0..4 {
            let rest = d.vertex_set() & !bits::singleton(w);
            assert_eq!(d.gamma_between(bits::singleton(w), rest), Ok(3 - d.degree(w)));
        }
    }

    #[test]
    fn induced_and_remove() {
        let d = cycle(5);
        let (same, map) = d.induced(d.vertex_set()).unwrap();
        assert_eq!(same, d);
        assert_eq!(map, vec![0, 1, 2, 3, 4]);
        let (p, map) = d.remove_vertex(2).unwrap();
        assert_eq!(map, vec![0, 1, 3, 4]);
        assert_eq!(p.arcs().collect::<Vec<_>>(), vec![(0, 1), (2, 3), (3, 0)]);
        assert_eq!(d.induced(0), Err(DigraphError::EmptyVertexSet));
    }

    #[test]
    fn membership_reports_reasons() {
        let c4 = cycle(4);
        let spec = ClassSpec::new(4, 3, 2, 1).unwrap();
        let m = c4.membership(&spec).unwrap();
        assert!(!m.is_member());
        assert_eq!(m.failures, vec!["δ⁺ = 1".to_string()]);
        assert!(c4.in_class(&ClassSpec::new(4, 3, 1, 1).unwrap()).unwrap());
        assert!(matches!(
            c4.in_class(&ClassSpec::new(5, 3, 1, 1).unwrap()),
            Err(DigraphError::OrderMismatch { expected: 5, actual: 4 })
        ));
        let two = Digraph::from_arcs(2, &[(0, 1), (1, 0)]).unwrap();
        let m = two.membership(&ClassSpec::new(2, 2, 1, 1).unwrap()).unwrap();
        assert_eq!(m.failures, vec!["girth 2".to_string()]);
    }

    #[test]
    fn class_spec_validation() {
        assert!(ClassSpec::new(5, 1, 1, 1).is_err());
        assert!(ClassSpec::new(5, 3, 0, 1).is_err());
        assert!(ClassSpec::new(0, 3, 1, 1).is_err());
        assert_eq!(ClassSpec::new(7, 3, 2, 1).unwrap().to_string(), "D_7^3(2,1)");
    }

    #[test]
    fn relabel_and_reverse() {
        let d = Digraph::from_arcs(3, &[(0, 1), (1, 2)]).unwrap();
        let r = d.relabel(&[2, 0, 1]);
        assert_eq!(r.arcs().collect::<Vec<_>>(), vec![(0, 1), (2, 0)]);
        assert_eq!(d.reverse().arcs().collect::<Vec<_>>(), vec![(1, 0), (2, 1)]);
    }
}
