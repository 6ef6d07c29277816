//! Canonical labelling and isomorphism testing for small digraphs.
//!
//! Ordered partitions are refined to equitable form using out/in counts
//! into each cell. The search then individualises vertices of the first
//! non-singleton cell and keeps the leaf whose relabelled adjacency matrix
//! is lexicographically smallest. Two prunes keep it fast: the rows of the
//! leading singleton cells are already fixed at an inner node, so a node
//! whose fixed rows exceed the best leaf is dropped; and automorphisms
//! found by matching leaves collapse equivalent siblings.

use std::collections::HashSet;
use std::fmt;

use crate::bits::{self, VertexSet};
use crate::digraph::Digraph;

/// A canonical relabelling together with the canonical adjacency bytes.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CanonicalForm {
    n: usize,
    /// `relabeling[v]` is the canonical label of original vertex `v`.
    pub relabeling: Vec<usize>,
    /// Row-major adjacency matrix of the relabelled digraph. Each row is
    /// padded to whole bytes; the most significant bit of a row's first
    /// byte is column 0.
    pub bytes: Vec<u8>,
}

impl CanonicalForm {
    pub fn order(&self) -> usize {
        self.n
    }

    /// `n:` followed by lowercase hex of the canonical bytes.
    pub fn render(&self) -> String {
        render_bytes(self.n, &self.bytes)
    }

    pub fn canonical_digraph(&self, d: &Digraph) -> Digraph {
        d.relabel(&self.relabeling)
    }
}

impl fmt::Debug for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalForm({})", self.render())
    }
}

pub fn render_bytes(n: usize, bytes: &[u8]) -> String {
    format!("{n}:{}", hex::encode(bytes))
}

/// Row-major matrix bytes of `d` as labelled.
pub fn matrix_bytes(d: &Digraph) -> Vec<u8> {
    let rows: Vec<u64> = (0..d.order()).map(|u| msb_row(d.out_set(u), d.order())).collect();
    rows_to_bytes(&rows, d.order())
}

/// Rebuilds a digraph from canonical bytes.
pub fn digraph_from_bytes(n: usize, bytes: &[u8]) -> Option<Digraph> {
    let per_row = n.div_ceil(8);
    if n == 0 || bytes.len() != per_row * n {
        return None;
    }
    let mut out = Vec::with_capacity(n);
    for row in bytes.chunks(per_row) {
        let mut buf = [0u8; 8];
        buf[..per_row].copy_from_slice(row);
        let word = u64::from_be_bytes(buf);
        let mut set = 0;
        for j in 0..n {
            if word >> (63 - j) & 1 == 1 {
                set |= bits::singleton(j);
            }
        }
        if word & !msb_mask(n) != 0 {
            return None;
        }
        out.push(set);
    }
    Digraph::from_out_sets(out).ok()
}

fn msb_mask(n: usize) -> u64 {
    if n == 0 {
        0
    } else {
        u64::MAX << (64 - n)
    }
}

/// Row with column `j` stored at bit `63 − j`, so integer order is
/// lexicographic order.
fn msb_row(set: VertexSet, _n: usize) -> u64 {
    set.reverse_bits()
}

fn rows_to_bytes(rows: &[u64], n: usize) -> Vec<u8> {
    let per_row = n.div_ceil(8);
    let mut bytes = Vec::with_capacity(per_row * n);
    for r in rows {
        bytes.extend_from_slice(&r.to_be_bytes()[..per_row]);
    }
    bytes
}

pub fn canonical_form(d: &Digraph) -> CanonicalForm {
    let n = d.order();
    let mut search = Search {
        d,
        n,
        best: None,
        first: None,
        autos: Vec::new(),
    };
    let mut cells = vec![d.vertex_set()];
    search.explore(&mut cells, &mut Vec::new());
    let best = search.best.expect("search always reaches a leaf");
    let identity_rows: Vec<u64> = (0..n).map(|u| msb_row(d.out_set(u), n)).collect();
    let relabeling = if identity_rows == best.rows {
        (0..n).collect()
    } else {
        best.relabeling
    };
    CanonicalForm {
        n,
        relabeling,
        bytes: rows_to_bytes(&best.rows, n),
    }
}

pub fn are_isomorphic(a: &Digraph, b: &Digraph) -> bool {
    a.order() == b.order()
        && a.arc_count() == b.arc_count()
        && canonical_form(a).bytes == canonical_form(b).bytes
}

/// One representative per isomorphism class, first occurrence kept, order stable.
pub fn dedup_by_iso(list: &[Digraph]) -> Vec<Digraph> {
    let mut seen = HashSet::new();
    list.iter()
        .filter(|d| seen.insert((d.order(), canonical_form(d).bytes)))
        .cloned()
        .collect()
}

struct Leaf {
    rows: Vec<u64>,
    relabeling: Vec<usize>,
}

struct Search<'a> {
    d: &'a Digraph,
    n: usize,
    best: Option<Leaf>,
    first: Option<Leaf>,
    autos: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn explore(&mut self, cells: &mut Vec<VertexSet>, fixed: &mut Vec<usize>) {
        refine(self.d, cells);
        if let Some(best) = &self.best {
            // Rows of the leading singleton cells are fully determined.
            let mut pos_of = [0usize; 64];
            let mut pos = 0;
            for &c in cells.iter() {
                for v in bits::iter(c) {
                    pos_of[v] = pos;
                }
                pos += c.count_ones() as usize;
            }
            for (i, &c) in cells.iter().enumerate() {
                if c.count_ones() != 1 {
                    break;
                }
                let v = c.trailing_zeros() as usize;
                let row = permuted_row(self.d.out_set(v), &pos_of);
                match row.cmp(&best.rows[i]) {
                    std::cmp::Ordering::Greater => return,
                    std::cmp::Ordering::Less => break,
                    std::cmp::Ordering::Equal => {}
                }
            }
        }
        let Some(target) = cells.iter().position(|c| c.count_ones() > 1) else {
            self.leaf(cells);
            return;
        };
        let cell = cells[target];
        let mut tried: VertexSet = 0;
        for v in bits::iter(cell) {
            if tried != 0 && self.equivalent_to_tried(v, tried, fixed) {
                continue;
            }
            tried |= bits::singleton(v);
            let mut child = Vec::with_capacity(cells.len() + 1);
            child.extend_from_slice(&cells[..target]);
            child.push(bits::singleton(v));
            child.push(cell & !bits::singleton(v));
            child.extend_from_slice(&cells[target + 1..]);
            fixed.push(v);
            self.explore(&mut child, fixed);
            fixed.pop();
        }
    }

    /// Whether some automorphism fixing `fixed` pointwise maps a tried vertex to `v`.
    fn equivalent_to_tried(&self, v: usize, tried: VertexSet, fixed: &[usize]) -> bool {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut any = false;
        for g in &self.autos {
            if fixed.iter().all(|&f| g[f] == f) {
                any = true;
                for (x, &gx) in g.iter().enumerate() {
                    let (a, b) = (find(&mut parent, x), find(&mut parent, gx));
                    if a != b {
                        parent[a] = b;
                    }
                }
            }
        }
        if !any {
            return false;
        }
        let root = find(&mut parent, v);
        bits::iter(tried).any(|u| find(&mut parent, u) == root)
    }

    fn leaf(&mut self, cells: &[VertexSet]) {
        let n = self.n;
        let mut relabeling = vec![0usize; n];
        for (pos, &c) in cells.iter().enumerate() {
            relabeling[c.trailing_zeros() as usize] = pos;
        }
        let rows: Vec<u64> = cells
            .iter()
            .map(|&c| permuted_row(self.d.out_set(c.trailing_zeros() as usize), &relabeling))
            .collect();
        let leaf = Leaf { rows, relabeling };
        for reference in [&self.first, &self.best].into_iter().flatten() {
            if reference.rows == leaf.rows {
                // reference⁻¹ ∘ leaf is an automorphism
                let mut inv = vec![0usize; n];
                for (v, &p) in reference.relabeling.iter().enumerate() {
                    inv[p] = v;
                }
                let g: Vec<usize> = (0..n).map(|v| inv[leaf.relabeling[v]]).collect();
                if g.iter().enumerate().any(|(i, &x)| i != x) && !self.autos.contains(&g) {
                    self.autos.push(g);
                }
                return;
            }
        }
        if self.first.is_none() {
            self.first = Some(Leaf {
                rows: leaf.rows.clone(),
                relabeling: leaf.relabeling.clone(),
            });
        }
        if self.best.as_ref().is_none_or(|b| leaf.rows < b.rows) {
            self.best = Some(leaf);
        }
    }
}

fn permuted_row(set: VertexSet, pos_of: &[usize]) -> u64 {
    bits::iter(set).fold(0u64, |acc, w| acc | 1u64 << (63 - pos_of[w]))
}

/// Refines `cells` to an equitable ordered partition.
fn refine(d: &Digraph, cells: &mut Vec<VertexSet>) {
    let mut splitter = 0;
    while splitter < cells.len() {
        let w = cells[splitter];
        let mut split_any = false;
        let mut next: Vec<VertexSet> = Vec::with_capacity(cells.len() + 2);
        for &c in cells.iter() {
            if c.count_ones() == 1 {
                next.push(c);
                continue;
            }
            let mut keyed: Vec<(u32, u32, usize)> = bits::iter(c)
                .map(|v| ((d.out_set(v) & w).count_ones(), (d.in_set(v) & w).count_ones(), v))
                .collect();
            keyed.sort_unstable();
            let before = next.len();
            let mut cur = 0u64;
            let mut cur_key = (keyed[0].0, keyed[0].1);
            for &(a, b, v) in &keyed {
                if (a, b) != cur_key {
                    next.push(cur);
                    cur = 0;
                    cur_key = (a, b);
                }
                cur |= bits::singleton(v);
            }
            next.push(cur);
            if next.len() - before > 1 {
                split_any = true;
            }
        }
        *cells = next;
        if split_any {
            splitter = 0;
        } else {
            splitter += 1;
        }
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
    fn byte_layout() {
        let d = Digraph::from_arcs(3, &[(0, 1), (2, 0)]).unwrap();
        assert_eq!(matrix_bytes(&d), vec![0b0100_0000, 0b0000_0000, 0b1000_0000]);
        assert_eq!(digraph_from_bytes(3, &matrix_bytes(&d)), Some(d));
        let big = cycle(10);
        assert_eq!(matrix_bytes(&big).len(), 20);
        assert_eq!(digraph_from_bytes(10, &matrix_bytes(&big)), Some(big));
    }

    #[test]
    fn canonical_bytes_match_relabeling() {
        let d = Digraph::from_arcs(5, &[(0, 1), (1, 2), (2, 0), (3, 4), (0, 3)]).unwrap();
        let cf = canonical_form(&d);
        assert_eq!(matrix_bytes(&d.relabel(&cf.relabeling)), cf.bytes);
    }

    #[test]
    fn cycle_and_reverse_are_isomorphic() {
        assert!(are_isomorphic(&cycle(4), &cycle(4).reverse()));
        assert!(!are_isomorphic(&cycle(4), &cycle(5)));
    }

    #[test]
    fn idempotent_on_canonical_digraph() {
        let d = Digraph::from_arcs(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3)]).unwrap();
        let cf = canonical_form(&d);
        let c = cf.canonical_digraph(&d);
        let again = canonical_form(&c);
        assert_eq!(again.relabeling, (0..6).collect::<Vec<_>>());
        assert_eq!(again.bytes, cf.bytes);
    }

    #[test]
    fn empty_graph_is_fast() {
        let d = Digraph::empty(12).unwrap();
        let cf = canonical_form(&d);
        assert!(cf.bytes.iter().all(|&b| b == 0));
    }

    #[test]
    fn dedup_keeps_first() {
        let a = cycle(4);
        let b = a.relabel(&[2, 0, 3, 1]);
        let c = Digraph::from_arcs(4, &[(0, 1)]).unwrap();
        let out = dedup_by_iso(&[a.clone(), c.clone(), b]);
        assert_eq!(out, vec![a, c]);
        assert!(dedup_by_iso(&[]).is_empty());
    }

    #[test]
    fn render_prefix() {
        let cf = canonical_form(&cycle(4));
        assert!(cf.render().starts_with("4:"));
        assert_eq!(cf.render().len(), 2 + 8);
    }
}
