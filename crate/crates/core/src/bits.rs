//! Word-sized vertex sets.

/// A set of vertices `0..64`, bit `i` standing for vertex `i`.
pub type VertexSet = u64;

#[inline]
pub fn singleton(v: usize) -> VertexSet {
    1u64 << v
}

#[inline]
pub fn contains(set: VertexSet, v: usize) -> bool {
    set >> v & 1 == 1
}

/// `{0, …, n−1}`.
#[inline]
pub fn full(n: usize) -> VertexSet {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Vertices strictly below `k`.
#[inline]
pub fn prefix(k: usize) -> VertexSet {
    full(k)
}

pub fn from_iter<I: IntoIterator<Item = usize>>(vs: I) -> VertexSet {
    vs.into_iter().fold(0, |acc, v| acc | singleton(v))
}

/// Members in ascending order.
pub fn iter(set: VertexSet) -> Iter {
    Iter(set)
}

pub struct Iter(VertexSet);

impl Iterator for Iter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let v = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(v)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let c = self.0.count_ones() as usize;
        (c, Some(c))
    }
}

impl ExactSizeIterator for Iter {}

/// Everything reachable from `start` along `adj` (start included).
pub fn closure(adj: &[VertexSet], start: usize) -> VertexSet {
    let mut seen = singleton(start);
    let mut frontier = seen;
    while frontier != 0 {
        let mut next = 0;
        for u in iter(frontier) {
            next |= adj[u];
        }
        frontier = next & !seen;
        seen |= frontier;
    }
    seen
}

/// Packs the bits of `set` selected by `mask` into the low bits, keeping order.
pub fn compress(set: VertexSet, mask: VertexSet) -> VertexSet {
    let mut out = 0;
    for (i, v) in iter(mask).enumerate() {
        if contains(set, v) {
            out |= singleton(i);
        }
    }
    out
}
