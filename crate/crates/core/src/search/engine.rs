//! Depth-first branch-and-bound over unordered vertex pairs.
//!
//! Each pair `{i, j}` (`i < j`, lexicographic order) takes one of three
//! states: no arc, `i → j`, or `j → i`. After every decision the engine
//! recomputes which orientations would close a cycle of length at most `k`
//! through decided arcs, forces pairs with both orientations banned to
//! "no arc", and prunes on the nonadjacency budget, degree feasibility,
//! strong connectivity of the possible-arc digraph and lex-leader symmetry
//! constraints.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{self, VertexSet};
use crate::digraph::{ClassSpec, Digraph};

/// Largest order the engine's fixed-size state can hold.
pub const ENGINE_MAX_ORDER: usize = 20;

/// Pair state codes, also used in checkpoint prefixes.
pub const NONE: u8 = 0;
pub const LOW_TO_HIGH: u8 = 1;
pub const HIGH_TO_LOW: u8 = 2;
pub const UNDECIDED: u8 = 3;

/// Which sound pruning rules are active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PruneConfig {
    /// Ban orientations that would close a cycle of length at most `k`.
    pub short_cycle: bool,
    /// Stop once more pairs are nonadjacent than the budget allows.
    pub gamma_budget: bool,
    /// Every vertex must still be able to reach its degree minimums.
    pub degree: bool,
    /// The digraph of decided-or-possible arcs must stay strong.
    pub strong_necessary: bool,
    /// Vertex 0 has lexicographically least (out, in) degree, its
    /// neighbourhood is laid out as out-block, in-block, rest, and each block
    /// satisfies lex-leader constraints for adjacent transpositions.
    pub symmetry: bool,
}

impl Default for PruneConfig {
    fn default() -> Self {
        Self {
            short_cycle: true,
            gamma_budget: true,
            degree: true,
            strong_necessary: true,
            symmetry: true,
        }
    }
}

impl PruneConfig {
    pub fn code(&self) -> u8 {
        (self.short_cycle as u8)
            | (self.gamma_budget as u8) << 1
            | (self.degree as u8) << 2
            | (self.strong_necessary as u8) << 3
            | (self.symmetry as u8) << 4
    }
}

/// Counters reported with every outcome.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PruneCounts {
    pub short_cycle: u64,
    pub gamma: u64,
    pub degree: u64,
    pub strong: u64,
    pub symmetry: u64,
    /// Complete assignments rejected by the final membership check.
    pub leaf_reject: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineStats {
    pub nodes: u64,
    pub leaves: u64,
    pub prunes: PruneCounts,
}

impl EngineStats {
    pub fn absorb(&mut self, other: &EngineStats) {
        self.nodes += other.nodes;
        self.leaves += other.leaves;
        let (a, b) = (&mut self.prunes, &other.prunes);
        a.short_cycle += b.short_cycle;
        a.gamma += b.gamma;
        a.degree += b.degree;
        a.strong += b.strong;
        a.symmetry += b.symmetry;
        a.leaf_reject += b.leaf_reject;
    }
}

/// A partial assignment.
#[derive(Clone)]
pub struct State {
    out: [VertexSet; ENGINE_MAX_ORDER],
    inn: [VertexSet; ENGINE_MAX_ORDER],
    /// Undecided partners (symmetric).
    und: [VertexSet; ENGINE_MAX_ORDER],
    /// Undecided `w` with `u → w` still allowed.
    can_out: [VertexSet; ENGINE_MAX_ORDER],
    /// Undecided `w` with `w → u` still allowed.
    can_in: [VertexSet; ENGINE_MAX_ORDER],
    nonadjacent: usize,
    /// Lower bound on the index of the next undecided pair.
    cursor: usize,
    /// Vertex 0's (out, in) degree when symmetry breaking fixed it.
    anchor: Option<(usize, usize)>,
}

impl State {
    /// Code of pair `{i, j}` with `i < j`.
    pub fn pair_code(&self, i: usize, j: usize) -> u8 {
        if bits::contains(self.out[i], j) {
            LOW_TO_HIGH
        } else if bits::contains(self.out[j], i) {
            HIGH_TO_LOW
        } else if bits::contains(self.und[i], j) {
            UNDECIDED
        } else {
            NONE
        }
    }
}

/// What to do when a complete assignment passes every check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeafPolicy {
    /// Record and keep going.
    Collect,
    /// Record and unwind the whole search.
    StopAtFirst,
}

/// Why a subtree search returned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Done,
    Stopped,
    /// Deadline, abort flag or node limit reached; the subtree is incomplete.
    Interrupted,
}

/// Per-run mutable context.
pub struct Ctx<'a> {
    pub stats: EngineStats,
    pub found: Vec<Digraph>,
    pub deadline: Option<Instant>,
    pub abort: Option<&'a AtomicBool>,
    pub node_limit: Option<u64>,
    pub rng: Option<ChaCha8Rng>,
    /// Stop once the shared value drops below our own index.
    pub cutoff: Option<(&'a AtomicUsize, usize)>,
}

impl<'a> Ctx<'a> {
    pub fn new(deadline: Option<Instant>, abort: Option<&'a AtomicBool>) -> Self {
        Self {
            stats: EngineStats::default(),
            found: Vec::new(),
            deadline,
            abort,
            node_limit: None,
            rng: None,
            cutoff: None,
        }
    }

    fn interrupted(&self) -> bool {
        if self.node_limit.is_some_and(|l| self.stats.nodes >= l) {
            return true;
        }
        if self.stats.nodes & 0x3ff != 0 {
            return false;
        }
        self.abort.is_some_and(|a| a.load(Ordering::Relaxed))
            || self.cutoff.is_some_and(|(best, me)| best.load(Ordering::Relaxed) < me)
            || self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

/// Fixed configuration of one search.
pub struct Engine {
    n: usize,
    k: usize,
    xi: usize,
    zeta: usize,
    /// Largest allowed number of nonadjacent pairs.
    budget: Option<usize>,
    prunes: PruneConfig,
    pairs: Vec<(usize, usize)>,
    policy: LeafPolicy,
    spec: ClassSpec,
}

impl Engine {
    pub fn new(spec: ClassSpec, budget: Option<usize>, prunes: PruneConfig, policy: LeafPolicy) -> Self {
        let n = spec.n;
        assert!(n <= ENGINE_MAX_ORDER, "engine order limit exceeded");
        let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        Self {
            n,
            k: spec.k,
            xi: spec.xi,
            zeta: spec.zeta,
            budget,
            prunes,
            pairs,
            policy,
            spec,
        }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn prefix_codes(&self, st: &State) -> Vec<u8> {
        self.pairs.iter().map(|&(i, j)| st.pair_code(i, j)).collect()
    }

    fn empty_state(&self) -> State {
        let mut und = [0; ENGINE_MAX_ORDER];
        let full = bits::full(self.n);
        for (v, slot) in und.iter_mut().enumerate().take(self.n) {
            *slot = full & !bits::singleton(v);
        }
        State {
            out: [0; ENGINE_MAX_ORDER],
            inn: [0; ENGINE_MAX_ORDER],
            und,
            can_out: und,
            can_in: und,
            nonadjacent: 0,
            cursor: 0,
            anchor: None,
        }
    }

    /// Starting states: the empty assignment, or with symmetry breaking one
    /// state per admissible (out, in) degree of vertex 0.
    pub fn roots(&self, stats: &mut EngineStats) -> Vec<State> {
        let base = self.empty_state();
        if !self.prunes.symmetry {
            return vec![base];
        }
        let mut roots = Vec::new();
        for a in self.xi..self.n {
            for b in self.zeta..self.n - a {
                let mut st = base.clone();
                st.anchor = Some((a, b));
                for w in 1..self.n {
                    let code = if w <= a {
                        LOW_TO_HIGH
                    } else if w <= a + b {
                        HIGH_TO_LOW
                    } else {
                        NONE
                    };
                    self.set_pair(&mut st, 0, w, code);
                }
                st.cursor = self.n - 1;
                if self.settle(&mut st, stats) {
                    roots.push(st);
                }
            }
        }
        roots
    }

    fn set_pair(&self, st: &mut State, i: usize, j: usize, code: u8) {
        let (bi, bj) = (bits::singleton(i), bits::singleton(j));
        st.und[i] &= !bj;
        st.und[j] &= !bi;
        match code {
            LOW_TO_HIGH => {
                st.out[i] |= bj;
                st.inn[j] |= bi;
            }
            HIGH_TO_LOW => {
                st.out[j] |= bi;
                st.inn[i] |= bj;
            }
            _ => st.nonadjacent += 1,
        }
    }

    /// Propagates and checks feasibility; false means prune.
    fn settle(&self, st: &mut State, stats: &mut EngineStats) -> bool {
        let n = self.n;
        if self.prunes.short_cycle {
            // reach[v]: vertices reachable from v by a walk of length 1..=k−1.
            let mut reach = st.out;
            for _ in 2..self.k {
                let prev = reach;
                for v in 0..n {
                    let mut r = prev[v];
                    for w in bits::iter(prev[v]) {
                        r |= st.out[w];
                    }
                    reach[v] = r;
                }
            }
            // u → w is banned iff w reaches u; w → u is banned iff u reaches w.
            let mut banned_out = [0u64; ENGINE_MAX_ORDER];
            for (w, &rw) in reach.iter().enumerate().take(n) {
                for u in bits::iter(rw) {
                    banned_out[u] |= bits::singleton(w);
                }
            }
            for u in 0..n {
                let forced = st.und[u] & banned_out[u] & reach[u] & !bits::prefix(u + 1);
                for w in bits::iter(forced) {
                    self.set_pair(st, u, w, NONE);
                }
            }
            for u in 0..n {
                st.can_out[u] = st.und[u] & !banned_out[u];
                st.can_in[u] = st.und[u] & !reach[u];
            }
        } else {
            st.can_out = st.und;
            st.can_in = st.und;
        }

        if let Some(budget) = self.budget {
            if self.prunes.gamma_budget && st.nonadjacent > budget {
                stats.prunes.gamma += 1;
                return false;
            }
        }

        if self.prunes.degree {
            let (need_out, anchor_in) = match st.anchor {
                Some((a, b)) => (a.max(self.xi), Some((a, b))),
                None => (self.xi, None),
            };
            for v in 0..n {
                let max_out = (st.out[v] | st.can_out[v]).count_ones() as usize;
                let max_in = (st.inn[v] | st.can_in[v]).count_ones() as usize;
                if max_out < need_out || max_in < self.zeta {
                    stats.prunes.degree += 1;
                    return false;
                }
                if let Some((a, b)) = anchor_in {
                    if v > 0 && max_out == a && max_in < b {
                        stats.prunes.degree += 1;
                        return false;
                    }
                }
            }
        }

        if self.prunes.strong_necessary {
            let mut fwd = [0u64; ENGINE_MAX_ORDER];
            let mut bwd = [0u64; ENGINE_MAX_ORDER];
            for v in 0..n {
                fwd[v] = st.out[v] | st.can_out[v];
                bwd[v] = st.inn[v] | st.can_in[v];
            }
            let full = bits::full(n);
            if bits::closure(&fwd[..n], 0) != full || bits::closure(&bwd[..n], 0) != full {
                stats.prunes.strong += 1;
                return false;
            }
        }

        if self.prunes.symmetry && !self.lex_leader_ok(st) {
            stats.prunes.symmetry += 1;
            return false;
        }
        true
    }

    /// `M ≤ τ(M)` in pair order for every adjacent transposition `τ` inside
    /// one of vertex 0's blocks, judged on the decided prefix.
    fn lex_leader_ok(&self, st: &State) -> bool {
        let Some((a, b)) = st.anchor else { return true };
        let n = self.n;
        let block_end = |v: usize| if v <= a { a } else if v <= a + b { a + b } else { n - 1 };
        for i in 1..n - 1 {
            if block_end(i) == i {
                continue;
            }
            let j = i + 1;
            for &(p, q) in &self.pairs {
                let touches = p == i || p == j || q == i || q == j;
                if !touches {
                    continue;
                }
                let here = st.pair_code(p, q);
                let mapped = if (p, q) == (i, j) {
                    match here {
                        LOW_TO_HIGH => HIGH_TO_LOW,
                        HIGH_TO_LOW => LOW_TO_HIGH,
                        c => c,
                    }
                } else {
                    let swap = |v: usize| if v == i { j } else if v == j { i } else { v };
                    st.pair_code(swap(p), swap(q))
                };
                if here == UNDECIDED || mapped == UNDECIDED {
                    break;
                }
                if here < mapped {
                    break;
                }
                if here > mapped {
                    return false;
                }
            }
        }
        true
    }

    fn next_pair(&self, st: &mut State) -> Option<(usize, usize)> {
        while st.cursor < self.pairs.len() {
            let (i, j) = self.pairs[st.cursor];
            if bits::contains(st.und[i], j) {
                return Some((i, j));
            }
            st.cursor += 1;
        }
        None
    }

    fn choices(&self, st: &State, i: usize, j: usize, ctx: &mut Ctx) -> ([u8; 3], usize) {
        let mut vals = [0u8; 3];
        let mut len = 0;
        for code in [LOW_TO_HIGH, HIGH_TO_LOW] {
            let allowed = match code {
                LOW_TO_HIGH => bits::contains(st.can_out[i], j),
                _ => bits::contains(st.can_out[j], i),
            };
            if allowed {
                vals[len] = code;
                len += 1;
            } else {
                ctx.stats.prunes.short_cycle += 1;
            }
        }
        if let Some(rng) = ctx.rng.as_mut() {
            vals[..len].shuffle(rng);
        }
        vals[len] = NONE;
        (vals, len + 1)
    }

    /// Expands `st` to depth `split` below it, collecting frontier states in
    /// depth-first order.
    pub fn frontier(&self, st: &State, split: usize, ctx: &mut Ctx, out: &mut Vec<State>) {
        let mut st = st.clone();
        if split == 0 || self.next_pair(&mut st).is_none() {
            out.push(st);
            return;
        }
        let (i, j) = self.next_pair(&mut st).expect("checked above");
        ctx.stats.nodes += 1;
        let (vals, len) = self.choices(&st, i, j, ctx);
        for &code in &vals[..len] {
            let mut child = st.clone();
            self.set_pair(&mut child, i, j, code);
            child.cursor += 1;
            if self.settle(&mut child, &mut ctx.stats) {
                self.frontier(&child, split - 1, ctx, out);
            }
        }
    }

    /// Exhausts the subtree below `st`.
    pub fn run(&self, st: &State, ctx: &mut Ctx) -> Flow {
        self.dfs(st, ctx)
    }

    fn dfs(&self, st: &State, ctx: &mut Ctx) -> Flow {
        ctx.stats.nodes += 1;
        if ctx.interrupted() {
            return Flow::Interrupted;
        }
        let mut st = st.clone();
        let Some((i, j)) = self.next_pair(&mut st) else {
            return self.leaf(&st, ctx);
        };
        let (vals, len) = self.choices(&st, i, j, ctx);
        for &code in &vals[..len] {
            let mut child = st.clone();
            self.set_pair(&mut child, i, j, code);
            child.cursor += 1;
            if !self.settle(&mut child, &mut ctx.stats) {
                continue;
            }
            match self.dfs(&child, ctx) {
                Flow::Done => {}
                other => return other,
            }
        }
        Flow::Done
    }

    fn leaf(&self, st: &State, ctx: &mut Ctx) -> Flow {
        ctx.stats.leaves += 1;
        if let Some(budget) = self.budget {
            if st.nonadjacent > budget {
                ctx.stats.prunes.gamma += 1;
                return Flow::Done;
            }
        }
        let d = Digraph::from_out_sets(st.out[..self.n].to_vec()).expect("engine keeps arcs valid");
        if !d.in_class(&self.spec).unwrap_or(false) {
            ctx.stats.prunes.leaf_reject += 1;
            return Flow::Done;
        }
        ctx.found.push(d);
        match self.policy {
            LeafPolicy::Collect => Flow::Done,
            LeafPolicy::StopAtFirst => Flow::Stopped,
        }
    }

    pub fn budget(&self) -> Option<usize> {
        self.budget
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }
}
