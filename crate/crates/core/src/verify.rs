//! Theorem-checking runner shared by the CLI and the acceptance tests.
//!
//! Each [`Row`] records one criterion with its expected and computed values.
//! The fast tier covers orders up to 8; the full tier adds the order-9 exact
//! run and the order-10 and order-11 witness searches.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::canon::{are_isomorphic, canonical_form};
use crate::classify::{check_lemma26, check_prop22, classify_phi31};
use crate::construct::{self, binom2, circulant, directed_cycle, m_value, phi11_value, strong_tournament};
use crate::digraph::{ClassSpec, Digraph};
use crate::search::{self, solve, SearchOutcome, SearchParams, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Fast,
    Full,
}

impl std::str::FromStr for Tier {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fast" => Ok(Tier::Fast),
            "full" => Ok(Tier::Full),
            other => Err(format!("unknown tier {other:?} (expected fast or full)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Row {
    pub id: String,
    pub name: String,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tier: Tier,
    pub rows: Vec<Row>,
    /// Seconds spent per row, parallel to `rows`.
    pub elapsed_secs: Vec<f64>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    /// One line per row.
    pub fn table(&self) -> String {
        let mut s = String::new();
        for r in &self.rows {
            s.push_str(&format!(
                "[{}] {:<4} {} | expected: {} | computed: {}\n",
                if r.pass { "PASS" } else { "FAIL" },
                r.id,
                r.name,
                r.expected,
                r.computed
            ));
        }
        s
    }
}

/// The named digraphs the criteria compare against; replaceable for fault
/// injection.
#[derive(Clone, Copy)]
pub struct Subjects {
    pub f8: fn() -> Digraph,
    pub c7_12: fn() -> Digraph,
    pub c4: fn() -> Digraph,
}

impl Default for Subjects {
    fn default() -> Self {
        Self {
            f8: construct::f8,
            c7_12: || circulant(7, &[1, 2]).expect("valid jumps"),
            c4: || directed_cycle(4).expect("valid order"),
        }
    }
}

#[derive(Clone, Copy)]
pub struct Options {
    pub tier: Tier,
    pub workers: usize,
    pub seed: u64,
}

impl Default for Options {
    fn default() -> Self {
        Self { tier: Tier::Fast, workers: 1, seed: 0 }
    }
}

/// Runs every criterion of the selected tier.
pub fn run(opts: Options) -> Report {
    run_with(opts, Subjects::default())
}

pub fn run_with(opts: Options, subjects: Subjects) -> Report {
    let mut r = Runner { opts, subjects, rows: Vec::new(), elapsed: Vec::new() };
    r.timed(Runner::emptiness_small);
    r.timed(Runner::order7);
    r.timed(Runner::order8);
    if opts.tier == Tier::Full {
        r.timed(Runner::order9);
        r.timed(Runner::witnesses);
    }
    r.timed(Runner::out_in_one);
    r.timed(Runner::families);
    r.timed(Runner::formula);
    r.timed(Runner::identity);
    r.timed(Runner::oracles);
    r.timed(Runner::canon_invariance);
    r.timed(Runner::naive_solver);
    r.timed(Runner::strong_vertex);
    r.timed(Runner::determinism);
    Report { tier: opts.tier, rows: r.rows, elapsed_secs: r.elapsed }
}

struct Runner {
    opts: Options,
    subjects: Subjects,
    rows: Vec<Row>,
    elapsed: Vec<f64>,
}

fn spec(n: usize, k: usize, xi: usize, zeta: usize) -> ClassSpec {
    ClassSpec::new(n, k, xi, zeta).expect("valid spec")
}

fn row(id: &str, name: &str, expected: impl Into<String>, computed: impl Into<String>, pass: bool) -> Row {
    Row {
        id: id.into(),
        name: name.into(),
        expected: expected.into(),
        computed: computed.into(),
        pass,
    }
}

fn describe(out: &Result<SearchOutcome, search::SearchError>) -> String {
    match out {
        Ok(o) => format!("status={} phi={:?} classes={}", o.status.as_str(), o.phi, o.extremal.len()),
        Err(e) => format!("error: {e}"),
    }
}

impl Runner {
    fn timed(&mut self, f: fn(&mut Runner) -> Row) {
        let t = Instant::now();
        let row = f(self);
        self.rows.push(row);
        self.elapsed.push(t.elapsed().as_secs_f64());
    }

    fn exact(&self, s: ClassSpec) -> Result<SearchOutcome, search::SearchError> {
        solve(&SearchParams::exact(s).with_workers(self.opts.workers))
    }

    fn emptiness_small(&mut self) -> Row {
        let mut parts = Vec::new();
        let mut pass = true;
        for n in 3..=6 {
            let out = solve(&SearchParams::emptiness(spec(n, 3, 2, 1)).with_workers(self.opts.workers));
            let status = out.as_ref().map(|o| o.status.as_str()).unwrap_or("error");
            pass &= status == "empty";
            parts.push(format!("n={n}:{status}"));
        }
        row("1", "no member of D_n^3(2,1) for n = 3..6", "empty for n=3..6", parts.join(" "), pass)
    }

    fn unique_extremal(&self, id: &str, name: &str, s: ClassSpec, phi: usize, target: &Digraph) -> Row {
        let out = self.exact(s);
        let expected = format!("phi={phi}, 1 class, canonical {}", canonical_form(target).render());
        let pass = match &out {
            Ok(o) => {
                o.status == Status::Proved
                    && o.phi == Some(phi)
                    && o.extremal.len() == 1
                    && canonical_form(&o.extremal[0]).bytes == canonical_form(target).bytes
            }
            Err(_) => false,
        };
        let computed = match &out {
            Ok(o) => format!("{}, canonical {}", describe(&out), o.canonical_strings().join(",")),
            Err(_) => describe(&out),
        };
        row(id, name, expected, computed, pass)
    }

    fn order7(&mut self) -> Row {
        let target = (self.subjects.c7_12)();
        self.unique_extremal("2", "D_7^3(2,1) extremal is C_7(1,2)", spec(7, 3, 2, 1), 14, &target)
    }

    fn order8(&mut self) -> Row {
        let target = (self.subjects.f8)();
        self.unique_extremal("3", "D_8^3(2,1) extremal is F_8", spec(8, 3, 2, 1), 20, &target)
    }

    fn order9(&mut self) -> Row {
        let out = self.exact(spec(9, 3, 2, 1));
        let pass = match &out {
            Ok(o) => {
                o.status == Status::Proved
                    && o.phi == Some(26)
                    && !o.extremal.is_empty()
                    && o.extremal.iter().all(|d| check_lemma26(d).unwrap_or(false))
            }
            Err(_) => false,
        };
        row(
            "4",
            "phi_9^3(2,1) = 26 by downward sweep",
            "status=proved phi=26, small-degree vertex in every extremal",
            describe(&out),
            pass,
        )
    }

    fn witnesses(&mut self) -> Row {
        let mut parts = Vec::new();
        let mut pass = true;
        for n in [10usize, 11] {
            let target = binom2(n - 1) - 2;
            let p = SearchParams::witness(spec(n, 3, 2, 1), target)
                .with_workers(self.opts.workers)
                .with_seed(self.opts.seed);
            let out = solve(&p);
            let ok = match &out {
                Ok(o) => {
                    o.status == Status::WitnessFound
                        && o.extremal.len() == 1
                        && o.extremal[0].arc_count() >= target
                        && o.extremal[0].in_class(&p.spec).unwrap_or(false)
                }
                Err(_) => false,
            };
            pass &= ok;
            let arcs = out.as_ref().ok().and_then(|o| o.extremal.first()).map(|d| d.arc_count());
            parts.push(format!(
                "n={n}:{} arcs={:?}",
                out.as_ref().map(|o| o.status.as_str()).unwrap_or("error"),
                arcs
            ));
        }
        row(
            "5",
            "witnesses with C(n-1,2)-2 arcs for n = 10, 11",
            "n=10: 34 arcs, n=11: 43 arcs",
            parts.join(" "),
            pass,
        )
    }

    fn out_in_one(&mut self) -> Row {
        let mut parts = Vec::new();
        let mut pass = true;
        let c4 = (self.subjects.c4)();
        for n in 4..=8 {
            let out = self.exact(spec(n, 3, 1, 1));
            let want = phi11_value(n, 3).expect("n ≥ k + 1") as usize;
            let ok = match &out {
                Ok(o) => {
                    o.status == Status::Proved
                        && o.phi == Some(want)
                        && (n != 4 || (o.extremal.len() == 1 && are_isomorphic(&o.extremal[0], &c4)))
                }
                Err(_) => false,
            };
            pass &= ok;
            parts.push(format!("n={n}:{:?}", out.as_ref().ok().and_then(|o| o.phi)));
        }
        row(
            "6",
            "phi_n^3(1,1) = C(n-1,2)+1 for n = 4..8, unique C_4 at n = 4",
            "n=4:4 n=5:7 n=6:11 n=7:16 n=8:22",
            parts.join(" "),
            pass,
        )
    }

    fn families(&mut self) -> Row {
        let mut total = 0;
        let mut failures = Vec::new();
        for n in 5..=8 {
            let Ok(out) = self.exact(spec(n, 3, 1, 1)) else {
                failures.push(format!("n={n}: search failed"));
                continue;
            };
            for d in &out.extremal {
                total += 1;
                match classify_phi31(d) {
                    Ok(c) if c.is_valid() => {}
                    Ok(c) => failures.push(format!("n={n}: {}", c.violations.join(","))),
                    Err(e) => failures.push(format!("n={n}: {e}")),
                }
                if let Err(e) = check_prop22(d) {
                    failures.push(format!("n={n}: {e}"));
                }
            }
        }
        row(
            "7",
            "every extremal of D_n^3(1,1), n = 5..8, fits one family",
            "all classified, 0 violations, two out-degree-1 vertices located",
            format!("{total} digraphs, {} failures {}", failures.len(), failures.join("; ")),
            failures.is_empty() && total > 0,
        )
    }

    fn formula(&mut self) -> Row {
        let mut pass = true;
        for k in 2..=8 {
            for n in k + 1..=16 {
                let a = phi11_value(n, k).ok();
                let b = m_value(n, k).ok().map(|m| m - 1);
                pass &= a.is_some() && a == b;
            }
        }
        let mut parts = Vec::new();
        for n in 3..=6 {
            let out = self.exact(spec(n, 2, 1, 1));
            let ok = match &out {
                Ok(o) => {
                    let t = strong_tournament(n).expect("n ≥ 3");
                    o.phi == Some(binom2(n))
                        && o.extremal.iter().all(|d| d.arc_count() == binom2(n) && d.is_strong())
                        && o.extremal.iter().any(|d| are_isomorphic(d, &t))
                }
                Err(_) => false,
            };
            pass &= ok;
            parts.push(format!(
                "n={n}:phi={:?} classes={}",
                out.as_ref().ok().and_then(|o| o.phi),
                out.as_ref().map(|o| o.extremal.len()).unwrap_or(0)
            ));
        }
        row(
            "8",
            "phi11 = m - 1 and phi_n^2(1,1) = C(n,2) with strong tournaments",
            "identity for 2 <= k <= 8, k < n <= 16; n=3..6 phi=C(n,2)",
            parts.join(" "),
            pass,
        )
    }

    fn identity(&mut self) -> Row {
        let mut checked = 0;
        let mut bad = 0;
        let mut check = |d: &Digraph| {
            if !d.has_two_cycle() {
                checked += 1;
                if d.arc_count() + d.gamma() != binom2(d.order()) {
                    bad += 1;
                }
            }
        };
        check(&(self.subjects.f8)());
        check(&(self.subjects.c7_12)());
        check(&(self.subjects.c4)());
        for n in 3..=10 {
            check(&strong_tournament(n).expect("n ≥ 3"));
        }
        for n in 5..=8 {
            for p in construct::phi31_param_grid(n) {
                check(&construct::build_phi31(&p).expect("grid builds"));
            }
        }
        for (n, k, xi, zeta) in [(7, 3, 2, 1), (8, 3, 2, 1), (7, 3, 1, 1), (6, 2, 1, 1)] {
            if let Ok(o) = self.exact(spec(n, k, xi, zeta)) {
                o.extremal.iter().for_each(&mut check);
            }
        }
        row(
            "9a",
            "arcs + gamma = C(n,2) on 2-cycle-free artifacts",
            "0 violations",
            format!("{checked} digraphs, {bad} violations"),
            bad == 0 && checked > 0,
        )
    }

    fn oracles(&mut self) -> Row {
        let mut rng = ChaCha8Rng::seed_from_u64(self.opts.seed ^ 0x5eed);
        let mut bad = 0;
        for _ in 0..500 {
            let d = random_digraph(&mut rng, 9);
            if d.girth() != oracle::girth(&d) || d.is_strong() != oracle::is_strong(&d) || d.gamma() != oracle::gamma(&d) {
                bad += 1;
            }
        }
        row(
            "9b",
            "girth, strongness and gamma vs brute force on 500 random digraphs",
            "0 mismatches",
            format!("{bad} mismatches"),
            bad == 0,
        )
    }

    fn canon_invariance(&mut self) -> Row {
        let mut rng = ChaCha8Rng::seed_from_u64(self.opts.seed ^ 0xca11);
        let mut bad = 0;
        for _ in 0..20 {
            let d = random_digraph(&mut rng, 10);
            let base = canonical_form(&d).bytes;
            for _ in 0..100 {
                let perm = random_perm(&mut rng, d.order());
                if canonical_form(&d.relabel(&perm)).bytes != base {
                    bad += 1;
                }
            }
        }
        row(
            "9c",
            "canonical form invariant under relabeling (100 x 20)",
            "0 mismatches",
            format!("{bad} mismatches"),
            bad == 0,
        )
    }

    fn naive_solver(&mut self) -> Row {
        let mut bad = Vec::new();
        let mut checked = 0;
        for n in 3..=5 {
            let specs: Vec<ClassSpec> = [2, 3]
                .into_iter()
                .flat_map(|k| [(1, 1), (2, 1), (1, 2), (2, 2)].map(|(x, z)| spec(n, k, x, z)))
                .collect();
            let naive = oracle::naive_extremal(n, &specs);
            for (s, (phi, classes)) in specs.iter().zip(naive) {
                checked += 1;
                let out = self.exact(*s);
                let ok = match &out {
                    Ok(o) => {
                        let got: BTreeSet<Vec<u8>> = o.extremal.iter().map(|d| canonical_form(d).bytes).collect();
                        o.phi == Some(phi) && got == classes
                    }
                    Err(_) => false,
                };
                if !ok {
                    bad.push(format!("{s}"));
                }
            }
        }
        row(
            "9d",
            "solver agrees with 3^C(n,2) enumeration, n <= 5, k in {2,3}",
            "phi and extremal sets equal",
            format!("{checked} specs, mismatches: [{}]", bad.join(",")),
            bad.is_empty(),
        )
    }

    fn strong_vertex(&mut self) -> Row {
        let mut rng = ChaCha8Rng::seed_from_u64(self.opts.seed ^ 0x28);
        let mut tested = vec![(self.subjects.f8)(), (self.subjects.c7_12)()];
        for n in 5..=12 {
            tested.push(circulant(n, &[1, 2]).expect("valid"));
            tested.push(circulant(n, &[1, 3]).expect("valid"));
        }
        while tested.len() < 80 {
            let d = random_digraph(&mut rng, 10);
            if d.is_strong() && d.degree_profile().min_out >= 2 {
                tested.push(d);
            }
        }
        let mut bad = 0;
        for d in &tested {
            match search::find_strong_preserving_vertex(d) {
                Ok(v) if d.remove_vertex(v).map(|(r, _)| r.is_strong()).unwrap_or(false) => {}
                _ => bad += 1,
            }
        }
        row(
            "9e",
            "deletable vertex in strong digraphs with min out-degree 2",
            "found and verified on every test digraph",
            format!("{} digraphs, {bad} failures", tested.len()),
            bad == 0,
        )
    }

    fn determinism(&mut self) -> Row {
        let mut bad = Vec::new();
        let cases = [
            SearchParams::exact(spec(7, 3, 2, 1)),
            SearchParams::exact(spec(7, 3, 1, 1)),
            SearchParams::exact(spec(6, 2, 1, 1)),
            SearchParams::emptiness(spec(6, 3, 2, 1)),
            SearchParams::emptiness(spec(8, 3, 2, 1)),
        ];
        for p in cases {
            let sig = |w: usize| {
                solve(&p.clone().with_workers(w)).map(|o| (o.status, o.phi, o.canonical_strings(), o.stats.nodes))
            };
            match (sig(1), sig(4)) {
                (Ok(a), Ok(b)) if a == b => {}
                _ => bad.push(format!("{}", p.spec)),
            }
        }
        row(
            "9f",
            "identical outcome with 1 and 4 workers",
            "phi, canonical set and status equal",
            format!("mismatches: [{}]", bad.join(",")),
            bad.is_empty(),
        )
    }
}

/// A random digraph on 2..=`max_n` vertices with a random arc density.
pub fn random_digraph(rng: &mut impl Rng, max_n: usize) -> Digraph {
    let n = rng.gen_range(2..=max_n);
    let p: f64 = rng.gen_range(0.15..0.7);
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(p) {
                arcs.push((u, v));
            }
        }
    }
    Digraph::from_arcs(n, &arcs).expect("valid arcs")
}

pub fn random_perm(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Slow reference implementations used to cross-check the fast paths.
pub mod oracle {
    use std::collections::BTreeSet;

    use crate::canon::canonical_form;
    use crate::construct::binom2;
    use crate::digraph::{ClassSpec, Digraph};

    /// Shortest cycle length by enumerating simple paths from each start
    /// vertex, visiting only larger vertices.
    pub fn girth(d: &Digraph) -> Option<usize> {
        let n = d.order();
        let mut best: Option<usize> = None;
        fn walk(d: &Digraph, start: usize, v: usize, len: usize, seen: &mut Vec<bool>, best: &mut Option<usize>) {
            for w in 0..d.order() {
                if !d.has_arc(v, w) {
                    continue;
                }
                if w == start {
                    *best = Some(best.map_or(len, |b| b.min(len)));
                } else if w > start && !seen[w] && best.is_none_or(|b| len + 1 < b) {
                    seen[w] = true;
                    walk(d, start, w, len + 1, seen, best);
                    seen[w] = false;
                }
            }
        }
        for s in 0..n {
            let mut seen = vec![false; n];
            seen[s] = true;
            walk(d, s, s, 1, &mut seen, &mut best);
        }
        best
    }

    /// Strongness via a Warshall transitive closure.
    pub fn is_strong(d: &Digraph) -> bool {
        let n = d.order();
        let mut r = vec![vec![false; n]; n];
        for (u, row) in r.iter_mut().enumerate() {
            row[u] = true;
            for (v, cell) in row.iter_mut().enumerate() {
                if d.has_arc(u, v) {
                    *cell = true;
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                if r[i][k] {
                    let rk = r[k].clone();
                    for (j, &x) in rk.iter().enumerate() {
                        if x {
                            r[i][j] = true;
                        }
                    }
                }
            }
        }
        r.iter().all(|row| row.iter().all(|&x| x))
    }

    pub fn gamma(d: &Digraph) -> usize {
        let n = d.order();
        let mut g = 0;
        for u in 0..n {
            for v in u + 1..n {
                if !d.has_arc(u, v) && !d.has_arc(v, u) {
                    g += 1;
                }
            }
        }
        g
    }

    /// Membership with the reference girth and strongness checks.
    pub fn in_class(d: &Digraph, s: &ClassSpec) -> bool {
        let n = d.order();
        n == s.n
            && (0..n).all(|v| d.out_degree(v) >= s.xi && d.in_degree(v) >= s.zeta)
            && is_strong(d)
            && girth(d).is_none_or(|g| g > s.k)
    }

    /// For each spec: the maximum arc count (0 if empty) and the canonical
    /// bytes of every extremal member, by enumerating all `3^C(n,2)` pair
    /// states.
    pub fn naive_extremal(n: usize, specs: &[ClassSpec]) -> Vec<(usize, BTreeSet<Vec<u8>>)> {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let total = 3usize.pow(binom2(n) as u32);
        let mut best: Vec<(usize, BTreeSet<Vec<u8>>)> = vec![(0, BTreeSet::new()); specs.len()];
        for mut code in 0..total {
            let mut arcs = Vec::new();
            for &(i, j) in &pairs {
                match code % 3 {
                    1 => arcs.push((i, j)),
                    2 => arcs.push((j, i)),
                    _ => {}
                }
                code /= 3;
            }
            let d = Digraph::from_arcs(n, &arcs).expect("valid arcs");
            for (s, slot) in specs.iter().zip(best.iter_mut()) {
                if arcs.len() < slot.0 || !in_class(&d, s) {
                    continue;
                }
                if arcs.len() > slot.0 {
                    *slot = (arcs.len(), BTreeSet::new());
                }
                slot.1.insert(canonical_form(&d).bytes);
            }
        }
        best
    }
}
