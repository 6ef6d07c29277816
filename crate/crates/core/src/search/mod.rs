//! Exact extremal search, witness search and emptiness checks.
//!
//! [`solve`] drives the branch-and-bound [`engine`] in one of three modes.
//! Work is split into subtrees at a fixed depth below the root states and
//! fanned out over a rayon pool; results are merged as sets of canonical
//! byte strings, so the outcome does not depend on the worker count.

pub mod checkpoint;
pub mod engine;

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::canon::{self, canonical_form};
use crate::construct::binom2;
use crate::digraph::{ClassSpec, Digraph, DigraphError};

pub use checkpoint::Checkpoint;
pub use engine::{EngineStats, PruneConfig, PruneCounts, ENGINE_MAX_ORDER};
use engine::{Ctx, Engine, Flow, LeafPolicy, State};

/// Largest order accepted by exact and emptiness mode.
pub const EXACT_MAX_ORDER: usize = 12;
/// Largest order accepted by witness mode.
pub const WITNESS_MAX_ORDER: usize = ENGINE_MAX_ORDER;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Witness,
    Emptiness,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Witness => "witness",
            Mode::Emptiness => "emptiness",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Mode::Exact),
            "witness" => Ok(Mode::Witness),
            "emptiness" => Ok(Mode::Emptiness),
            other => Err(format!("unknown mode {other:?} (expected exact, witness or emptiness)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Proved,
    WitnessFound,
    Empty,
    Timeout,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Proved => "proved",
            Status::WitnessFound => "witness_found",
            Status::Empty => "empty",
            Status::Timeout => "timeout",
        }
    }
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("guardrail: {0}")]
    Guardrail(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Digraph(#[from] DigraphError),
    #[error("I/O: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchParams {
    pub spec: ClassSpec,
    pub mode: Mode,
    /// Arc-count goal; required in witness mode, ignored in exact mode.
    pub target_arcs: Option<usize>,
    /// Maximum number of nonadjacent pairs.
    pub gamma_budget: Option<usize>,
    /// Wall-clock limit in seconds.
    pub time_limit: Option<f64>,
    pub workers: usize,
    pub checkpoint_path: Option<PathBuf>,
    pub prunes: PruneConfig,
    /// Branching decisions below each root state before work is split.
    pub split_depth: usize,
    /// Witness-mode restart seed.
    pub seed: u64,
    /// Node allowance of a unit-length witness restart.
    pub restart_nodes: u64,
}

impl SearchParams {
    pub fn new(spec: ClassSpec, mode: Mode) -> Self {
        Self {
            spec,
            mode,
            target_arcs: None,
            gamma_budget: None,
            time_limit: None,
            workers: 1,
            checkpoint_path: None,
            prunes: PruneConfig::default(),
            split_depth: 8,
            seed: 0,
            restart_nodes: 20_000,
        }
    }

    pub fn exact(spec: ClassSpec) -> Self {
        Self::new(spec, Mode::Exact)
    }

    pub fn emptiness(spec: ClassSpec) -> Self {
        Self::new(spec, Mode::Emptiness)
    }

    pub fn witness(spec: ClassSpec, target_arcs: usize) -> Self {
        Self {
            target_arcs: Some(target_arcs),
            ..Self::new(spec, Mode::Witness)
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_prunes(mut self, prunes: PruneConfig) -> Self {
        self.prunes = prunes;
        self
    }

    pub fn with_time_limit(mut self, seconds: f64) -> Self {
        self.time_limit = Some(seconds);
        self
    }

    pub fn with_checkpoint(mut self, path: impl Into<PathBuf>) -> Self {
        self.checkpoint_path = Some(path.into());
        self
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        let n = self.spec.n;
        let total = binom2(n);
        let limit = match self.mode {
            Mode::Exact | Mode::Emptiness => EXACT_MAX_ORDER,
            Mode::Witness => WITNESS_MAX_ORDER,
        };
        if n > limit {
            return Err(SearchError::Guardrail(format!(
                "{} mode is limited to n ≤ {limit}, got n = {n}",
                self.mode.as_str()
            )));
        }
        if self.workers == 0 {
            return Err(SearchError::InvalidParams("workers must be at least 1".into()));
        }
        if let Some(t) = self.target_arcs {
            if t > total {
                return Err(SearchError::InvalidParams(format!("target {t} exceeds C({n},2) = {total}")));
            }
        }
        if let Some(g) = self.gamma_budget {
            if g > total {
                return Err(SearchError::InvalidParams(format!("gamma budget {g} exceeds C({n},2) = {total}")));
            }
            if let Some(t) = self.target_arcs {
                if g + t != total {
                    return Err(SearchError::InvalidParams(format!(
                        "gamma budget {g} and target {t} must sum to C({n},2) = {total}"
                    )));
                }
            }
        }
        if self.mode == Mode::Witness && self.target_arcs.is_none() && self.gamma_budget.is_none() {
            return Err(SearchError::InvalidParams("witness mode needs a target".into()));
        }
        if let Some(s) = self.time_limit {
            if !(s.is_finite() && s >= 0.0) {
                return Err(SearchError::InvalidParams(format!("bad time limit {s}")));
            }
        }
        Ok(())
    }

    /// Nonadjacency budget implied by the target or the explicit budget.
    fn implied_budget(&self) -> Option<usize> {
        self.gamma_budget
            .or_else(|| self.target_arcs.map(|t| binom2(self.spec.n) - t))
    }

    /// SHA-256 over every parameter that shapes the search tree.
    pub fn hash(&self) -> [u8; 32] {
        let s = &self.spec;
        let text = format!(
            "girthforge-search|n={}|k={}|xi={}|zeta={}|mode={}|target={:?}|gamma={:?}|split={}|prunes={}|seed={}",
            s.n,
            s.k,
            s.xi,
            s.zeta,
            self.mode.as_str(),
            self.target_arcs,
            self.gamma_budget,
            self.split_depth,
            self.prunes.code(),
            self.seed,
        );
        Sha256::digest(text.as_bytes()).into()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub leaves: u64,
    pub prunes: PruneCounts,
    /// Frontier subtrees searched.
    pub subtrees: u64,
    /// Budget sweeps in exact mode.
    pub sweeps: u64,
    /// Witness-mode restarts started.
    pub restarts: u64,
}

impl SearchStats {
    fn absorb(&mut self, e: &EngineStats) {
        let mut base = EngineStats {
            nodes: self.nodes,
            leaves: self.leaves,
            prunes: self.prunes,
        };
        base.absorb(e);
        self.nodes = base.nodes;
        self.leaves = base.leaves;
        self.prunes = base.prunes;
    }

    fn engine(&self) -> EngineStats {
        EngineStats {
            nodes: self.nodes,
            leaves: self.leaves,
            prunes: self.prunes,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub phi: Option<usize>,
    /// Extremal members in exact mode, the witness in witness or emptiness
    /// mode; canonically labelled and sorted by canonical bytes.
    pub extremal: Vec<Digraph>,
    pub status: Status,
    pub stats: SearchStats,
    pub elapsed: Duration,
    pub resumable: bool,
    /// Seed used by witness mode.
    pub seed: Option<u64>,
    /// Index of the successful witness restart.
    pub restart: Option<u64>,
}

impl SearchOutcome {
    /// Canonical strings of `extremal`, in order.
    pub fn canonical_strings(&self) -> Vec<String> {
        self.extremal.iter().map(|d| canonical_form(d).render()).collect()
    }
}

/// Runs one search.
pub fn solve(params: &SearchParams) -> Result<SearchOutcome, SearchError> {
    params.validate()?;
    let started = Instant::now();
    let deadline = params.time_limit.map(|s| started + Duration::from_secs_f64(s));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(params.workers)
        .build()
        .map_err(|e| SearchError::InvalidParams(format!("thread pool: {e}")))?;
    let driver = Driver { params, deadline, pool: &pool };
    let mut outcome = match params.mode {
        Mode::Exact => driver.exact()?,
        Mode::Emptiness => driver.emptiness()?,
        Mode::Witness => driver.witness()?,
    };
    outcome.elapsed = started.elapsed();
    check_soundness(params, &outcome)?;
    Ok(outcome)
}

fn check_soundness(params: &SearchParams, out: &SearchOutcome) -> Result<(), SearchError> {
    for d in &out.extremal {
        if !d.in_class(&params.spec)? {
            return Err(SearchError::Invariant(format!("emitted digraph outside {}", params.spec)));
        }
        if out.status == Status::Proved && Some(d.arc_count()) != out.phi {
            return Err(SearchError::Invariant("extremal member with wrong arc count".into()));
        }
        if let Some(t) = params.target_arcs.filter(|_| params.mode == Mode::Witness) {
            if d.arc_count() < t {
                return Err(SearchError::Invariant("witness below target".into()));
            }
        }
    }
    if out.status == Status::Empty && params.mode != Mode::Witness && out.phi != Some(0) {
        return Err(SearchError::Invariant("empty class must report phi = 0".into()));
    }
    Ok(())
}

struct Driver<'a> {
    params: &'a SearchParams,
    deadline: Option<Instant>,
    pool: &'a rayon::ThreadPool,
}

/// One finished frontier subtree.
struct ItemResult {
    index: usize,
    flow: Flow,
    stats: EngineStats,
    found: Vec<(Vec<u8>, Digraph)>,
}

enum SweepEnd {
    /// Every subtree finished.
    Complete,
    /// A member was found in stop-at-first mode.
    Found(Digraph),
    /// Deadline reached; the checkpoint holds the resume point.
    Interrupted,
}

/// Accumulated state of one sweep, mirrored in the checkpoint.
struct SweepState {
    next: usize,
    found: BTreeMap<Vec<u8>, Digraph>,
    stats: SearchStats,
    gamma_fired: bool,
}

impl<'a> Driver<'a> {
    fn timed_out(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    fn outcome(&self, status: Status, phi: Option<usize>, extremal: Vec<Digraph>, stats: SearchStats) -> SearchOutcome {
        SearchOutcome {
            phi,
            extremal,
            status,
            stats,
            elapsed: Duration::ZERO,
            resumable: false,
            seed: None,
            restart: None,
        }
    }

    /// Root states expanded to the split depth, in a fixed order.
    fn frontier(&self, engine: &Engine, stats: &mut SearchStats) -> Vec<State> {
        let mut es = EngineStats::default();
        let roots = engine.roots(&mut es);
        let mut ctx = Ctx::new(None, None);
        let mut out = Vec::new();
        for root in &roots {
            engine.frontier(root, self.params.split_depth, &mut ctx, &mut out);
        }
        es.absorb(&ctx.stats);
        stats.absorb(&es);
        out
    }

    fn load_checkpoint(&self) -> Result<Option<Checkpoint>, SearchError> {
        let Some(path) = &self.params.checkpoint_path else { return Ok(None) };
        let Some(cp) = Checkpoint::load(path)? else { return Ok(None) };
        if cp.params_hash != self.params.hash() {
            return Err(SearchError::Checkpoint("parameters hash mismatch".into()));
        }
        Ok(Some(cp))
    }

    fn save_checkpoint(&self, engine: &Engine, frontier: &[State], sw: &SweepState) -> Result<bool, SearchError> {
        let Some(path) = &self.params.checkpoint_path else { return Ok(false) };
        let prefix = frontier.get(sw.next).map(|st| engine.prefix_codes(st)).unwrap_or_default();
        let cp = Checkpoint {
            params_hash: self.params.hash(),
            budget: engine.budget().map(|b| b as u32),
            gamma_fired: sw.gamma_fired,
            next_index: sw.next as u64,
            prefix,
            found: sw.found.keys().cloned().collect(),
            stats: sw.stats.engine(),
        };
        cp.save(path)?;
        Ok(true)
    }

    fn clear_checkpoint(&self) -> Result<(), SearchError> {
        if let Some(path) = &self.params.checkpoint_path {
            match std::fs::remove_file(path) {
                Ok(()) => {}
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
                Err(e) => return Err(e.into()),
            }
        }
        Ok(())
    }

    /// Restores sweep state from a checkpoint taken at this budget.
    fn resume_sweep(&self, cp: &Checkpoint, engine: &Engine, frontier: &[State]) -> Result<SweepState, SearchError> {
        let next = cp.next_index as usize;
        if next > frontier.len() {
            return Err(SearchError::Checkpoint("frontier index out of range".into()));
        }
        let expected = frontier.get(next).map(|st| engine.prefix_codes(st)).unwrap_or_default();
        if expected != cp.prefix {
            return Err(SearchError::Checkpoint("subtree prefix does not match the regenerated frontier".into()));
        }
        let n = self.params.spec.n;
        let mut found = BTreeMap::new();
        for bytes in &cp.found {
            let d = canon::digraph_from_bytes(n, bytes)
                .ok_or_else(|| SearchError::Checkpoint("malformed canonical bytes".into()))?;
            if canonical_form(&d).bytes != *bytes {
                return Err(SearchError::Checkpoint("stored digraph is not canonical".into()));
            }
            found.insert(bytes.clone(), d);
        }
        let mut stats = SearchStats::default();
        stats.absorb(&cp.stats);
        Ok(SweepState { next, found, stats, gamma_fired: cp.gamma_fired })
    }

    fn run_item(&self, engine: &Engine, st: &State, index: usize, best: Option<&AtomicUsize>) -> ItemResult {
        let mut ctx = Ctx::new(self.deadline, None);
        ctx.cutoff = best.map(|b| (b, index));
        let flow = engine.run(st, &mut ctx);
        let mut seen: HashMap<Vec<u8>, Digraph> = HashMap::new();
        for d in ctx.found.drain(..) {
            let cf = canonical_form(&d);
            seen.entry(cf.bytes.clone()).or_insert_with(|| cf.canonical_digraph(&d));
        }
        if flow == Flow::Stopped {
            if let Some(b) = best {
                b.fetch_min(index, Ordering::Relaxed);
            }
        }
        ItemResult { index, flow, stats: ctx.stats, found: seen.into_iter().collect() }
    }

    /// Searches `frontier[sw.next..]`, updating `sw` and the checkpoint.
    fn sweep(&self, engine: &Engine, frontier: &[State], sw: &mut SweepState, stop_at_first: bool) -> Result<SweepEnd, SearchError> {
        let batch = (self.params.workers * 16).max(1);
        let best = AtomicUsize::new(usize::MAX);
        let mut last_save = Instant::now();
        while sw.next < frontier.len() {
            if self.timed_out() {
                self.save_checkpoint(engine, frontier, sw)?;
                return Ok(SweepEnd::Interrupted);
            }
            let start = sw.next;
            let end = (start + batch).min(frontier.len());
            let best_ref = stop_at_first.then_some(&best);
            let mut results: Vec<ItemResult> = self.pool.install(|| {
                frontier[start..end]
                    .par_iter()
                    .enumerate()
                    .map(|(off, st)| self.run_item(engine, st, start + off, best_ref))
                    .collect()
            });
            results.sort_by_key(|r| r.index);

            if let Some(win) = results.iter().filter(|r| r.flow == Flow::Stopped).map(|r| r.index).min() {
                // Later subtrees were cut off at timing-dependent points.
                for r in results.iter().filter(|r| r.index <= win) {
                    sw.stats.absorb(&r.stats);
                    sw.stats.subtrees += 1;
                }
                let r = results.into_iter().find(|r| r.index == win).expect("winner present");
                let (_, d) = r.found.into_iter().next().ok_or_else(|| SearchError::Invariant("stopped without a member".into()))?;
                return Ok(SweepEnd::Found(d));
            }

            for r in results {
                if r.flow != Flow::Done {
                    self.save_checkpoint(engine, frontier, sw)?;
                    return Ok(SweepEnd::Interrupted);
                }
                sw.gamma_fired |= r.stats.prunes.gamma > 0;
                sw.stats.absorb(&r.stats);
                sw.stats.subtrees += 1;
                for (bytes, d) in r.found {
                    sw.found.entry(bytes).or_insert(d);
                }
                sw.next = r.index + 1;
            }
            if last_save.elapsed() >= Duration::from_secs(2) {
                self.save_checkpoint(engine, frontier, sw)?;
                last_save = Instant::now();
            }
        }
        Ok(SweepEnd::Complete)
    }

    fn exact(&self) -> Result<SearchOutcome, SearchError> {
        let p = self.params;
        let total = binom2(p.spec.n);
        let mut resume = self.load_checkpoint()?;
        let mut stats = SearchStats::default();
        let first_budget = resume.as_ref().and_then(|cp| cp.budget).unwrap_or(0) as usize;
        if resume.as_ref().is_some_and(|cp| cp.budget.is_none()) {
            return Err(SearchError::Checkpoint("exact-mode checkpoint without a budget".into()));
        }
        for budget in first_budget..=total {
            let engine = Engine::new(p.spec, Some(budget), p.prunes, LeafPolicy::Collect);
            let mut gen = SearchStats::default();
            let frontier = self.frontier(&engine, &mut gen);
            let mut sw = match resume.take() {
                // Checkpointed counters already cover earlier sweeps and
                // this sweep's frontier generation.
                Some(cp) => self.resume_sweep(&cp, &engine, &frontier)?,
                None => {
                    let gamma_fired = gen.prunes.gamma > 0;
                    stats.absorb(&gen.engine());
                    let carried = std::mem::take(&mut stats);
                    SweepState { next: 0, found: BTreeMap::new(), stats: carried, gamma_fired }
                }
            };
            sw.stats.sweeps = (budget + 1) as u64;
            let end = self.sweep(&engine, &frontier, &mut sw, false)?;
            stats = sw.stats;
            match end {
                SweepEnd::Interrupted => {
                    let mut out = self.outcome(Status::Timeout, None, Vec::new(), stats);
                    out.resumable = p.checkpoint_path.is_some();
                    return Ok(out);
                }
                SweepEnd::Found(_) => unreachable!("collect sweeps never stop early"),
                SweepEnd::Complete => {}
            }
            if !sw.found.is_empty() {
                self.clear_checkpoint()?;
                let phi = total - budget;
                return Ok(self.outcome(Status::Proved, Some(phi), sw.found.into_values().collect(), stats));
            }
            if !sw.gamma_fired {
                self.clear_checkpoint()?;
                return Ok(self.outcome(Status::Empty, Some(0), Vec::new(), stats));
            }
        }
        Err(SearchError::Invariant("budget sweep ran past C(n,2)".into()))
    }

    fn emptiness(&self) -> Result<SearchOutcome, SearchError> {
        let p = self.params;
        let budget = p.implied_budget();
        let engine = Engine::new(p.spec, budget, p.prunes, LeafPolicy::StopAtFirst);
        let mut gen = SearchStats::default();
        let frontier = self.frontier(&engine, &mut gen);
        let mut sw = match self.load_checkpoint()? {
            Some(cp) => {
                if cp.budget.map(|b| b as usize) != budget {
                    return Err(SearchError::Checkpoint("budget mismatch".into()));
                }
                self.resume_sweep(&cp, &engine, &frontier)?
            }
            None => SweepState { next: 0, found: BTreeMap::new(), stats: gen, gamma_fired: false },
        };
        sw.stats.sweeps = 1;
        match self.sweep(&engine, &frontier, &mut sw, true)? {
            SweepEnd::Found(d) => {
                self.clear_checkpoint()?;
                Ok(self.outcome(Status::WitnessFound, None, vec![d], sw.stats))
            }
            SweepEnd::Complete => {
                self.clear_checkpoint()?;
                Ok(self.outcome(Status::Empty, Some(0), Vec::new(), sw.stats))
            }
            SweepEnd::Interrupted => {
                let mut out = self.outcome(Status::Timeout, None, Vec::new(), sw.stats);
                out.resumable = p.checkpoint_path.is_some();
                Ok(out)
            }
        }
    }

    fn witness(&self) -> Result<SearchOutcome, SearchError> {
        let p = self.params;
        let budget = p.implied_budget().expect("validated");
        let engine = Engine::new(p.spec, Some(budget), p.prunes, LeafPolicy::StopAtFirst);
        let mut stats = SearchStats::default();
        let mut es = EngineStats::default();
        let roots = engine.roots(&mut es);
        stats.absorb(&es);
        let mut next: u64 = 0;
        loop {
            if self.timed_out() {
                let mut out = self.outcome(Status::Timeout, None, Vec::new(), stats);
                out.seed = Some(p.seed);
                return Ok(out);
            }
            let batch: Vec<u64> = (next..next + p.workers as u64).collect();
            let results: Vec<(u64, Flow, EngineStats, Option<Digraph>)> = self.pool.install(|| {
                batch.par_iter().map(|&r| self.restart(&engine, &roots, r)).collect()
            });
            let decisive = results
                .iter()
                .filter(|(_, flow, _, _)| *flow != Flow::Interrupted)
                .map(|(r, _, _, _)| *r)
                .min();
            let horizon = decisive.unwrap_or(u64::MAX);
            for (_, _, s, _) in results.iter().filter(|(r, _, _, _)| *r <= horizon) {
                stats.absorb(s);
                stats.restarts += 1;
            }
            if let Some(r) = decisive {
                let (_, flow, _, found) = results.into_iter().find(|(i, _, _, _)| *i == r).expect("present");
                let mut out = match (flow, found) {
                    (Flow::Stopped, Some(d)) => {
                        let cf = canonical_form(&d);
                        self.outcome(Status::WitnessFound, None, vec![cf.canonical_digraph(&d)], stats)
                    }
                    _ => self.outcome(Status::Empty, None, Vec::new(), stats),
                };
                out.seed = Some(p.seed);
                out.restart = Some(r);
                return Ok(out);
            }
            next += p.workers as u64;
        }
    }

    /// One randomized restart with a Luby-scaled node allowance.
    fn restart(&self, engine: &Engine, roots: &[State], r: u64) -> (u64, Flow, EngineStats, Option<Digraph>) {
        let seed = self.params.seed ^ r.wrapping_mul(0x9E37_79B9_7F4A_7C15);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..roots.len()).collect();
        order.shuffle(&mut rng);
        let mut ctx = Ctx::new(self.deadline, None);
        ctx.rng = Some(rng);
        ctx.node_limit = Some(self.params.restart_nodes.saturating_mul(luby(r + 1)));
        for i in order {
            match engine.run(&roots[i], &mut ctx) {
                Flow::Done => {}
                Flow::Stopped => {
                    let d = ctx.found.pop();
                    return (r, Flow::Stopped, ctx.stats, d);
                }
                Flow::Interrupted => return (r, Flow::Interrupted, ctx.stats, None),
            }
        }
        (r, Flow::Done, ctx.stats, None)
    }
}

/// The Luby sequence 1, 1, 2, 1, 1, 2, 4, 1, ... (1-based).
pub fn luby(i: u64) -> u64 {
    let mut i = i.max(1);
    loop {
        let mut k = 1u32;
        while (1u64 << k) - 1 < i {
            k += 1;
        }
        if i == (1u64 << k) - 1 {
            return 1u64 << (k - 1);
        }
        i -= (1u64 << (k - 1)) - 1;
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn emptiness_check(spec: ClassSpec, workers: usize) -> Result<bool, SearchError> {
    let out = solve(&SearchParams::emptiness(spec).with_workers(workers))?;
    Ok(out.status == Status::Empty)
}

fn instance_guard(n: usize, r: usize) -> Result<(), SearchError> {
    if r == 0 {
        return Err(SearchError::InvalidParams("r must be at least 1".into()));
    }
    if n > EXACT_MAX_ORDER {
        return Err(SearchError::Guardrail(format!("instances are limited to n ≤ {EXACT_MAX_ORDER}")));
    }
    if n == 0 {
        return Err(SearchError::InvalidParams("n must be at least 1".into()));
    }
    Ok(())
}

/// True iff no strong digraph on `n` vertices with girth above `⌈n/r⌉` has
/// minimum out-degree `r`.
pub fn check_ch_instance(n: usize, r: usize) -> Result<bool, SearchError> {
    check_ch_instance_with(n, r, default_workers())
}

pub fn check_ch_instance_with(n: usize, r: usize, workers: usize) -> Result<bool, SearchError> {
    instance_guard(n, r)?;
    if r >= n {
        return Ok(true);
    }
    let spec = ClassSpec::new(n, n.div_ceil(r), r, 1)?;
    emptiness_check(spec, workers)
}

/// As [`check_ch_instance`] with minimum in-degree `r` as well.
pub fn check_bcw_instance(n: usize, r: usize) -> Result<bool, SearchError> {
    check_bcw_instance_with(n, r, default_workers())
}

pub fn check_bcw_instance_with(n: usize, r: usize, workers: usize) -> Result<bool, SearchError> {
    instance_guard(n, r)?;
    if r >= n {
        return Ok(true);
    }
    let spec = ClassSpec::new(n, n.div_ceil(r), r, r)?;
    emptiness_check(spec, workers)
}

/// A vertex whose deletion keeps a strong digraph with `δ⁺ ≥ 2` strong.
pub fn find_strong_preserving_vertex(d: &Digraph) -> Result<usize, SearchError> {
    if !d.is_strong() {
        return Err(SearchError::Precondition("digraph is not strong".into()));
    }
    let prof = d.degree_profile();
    if prof.min_out < 2 {
        return Err(SearchError::Precondition(format!("δ⁺ = {}", prof.min_out)));
    }
    for v in 0..d.order() {
        let (rest, _) = d.remove_vertex(v)?;
        if rest.is_strong() {
            return Ok(v);
        }
    }
    Err(SearchError::Invariant("no vertex deletion preserves strong connectivity".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{circulant, f8};

    fn spec(n: usize, k: usize, xi: usize, zeta: usize) -> ClassSpec {
        ClassSpec::new(n, k, xi, zeta).unwrap()
    }

    #[test]
    fn luby_prefix() {
        let got: Vec<u64> = (1..=15).map(luby).collect();
        assert_eq!(got, [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }

    #[test]
    fn guardrails() {
        let p = SearchParams::exact(spec(13, 3, 1, 1));
        assert!(matches!(solve(&p), Err(SearchError::Guardrail(_))));
        let p = SearchParams::witness(spec(21, 3, 1, 1), 10);
        assert!(matches!(solve(&p), Err(SearchError::Guardrail(_))));
        let mut p = SearchParams::witness(spec(6, 3, 1, 1), 10);
        p.gamma_budget = Some(1);
        assert!(matches!(solve(&p), Err(SearchError::InvalidParams(_))));
        let p = SearchParams::new(spec(6, 3, 1, 1), Mode::Witness);
        assert!(matches!(solve(&p), Err(SearchError::InvalidParams(_))));
    }

    #[test]
    fn small_exact_values() {
        let out = solve(&SearchParams::exact(spec(4, 3, 1, 1))).unwrap();
        assert_eq!(out.status, Status::Proved);
        assert_eq!(out.phi, Some(4));
        assert_eq!(out.extremal.len(), 1);
        let out = solve(&SearchParams::exact(spec(5, 3, 1, 1))).unwrap();
        assert_eq!(out.phi, Some(7));
        let out = solve(&SearchParams::exact(spec(5, 3, 2, 1))).unwrap();
        assert_eq!(out.status, Status::Empty);
        assert_eq!(out.phi, Some(0));
    }

    #[test]
    fn seven_vertex_circulant_is_unique() {
        let out = solve(&SearchParams::exact(spec(7, 3, 2, 1)).with_workers(2)).unwrap();
        assert_eq!(out.phi, Some(14));
        assert_eq!(out.extremal.len(), 1);
        assert!(canon::are_isomorphic(&out.extremal[0], &circulant(7, &[1, 2]).unwrap()));
    }

    #[test]
    fn emptiness_and_witness() {
        let out = solve(&SearchParams::emptiness(spec(6, 3, 2, 1))).unwrap();
        assert_eq!(out.status, Status::Empty);
        let out = solve(&SearchParams::emptiness(spec(7, 3, 2, 1))).unwrap();
        assert_eq!(out.status, Status::WitnessFound);
        let out = solve(&SearchParams::witness(spec(7, 3, 2, 1), 14).with_seed(3)).unwrap();
        assert_eq!(out.status, Status::WitnessFound);
        assert_eq!(out.extremal[0].arc_count(), 14);
        let out = solve(&SearchParams::witness(spec(7, 3, 2, 1), 15)).unwrap();
        assert_eq!(out.status, Status::Empty);
    }

    #[test]
    fn instances() {
        assert!(check_ch_instance_with(6, 2, 1).unwrap());
        assert!(check_ch_instance_with(3, 1, 1).unwrap());
        assert!(check_bcw_instance_with(4, 1, 1).unwrap());
        assert!(check_ch_instance_with(5, 7, 1).unwrap());
        assert!(matches!(check_ch_instance(13, 2), Err(SearchError::Guardrail(_))));
    }

    #[test]
    fn strong_preserving_vertex() {
        for d in [circulant(7, &[1, 2]).unwrap(), f8()] {
            let v = find_strong_preserving_vertex(&d).unwrap();
            assert!(d.remove_vertex(v).unwrap().0.is_strong());
        }
        let c = crate::construct::directed_cycle(5).unwrap();
        assert!(matches!(find_strong_preserving_vertex(&c), Err(SearchError::Precondition(_))));
    }
}
