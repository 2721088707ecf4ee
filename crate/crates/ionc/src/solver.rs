//! Enumeration engine: finds every DAG over the universe whose latent
//! projection onto each input's variable set equals that input.
//!
//! Search runs over a three-valued assignment {In, Out, Undecided} of the
//! ordered node pairs that are not forbidden outright, branching Out-first in
//! lexicographic pair order. Partial assignments are pruned with relations
//! that are monotone in the edge set (so no valid completion is ever lost):
//! a cycle among In edges, a forbidden causal connection already present
//! over In edges, a directed relation already present over In edges where
//! the input demands a bidirected (or reverse-directed) one, and any
//! required relation that is infeasible even over In ∪ Undecided edges.

use crate::error::{Error, Result};
use crate::graph::{bit, bits, closure_through, full_mask, reach_from, Dag, NodeId};
use crate::instance::Instance;
use crate::projection::latent_project;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering::Relaxed};
use std::sync::Mutex;
use std::time::{Duration, Instant};

#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Stop after this many solutions (0 = unlimited).
    pub max_solutions: usize,
    /// Wall-clock limit; exceeding it yields a partial, still-valid set.
    pub timeout: Option<Duration>,
    /// Deterministic limit on explored search nodes. Exact for a single
    /// worker, approximate across several. Exceeding it reports `TimedOut`.
    pub explore_budget: Option<u64>,
    /// Number of search threads (>= 1). Disjoint subtrees are distributed;
    /// the canonical result set is identical for any worker count whenever
    /// the search completes.
    pub workers: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_solutions: 1_000_000,
            timeout: Some(Duration::from_secs(300)),
            explore_budget: None,
            workers: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Complete,
    #[serde(rename = "capped")]
    CappedAtLimit,
    TimedOut,
    Unsatisfiable,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SolveStatus::Complete => "complete",
            SolveStatus::CappedAtLimit => "capped",
            SolveStatus::TimedOut => "timed_out",
            SolveStatus::Unsatisfiable => "unsatisfiable",
        };
        f.write_str(s)
    }
}

/// Canonically ordered, deduplicated solutions plus completion status.
#[derive(Clone, Debug)]
pub struct SolutionSet {
    /// Sorted by the row-major adjacency bitstring, no duplicates.
    pub solutions: Vec<Dag>,
    pub status: SolveStatus,
    pub elapsed: Duration,
    /// Search nodes visited.
    pub explored: u64,
}

impl SolutionSet {
    pub fn contains(&self, g: &Dag) -> bool {
        self.solutions.binary_search(g).is_ok()
    }
}

/// Outcome of a streaming solve, which does not retain the solutions.
#[derive(Clone, Debug)]
pub struct SolveSummary {
    pub n_solutions: u64,
    pub status: SolveStatus,
    pub elapsed: Duration,
    pub explored: u64,
}

/// True iff the latent projection of `h` onto every input's variable set
/// equals that input, label for label.
pub fn check_candidate(inst: &Instance, h: &Dag) -> Result<bool> {
    if h.n() != inst.n() {
        return Err(Error::Precondition(format!(
            "candidate has {} nodes, instance has {}",
            h.n(),
            inst.n()
        )));
    }
    for input in inst.inputs() {
        if latent_project(h, input.vars())? != *input {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairDomain {
    /// The ordered pair can never be an edge of a solution.
    Forbidden,
    Free,
}

/// Per ordered pair, whether a direct edge is ruled out by some input:
/// absent and bidirected labels forbid both orientations, a directed label
/// forbids the reverse orientation (a direct reverse edge plus the required
/// directed relation would close a cycle), and self-pairs are forbidden.
pub fn forced_pair_domains(inst: &Instance) -> BTreeMap<(NodeId, NodeId), PairDomain> {
    let n = inst.n();
    let mut map = BTreeMap::new();
    for x in 0..n {
        for y in 0..n {
            let d = if x == y {
                PairDomain::Forbidden
            } else {
                PairDomain::Free
            };
            map.insert((x, y), d);
        }
    }
    for input in inst.inputs() {
        for (x, y) in input.directed_edges() {
            map.insert((y, x), PairDomain::Forbidden);
        }
        for (x, y) in input.bidirected_pairs() {
            map.insert((x, y), PairDomain::Forbidden);
            map.insert((y, x), PairDomain::Forbidden);
        }
        for (x, y) in input.absent_pairs() {
            map.insert((x, y), PairDomain::Forbidden);
            map.insert((y, x), PairDomain::Forbidden);
        }
    }
    map
}

/// One input's constraints in solver form.
struct InputCons {
    /// Nodes not observed by this input.
    latent: u64,
    /// Pairs that must have a directed relation (from, to).
    directed: Vec<(usize, usize)>,
    /// Pairs (low, high) that must be confounded and not directed.
    bidirected: Vec<(usize, usize)>,
    /// Pairs (low, high) that must have no causal connection.
    absent: Vec<(usize, usize)>,
}

struct Shared {
    cap: usize,
    deadline: Option<Instant>,
    budget: Option<u64>,
    single: bool,
    found: AtomicUsize,
    explored: AtomicU64,
    stop: AtomicBool,
    capped: AtomicBool,
    timed: AtomicBool,
}

struct Worker<'a> {
    cons: &'a [InputCons],
    pairs: &'a [(usize, usize)],
    shared: &'a Shared,
    /// Adjacency of edges decided In.
    in_rows: Vec<u64>,
    /// Adjacency of In ∪ Undecided edges.
    pot_rows: Vec<u64>,
    closure: Vec<u64>,
    sols: Vec<Dag>,
    /// When set, solutions are streamed here instead of collected.
    stream: Option<&'a mut (dyn FnMut(&Dag) + Send)>,
    local_explored: u64,
    flushed: u64,
}

impl<'a> Worker<'a> {
    fn new(
        n: usize,
        cons: &'a [InputCons],
        pairs: &'a [(usize, usize)],
        shared: &'a Shared,
    ) -> Self {
        Worker {
            cons,
            pairs,
            shared,
            in_rows: vec![0; n],
            pot_rows: vec![0; n],
            closure: vec![0; n],
            sols: Vec::new(),
            stream: None,
            local_explored: 0,
            flushed: 0,
        }
    }

    /// Per-node bookkeeping; false means the search must stop here.
    fn enter(&mut self) -> bool {
        if self.shared.stop.load(Relaxed) {
            return false;
        }
        if self.shared.found.load(Relaxed) >= self.shared.cap {
            self.shared.capped.store(true, Relaxed);
            self.shared.stop.store(true, Relaxed);
            return false;
        }
        self.local_explored += 1;
        if let Some(b) = self.shared.budget {
            let total = if self.shared.single {
                self.local_explored
            } else {
                self.shared.explored.load(Relaxed)
            };
            if total > b {
                self.shared.timed.store(true, Relaxed);
                self.shared.stop.store(true, Relaxed);
                return false;
            }
        }
        if self.local_explored & 0xFFF == 0 {
            self.flush_explored();
            if let Some(d) = self.shared.deadline {
                if Instant::now() >= d {
                    self.shared.timed.store(true, Relaxed);
                    self.shared.stop.store(true, Relaxed);
                    return false;
                }
            }
        }
        true
    }

    fn flush_explored(&mut self) {
        let delta = self.local_explored - self.flushed;
        if delta > 0 {
            self.shared.explored.fetch_add(delta, Relaxed);
            self.flushed = self.local_explored;
        }
    }

    /// An unobserved common cause of `x` and `y` in the current closure.
    #[inline]
    fn has_witness(closure: &[u64], latent: u64, x: usize, y: usize) -> bool {
        let need = bit(x) | bit(y);
        bits(latent).any(|z| closure[z] & need == need)
    }

    /// Monotone consistency of the In edges: no directed relation where an
    /// input demands bidirected or reverse-directed, and no causal
    /// connection where an input demands absence.
    fn in_consistent(&mut self) -> bool {
        let cons = self.cons;
        for c in cons {
            if c.directed.is_empty() && c.bidirected.is_empty() && c.absent.is_empty() {
                continue;
            }
            closure_through(&self.in_rows, c.latent, &mut self.closure);
            for &(x, y) in &c.directed {
                // The required x -> y relation plus an existing y -> x
                // relation would close a cycle.
                if self.closure[y] & bit(x) != 0 {
                    return false;
                }
            }
            for &(x, y) in &c.bidirected {
                if self.closure[x] & bit(y) != 0 || self.closure[y] & bit(x) != 0 {
                    return false;
                }
            }
            for &(x, y) in &c.absent {
                if self.closure[x] & bit(y) != 0 || self.closure[y] & bit(x) != 0 {
                    return false;
                }
                if Self::has_witness(&self.closure, c.latent, x, y) {
                    return false;
                }
            }
        }
        true
    }

    /// Feasibility of required relations over In ∪ Undecided edges.
    fn pot_feasible(&mut self) -> bool {
        let cons = self.cons;
        for c in cons {
            if c.directed.is_empty() && c.bidirected.is_empty() {
                continue;
            }
            closure_through(&self.pot_rows, c.latent, &mut self.closure);
            for &(x, y) in &c.directed {
                if self.closure[x] & bit(y) == 0 {
                    return false;
                }
            }
            for &(x, y) in &c.bidirected {
                if !Self::has_witness(&self.closure, c.latent, x, y) {
                    return false;
                }
            }
        }
        true
    }

    /// Projection equality of the finished graph against every input,
    /// evaluated allocation-free over the constraint tables. The directed,
    /// bidirected, and absent lists partition an input's co-measured pairs,
    /// so checking each list against the latent closure is exactly
    /// label-for-label equality of the latent projection.
    fn leaf_valid(&mut self) -> bool {
        let cons = self.cons;
        for c in cons {
            closure_through(&self.in_rows, c.latent, &mut self.closure);
            for &(x, y) in &c.directed {
                if self.closure[x] & bit(y) == 0 || self.closure[y] & bit(x) != 0 {
                    return false;
                }
            }
            for &(x, y) in &c.bidirected {
                if self.closure[x] & bit(y) != 0 || self.closure[y] & bit(x) != 0 {
                    return false;
                }
                if !Self::has_witness(&self.closure, c.latent, x, y) {
                    return false;
                }
            }
            for &(x, y) in &c.absent {
                if self.closure[x] & bit(y) != 0 || self.closure[y] & bit(x) != 0 {
                    return false;
                }
                if Self::has_witness(&self.closure, c.latent, x, y) {
                    return false;
                }
            }
        }
        true
    }

    fn record_leaf(&mut self) {
        if self.leaf_valid() {
            let dag = Dag::from_rows_unchecked(self.in_rows.clone());
            let prev = self.shared.found.fetch_add(1, Relaxed);
            if prev >= self.shared.cap {
                self.shared.capped.store(true, Relaxed);
                self.shared.stop.store(true, Relaxed);
            } else {
                match &mut self.stream {
                    Some(sink) => sink(&dag),
                    None => self.sols.push(dag),
                }
            }
        }
    }

    fn dfs(&mut self, depth: usize) {
        if !self.enter() {
            return;
        }
        if depth == self.pairs.len() {
            self.record_leaf();
            return;
        }
        let (x, y) = self.pairs[depth];
        let b = bit(y);

        // Out branch first: sparse solutions surface early.
        self.pot_rows[x] &= !b;
        if self.pot_feasible() {
            self.dfs(depth + 1);
        }
        self.pot_rows[x] |= b;

        // In branch: the new edge must not close a cycle among In edges.
        if reach_from(&self.in_rows, y) & bit(x) == 0 {
            self.in_rows[x] |= b;
            if self.in_consistent() {
                self.dfs(depth + 1);
            }
            self.in_rows[x] &= !b;
        }
    }
}

struct Job {
    in_rows: Vec<u64>,
    pot_rows: Vec<u64>,
    depth: usize,
}

/// Breadth-first expansion of the search root into disjoint subtree jobs.
fn expand_jobs(w: &mut Worker, target: usize) -> Vec<Job> {
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(Job {
        in_rows: w.in_rows.clone(),
        pot_rows: w.pot_rows.clone(),
        depth: 0,
    });
    while queue.len() < target {
        let Some(job) = queue.pop_front() else { break };
        if !w.enter() {
            queue.push_front(job);
            break;
        }
        if job.depth == w.pairs.len() {
            w.in_rows.copy_from_slice(&job.in_rows);
            w.record_leaf();
            continue;
        }
        w.in_rows.copy_from_slice(&job.in_rows);
        w.pot_rows.copy_from_slice(&job.pot_rows);
        let (x, y) = w.pairs[job.depth];
        let b = bit(y);
        w.pot_rows[x] &= !b;
        if w.pot_feasible() {
            queue.push_back(Job {
                in_rows: job.in_rows.clone(),
                pot_rows: w.pot_rows.clone(),
                depth: job.depth + 1,
            });
        }
        w.pot_rows[x] |= b;
        if reach_from(&w.in_rows, y) & bit(x) == 0 {
            w.in_rows[x] |= b;
            if w.in_consistent() {
                queue.push_back(Job {
                    in_rows: w.in_rows.clone(),
                    pot_rows: job.pot_rows.clone(),
                    depth: job.depth + 1,
                });
            }
            w.in_rows[x] &= !b;
        }
    }
    queue.into()
}

fn build_constraints(inst: &Instance) -> (Vec<(usize, usize)>, Vec<InputCons>) {
    let full = full_mask(inst.n());
    let pairs: Vec<(usize, usize)> = forced_pair_domains(inst)
        .iter()
        .filter(|&(_, d)| *d == PairDomain::Free)
        .map(|(&p, _)| p)
        .collect();
    let cons: Vec<InputCons> = inst
        .inputs()
        .iter()
        .map(|input| InputCons {
            latent: !input.vars().mask() & full,
            directed: input.directed_edges().collect(),
            bidirected: input.bidirected_pairs().collect(),
            absent: input.absent_pairs(),
        })
        .collect();
    (pairs, cons)
}

fn make_shared(cfg: &SolverConfig, start: Instant) -> Shared {
    Shared {
        cap: if cfg.max_solutions == 0 {
            usize::MAX
        } else {
            cfg.max_solutions
        },
        deadline: cfg.timeout.map(|t| start + t),
        budget: cfg.explore_budget,
        single: cfg.workers == 1,
        found: AtomicUsize::new(0),
        explored: AtomicU64::new(0),
        stop: AtomicBool::new(false),
        capped: AtomicBool::new(false),
        timed: AtomicBool::new(false),
    }
}

fn finish_status(shared: &Shared, any_solutions: bool) -> SolveStatus {
    if shared.capped.load(Relaxed) {
        SolveStatus::CappedAtLimit
    } else if shared.timed.load(Relaxed) {
        SolveStatus::TimedOut
    } else if !any_solutions {
        SolveStatus::Unsatisfiable
    } else {
        SolveStatus::Complete
    }
}

/// Enumerate every acyclic DAG over the instance's universe that
/// [`check_candidate`] accepts, subject to cap and timeout semantics.
///
/// Whenever the returned status is `Complete` the canonical solution set is
/// identical across runs and worker counts.
pub fn solve(inst: &Instance, cfg: &SolverConfig) -> Result<SolutionSet> {
    if cfg.workers == 0 {
        return Err(Error::Precondition("workers must be >= 1".into()));
    }
    let start = Instant::now();
    let n = inst.n();
    let (pairs, cons) = build_constraints(inst);
    let shared = make_shared(cfg, start);

    let mut root = Worker::new(n, &cons, &pairs, &shared);
    for &(x, y) in &pairs {
        root.pot_rows[x] |= bit(y);
    }

    let mut solutions: Vec<Dag>;
    if !root.pot_feasible() {
        solutions = Vec::new();
    } else if cfg.workers == 1 {
        root.dfs(0);
        root.flush_explored();
        solutions = std::mem::take(&mut root.sols);
    } else {
        let jobs = expand_jobs(&mut root, cfg.workers * 8);
        root.flush_explored();
        solutions = std::mem::take(&mut root.sols);
        let sink = Mutex::new(Vec::<Dag>::new());
        let next = AtomicUsize::new(0);
        std::thread::scope(|scope| {
            for _ in 0..cfg.workers {
                scope.spawn(|| {
                    let mut w = Worker::new(n, &cons, &pairs, &shared);
                    loop {
                        let i = next.fetch_add(1, Relaxed);
                        if i >= jobs.len() {
                            break;
                        }
                        w.in_rows.copy_from_slice(&jobs[i].in_rows);
                        w.pot_rows.copy_from_slice(&jobs[i].pot_rows);
                        w.dfs(jobs[i].depth);
                    }
                    w.flush_explored();
                    sink.lock().unwrap().append(&mut w.sols);
                });
            }
        });
        solutions.append(&mut sink.into_inner().unwrap());
    }

    solutions.sort_unstable();
    solutions.dedup();

    let status = finish_status(&shared, !solutions.is_empty());
    Ok(SolutionSet {
        solutions,
        status,
        elapsed: start.elapsed(),
        explored: shared.explored.load(Relaxed),
    })
}

/// Single-threaded enumeration that hands each solution to `on_solution`
/// instead of retaining it, keeping memory flat however large the solution
/// set grows. Cap and timeout semantics match [`solve`]; solutions arrive in
/// search order, not canonical order.
pub fn solve_each<F>(inst: &Instance, cfg: &SolverConfig, mut on_solution: F) -> Result<SolveSummary>
where
    F: FnMut(&Dag) + Send,
{
    if cfg.workers != 1 {
        return Err(Error::Precondition(
            "streaming enumeration is single-threaded; set workers = 1".into(),
        ));
    }
    let start = Instant::now();
    let n = inst.n();
    let (pairs, cons) = build_constraints(inst);
    let shared = make_shared(cfg, start);

    let mut root = Worker::new(n, &cons, &pairs, &shared);
    for &(x, y) in &pairs {
        root.pot_rows[x] |= bit(y);
    }
    root.stream = Some(&mut on_solution);
    if root.pot_feasible() {
        root.dfs(0);
        root.flush_explored();
    }

    // The counter can overshoot the cap by the attempts that tripped it;
    // only the first `cap` solutions were delivered.
    let n_solutions = shared.found.load(Relaxed).min(shared.cap) as u64;
    Ok(SolveSummary {
        n_solutions,
        status: finish_status(&shared, n_solutions > 0),
        elapsed: start.elapsed(),
        explored: shared.explored.load(Relaxed),
    })
}
