//! End-to-end benchmark pipeline: generate a case, solve it, compute its
//! statistics row, and render the CSV report.
//!
//! Reports are byte-reproducible: each repetition solves single-threaded
//! under a deterministic search-node budget, and the reported runtime is
//! virtual time (explored nodes at a nominal rate) rather than wall clock.
//! Worker threads only distribute whole repetitions, and rows are written in
//! repetition order, so the same flags and seed produce identical bytes for
//! any worker count.

use crate::error::{Error, Result};
use crate::solver::{solve_each, SolveStatus, SolverConfig};
use crate::stats::{aggregate, run_stats_tallied, Aggregate, PairTally, RunStats};
use crate::synth::{make_case, rng_for_rep, SimParams, RNG_ALGORITHM};
use std::fmt::Write;
use std::sync::atomic::{AtomicU64, Ordering::Relaxed};
use std::sync::Mutex;

/// Nominal search speed converting explored nodes to virtual seconds.
pub const VIRTUAL_NODES_PER_SECOND: f64 = 1_000_000.0;

/// Column header, fixed.
pub const CSV_HEADER: &str =
    "n_nodes,p_degree,p_overlap,s,rep,status,runtime_s,n_solutions,s75,a75,s90,a90,s100";

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub params: SimParams,
    /// Virtual-time limit per repetition, in seconds (0 disables it).
    pub timeout_s: f64,
    /// Threads distributing whole repetitions.
    pub workers: usize,
}

impl SweepConfig {
    pub fn new(params: SimParams) -> Self {
        SweepConfig {
            params,
            timeout_s: 300.0,
            workers: 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RepReport {
    pub rep: u64,
    pub status: SolveStatus,
    /// The ground truth was found in the solution set (checked whenever the
    /// run completed).
    pub ground_truth_member: bool,
    /// Present whenever the run produced at least one solution.
    pub stats: Option<RunStats>,
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub params: SimParams,
    pub reps: Vec<RepReport>,
    pub summary: Aggregate,
}

fn run_rep(cfg: &SweepConfig, rep: u64) -> Result<RepReport> {
    let params = &cfg.params;
    let case = make_case(params, &mut rng_for_rep(params.seed, rep))?;
    let solver_cfg = SolverConfig {
        max_solutions: 0,
        timeout: None,
        explore_budget: if cfg.timeout_s > 0.0 {
            Some((cfg.timeout_s * VIRTUAL_NODES_PER_SECOND) as u64)
        } else {
            None
        },
        workers: 1,
    };
    // Stream the enumeration into pair tallies; solution sets can run to
    // millions of graphs without being materialized.
    let mut tally = PairTally::new(params.n_nodes);
    let mut ground_truth_member = false;
    let ground_truth = &case.ground_truth;
    let summary = solve_each(&case.instance, &solver_cfg, |dag| {
        tally.add(dag);
        if dag == ground_truth {
            ground_truth_member = true;
        }
    })?;
    let runtime_s = summary.explored as f64 / VIRTUAL_NODES_PER_SECOND;
    let stats = if tally.total() == 0 {
        None
    } else {
        Some(run_stats_tallied(
            &tally,
            ground_truth,
            runtime_s,
            summary.status,
        )?)
    };
    Ok(RepReport {
        rep,
        status: summary.status,
        ground_truth_member,
        stats,
    })
}

/// Run every repetition and aggregate. Repetitions are independent RNG
/// streams, so distributing them over threads cannot change any result.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.params.validate()?;
    if cfg.workers == 0 {
        return Err(Error::Precondition("workers must be >= 1".into()));
    }
    let reps = cfg.params.reps;
    let mut reports: Vec<Option<RepReport>> = Vec::new();
    if cfg.workers == 1 || reps <= 1 {
        for rep in 0..reps {
            reports.push(Some(run_rep(cfg, rep)?));
        }
    } else {
        let slots: Mutex<Vec<Option<RepReport>>> =
            Mutex::new((0..reps).map(|_| None).collect());
        let next = AtomicU64::new(0);
        let failure: Mutex<Option<Error>> = Mutex::new(None);
        std::thread::scope(|scope| {
            for _ in 0..cfg.workers {
                scope.spawn(|| loop {
                    let rep = next.fetch_add(1, Relaxed);
                    if rep >= reps {
                        break;
                    }
                    match run_rep(cfg, rep) {
                        Ok(r) => slots.lock().unwrap()[rep as usize] = Some(r),
                        Err(e) => {
                            *failure.lock().unwrap() = Some(e);
                            break;
                        }
                    }
                });
            }
        });
        if let Some(e) = failure.into_inner().unwrap() {
            return Err(e);
        }
        reports = slots.into_inner().unwrap();
    }
    let reps: Vec<RepReport> = reports.into_iter().map(|r| r.unwrap()).collect();
    let rows: Vec<RunStats> = reps.iter().filter_map(|r| r.stats).collect();
    let summary = aggregate(&rows, cfg.params.reps as usize);
    Ok(SweepReport {
        params: cfg.params,
        reps,
        summary,
    })
}

fn status_cell(rep: &RepReport) -> String {
    if rep.status == SolveStatus::Complete && !rep.ground_truth_member {
        // Possible only for instances not generated by projection; recorded
        // rather than aborting the sweep.
        "error".to_string()
    } else {
        rep.status.to_string()
    }
}

fn opt_cell(v: Option<f64>, suppressed: bool) -> String {
    if suppressed {
        "*".to_string()
    } else {
        match v {
            Some(x) => format!("{x:.6}"),
            None => "*".to_string(),
        }
    }
}

/// Render the CSV: an RNG provenance comment, the fixed header, one row per
/// repetition, and one summary row.
pub fn render_csv(report: &SweepReport) -> String {
    let p = &report.params;
    let mut out = String::new();
    writeln!(out, "# rng={RNG_ALGORITHM} seed={}", p.seed).unwrap();
    writeln!(out, "{CSV_HEADER}").unwrap();
    let prefix = format!("{},{},{},{}", p.n_nodes, p.p_degree, p.p_overlap, p.s);
    for rep in &report.reps {
        match &rep.stats {
            Some(s) => writeln!(
                out,
                "{prefix},{},{},{:.6},{},{:.6},{:.6},{:.6},{:.6},{:.6}",
                rep.rep,
                status_cell(rep),
                s.runtime_s,
                s.n_solutions,
                s.s75,
                s.a75,
                s.s90,
                s.a90,
                s.s100
            )
            .unwrap(),
            None => writeln!(out, "{prefix},{},{},,0,,,,,", rep.rep, status_cell(rep)).unwrap(),
        }
    }
    let agg = &report.summary;
    writeln!(
        out,
        "{prefix},all,{},{},{},{},{},{},{},{}",
        if agg.suppressed { "suppressed" } else { "summary" },
        opt_cell(agg.median_runtime_s, agg.suppressed),
        opt_cell(agg.median_n_solutions, agg.suppressed),
        opt_cell(agg.mean_s75, agg.suppressed),
        opt_cell(agg.mean_a75, agg.suppressed),
        opt_cell(agg.mean_s90, agg.suppressed),
        opt_cell(agg.mean_a90, agg.suppressed),
        opt_cell(agg.mean_s100, agg.suppressed),
    )
    .unwrap();
    out
}
