//! `ionc` command line: solve instance files, run seeded benchmark sweeps,
//! emit ASP programs, run the brute-force oracle, and report solution-set
//! statistics.
//!
//! Exit codes: 0 success / complete; 1 input or usage error; 2 the instance
//! is unsatisfiable; 3 the solve was capped or timed out (partial results
//! were written); 4 the universe exceeds the oracle's node limit.

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use ionc::asp::{emit_program, EmitMode};
use ionc::files::{InstanceFile, SolutionsFile};
use ionc::oracle::{brute_force_solve, OracleLimit};
use ionc::stats::{edge_frequencies, prop_accurate, prop_same};
use ionc::sweep::{render_csv, run_sweep, SweepConfig};
use ionc::synth::SimParams;
use ionc::{solve, Instance, SolveStatus, SolverConfig};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

const EXIT_INPUT_ERROR: u8 = 1;
const EXIT_UNSATISFIABLE: u8 = 2;
const EXIT_INCOMPLETE: u8 = 3;
const EXIT_ORACLE_LIMIT: u8 = 4;

#[derive(Parser)]
#[command(name = "ionc", version, about = "Enumerate global DAGs consistent with overlapping causal input graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate all DAGs consistent with an instance file.
    Solve {
        /// Instance document (JSON).
        instance: PathBuf,
        /// Stop after this many solutions (0 = unlimited).
        #[arg(long, default_value_t = 1_000_000)]
        cap: usize,
        /// Wall-clock timeout in seconds (0 = none).
        #[arg(long, default_value_t = 300.0)]
        timeout: f64,
        /// Search threads.
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Output path for the solutions document (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a seeded synthetic benchmark sweep and write a CSV report.
    Simulate {
        /// Ground-truth node count.
        #[arg(long)]
        nodes: usize,
        /// Ground-truth density parameter in [0, 1].
        #[arg(long)]
        degree: f64,
        /// Subset overlap parameter in [0, 1].
        #[arg(long)]
        overlap: f64,
        /// Number of overlapping subsets.
        #[arg(long)]
        subgraphs: usize,
        /// Repetitions.
        #[arg(long, default_value_t = 100)]
        reps: u64,
        /// Master RNG seed.
        #[arg(long)]
        seed: u64,
        /// Per-repetition budget in deterministic virtual seconds (0 = none).
        #[arg(long, default_value_t = 300.0)]
        timeout: f64,
        /// Threads distributing repetitions (does not affect output bytes).
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the instance as an ASP program.
    EmitAsp {
        /// Instance document (JSON).
        instance: PathBuf,
        /// Emit the published rule block only, without the bidirected
        /// enforcement constraints.
        #[arg(long)]
        strict_listing: bool,
    },
    /// Brute-force enumeration for small universes.
    Oracle {
        /// Instance document (JSON).
        instance: PathBuf,
        /// Node limit for exhaustive enumeration.
        #[arg(long, default_value_t = 6)]
        max_nodes: usize,
        /// Output path for the solutions document (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Edge frequencies and agreement statistics of a solutions document.
    Report {
        /// Solutions document (JSON).
        solutions: PathBuf,
        /// Single-graph solutions document holding the ground truth.
        #[arg(long)]
        ground_truth: Option<PathBuf>,
    },
}

fn read_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let inst = InstanceFile::parse(&text)
        .and_then(|doc| doc.to_instance())
        .with_context(|| format!("parsing {}", path.display()))?;
    if !inst.overlap_connected() {
        eprintln!(
            "warning: the inputs' overlap structure is disconnected; \
             relations across the gap are unconstrained"
        );
    }
    Ok(inst)
}

fn write_solutions(inst: &Instance, set: &ionc::SolutionSet, out: Option<&Path>) -> Result<()> {
    let doc = SolutionsFile::from_solution_set(inst.universe(), set);
    match out {
        Some(path) => std::fs::write(path, doc.to_json())
            .with_context(|| format!("writing {}", path.display()))?,
        None => println!("{}", doc.to_json()),
    }
    Ok(())
}

fn status_exit(status: SolveStatus) -> ExitCode {
    match status {
        SolveStatus::Complete => ExitCode::SUCCESS,
        SolveStatus::Unsatisfiable => ExitCode::from(EXIT_UNSATISFIABLE),
        SolveStatus::CappedAtLimit | SolveStatus::TimedOut => ExitCode::from(EXIT_INCOMPLETE),
    }
}

fn cmd_solve(
    instance: &Path,
    cap: usize,
    timeout: f64,
    workers: usize,
    out: Option<&Path>,
) -> Result<ExitCode> {
    let inst = read_instance(instance)?;
    let cfg = SolverConfig {
        max_solutions: cap,
        timeout: if timeout > 0.0 {
            Some(Duration::from_secs_f64(timeout))
        } else {
            None
        },
        explore_budget: None,
        workers,
    };
    let set = solve(&inst, &cfg)?;
    write_solutions(&inst, &set, out)?;
    eprintln!(
        "{} solutions, status {}, {:.3}s",
        set.solutions.len(),
        set.status,
        set.elapsed.as_secs_f64()
    );
    Ok(status_exit(set.status))
}

fn cmd_simulate(cfg: &SweepConfig, out: &Path) -> Result<ExitCode> {
    let report = run_sweep(cfg)?;
    std::fs::write(out, render_csv(&report))
        .with_context(|| format!("writing {}", out.display()))?;
    let agg = &report.summary;
    eprintln!(
        "{} of {} reps complete{}",
        agg.n_completed,
        agg.n_reps,
        if agg.suppressed { " (suppressed)" } else { "" }
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_oracle(instance: &Path, max_nodes: usize, out: Option<&Path>) -> Result<ExitCode> {
    let inst = read_instance(instance)?;
    let limit = OracleLimit { max_nodes };
    match brute_force_solve(&inst, &limit) {
        Ok(set) => {
            write_solutions(&inst, &set, out)?;
            Ok(status_exit(set.status))
        }
        Err(e @ ionc::Error::TooManyNodes { .. }) => {
            eprintln!("error: {e}");
            Ok(ExitCode::from(EXIT_ORACLE_LIMIT))
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_report(solutions: &Path, ground_truth: Option<&Path>) -> Result<ExitCode> {
    let text = std::fs::read_to_string(solutions)
        .with_context(|| format!("reading {}", solutions.display()))?;
    let doc = SolutionsFile::parse(&text)?;
    let (universe, set) = doc.to_solution_set()?;

    println!(
        "{} solutions over {} variables, status {}",
        set.solutions.len(),
        universe.len(),
        set.status
    );
    println!("edge frequencies:");
    for ((x, y), f) in edge_frequencies(&set.solutions)? {
        println!("  {} -> {}  {f:.4}", universe.name(x), universe.name(y));
    }

    if let Some(path) = ground_truth {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        let (gt_universe, gt) = SolutionsFile::parse(&text)?.to_single_dag()?;
        if gt_universe != universe {
            anyhow::bail!("ground truth is over a different variable universe");
        }
        println!("agreement and accuracy:");
        for (name, t) in [("75", 0.75), ("90", 0.90), ("100", 1.00)] {
            let s = prop_same(&set.solutions, t)?;
            let a = prop_accurate(&set.solutions, &gt, t)?;
            println!("  s{name}={s:.6} a{name}={a:.6}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Solve {
            instance,
            cap,
            timeout,
            workers,
            out,
        } => cmd_solve(&instance, cap, timeout, workers, out.as_deref()),
        Command::Simulate {
            nodes,
            degree,
            overlap,
            subgraphs,
            reps,
            seed,
            timeout,
            workers,
            out,
        } => {
            let params = SimParams {
                n_nodes: nodes,
                p_degree: degree,
                p_overlap: overlap,
                s: subgraphs,
                seed,
                reps,
            };
            let cfg = SweepConfig {
                params,
                timeout_s: timeout,
                workers,
            };
            cmd_simulate(&cfg, &out)
        }
        Command::EmitAsp {
            instance,
            strict_listing,
        } => {
            let inst = read_instance(&instance)?;
            let mode = if strict_listing {
                EmitMode::StrictListing
            } else {
                EmitMode::Augmented
            };
            print!("{}", emit_program(&inst, mode));
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle {
            instance,
            max_nodes,
            out,
        } => cmd_oracle(&instance, max_nodes, out.as_deref()),
        Command::Report {
            solutions,
            ground_truth,
        } => cmd_report(&solutions, ground_truth.as_deref()),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT_ERROR)
        }
    }
}
