//! Solution-set analytics: agreement and accuracy proportions over variable
//! pairs, edge-frequency tables, and benchmark aggregation.
//!
//! Pair status is adjacency-based: a pair counts as adjacent in a solution
//! when it has an edge in either orientation, so orientation disagreements
//! do not split the tally.

use crate::error::{Error, Result};
use crate::graph::{Dag, NodeId};
use crate::solver::SolveStatus;

/// Status of one unordered pair in one solution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairStatus {
    Adjacent,
    Absent,
}

/// Per-run statistics row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunStats {
    pub s75: f64,
    pub s90: f64,
    pub s100: f64,
    pub a75: f64,
    pub a90: f64,
    pub n_solutions: usize,
    pub runtime_s: f64,
    pub status: SolveStatus,
}

/// Comparison guard: counts are integers, thresholds like 0.9 are not
/// exactly representable, so `count >= threshold * total` is tested with a
/// tolerance far below one count.
const COUNT_EPS: f64 = 1e-9;

fn check_nonempty(solutions: &[Dag], op: &'static str) -> Result<usize> {
    match solutions.first() {
        None => Err(Error::EmptySolutionSet(op)),
        Some(first) => {
            let n = first.n();
            if solutions.iter().any(|g| g.n() != n) {
                return Err(Error::Precondition(
                    "solutions span different universes".into(),
                ));
            }
            Ok(n)
        }
    }
}

/// Per-pair adjacency tally accumulated one solution at a time, so
/// statistics never require the solution set to be held in memory.
#[derive(Clone, Debug)]
pub struct PairTally {
    n: usize,
    total: usize,
    /// Adjacency counts per unordered pair (low, high), row-major.
    adjacent: Vec<usize>,
}

impl PairTally {
    pub fn new(n: usize) -> Self {
        PairTally {
            n,
            total: 0,
            adjacent: vec![0; n * n.saturating_sub(1) / 2],
        }
    }

    pub fn add(&mut self, g: &Dag) {
        debug_assert_eq!(g.n(), self.n);
        self.total += 1;
        let mut k = 0;
        for x in 0..self.n {
            for y in (x + 1)..self.n {
                if g.has_edge(x, y) || g.has_edge(y, x) {
                    self.adjacent[k] += 1;
                }
                k += 1;
            }
        }
    }

    pub fn from_solutions(solutions: &[Dag]) -> Result<Self> {
        let n = check_nonempty(solutions, "pair tally")?;
        let mut tally = PairTally::new(n);
        for g in solutions {
            tally.add(g);
        }
        Ok(tally)
    }

    pub fn total(&self) -> usize {
        self.total
    }

    fn pairs(&self) -> impl Iterator<Item = ((NodeId, NodeId), usize)> + '_ {
        let n = self.n;
        (0..n)
            .flat_map(move |x| ((x + 1)..n).map(move |y| (x, y)))
            .zip(self.adjacent.iter().copied())
    }
}

fn modal_meets_threshold(adjacent: usize, total: usize, threshold: f64) -> Option<PairStatus> {
    let absent = total - adjacent;
    let (modal_count, modal) = if adjacent >= absent {
        (adjacent, PairStatus::Adjacent)
    } else {
        (absent, PairStatus::Absent)
    };
    if modal_count as f64 + COUNT_EPS >= threshold * total as f64 {
        Some(modal)
    } else {
        None
    }
}

fn check_threshold(threshold: f64) -> Result<()> {
    if 0.0 < threshold && threshold <= 1.0 {
        Ok(())
    } else {
        Err(Error::Precondition("threshold must lie in (0, 1]".into()))
    }
}

/// [`prop_same`] over a prebuilt tally.
pub fn prop_same_tallied(tally: &PairTally, threshold: f64) -> Result<f64> {
    check_threshold(threshold)?;
    if tally.total == 0 {
        return Err(Error::EmptySolutionSet("prop_same"));
    }
    if tally.adjacent.is_empty() {
        return Ok(1.0);
    }
    let qualified = tally
        .pairs()
        .filter(|&(_, c)| modal_meets_threshold(c, tally.total, threshold).is_some())
        .count();
    Ok(qualified as f64 / tally.adjacent.len() as f64)
}

/// [`prop_accurate`] over a prebuilt tally.
pub fn prop_accurate_tallied(
    tally: &PairTally,
    ground_truth: &Dag,
    threshold: f64,
) -> Result<f64> {
    check_threshold(threshold)?;
    if tally.total == 0 {
        return Err(Error::EmptySolutionSet("prop_accurate"));
    }
    if ground_truth.n() != tally.n {
        return Err(Error::Precondition(
            "ground truth is over a different universe".into(),
        ));
    }
    let mut qualified = 0usize;
    let mut accurate = 0usize;
    for ((x, y), c) in tally.pairs() {
        if let Some(modal) = modal_meets_threshold(c, tally.total, threshold) {
            qualified += 1;
            let truth = if ground_truth.has_edge(x, y) || ground_truth.has_edge(y, x) {
                PairStatus::Adjacent
            } else {
                PairStatus::Absent
            };
            if modal == truth {
                accurate += 1;
            }
        }
    }
    if qualified == 0 {
        Ok(1.0)
    } else {
        Ok(accurate as f64 / qualified as f64)
    }
}

/// Fraction of all unordered variable pairs whose modal status (adjacent or
/// absent) occurs in at least `threshold` of the solutions.
pub fn prop_same(solutions: &[Dag], threshold: f64) -> Result<f64> {
    prop_same_tallied(&PairTally::from_solutions(solutions)?, threshold)
}

/// Among the pairs counted by [`prop_same`] at this threshold, the fraction
/// whose modal status matches the ground truth's adjacency status. A run
/// with no qualifying pair is vacuously accurate (1.0).
pub fn prop_accurate(solutions: &[Dag], ground_truth: &Dag, threshold: f64) -> Result<f64> {
    prop_accurate_tallied(
        &PairTally::from_solutions(solutions)?,
        ground_truth,
        threshold,
    )
}

/// For every ordered pair, the fraction of solutions containing that edge.
pub fn edge_frequencies(solutions: &[Dag]) -> Result<Vec<((NodeId, NodeId), f64)>> {
    let n = check_nonempty(solutions, "edge_frequencies")?;
    let total = solutions.len() as f64;
    let mut out = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if x == y {
                continue;
            }
            let c = solutions.iter().filter(|g| g.has_edge(x, y)).count();
            out.push(((x, y), c as f64 / total));
        }
    }
    Ok(out)
}

/// Compute the full statistics row for one run from a tally.
pub fn run_stats_tallied(
    tally: &PairTally,
    ground_truth: &Dag,
    runtime_s: f64,
    status: SolveStatus,
) -> Result<RunStats> {
    Ok(RunStats {
        s75: prop_same_tallied(tally, 0.75)?,
        s90: prop_same_tallied(tally, 0.90)?,
        s100: prop_same_tallied(tally, 1.00)?,
        a75: prop_accurate_tallied(tally, ground_truth, 0.75)?,
        a90: prop_accurate_tallied(tally, ground_truth, 0.90)?,
        n_solutions: tally.total(),
        runtime_s,
        status,
    })
}

/// Compute the full statistics row for one run.
pub fn run_stats(
    solutions: &[Dag],
    ground_truth: &Dag,
    runtime_s: f64,
    status: SolveStatus,
) -> Result<RunStats> {
    run_stats_tallied(
        &PairTally::from_solutions(solutions)?,
        ground_truth,
        runtime_s,
        status,
    )
}

/// Per-parameterization summary: medians of runtime and solution count,
/// means of the agreement/accuracy proportions, all over completed runs
/// only. A parameterization with fewer than 95% completed repetitions is
/// suppressed.
#[derive(Clone, Debug, PartialEq)]
pub struct Aggregate {
    pub n_reps: usize,
    pub n_completed: usize,
    pub suppressed: bool,
    pub median_runtime_s: Option<f64>,
    pub median_n_solutions: Option<f64>,
    pub mean_s75: Option<f64>,
    pub mean_a75: Option<f64>,
    pub mean_s90: Option<f64>,
    pub mean_a90: Option<f64>,
    pub mean_s100: Option<f64>,
}

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    })
}

fn mean<F: Fn(&RunStats) -> f64>(rows: &[&RunStats], f: F) -> Option<f64> {
    if rows.is_empty() {
        None
    } else {
        Some(rows.iter().map(|r| f(r)).sum::<f64>() / rows.len() as f64)
    }
}

/// `rows` holds every repetition that produced statistics; `n_reps` is the
/// number of repetitions attempted.
pub fn aggregate(rows: &[RunStats], n_reps: usize) -> Aggregate {
    let completed: Vec<&RunStats> = rows
        .iter()
        .filter(|r| r.status == SolveStatus::Complete)
        .collect();
    // The 95% completion rule, in exact integer arithmetic.
    let suppressed = completed.len() * 100 < 95 * n_reps;
    let mut runtimes: Vec<f64> = completed.iter().map(|r| r.runtime_s).collect();
    let mut counts: Vec<f64> = completed.iter().map(|r| r.n_solutions as f64).collect();
    Aggregate {
        n_reps,
        n_completed: completed.len(),
        suppressed,
        median_runtime_s: median(&mut runtimes),
        median_n_solutions: median(&mut counts),
        mean_s75: mean(&completed, |r| r.s75),
        mean_a75: mean(&completed, |r| r.a75),
        mean_s90: mean(&completed, |r| r.s90),
        mean_a90: mean(&completed, |r| r.a90),
        mean_s100: mean(&completed, |r| r.s100),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Dag;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn dag(n: usize, edges: &[(usize, usize)]) -> Dag {
        Dag::new(n, edges).unwrap()
    }

    /// Independent recount used as the test oracle: literal translation of
    /// the definitions over explicit pair-status tables.
    fn recount_same(solutions: &[Dag], threshold: f64) -> f64 {
        let n = solutions[0].n();
        let total = solutions.len();
        let mut qualified = 0usize;
        let mut pairs = 0usize;
        for x in 0..n {
            for y in (x + 1)..n {
                pairs += 1;
                let adj = solutions
                    .iter()
                    .filter(|g| g.has_edge(x, y) || g.has_edge(y, x))
                    .count();
                let modal = adj.max(total - adj);
                // Integer-exact threshold comparison for 3/4, 9/10, 1/1.
                let (num, den) = if (threshold - 0.75).abs() < 1e-12 {
                    (3, 4)
                } else if (threshold - 0.9).abs() < 1e-12 {
                    (9, 10)
                } else {
                    (1, 1)
                };
                if modal * den >= num * total {
                    qualified += 1;
                }
            }
        }
        qualified as f64 / pairs as f64
    }

    fn recount_accurate(solutions: &[Dag], gt: &Dag, threshold: f64) -> f64 {
        let n = solutions[0].n();
        let total = solutions.len();
        let mut qualified = 0usize;
        let mut hit = 0usize;
        for x in 0..n {
            for y in (x + 1)..n {
                let adj = solutions
                    .iter()
                    .filter(|g| g.has_edge(x, y) || g.has_edge(y, x))
                    .count();
                let (modal, modal_adj) = if adj >= total - adj {
                    (adj, true)
                } else {
                    (total - adj, false)
                };
                let (num, den) = if (threshold - 0.75).abs() < 1e-12 {
                    (3, 4)
                } else if (threshold - 0.9).abs() < 1e-12 {
                    (9, 10)
                } else {
                    (1, 1)
                };
                if modal * den >= num * total {
                    qualified += 1;
                    let truth_adj = gt.has_edge(x, y) || gt.has_edge(y, x);
                    if modal_adj == truth_adj {
                        hit += 1;
                    }
                }
            }
        }
        if qualified == 0 {
            1.0
        } else {
            hit as f64 / qualified as f64
        }
    }

    fn random_solution_family(rng: &mut ChaCha8Rng) -> (Dag, Vec<Dag>) {
        let n = rng.random_range(3..7);
        let make = |rng: &mut ChaCha8Rng| {
            let mut edges = Vec::new();
            for x in 0..n {
                for y in (x + 1)..n {
                    if rng.random_bool(0.4) {
                        edges.push((x, y));
                    }
                }
            }
            dag(n, &edges)
        };
        let gt = make(rng);
        let count = rng.random_range(1..40);
        let sols: Vec<Dag> = (0..count).map(|_| make(rng)).collect();
        (gt, sols)
    }

    #[test]
    fn single_solution_agrees_with_itself() {
        let g = dag(4, &[(0, 1), (2, 3)]);
        for t in [0.75, 0.9, 1.0] {
            assert_eq!(prop_same(&[g.clone()], t).unwrap(), 1.0);
        }
        assert_eq!(prop_accurate(&[g.clone()], &g, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn one_differing_pair_lowers_prop_same() {
        // Two solutions differing only in the adjacency of {0,1}.
        let a = dag(4, &[(0, 1), (1, 2), (2, 3)]);
        let b = dag(4, &[(1, 2), (2, 3)]);
        let total_pairs = 6.0;
        let got = prop_same(&[a, b], 0.75).unwrap();
        assert!((got - (total_pairs - 1.0) / total_pairs).abs() < 1e-12);
    }

    #[test]
    fn empty_solution_sets_are_errors() {
        assert!(prop_same(&[], 0.75).is_err());
        assert!(edge_frequencies(&[]).is_err());
    }

    #[test]
    fn worked_example_frequencies() {
        // The two chain solutions over X,Y,Z,W: the Y-W connection flips
        // orientation between them, and every edge sits in exactly one of
        // the two graphs.
        let sols = vec![
            dag(4, &[(0, 1), (1, 3), (3, 2)]),
            dag(4, &[(0, 3), (3, 1), (1, 2)]),
        ];
        let freq: std::collections::HashMap<_, _> =
            edge_frequencies(&sols).unwrap().into_iter().collect();
        assert_eq!(freq[&(1, 3)], 0.5);
        assert_eq!(freq[&(3, 1)], 0.5);
        assert_eq!(freq[&(0, 1)], 0.5);
        assert_eq!(freq[&(2, 0)], 0.0);
    }

    #[test]
    fn frequencies_of_both_orientations_sum_to_adjacency() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for _ in 0..50 {
            let (_, sols) = random_solution_family(&mut rng);
            let n = sols[0].n();
            let freq: std::collections::HashMap<_, _> =
                edge_frequencies(&sols).unwrap().into_iter().collect();
            for x in 0..n {
                for y in (x + 1)..n {
                    let adjacency = sols
                        .iter()
                        .filter(|g| g.has_edge(x, y) || g.has_edge(y, x))
                        .count() as f64
                        / sols.len() as f64;
                    assert!((freq[&(x, y)] + freq[&(y, x)] - adjacency).abs() < 1e-12);
                    assert!(freq[&(x, y)] + freq[&(y, x)] <= 1.0 + 1e-12);
                }
            }
        }
    }

    #[test]
    fn props_match_independent_recount() {
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        for _ in 0..200 {
            let (gt, sols) = random_solution_family(&mut rng);
            for t in [0.75, 0.9, 1.0] {
                let same = prop_same(&sols, t).unwrap();
                assert!((same - recount_same(&sols, t)).abs() < 1e-12);
                let acc = prop_accurate(&sols, &gt, t).unwrap();
                assert!((acc - recount_accurate(&sols, &gt, t)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn threshold_ordering_always_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(79);
        for _ in 0..200 {
            let (_, sols) = random_solution_family(&mut rng);
            let s75 = prop_same(&sols, 0.75).unwrap();
            let s90 = prop_same(&sols, 0.90).unwrap();
            let s100 = prop_same(&sols, 1.0).unwrap();
            assert!(s100 <= s90 + 1e-12 && s90 <= s75 + 1e-12);
        }
    }

    #[test]
    fn props_invariant_under_reordering_and_relabeling() {
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        for _ in 0..50 {
            let (gt, mut sols) = random_solution_family(&mut rng);
            let n = gt.n();
            let before = prop_same(&sols, 0.9).unwrap();
            let before_acc = prop_accurate(&sols, &gt, 0.9).unwrap();
            sols.shuffle(&mut rng);
            assert_eq!(prop_same(&sols, 0.9).unwrap(), before);

            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            let mapped: Vec<Dag> = sols.iter().map(|g| g.relabeled(&perm).unwrap()).collect();
            let mapped_gt = gt.relabeled(&perm).unwrap();
            assert!((prop_same(&mapped, 0.9).unwrap() - before).abs() < 1e-12);
            assert!(
                (prop_accurate(&mapped, &mapped_gt, 0.9).unwrap() - before_acc).abs() < 1e-12
            );
        }
    }

    #[test]
    fn aggregation_applies_the_completion_rule() {
        let row = |status: SolveStatus, n_solutions: usize, runtime_s: f64| RunStats {
            s75: 0.5,
            s90: 0.4,
            s100: 0.3,
            a75: 0.9,
            a90: 0.95,
            n_solutions,
            runtime_s,
            status,
        };
        // 94 of 100 completed: suppressed. 95 of 100: reported.
        let mut rows: Vec<RunStats> = (0..94).map(|i| row(SolveStatus::Complete, i, 1.0)).collect();
        rows.extend((0..6).map(|_| row(SolveStatus::TimedOut, 0, 300.0)));
        assert!(aggregate(&rows, 100).suppressed);

        let mut rows: Vec<RunStats> =
            (0..95).map(|i| row(SolveStatus::Complete, i, 1.0)).collect();
        rows.extend((0..5).map(|_| row(SolveStatus::TimedOut, 0, 300.0)));
        let agg = aggregate(&rows, 100);
        assert!(!agg.suppressed);
        assert_eq!(agg.median_n_solutions, Some(47.0));
        assert!((agg.mean_s90.unwrap() - 0.4).abs() < 1e-12);

        // Medians, not means, summarize heavy-tailed counts.
        let rows = vec![
            row(SolveStatus::Complete, 1, 1.0),
            row(SolveStatus::Complete, 5, 1.0),
            row(SolveStatus::Complete, 25648, 1.0),
        ];
        assert_eq!(aggregate(&rows, 3).median_n_solutions, Some(5.0));

        // Nothing completed: suppressed with empty summaries.
        let rows = vec![row(SolveStatus::TimedOut, 0, 300.0); 3];
        let agg = aggregate(&rows, 3);
        assert!(agg.suppressed);
        assert_eq!(agg.median_runtime_s, None);
    }
}
