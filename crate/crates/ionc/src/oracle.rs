//! Brute-force reference for small universes: enumerate every labeled DAG
//! and filter by [`check_candidate`]. Ground truth for completeness testing;
//! never a performance path.

use crate::error::{Error, Result};
use crate::graph::{bit, rows_acyclic, Dag, NodeId};
use crate::instance::Instance;
use crate::solver::{check_candidate, SolutionSet, SolveStatus};
use std::time::Instant;

#[derive(Clone, Copy, Debug)]
pub struct OracleLimit {
    pub max_nodes: usize,
}

impl Default for OracleLimit {
    /// Six nodes keeps the worst case at 2^30 candidate bitmasks with cheap
    /// acyclicity rejection.
    fn default() -> Self {
        OracleLimit { max_nodes: 6 }
    }
}

/// Lazily yields every labeled DAG on `n` nodes exactly once, in ascending
/// order of the candidate bitmask (bit k is the k-th ordered pair sorted by
/// (from, to)).
pub struct DagStream {
    n: usize,
    pairs: Vec<(NodeId, NodeId)>,
    next_mask: u64,
    end: u64,
}

/// All ordered pairs (x, y), x != y, sorted lexicographically.
fn ordered_pairs(n: usize) -> Vec<(NodeId, NodeId)> {
    let mut pairs = Vec::with_capacity(n * n.saturating_sub(1));
    for x in 0..n {
        for y in 0..n {
            if x != y {
                pairs.push((x, y));
            }
        }
    }
    pairs
}

pub fn enumerate_all_dags(n: usize, limit: &OracleLimit) -> Result<DagStream> {
    if n > limit.max_nodes {
        return Err(Error::TooManyNodes {
            what: "oracle enumeration",
            n,
            limit: limit.max_nodes,
        });
    }
    let pairs = ordered_pairs(n);
    Ok(DagStream {
        n,
        end: 1u64 << pairs.len(),
        pairs,
        next_mask: 0,
    })
}

impl Iterator for DagStream {
    type Item = Dag;

    fn next(&mut self) -> Option<Dag> {
        while self.next_mask < self.end {
            let mask = self.next_mask;
            self.next_mask += 1;
            let mut rows = vec![0u64; self.n];
            for (k, &(x, y)) in self.pairs.iter().enumerate() {
                if mask & (1 << k) != 0 {
                    rows[x] |= bit(y);
                }
            }
            if rows_acyclic(&rows, self.n) {
                return Some(Dag::from_rows_unchecked(rows));
            }
        }
        None
    }
}

/// Canonical set of all DAGs accepted by [`check_candidate`], by exhaustive
/// enumeration.
pub fn brute_force_solve(inst: &Instance, limit: &OracleLimit) -> Result<SolutionSet> {
    let start = Instant::now();
    let n = inst.n();
    let mut solutions = Vec::new();
    let mut examined = 0u64;
    for candidate in enumerate_all_dags(n, limit)? {
        examined += 1;
        if check_candidate(inst, &candidate)? {
            solutions.push(candidate);
        }
    }
    solutions.sort_unstable();
    let status = if solutions.is_empty() {
        SolveStatus::Unsatisfiable
    } else {
        SolveStatus::Complete
    };
    Ok(SolutionSet {
        solutions,
        status,
        elapsed: start.elapsed(),
        explored: examined,
    })
}
