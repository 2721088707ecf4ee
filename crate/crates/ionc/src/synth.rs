//! Seeded random generation of ground-truth DAGs and overlapping variable
//! subsets, producing benchmark instances via latent projection.
//!
//! Reproducibility: all randomness comes from ChaCha8 streams. Repetition
//! `r` of a run with master seed `s` uses the stream `r` of a ChaCha8 RNG
//! seeded with `s`, so cases are independent of scheduling and can be
//! regenerated individually.

use crate::error::{Error, Result};
use crate::graph::{Dag, NodeId, Universe, VarSet};
use crate::instance::Instance;
use crate::projection::latent_project;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

/// RNG algorithm recorded in result files.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha 0.9, per-rep streams)";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimParams {
    pub n_nodes: usize,
    /// Per-node connection probability: node i draws
    /// Binomial(n_nodes - 1, p_degree) partners.
    pub p_degree: f64,
    /// Fraction of the other partitions' nodes sampled into each subset.
    pub p_overlap: f64,
    /// Number of subsets the nodes are split into.
    pub s: usize,
    pub seed: u64,
    pub reps: u64,
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_nodes < 2 {
            return Err(Error::Precondition("n_nodes must be >= 2".into()));
        }
        if self.s < 2 || self.s > self.n_nodes {
            return Err(Error::Precondition(
                "subgraph count must satisfy 2 <= s <= n_nodes".into(),
            ));
        }
        for (name, p) in [("p_degree", self.p_degree), ("p_overlap", self.p_overlap)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Precondition(format!("{name} must lie in [0, 1]")));
            }
        }
        Ok(())
    }
}

/// One synthetic benchmark case.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedCase {
    pub ground_truth: Dag,
    pub subsets: Vec<VarSet>,
    pub instance: Instance,
}

/// Independent RNG substream for repetition `rep` of master seed `seed`.
pub fn rng_for_rep(seed: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    rng
}

fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor() as usize
}

/// Undirected connected components as sorted node lists, ordered by their
/// smallest member.
fn components(n: usize, adjacency: &[BTreeSet<NodeId>]) -> Vec<Vec<NodeId>> {
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut comp = vec![start];
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &v in &adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    comp.push(v);
                    stack.push(v);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps
}

/// Random connected DAG: each node draws Binomial(n-1, p_degree) partners
/// uniformly without replacement, every sampled pair is oriented from the
/// lower to the higher index, and while the underlying undirected graph is
/// disconnected one repair edge joins two random components.
pub fn generate_ground_truth(n: usize, p_degree: f64, rng: &mut ChaCha8Rng) -> Result<Dag> {
    if n < 2 {
        return Err(Error::Precondition("ground truth needs >= 2 nodes".into()));
    }
    if !(0.0..=1.0).contains(&p_degree) {
        return Err(Error::Precondition("p_degree must lie in [0, 1]".into()));
    }

    let mut undirected: Vec<BTreeSet<NodeId>> = vec![BTreeSet::new(); n];
    let connect = |adj: &mut Vec<BTreeSet<NodeId>>, a: NodeId, b: NodeId| {
        adj[a].insert(b);
        adj[b].insert(a);
    };
    for i in 0..n {
        let draws = (0..n - 1).filter(|_| rng.random_bool(p_degree)).count();
        for idx in rand::seq::index::sample(rng, n - 1, draws) {
            let j = if idx < i { idx } else { idx + 1 };
            connect(&mut undirected, i, j);
        }
    }

    loop {
        let comps = components(n, &undirected);
        if comps.len() <= 1 {
            break;
        }
        let a = rng.random_range(0..comps.len());
        let mut b = rng.random_range(0..comps.len() - 1);
        if b >= a {
            b += 1;
        }
        let u = comps[a][rng.random_range(0..comps[a].len())];
        let v = comps[b][rng.random_range(0..comps[b].len())];
        connect(&mut undirected, u, v);
    }

    let mut edges = Vec::new();
    for x in 0..n {
        for &y in undirected[x].iter().filter(|&&y| y > x) {
            edges.push((x, y));
        }
    }
    Dag::new(n, &edges)
}

/// Shuffle the nodes, partition them into `s` near-equal blocks (remainders
/// go to the earliest blocks), and extend block `i` with a uniform sample of
/// `round(p_overlap * (n - |block i|))` nodes drawn from the other blocks.
pub fn split_overlapping(
    n: usize,
    s: usize,
    p_overlap: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<VarSet>> {
    if s == 0 || s > n {
        return Err(Error::Precondition(format!(
            "cannot split {n} nodes into {s} subsets"
        )));
    }
    if !(0.0..=1.0).contains(&p_overlap) {
        return Err(Error::Precondition("p_overlap must lie in [0, 1]".into()));
    }
    let mut order: Vec<NodeId> = (0..n).collect();
    order.shuffle(rng);

    let base = n / s;
    let remainder = n % s;
    let mut subsets = Vec::with_capacity(s);
    let mut offset = 0;
    for i in 0..s {
        let size = base + usize::from(i < remainder);
        let block = &order[offset..offset + size];
        offset += size;

        let others: Vec<NodeId> = order[..offset - size]
            .iter()
            .chain(&order[offset..])
            .copied()
            .collect();
        let extra = round_half_up(p_overlap * others.len() as f64);
        let mut subset = VarSet::from_iter(block.iter().copied());
        for idx in rand::seq::index::sample(rng, others.len(), extra) {
            subset.insert(others[idx]);
        }
        subsets.push(subset);
    }
    Ok(subsets)
}

/// Generate a ground truth, split the nodes into overlapping subsets, and
/// project the ground truth onto each subset.
pub fn make_case(params: &SimParams, rng: &mut ChaCha8Rng) -> Result<GeneratedCase> {
    params.validate()?;
    let n = params.n_nodes;
    let ground_truth = generate_ground_truth(n, params.p_degree, rng)?;
    let subsets = split_overlapping(n, params.s, params.p_overlap, rng)?;
    let inputs = subsets
        .iter()
        .map(|&subset| latent_project(&ground_truth, subset))
        .collect::<Result<Vec<_>>>()?;
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let instance = Instance::new(Universe::new(names)?, inputs)?;
    Ok(GeneratedCase {
        ground_truth,
        subsets,
        instance,
    })
}
