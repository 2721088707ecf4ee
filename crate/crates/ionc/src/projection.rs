//! Latent projection of a DAG onto an observed variable subset.
//!
//! The projected view of an observed pair records exactly one of: a directed
//! relation (a directed path whose intermediate nodes are all unobserved), a
//! bidirected relation (an unobserved common cause with such paths into both
//! nodes, and no directed relation either way), or absence. A directed
//! relation takes precedence over a bidirected one.

use crate::error::{Error, Result};
use crate::graph::{bit, bits, full_mask, Dag, NodeId, VarSet};
use std::collections::BTreeSet;

/// Label of one unordered variable pair in an input graph, oriented relative
/// to the query order `(x, y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairLabel {
    /// x -> y
    DirectedForward,
    /// y -> x
    DirectedBackward,
    /// x <-> y
    Bidirected,
    Absent,
}

/// One input graph: a variable subset together with a complete labeling of
/// every unordered pair within it. Pairs not listed as directed or
/// bidirected are absent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputGraph {
    vars: VarSet,
    directed: BTreeSet<(NodeId, NodeId)>,
    bidirected: BTreeSet<(NodeId, NodeId)>,
}

impl InputGraph {
    pub fn new(
        vars: VarSet,
        directed: &[(NodeId, NodeId)],
        bidirected: &[(NodeId, NodeId)],
    ) -> Result<Self> {
        let mut taken: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
        let mut claim = |x: NodeId, y: NodeId| -> Result<()> {
            if x == y {
                return Err(Error::InvalidInstance(format!("self-pair at node {x}")));
            }
            if !vars.contains(x) || !vars.contains(y) {
                return Err(Error::InvalidInstance(format!(
                    "pair ({x},{y}) uses a node outside the input's variable set"
                )));
            }
            if !taken.insert((x.min(y), x.max(y))) {
                return Err(Error::InvalidInstance(format!(
                    "pair ({x},{y}) labeled more than once"
                )));
            }
            Ok(())
        };
        let mut dir = BTreeSet::new();
        for &(x, y) in directed {
            claim(x, y)?;
            dir.insert((x, y));
        }
        let mut bidir = BTreeSet::new();
        for &(x, y) in bidirected {
            claim(x, y)?;
            bidir.insert((x.min(y), x.max(y)));
        }
        Ok(InputGraph {
            vars,
            directed: dir,
            bidirected: bidir,
        })
    }

    pub fn vars(&self) -> VarSet {
        self.vars
    }

    /// Label of the pair `{x, y}`, oriented relative to the argument order.
    pub fn label(&self, x: NodeId, y: NodeId) -> Result<PairLabel> {
        if x == y || !self.vars.contains(x) || !self.vars.contains(y) {
            return Err(Error::Precondition(format!(
                "label: ({x},{y}) is not a co-measured pair of this input"
            )));
        }
        if self.directed.contains(&(x, y)) {
            Ok(PairLabel::DirectedForward)
        } else if self.directed.contains(&(y, x)) {
            Ok(PairLabel::DirectedBackward)
        } else if self.bidirected.contains(&(x.min(y), x.max(y))) {
            Ok(PairLabel::Bidirected)
        } else {
            Ok(PairLabel::Absent)
        }
    }

    /// Directed pair labels as (from, to), ascending.
    pub fn directed_edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.directed.iter().copied()
    }

    /// Bidirected pair labels normalized to (low, high), ascending.
    pub fn bidirected_pairs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.bidirected.iter().copied()
    }

    /// Unordered pairs labeled absent, normalized to (low, high), ascending.
    pub fn absent_pairs(&self) -> Vec<(NodeId, NodeId)> {
        let vars: Vec<NodeId> = self.vars.iter().collect();
        let mut out = Vec::new();
        for i in 0..vars.len() {
            for j in (i + 1)..vars.len() {
                let (x, y) = (vars[i], vars[j]);
                if !self.directed.contains(&(x, y))
                    && !self.directed.contains(&(y, x))
                    && !self.bidirected.contains(&(x, y))
                {
                    out.push((x, y));
                }
            }
        }
        out
    }
}

fn check_observed(g: &Dag, observed: VarSet) -> Result<()> {
    if observed.is_empty() {
        return Err(Error::Precondition("observed set is empty".into()));
    }
    if observed.mask() & !full_mask(g.n()) != 0 {
        return Err(Error::Precondition(
            "observed set exceeds the graph's node range".into(),
        ));
    }
    Ok(())
}

/// True iff the projection of `g` onto `observed` sees a directed relation
/// `x -> y`: a directed path from `x` to `y` whose intermediate nodes are all
/// unobserved. Requires `y` observed.
pub fn projects_directed(g: &Dag, x: NodeId, y: NodeId, observed: VarSet) -> Result<bool> {
    check_observed(g, observed)?;
    if x == y || x >= g.n() || y >= g.n() {
        return Err(Error::Precondition(format!(
            "projects_directed: bad pair ({x},{y})"
        )));
    }
    if !observed.contains(y) {
        return Err(Error::Precondition(format!(
            "projects_directed: target {y} is not observed"
        )));
    }
    Ok(g.reachable_through(x, y, observed.complement(g.n())))
}

/// True iff observed nodes `x` and `y` are causally connected relative to
/// `observed`: a directed relation in either direction, or an unobserved
/// common cause with directed relations into both.
pub fn causally_connected(g: &Dag, x: NodeId, y: NodeId, observed: VarSet) -> Result<bool> {
    check_observed(g, observed)?;
    if x == y || !observed.contains(x) || !observed.contains(y) {
        return Err(Error::Precondition(format!(
            "causally_connected: ({x},{y}) must be distinct observed nodes"
        )));
    }
    if projects_directed(g, x, y, observed)? || projects_directed(g, y, x, observed)? {
        return Ok(true);
    }
    for z in observed.complement(g.n()).iter() {
        if projects_directed(g, z, x, observed)? && projects_directed(g, z, y, observed)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Projection plus a record of which pairs carried both a directed relation
/// and an unobserved common cause. The single-label-per-pair language keeps
/// only the directed relation for those pairs.
#[derive(Clone, Debug)]
pub struct ProjectionDetail {
    pub input: InputGraph,
    /// Pairs (low, high) labeled directed that also have a latent common
    /// cause (shielded confounders).
    pub shielded_confounders: Vec<(NodeId, NodeId)>,
}

/// Marginalize `g` onto `observed`, producing the complete pair labeling.
pub fn latent_project(g: &Dag, observed: VarSet) -> Result<InputGraph> {
    Ok(latent_project_detail(g, observed)?.input)
}

pub fn latent_project_detail(g: &Dag, observed: VarSet) -> Result<ProjectionDetail> {
    check_observed(g, observed)?;
    let n = g.n();
    let latent = observed.complement(n).mask();

    // reach[u] = nodes reachable from u via unobserved intermediates.
    let mut reach = vec![0u64; n];
    crate::graph::closure_through(g.children_rows(), latent, &mut reach);
    // reached_by[v] = sources with such a path into v.
    let mut reached_by = vec![0u64; n];
    for u in 0..n {
        for v in bits(reach[u]) {
            reached_by[v] |= bit(u);
        }
    }

    let obs: Vec<NodeId> = observed.iter().collect();
    let mut directed = Vec::new();
    let mut bidirected = Vec::new();
    let mut shielded = Vec::new();
    for i in 0..obs.len() {
        for j in (i + 1)..obs.len() {
            let (x, y) = (obs[i], obs[j]);
            let fwd = reach[x] & bit(y) != 0;
            let bwd = reach[y] & bit(x) != 0;
            debug_assert!(!(fwd && bwd), "both directions would imply a cycle");
            let confounded = reached_by[x] & reached_by[y] & latent != 0;
            if fwd || bwd {
                directed.push(if fwd { (x, y) } else { (y, x) });
                if confounded {
                    shielded.push((x, y));
                }
            } else if confounded {
                bidirected.push((x, y));
            }
        }
    }
    Ok(ProjectionDetail {
        input: InputGraph::new(observed, &directed, &bidirected)?,
        shielded_confounders: shielded,
    })
}
