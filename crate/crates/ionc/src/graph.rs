//! Core graph types and queries: the variable universe, node subsets as
//! bitmasks, DAGs with bit-parallel adjacency rows, acyclicity testing,
//! restricted reachability, and d-separation.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::fmt;

/// Node identifiers are indices into the [`Universe`] name table.
pub type NodeId = usize;

/// Hard ceiling on universe size; adjacency rows are single 64-bit words.
pub const MAX_NODES: usize = 64;

#[inline]
pub(crate) fn bit(i: usize) -> u64 {
    1u64 << i
}

/// Iterate the set bit positions of a mask in ascending order.
#[inline]
pub(crate) fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

/// Mask with the low `n` bits set.
#[inline]
pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// True iff the directed graph given by adjacency rows has no cycle.
///
/// Repeatedly peels nodes with no incoming edge among the remainder.
pub(crate) fn rows_acyclic(rows: &[u64], n: usize) -> bool {
    let mut remaining = full_mask(n);
    while remaining != 0 {
        let mut has_incoming = 0u64;
        for u in bits(remaining) {
            has_incoming |= rows[u] & remaining;
        }
        let removable = remaining & !has_incoming;
        if removable == 0 {
            return false;
        }
        remaining &= !removable;
    }
    true
}

/// Reflexive-free transitive reach restricted to intermediate nodes in
/// `allowed`: `out[u]` holds `v` iff there is a directed path `u -> ... -> v`
/// of length >= 1 whose intermediate vertices all lie in `allowed`.
///
/// Warshall-style closure pivoting only on `allowed` nodes; endpoints are
/// unrestricted.
pub(crate) fn closure_through(rows: &[u64], allowed: u64, out: &mut [u64]) {
    out.copy_from_slice(rows);
    for z in bits(allowed) {
        let rz = out[z];
        if rz == 0 {
            continue;
        }
        for o in out.iter_mut() {
            // Branchless: all-ones mask when bit z of *o is set.
            *o |= rz & ((*o >> z) & 1).wrapping_neg();
        }
    }
}

/// Single-source unrestricted reachability: mask of nodes reachable from
/// `src` by a directed path of length >= 1.
pub(crate) fn reach_from(rows: &[u64], src: usize) -> u64 {
    let mut reach = rows[src];
    let mut frontier = reach;
    while frontier != 0 {
        let mut next = 0u64;
        for u in bits(frontier) {
            next |= rows[u];
        }
        frontier = next & !reach;
        reach |= next;
    }
    reach
}

/// A set of node identifiers stored as a 64-bit mask.
///
/// Iteration order is ascending by index, so the set is canonically sorted.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct VarSet(u64);

impl VarSet {
    pub fn empty() -> Self {
        VarSet(0)
    }

    /// The full set `{0, .., n-1}`.
    pub fn all(n: usize) -> Self {
        VarSet(full_mask(n))
    }

    pub fn from_iter<I: IntoIterator<Item = NodeId>>(ids: I) -> Self {
        let mut m = 0u64;
        for i in ids {
            debug_assert!(i < MAX_NODES);
            m |= bit(i);
        }
        VarSet(m)
    }

    #[cfg(test)]
    pub(crate) fn from_mask(m: u64) -> Self {
        VarSet(m)
    }

    pub(crate) fn mask(self) -> u64 {
        self.0
    }

    pub fn contains(self, i: NodeId) -> bool {
        i < MAX_NODES && self.0 & bit(i) != 0
    }

    pub fn insert(&mut self, i: NodeId) {
        debug_assert!(i < MAX_NODES);
        self.0 |= bit(i);
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = NodeId> {
        bits(self.0)
    }

    /// Complement within a universe of `n` nodes.
    pub fn complement(self, n: usize) -> Self {
        VarSet(!self.0 & full_mask(n))
    }

    pub fn union(self, other: Self) -> Self {
        VarSet(self.0 | other.0)
    }

    pub fn intersect(self, other: Self) -> Self {
        VarSet(self.0 & other.0)
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }
}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Ordered table of variable names defining the global node index space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Universe {
    names: Vec<String>,
}

impl Universe {
    /// Names must be non-empty, unique, and at most [`MAX_NODES`] many.
    pub fn new<S: Into<String>>(names: Vec<S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::InvalidInstance("universe has no variables".into()));
        }
        if names.len() > MAX_NODES {
            return Err(Error::TooManyNodes {
                what: "universe",
                n: names.len(),
                limit: MAX_NODES,
            });
        }
        let mut seen = std::collections::HashSet::new();
        for name in &names {
            if name.is_empty() {
                return Err(Error::InvalidInstance("empty variable name".into()));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidInstance(format!(
                    "duplicate variable name {name:?}"
                )));
            }
        }
        Ok(Universe { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, id: NodeId) -> &str {
        &self.names[id]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<NodeId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn all_vars(&self) -> VarSet {
        VarSet::all(self.len())
    }
}

/// Directed acyclic graph over nodes `0..n`, stored as one child bitmask per
/// node. No self-loops, no cycles.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dag {
    n: usize,
    children: Vec<u64>,
}

impl Dag {
    /// Build and validate a DAG from an edge list.
    pub fn new(n: usize, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        if n > MAX_NODES {
            return Err(Error::TooManyNodes {
                what: "graph",
                n,
                limit: MAX_NODES,
            });
        }
        let mut children = vec![0u64; n];
        for &(x, y) in edges {
            if x >= n || y >= n {
                return Err(Error::MalformedGraph(format!(
                    "edge ({x},{y}) out of range for {n} nodes"
                )));
            }
            if x == y {
                return Err(Error::MalformedGraph(format!("self-loop at node {x}")));
            }
            children[x] |= bit(y);
        }
        if !rows_acyclic(&children, n) {
            return Err(Error::MalformedGraph("directed cycle".into()));
        }
        Ok(Dag { n, children })
    }

    /// Empty graph on `n` nodes.
    pub fn empty(n: usize) -> Result<Self> {
        Dag::new(n, &[])
    }

    /// Caller guarantees the rows are in range, self-loop-free, and acyclic.
    pub(crate) fn from_rows_unchecked(children: Vec<u64>) -> Self {
        let n = children.len();
        debug_assert!(rows_acyclic(&children, n));
        Dag { n, children }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, x: NodeId, y: NodeId) -> bool {
        x < self.n && y < self.n && self.children[x] & bit(y) != 0
    }

    /// Edges in row-major order: sorted by (from, to).
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::new();
        for x in 0..self.n {
            for y in bits(self.children[x]) {
                out.push((x, y));
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.children.iter().map(|r| r.count_ones() as usize).sum()
    }

    pub(crate) fn children_rows(&self) -> &[u64] {
        &self.children
    }

    pub(crate) fn parents_rows(&self) -> Vec<u64> {
        let mut parents = vec![0u64; self.n];
        for u in 0..self.n {
            for v in bits(self.children[u]) {
                parents[v] |= bit(u);
            }
        }
        parents
    }

    /// True iff some directed path `from -> ... -> to` of length >= 1 has all
    /// of its intermediate vertices (endpoints excluded) in
    /// `allowed_intermediates`.
    pub fn reachable_through(
        &self,
        from: NodeId,
        to: NodeId,
        allowed_intermediates: VarSet,
    ) -> bool {
        debug_assert!(from < self.n && to < self.n);
        let target = bit(to);
        let allowed = allowed_intermediates.mask() & full_mask(self.n);
        let mut reach = self.children[from];
        if reach & target != 0 {
            return true;
        }
        let mut frontier = reach & allowed;
        while frontier != 0 {
            let mut next = 0u64;
            for u in bits(frontier) {
                next |= self.children[u];
            }
            next &= !reach;
            reach |= next;
            if reach & target != 0 {
                return true;
            }
            frontier = next & allowed;
        }
        false
    }

    /// Standard d-separation: every path between `x` and `y` is blocked by
    /// `z`. Colliders are blocked unless they or a descendant lie in `z`.
    ///
    /// Implemented by moralizing the ancestral graph of `{x, y} ∪ z` and
    /// testing undirected reachability avoiding `z`.
    pub fn d_separated(&self, x: NodeId, y: NodeId, z: VarSet) -> Result<bool> {
        let n = self.n;
        if x >= n || y >= n || z.mask() & !full_mask(n) != 0 {
            return Err(Error::Precondition("d_separated: node out of range".into()));
        }
        if x == y {
            return Err(Error::Precondition("d_separated: x == y".into()));
        }
        if z.contains(x) || z.contains(y) {
            return Err(Error::Precondition(
                "d_separated: conditioning set overlaps {x, y}".into(),
            ));
        }
        let parents = self.parents_rows();

        // Ancestral closure of {x, y} ∪ z.
        let mut anc = z.mask() | bit(x) | bit(y);
        loop {
            let mut grown = anc;
            for v in bits(anc) {
                grown |= parents[v];
            }
            if grown == anc {
                break;
            }
            anc = grown;
        }

        // Moralize within the ancestral set: undirect edges, marry parents.
        let mut adj = vec![0u64; n];
        for v in bits(anc) {
            let pa = parents[v] & anc;
            adj[v] |= pa;
            for p in bits(pa) {
                adj[p] |= bit(v) | (pa & !bit(p));
            }
        }

        // Undirected search from x, avoiding conditioned nodes.
        let blocked = z.mask();
        let mut seen = bit(x);
        let mut frontier = seen;
        while frontier != 0 {
            let mut next = 0u64;
            for u in bits(frontier) {
                next |= adj[u];
            }
            next &= anc & !blocked & !seen;
            if next & bit(y) != 0 {
                return Ok(false);
            }
            seen |= next;
            frontier = next;
        }
        Ok(true)
    }

    /// Apply a node relabeling: edge `(x, y)` becomes `(perm[x], perm[y])`.
    pub fn relabeled(&self, perm: &[NodeId]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::Precondition("relabeled: wrong permutation size".into()));
        }
        let mut seen = 0u64;
        for &p in perm {
            if p >= self.n || seen & bit(p) != 0 {
                return Err(Error::Precondition("relabeled: not a permutation".into()));
            }
            seen |= bit(p);
        }
        let edges: Vec<_> = self.edges().iter().map(|&(x, y)| (perm[x], perm[y])).collect();
        Dag::new(self.n, &edges)
    }

    /// True iff the underlying undirected graph is connected (vacuously true
    /// for n <= 1).
    pub fn underlying_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let parents = self.parents_rows();
        let mut seen = bit(0);
        let mut frontier = seen;
        while frontier != 0 {
            let mut next = 0u64;
            for u in bits(frontier) {
                next |= self.children[u] | parents[u];
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen == full_mask(self.n)
    }
}

impl fmt::Debug for Dag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dag(n={}, edges={:?})", self.n, self.edges())
    }
}

impl PartialOrd for Dag {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order: by node count, then by the row-major adjacency bitstring
/// read with lower-index targets first.
impl Ord for Dag {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| {
            for (a, b) in self.children.iter().zip(&other.children) {
                let ord = a.reverse_bits().cmp(&b.reverse_bits());
                if ord != Ordering::Equal {
                    return ord;
                }
            }
            Ordering::Equal
        })
    }
}

/// True iff the edge set over `n` nodes contains no directed cycle.
/// A self-loop counts as a cycle.
pub fn is_acyclic(edges: &[(NodeId, NodeId)], n: usize) -> Result<bool> {
    if n > MAX_NODES {
        return Err(Error::TooManyNodes {
            what: "graph",
            n,
            limit: MAX_NODES,
        });
    }
    let mut rows = vec![0u64; n];
    for &(x, y) in edges {
        if x >= n || y >= n {
            return Err(Error::MalformedGraph(format!(
                "edge ({x},{y}) out of range for {n} nodes"
            )));
        }
        if x == y {
            return Ok(false);
        }
        rows[x] |= bit(y);
    }
    Ok(rows_acyclic(&rows, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn dag(n: usize, edges: &[(usize, usize)]) -> Dag {
        Dag::new(n, edges).unwrap()
    }

    /// Random DAG: each low->high pair present with probability p.
    fn random_dag(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Dag {
        let mut edges = Vec::new();
        for x in 0..n {
            for y in (x + 1)..n {
                if rng.random_bool(p) {
                    edges.push((x, y));
                }
            }
        }
        // Random relabeling so edges are not all index-ordered.
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        dag(n, &edges).relabeled(&perm).unwrap()
    }

    // Reference d-separation by exhaustive path enumeration: a path is
    // blocked iff some non-collider lies in z or some collider has neither
    // itself nor a descendant in z.
    fn d_separated_by_paths(g: &Dag, x: usize, y: usize, z: u64) -> bool {
        let n = g.n();
        let mut descendants = vec![0u64; n];
        for v in 0..n {
            descendants[v] = reach_from(g.children_rows(), v) | bit(v);
        }
        let mut path = vec![x];
        let mut visited = bit(x);
        !any_active_path(g, y, z, &descendants, &mut path, &mut visited)
    }

    fn any_active_path(
        g: &Dag,
        target: usize,
        z: u64,
        descendants: &[u64],
        path: &mut Vec<usize>,
        visited: &mut u64,
    ) -> bool {
        let last = *path.last().unwrap();
        for next in 0..g.n() {
            if *visited & bit(next) != 0 {
                continue;
            }
            if !g.has_edge(last, next) && !g.has_edge(next, last) {
                continue;
            }
            path.push(next);
            *visited |= bit(next);
            let found = if next == target {
                path_active(g, path, z, descendants)
            } else {
                any_active_path(g, target, z, descendants, path, visited)
            };
            path.pop();
            *visited &= !bit(next);
            if found {
                return true;
            }
        }
        false
    }

    fn path_active(g: &Dag, path: &[usize], z: u64, descendants: &[u64]) -> bool {
        for i in 1..path.len() - 1 {
            let (a, v, b) = (path[i - 1], path[i], path[i + 1]);
            let collider = g.has_edge(a, v) && g.has_edge(b, v);
            if collider {
                if descendants[v] & z == 0 {
                    return false;
                }
            } else if z & bit(v) != 0 {
                return false;
            }
        }
        true
    }

    #[test]
    fn acyclicity_basics() {
        assert!(is_acyclic(&[(0, 1), (1, 2)], 3).unwrap());
        assert!(!is_acyclic(&[(0, 1), (1, 0)], 2).unwrap());
        // Complete tournament oriented low -> high.
        let mut edges = Vec::new();
        for x in 0..5 {
            for y in (x + 1)..5 {
                edges.push((x, y));
            }
        }
        assert!(is_acyclic(&edges, 5).unwrap());
        assert!(matches!(
            is_acyclic(&[(0, 7)], 3),
            Err(Error::MalformedGraph(_))
        ));
        assert!(!is_acyclic(&[(1, 1)], 2).unwrap());
    }

    #[test]
    fn acyclicity_invariant_under_relabeling() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.random_range(2..8);
            let g = random_dag(n, 0.4, &mut rng);
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            let relabeled = g.relabeled(&perm).unwrap();
            assert!(is_acyclic(&relabeled.edges(), n).unwrap());
        }
    }

    #[test]
    fn dag_construction_rejects_bad_input() {
        assert!(Dag::new(3, &[(0, 1), (1, 2), (2, 0)]).is_err());
        assert!(Dag::new(2, &[(0, 0)]).is_err());
        assert!(Dag::new(2, &[(0, 5)]).is_err());
    }

    #[test]
    fn reachable_through_examples() {
        // X -> Z -> Y with Z allowed / forbidden.
        let g = dag(3, &[(0, 2), (2, 1)]);
        assert!(g.reachable_through(0, 1, VarSet::from_iter([2])));
        assert!(!g.reachable_through(0, 1, VarSet::empty()));
        // Direct edge needs no intermediates.
        let g2 = dag(2, &[(0, 1)]);
        assert!(g2.reachable_through(0, 1, VarSet::empty()));
    }

    #[test]
    fn reachable_through_full_set_is_plain_reachability() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = rng.random_range(2..9);
            let g = random_dag(n, 0.35, &mut rng);
            let all = VarSet::all(n);
            for x in 0..n {
                let plain = reach_from(g.children_rows(), x);
                for y in 0..n {
                    if x == y {
                        continue;
                    }
                    assert_eq!(g.reachable_through(x, y, all), plain & bit(y) != 0);
                }
            }
        }
    }

    #[test]
    fn d_separation_chain_and_collider() {
        // Chain X -> Y -> Z.
        let chain = dag(3, &[(0, 1), (1, 2)]);
        assert!(chain.d_separated(0, 2, VarSet::from_iter([1])).unwrap());
        assert!(!chain.d_separated(0, 2, VarSet::empty()).unwrap());
        // Collider X -> Z <- Y.
        let coll = dag(3, &[(0, 2), (1, 2)]);
        assert!(coll.d_separated(0, 1, VarSet::empty()).unwrap());
        assert!(!coll.d_separated(0, 1, VarSet::from_iter([2])).unwrap());
    }

    #[test]
    fn d_separation_collider_descendant_activates() {
        // X -> C <- Y, C -> D: conditioning on D opens the collider.
        let g = dag(4, &[(0, 2), (1, 2), (2, 3)]);
        assert!(g.d_separated(0, 1, VarSet::empty()).unwrap());
        assert!(!g.d_separated(0, 1, VarSet::from_iter([3])).unwrap());
    }

    #[test]
    fn d_separation_precondition_errors() {
        let g = dag(3, &[(0, 1)]);
        assert!(g.d_separated(0, 0, VarSet::empty()).is_err());
        assert!(g.d_separated(0, 1, VarSet::from_iter([1])).is_err());
    }

    #[test]
    fn d_separation_matches_path_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let n = rng.random_range(3..7);
            let g = random_dag(n, 0.4, &mut rng);
            for x in 0..n {
                for y in (x + 1)..n {
                    let others: Vec<usize> =
                        (0..n).filter(|&v| v != x && v != y).collect();
                    for sub in 0..(1u64 << others.len()) {
                        let mut z = 0u64;
                        for (i, &v) in others.iter().enumerate() {
                            if sub & (1 << i) != 0 {
                                z |= bit(v);
                            }
                        }
                        let fast = g.d_separated(x, y, VarSet::from_mask(z)).unwrap();
                        let slow = d_separated_by_paths(&g, x, y, z);
                        assert_eq!(fast, slow, "g={g:?} x={x} y={y} z={z:#b}");
                    }
                }
            }
        }
    }

    #[test]
    fn d_separation_symmetry_and_adjacency() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..300 {
            let n = rng.random_range(2..8);
            let g = random_dag(n, 0.4, &mut rng);
            let x = rng.random_range(0..n);
            let mut y = rng.random_range(0..n);
            if y == x {
                y = (y + 1) % n;
            }
            let mut z = VarSet::empty();
            for v in 0..n {
                if v != x && v != y && rng.random_bool(0.3) {
                    z.insert(v);
                }
            }
            let xy = g.d_separated(x, y, z).unwrap();
            let yx = g.d_separated(y, x, z).unwrap();
            assert_eq!(xy, yx);
            if g.has_edge(x, y) || g.has_edge(y, x) {
                assert!(!xy, "adjacent nodes are never d-separated");
            }
        }
    }

    #[test]
    fn canonical_order_is_row_major_bitstring() {
        // Over n=2: bits in row-major order are (0,0),(0,1),(1,0),(1,1).
        // {1->0} reads 0010, {0->1} reads 0100, so {1->0} sorts first.
        let a = dag(2, &[(1, 0)]);
        let b = dag(2, &[(0, 1)]);
        assert!(a < b);
        let empty = dag(2, &[]);
        assert!(empty < a);
    }

    #[test]
    fn universe_validation() {
        assert!(Universe::new(vec!["X", "Y"]).is_ok());
        assert!(Universe::new(vec!["X", "X"]).is_err());
        assert!(Universe::new(vec![""]).is_err());
        assert!(Universe::new(Vec::<String>::new()).is_err());
        let u = Universe::new(vec!["X", "Y", "Z"]).unwrap();
        assert_eq!(u.index_of("Z"), Some(2));
        assert_eq!(u.index_of("Q"), None);
        assert_eq!(u.name(1), "Y");
    }

    #[test]
    fn connectivity_check() {
        assert!(dag(3, &[(0, 1), (1, 2)]).underlying_connected());
        assert!(!dag(3, &[(0, 1)]).underlying_connected());
        assert!(dag(1, &[]).underlying_connected());
    }
}
