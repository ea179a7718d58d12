//! Version graphs, cost matrices, and the solver graph they induce.
//!
//! A collection of `n` dataset versions is described by two sparse matrices:
//! `delta[i][j]` is the storage cost of keeping version `j` as a delta from
//! version `i`, and `phi[i][j]` is the cost of recreating `j` once `i` is
//! available. Diagonal entries are the costs of keeping a version whole.
//! Solvers operate on a derived graph with a synthetic root node `0`: the
//! edge `(0, i)` carries the materialization costs of version `i`, and each
//! revealed off-diagonal entry becomes an edge `(i, j)`.

use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// Index of the synthetic root node in solver graphs.
pub const ROOT: usize = 0;

/// Identifier of a version. Real versions are numbered `1..=n` contiguously;
/// `0` is reserved for the synthetic root.
pub type VersionId = usize;

/// Storage and recreation weights attached to a matrix entry or solver edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct EdgeWeights {
    /// Bytes needed to store the delta (or the whole version on a diagonal).
    pub storage: u64,
    /// Cost units needed to recreate the target given the source.
    pub recreation: u64,
}

impl EdgeWeights {
    pub fn new(storage: u64, recreation: u64) -> Self {
        EdgeWeights {
            storage,
            recreation,
        }
    }
}

/// Derivation history of a version collection: which version was derived
/// from which, plus the full (materialized) costs per version.
///
/// Derivation edges form a DAG; branching and merging are both allowed.
#[derive(Debug, Clone)]
pub struct VersionGraph {
    n: usize,
    edges: Vec<(VersionId, VersionId)>,
    full_sizes: Vec<EdgeWeights>,
}

impl VersionGraph {
    /// Builds a version graph over versions `1..=n`.
    ///
    /// `full_sizes[i - 1]` holds the materialization costs of version `i`.
    /// Fails if an edge mentions an unknown version, points at itself, or
    /// the edge set has a cycle.
    pub fn new(
        n: usize,
        edges: Vec<(VersionId, VersionId)>,
        full_sizes: Vec<EdgeWeights>,
    ) -> Result<Self> {
        if full_sizes.len() != n {
            return Err(Error::InvalidInput(format!(
                "expected {} full-size entries, got {}",
                n,
                full_sizes.len()
            )));
        }
        for &(u, v) in &edges {
            if u == 0 || v == 0 || u > n || v > n {
                return Err(Error::UnknownVersion(if u == 0 || u > n { u } else { v }));
            }
            if u == v {
                return Err(Error::InvalidInput(format!(
                    "derivation edge ({u}, {v}) is a self-loop"
                )));
            }
        }
        let graph = VersionGraph {
            n,
            edges,
            full_sizes,
        };
        if graph.has_cycle() {
            return Err(Error::InvalidInput(
                "derivation edges contain a cycle".into(),
            ));
        }
        Ok(graph)
    }

    pub fn version_count(&self) -> usize {
        self.n
    }

    pub fn derivation_edges(&self) -> &[(VersionId, VersionId)] {
        &self.edges
    }

    pub fn full_size(&self, version: VersionId) -> Option<EdgeWeights> {
        if version >= 1 && version <= self.n {
            Some(self.full_sizes[version - 1])
        } else {
            None
        }
    }

    /// Parents of `version` in the derivation DAG, ascending.
    pub fn parents_of(&self, version: VersionId) -> Vec<VersionId> {
        let mut parents: Vec<_> = self
            .edges
            .iter()
            .filter(|&&(_, v)| v == version)
            .map(|&(u, _)| u)
            .collect();
        parents.sort_unstable();
        parents.dedup();
        parents
    }

    /// Nodes within `k` hops of each version on the undirected view of the
    /// derivation edges. Entry `i - 1` lists the neighborhood of version `i`
    /// in ascending order, excluding `i` itself.
    pub fn undirected_neighborhoods(&self, k: usize) -> Vec<Vec<VersionId>> {
        let mut adj = vec![Vec::new(); self.n + 1];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        (1..=self.n)
            .map(|start| {
                let mut dist = vec![usize::MAX; self.n + 1];
                dist[start] = 0;
                let mut queue = std::collections::VecDeque::from([start]);
                let mut reached = Vec::new();
                while let Some(u) = queue.pop_front() {
                    if dist[u] == k {
                        continue;
                    }
                    for &v in &adj[u] {
                        if dist[v] == usize::MAX {
                            dist[v] = dist[u] + 1;
                            reached.push(v);
                            queue.push_back(v);
                        }
                    }
                }
                reached.sort_unstable();
                reached
            })
            .collect()
    }

    fn has_cycle(&self) -> bool {
        let mut indegree = vec![0usize; self.n + 1];
        let mut adj = vec![Vec::new(); self.n + 1];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            indegree[v] += 1;
        }
        let mut queue: Vec<_> = (1..=self.n).filter(|&v| indegree[v] == 0).collect();
        let mut seen = 0;
        while let Some(u) = queue.pop() {
            seen += 1;
            for &v in &adj[u] {
                indegree[v] -= 1;
                if indegree[v] == 0 {
                    queue.push(v);
                }
            }
        }
        seen != self.n
    }
}

/// Sparse pairwise cost matrices. An absent entry is unknown and treated as
/// unusable by every solver; it is never an error.
#[derive(Debug, Clone)]
pub struct CostMatrices {
    directed: bool,
    entries: BTreeMap<(VersionId, VersionId), EdgeWeights>,
}

impl CostMatrices {
    pub fn new(directed: bool) -> Self {
        CostMatrices {
            directed,
            entries: BTreeMap::new(),
        }
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    /// Records the entry `(i, j)`. In undirected mode the mirror entry is
    /// recorded as well, keeping the symmetry invariant by construction.
    pub fn insert(&mut self, i: VersionId, j: VersionId, weights: EdgeWeights) {
        self.entries.insert((i, j), weights);
        if !self.directed && i != j {
            self.entries.insert((j, i), weights);
        }
    }

    pub fn get(&self, i: VersionId, j: VersionId) -> Option<EdgeWeights> {
        self.entries.get(&(i, j)).copied()
    }

    /// Revealed entries in ascending `(i, j)` order.
    pub fn entries(&self) -> impl Iterator<Item = (VersionId, VersionId, EdgeWeights)> + '_ {
        self.entries.iter().map(|(&(i, j), &w)| (i, j, w))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest version index mentioned by any entry.
    pub fn max_version(&self) -> usize {
        self.entries
            .keys()
            .map(|&(i, j)| i.max(j))
            .max()
            .unwrap_or(0)
    }

    /// Checks that every version `1..=n` has a diagonal entry and that
    /// undirected matrices are mirror-consistent.
    pub fn validate(&self, n: usize) -> Result<()> {
        for v in 1..=n {
            if !self.entries.contains_key(&(v, v)) {
                return Err(Error::MissingDiagonal(v));
            }
        }
        if !self.directed {
            for (&(i, j), &w) in &self.entries {
                match self.entries.get(&(j, i)) {
                    Some(&m) if m == w => {}
                    _ => {
                        return Err(Error::InvalidInput(format!(
                            "undirected matrices lack a consistent mirror for entry ({i}, {j})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// The graph solvers run on: nodes `0..=n`, and for every revealed matrix
/// entry an edge whose weights pair storage with recreation cost.
#[derive(Debug, Clone)]
pub struct SolverGraph {
    n: usize,
    directed: bool,
    /// Sorted by `(u, v)`; the vector index is the canonical edge index.
    edges: Vec<(VersionId, VersionId, EdgeWeights)>,
    out: Vec<Vec<usize>>,
    inn: Vec<Vec<usize>>,
}

impl SolverGraph {
    fn from_edges(
        n: usize,
        directed: bool,
        edges: Vec<(VersionId, VersionId, EdgeWeights)>,
    ) -> Self {
        let mut out = vec![Vec::new(); n + 1];
        let mut inn = vec![Vec::new(); n + 1];
        for (idx, &(u, v, _)) in edges.iter().enumerate() {
            out[u].push(idx);
            inn[v].push(idx);
        }
        SolverGraph {
            n,
            directed,
            edges,
            out,
            inn,
        }
    }

    pub fn version_count(&self) -> usize {
        self.n
    }

    pub fn node_count(&self) -> usize {
        self.n + 1
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    /// All edges in ascending `(u, v)` order.
    pub fn edges(&self) -> &[(VersionId, VersionId, EdgeWeights)] {
        &self.edges
    }

    pub fn weight(&self, u: VersionId, v: VersionId) -> Option<EdgeWeights> {
        self.edges
            .binary_search_by_key(&(u, v), |&(a, b, _)| (a, b))
            .ok()
            .map(|idx| self.edges[idx].2)
    }

    /// Out-edges of `u` as `(v, weights)`, ascending by `v`.
    pub fn out_edges(&self, u: VersionId) -> impl Iterator<Item = (VersionId, EdgeWeights)> + '_ {
        self.out[u].iter().map(move |&idx| {
            let (_, v, w) = self.edges[idx];
            (v, w)
        })
    }

    /// In-edges of `v` as `(u, weights)`, ascending by `u`.
    pub fn in_edges(&self, v: VersionId) -> impl Iterator<Item = (VersionId, EdgeWeights)> + '_ {
        self.inn[v].iter().map(move |&idx| {
            let (u, _, w) = self.edges[idx];
            (u, w)
        })
    }
}

/// Builds the solver graph for `graph` from the revealed `matrices`.
///
/// Every version gets the root edge `(0, i)` carrying its materialization
/// costs, so any version can always be stored whole. Off-diagonal entries
/// become version-to-version edges; undirected inputs contribute both
/// directions with equal weights.
pub fn build_solver_graph(graph: &VersionGraph, matrices: &CostMatrices) -> Result<SolverGraph> {
    let n = graph.version_count();
    matrices.validate(n)?;
    let mut edges = Vec::with_capacity(n + matrices.len());
    for v in 1..=n {
        let w = matrices.get(v, v).ok_or(Error::MissingDiagonal(v))?;
        edges.push((ROOT, v, w));
    }
    for (i, j, w) in matrices.entries() {
        if i == j {
            continue;
        }
        if i > n || j > n {
            return Err(Error::UnknownVersion(i.max(j)));
        }
        edges.push((i, j, w));
    }
    edges.sort_unstable_by_key(|&(u, v, _)| (u, v));
    Ok(SolverGraph::from_edges(n, matrices.directed(), edges))
}

/// Builds a solver graph directly from matrices, taking the version count
/// from the largest index mentioned. Convenient when no derivation history
/// is available (e.g. a matrix interchange file).
pub fn solver_graph_from_matrices(matrices: &CostMatrices) -> Result<SolverGraph> {
    let n = matrices.max_version();
    let graph = VersionGraph::new(n, Vec::new(), vec![EdgeWeights::new(0, 0); n])?;
    // The placeholder full sizes are never read: edges come from `matrices`.
    build_solver_graph(&graph, matrices)
}

/// A violation of the delta-realizability triangle inequalities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TriangleViolation {
    /// `|delta(p,q) - delta(q,w)| <= delta(p,w) <= delta(p,q) + delta(q,w)` failed.
    Path {
        p: VersionId,
        q: VersionId,
        w: VersionId,
    },
    /// `|delta(p,p) - delta(p,q)| <= delta(q,q) <= delta(p,p) + delta(p,q)` failed.
    Pair { p: VersionId, q: VersionId },
}

impl std::fmt::Display for TriangleViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TriangleViolation::Path { p, q, w } => {
                write!(f, "triangle violated over versions ({p}, {q}, {w})")
            }
            TriangleViolation::Pair { p, q } => {
                write!(f, "size bound violated over versions ({p}, {q})")
            }
        }
    }
}

/// Checks the realizability triangle inequalities over revealed entries.
///
/// Intended for the symmetric delta regime where entries record actual
/// modifications; callable on any matrices. An empty result means the
/// revealed entries are mutually consistent.
pub fn check_triangle(matrices: &CostMatrices) -> Vec<TriangleViolation> {
    let n = matrices.max_version();
    let mut sources = vec![Vec::new(); n + 1]; // entry (p, q): p per q
    let mut targets = vec![Vec::new(); n + 1]; // entry (q, w): w per q
    for (i, j, _) in matrices.entries() {
        if i != j {
            sources[j].push(i);
            targets[i].push(j);
        }
    }

    let mut violations = Vec::new();
    // Pair inequality: a delta cannot differ from one endpoint's full size
    // by more than the other endpoint's full size.
    for (p, q, w) in matrices.entries() {
        if p == q {
            continue;
        }
        let (Some(pp), Some(qq)) = (matrices.get(p, p), matrices.get(q, q)) else {
            continue;
        };
        let lower = pp.storage.abs_diff(w.storage);
        let upper = pp.storage.saturating_add(w.storage);
        if qq.storage < lower || qq.storage > upper {
            violations.push(TriangleViolation::Pair { p, q });
        }
    }
    // Path inequality over every revealed two-hop detour p -> q -> w with
    // the direct entry (p, w) also revealed. In undirected matrices the
    // roles of p and w are interchangeable, so each unordered triple is
    // reported once.
    for q in 1..=n {
        for &p in &sources[q] {
            for &w in &targets[q] {
                if p == w || (!matrices.directed() && p > w) {
                    continue;
                }
                let (Some(pq), Some(qw), Some(pw)) =
                    (matrices.get(p, q), matrices.get(q, w), matrices.get(p, w))
                else {
                    continue;
                };
                let lower = pq.storage.abs_diff(qw.storage);
                let upper = pq.storage.saturating_add(qw.storage);
                if pw.storage < lower || pw.storage > upper {
                    violations.push(TriangleViolation::Path { p, q, w });
                }
            }
        }
    }
    violations.sort_by_key(|v| match *v {
        TriangleViolation::Pair { p, q } => (0, p, q, 0),
        TriangleViolation::Path { p, q, w } => (1, p, q, w),
    });
    violations
}
