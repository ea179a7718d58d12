//! Shallow-light tree balancing: walks a minimum spanning tree depth-first
//! and re-roots any version whose tree distance exceeds a stretch factor
//! times its shortest-path distance.
//!
//! On undirected graphs with equal storage and recreation weights the
//! result satisfies both balance guarantees for stretch `alpha > 1`:
//! every version's recreation cost is at most `alpha` times its shortest
//! distance, and total storage is at most `1 + 2 / (alpha - 1)` times the
//! spanning tree's. Directed inputs are accepted but carry no comparable
//! guarantees.

use crate::error::{Error, Result};
use crate::graph::{SolverGraph, ROOT};
use crate::plan::{evaluate, StoragePlan};

/// The stretch factor: a rational strictly greater than one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stretch {
    num: u64,
    den: u64,
}

impl Stretch {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 || num <= den {
            return Err(Error::InvalidInput(
                "stretch factor must be greater than one".into(),
            ));
        }
        Ok(Stretch { num, den })
    }

    /// Parses a decimal like `2` or `1.5` into an exact rational.
    pub fn parse(text: &str) -> Result<Self> {
        let invalid = || Error::InvalidInput(format!("invalid stretch factor `{text}`"));
        let (int_part, frac_part) = match text.split_once('.') {
            Some((i, f)) => (i, f),
            None => (text, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(invalid());
        }
        let int: u64 = if int_part.is_empty() {
            0
        } else {
            int_part.parse().map_err(|_| invalid())?
        };
        if frac_part.len() > 9 || !frac_part.chars().all(|c| c.is_ascii_digit()) {
            return Err(invalid());
        }
        let den = 10u64.pow(frac_part.len() as u32);
        let frac: u64 = if frac_part.is_empty() {
            0
        } else {
            frac_part.parse().map_err(|_| invalid())?
        };
        Stretch::new(int * den + frac, den)
    }

    /// True when `value > alpha * reference`.
    fn exceeds(&self, value: u64, reference: u64) -> bool {
        u128::from(value) * u128::from(self.den) > u128::from(self.num) * u128::from(reference)
    }
}

/// Balances `mst` against the shortest-path distances `sp_dist` (indexed
/// by node, entry 0 being the root) under stretch `alpha`.
///
/// The traversal relaxes distances over both directions of every tree
/// edge; when a version's distance exceeds `alpha` times its shortest
/// distance, its entire shortest path is spliced into the tree.
pub fn last(
    sg: &SolverGraph,
    mst: &StoragePlan,
    sp_dist: &[u64],
    alpha: Stretch,
) -> Result<StoragePlan> {
    let n = sg.version_count();
    if sp_dist.len() != n + 1 {
        return Err(Error::InvalidInput(format!(
            "expected {} shortest-path distances, got {}",
            n + 1,
            sp_dist.len()
        )));
    }
    let base = evaluate(mst, sg, None)?;
    let mut dist = vec![0u64; n + 1];
    dist[1..].copy_from_slice(&base.recreation);
    let mut parent = vec![ROOT; n + 1];
    let mut children = vec![Vec::new(); n + 1];
    for (v, p) in mst.iter() {
        parent[v] = p;
        children[p].push(v);
    }

    // Shortest-path parents, reconstructed from the distances: the smallest
    // in-neighbor that realizes each distance.
    let mut sp_parent = vec![usize::MAX; n + 1];
    for v in 1..=n {
        for (u, w) in sg.in_edges(v) {
            if sp_dist[u].saturating_add(w.recreation) == sp_dist[v] {
                sp_parent[v] = u;
                break;
            }
        }
        if sp_parent[v] == usize::MAX {
            return Err(Error::InvalidInput(format!(
                "distances do not form a shortest path tree at version {v}"
            )));
        }
    }

    // Iterative depth-first walk over the spanning tree; every edge is
    // processed once downward and once on the way back.
    let mut stack: Vec<(usize, usize)> = vec![(ROOT, 0)];
    while let Some((node, child_pos)) = stack.pop() {
        if child_pos < children[node].len() {
            let child = children[node][child_pos];
            stack.push((node, child_pos + 1));

            // Downward edge: the child inherits improvements made above it.
            if let Some(w) = sg.weight(node, child) {
                if dist[child] > dist[node].saturating_add(w.recreation) {
                    dist[child] = dist[node] + w.recreation;
                    parent[child] = node;
                }
            }
            if child != ROOT && alpha.exceeds(dist[child], sp_dist[child]) {
                splice_shortest_path(child, sp_dist, &sp_parent, &mut dist, &mut parent);
            }
            stack.push((child, 0));
        } else if node != ROOT {
            // Return edge: a cheap child can shorten its former parent.
            let up = mst.parent(node);
            if let Some(w) = sg.weight(node, up) {
                if up != ROOT && dist[up] > dist[node].saturating_add(w.recreation) {
                    dist[up] = dist[node] + w.recreation;
                    parent[up] = node;
                }
            }
        }
    }

    Ok(StoragePlan::new(parent[1..].to_vec()))
}

/// Makes `v`'s shortest path part of the tree: every node on it whose
/// current distance is worse than its shortest distance is re-parented
/// onto the path.
fn splice_shortest_path(
    v: usize,
    sp_dist: &[u64],
    sp_parent: &[usize],
    dist: &mut [u64],
    parent: &mut [usize],
) {
    let mut cur = v;
    while cur != ROOT && dist[cur] > sp_dist[cur] {
        dist[cur] = sp_dist[cur];
        parent[cur] = sp_parent[cur];
        cur = sp_parent[cur];
    }
}
