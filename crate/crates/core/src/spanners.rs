//! Optimal solvers for the two extreme problems: minimum total storage
//! (spanning tree / arborescence over storage weights) and minimum
//! per-version recreation (shortest path tree over recreation weights).
//!
//! All tie-breaks prefer the lexicographically smaller `(u, v)` edge, which
//! makes every solver deterministic.

use crate::error::{Error, Result};
use crate::graph::{SolverGraph, VersionId, ROOT};
use crate::plan::StoragePlan;
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Minimum spanning tree rooted at the root node, over storage weights.
/// Prim's algorithm with a binary heap; requires an undirected graph.
pub fn mst_undirected(sg: &SolverGraph) -> Result<StoragePlan> {
    if sg.directed() {
        return Err(Error::InvalidInput(
            "minimum spanning tree requires undirected matrices".into(),
        ));
    }
    let n = sg.version_count();
    let mut in_tree = vec![false; n + 1];
    let mut parent = vec![ROOT; n + 1];
    let mut heap: BinaryHeap<Reverse<(u64, VersionId, VersionId)>> = BinaryHeap::new();
    in_tree[ROOT] = true;
    for (v, w) in sg.out_edges(ROOT) {
        heap.push(Reverse((w.storage, ROOT, v)));
    }
    let mut joined = 0;
    while let Some(Reverse((_, u, v))) = heap.pop() {
        if in_tree[v] {
            continue;
        }
        in_tree[v] = true;
        parent[v] = u;
        joined += 1;
        for (next, w) in sg.out_edges(v) {
            if next != ROOT && !in_tree[next] {
                heap.push(Reverse((w.storage, v, next)));
            }
        }
    }
    if joined != n {
        let missing = (1..=n).find(|&v| !in_tree[v]).unwrap();
        return Err(Error::InvalidInput(format!(
            "version {missing} is unreachable from the root"
        )));
    }
    Ok(StoragePlan::new(parent[1..].to_vec()))
}

/// Minimum-cost arborescence rooted at the root node, over storage weights.
/// Chu-Liu/Edmonds with recursive cycle contraction; the recursion depth is
/// bounded by the node count.
pub fn mca_directed(sg: &SolverGraph) -> Result<StoragePlan> {
    let node_count = sg.node_count();
    // Edges keyed by original index so ties resolve to the smallest (u, v).
    let edges: Vec<ArbEdge> = sg
        .edges()
        .iter()
        .enumerate()
        .map(|(idx, &(u, v, w))| ArbEdge {
            from: u,
            to: v,
            weight: w.storage,
            original: idx,
        })
        .collect();
    let chosen = arborescence(node_count, edges)?;
    let mut parent = vec![ROOT; node_count];
    for idx in chosen {
        let (u, v, _) = sg.edges()[idx];
        parent[v] = u;
    }
    Ok(StoragePlan::new(parent[1..].to_vec()))
}

/// Minimum storage plan for the graph's mode: spanning tree for undirected
/// inputs, arborescence for directed ones.
pub fn min_storage(sg: &SolverGraph) -> Result<StoragePlan> {
    if sg.directed() {
        mca_directed(sg)
    } else {
        mst_undirected(sg)
    }
}

#[derive(Clone, Copy)]
struct ArbEdge {
    from: usize,
    to: usize,
    weight: u64,
    /// Index into the caller's edge array, stable across contractions.
    original: usize,
}

/// Returns the original indices of the min-cost arborescence edges rooted
/// at node 0 of a graph with `node_count` nodes.
fn arborescence(node_count: usize, edges: Vec<ArbEdge>) -> Result<Vec<usize>> {
    // Cheapest in-edge per non-root node; ties by (from, original) keep the
    // selection lexicographic.
    let mut best: Vec<Option<ArbEdge>> = vec![None; node_count];
    for e in &edges {
        if e.to == ROOT || e.from == e.to {
            continue;
        }
        let better = match best[e.to] {
            None => true,
            Some(b) => (e.weight, e.from, e.original) < (b.weight, b.from, b.original),
        };
        if better {
            best[e.to] = Some(*e);
        }
    }
    for v in 1..node_count {
        if best[v].is_none() {
            return Err(Error::InvalidInput(format!(
                "version {v} is unreachable from the root"
            )));
        }
    }

    // Find a cycle among the chosen in-edges, if any.
    let mut color = vec![0u8; node_count]; // 0 unseen, 1 on path, 2 done
    color[ROOT] = 2;
    let mut cycle = Vec::new();
    'outer: for start in 1..node_count {
        if color[start] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut cur = start;
        while color[cur] == 0 {
            color[cur] = 1;
            path.push(cur);
            cur = best[cur].unwrap().from;
            if cur == ROOT {
                break;
            }
        }
        if cur != ROOT && color[cur] == 1 {
            // Nodes from `cur` to the end of `path` form the cycle.
            let pos = path.iter().position(|&x| x == cur).unwrap();
            cycle = path[pos..].to_vec();
            for &v in path.iter() {
                color[v] = 2;
            }
            break 'outer;
        }
        for &v in path.iter() {
            color[v] = 2;
        }
    }

    if cycle.is_empty() {
        return Ok((1..node_count).map(|v| best[v].unwrap().original).collect());
    }

    // Contract the cycle into a fresh super-node and recurse with reduced
    // weights for edges entering the cycle.
    let mut node_map = vec![0usize; node_count];
    let mut next_id = 0;
    let in_cycle = {
        let mut mark = vec![false; node_count];
        for &v in &cycle {
            mark[v] = true;
        }
        mark
    };
    for v in 0..node_count {
        if !in_cycle[v] {
            node_map[v] = next_id;
            next_id += 1;
        }
    }
    let cycle_id = next_id;
    for &v in &cycle {
        node_map[v] = cycle_id;
    }
    let new_count = next_id + 1;

    let mut new_edges = Vec::with_capacity(edges.len());
    for e in &edges {
        let from = node_map[e.from];
        let to = node_map[e.to];
        if from == to {
            continue;
        }
        let weight = if to == cycle_id {
            // Entering the cycle: swapping out the cycle's own in-edge of
            // the entry node costs the difference.
            e.weight - best[e.to].unwrap().weight
        } else {
            e.weight
        };
        new_edges.push(ArbEdge {
            from,
            to,
            weight,
            original: e.original,
        });
    }

    let chosen = arborescence(new_count, new_edges)?;

    // Expand: keep all cycle in-edges except the one displaced by the edge
    // that enters the contracted node.
    let chosen_original: std::collections::BTreeSet<usize> = chosen.into_iter().collect();
    let mut result = Vec::new();
    let mut cycle_entry_target = None;
    for idx in &chosen_original {
        let e = edges.iter().find(|e| e.original == *idx).unwrap();
        if node_map[e.to] == cycle_id && !in_cycle[e.from] {
            cycle_entry_target = Some(e.to);
        }
        result.push(*idx);
    }
    let entry = cycle_entry_target.expect("contracted node has an in-edge");
    for &v in &cycle {
        if v != entry {
            result.push(best[v].unwrap().original);
        }
    }
    result.sort_unstable();
    Ok(result)
}

/// Shortest path tree from the root over recreation weights (Dijkstra with
/// a binary heap). In the returned plan every version's recreation cost
/// equals its shortest-path distance.
pub fn spt(sg: &SolverGraph) -> Result<StoragePlan> {
    let (parent, dist) = spt_with_distances(sg)?;
    let _ = dist;
    Ok(parent)
}

/// Shortest path tree plus the distance map it realizes. Distances are
/// indexed by node (entry 0 is the root and always 0).
pub fn spt_with_distances(sg: &SolverGraph) -> Result<(StoragePlan, Vec<u64>)> {
    let n = sg.version_count();
    let mut dist = vec![u64::MAX; n + 1];
    let mut parent = vec![usize::MAX; n + 1];
    let mut done = vec![false; n + 1];
    dist[ROOT] = 0;
    parent[ROOT] = ROOT;
    let mut heap: BinaryHeap<Reverse<(u64, VersionId, VersionId)>> = BinaryHeap::new();
    heap.push(Reverse((0, ROOT, ROOT)));
    while let Some(Reverse((d, via, v))) = heap.pop() {
        if done[v] {
            continue;
        }
        done[v] = true;
        parent[v] = via;
        for (next, w) in sg.out_edges(v) {
            if next == ROOT || done[next] {
                continue;
            }
            let nd = d + w.recreation;
            // Strict improvement, or an equal distance through a smaller
            // (parent, node) pair: keeps the tree deterministic.
            if nd < dist[next] {
                dist[next] = nd;
                heap.push(Reverse((nd, v, next)));
            } else if nd == dist[next] {
                heap.push(Reverse((nd, v, next)));
            }
        }
    }
    if let Some(missing) = (1..=n).find(|&v| !done[v]) {
        return Err(Error::InvalidInput(format!(
            "version {missing} is unreachable from the root"
        )));
    }
    Ok((StoragePlan::new(parent[1..].to_vec()), dist))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_solver_graph, CostMatrices, EdgeWeights, VersionGraph};
    use crate::plan::{evaluate, validate_plan, StoragePlan};

    fn w(s: u64, r: u64) -> EdgeWeights {
        EdgeWeights::new(s, r)
    }

    fn sg_from(directed: bool, n: usize, entries: &[(usize, usize, u64, u64)]) -> SolverGraph {
        let graph = VersionGraph::new(n, vec![], vec![w(1, 1); n]).unwrap();
        let mut m = CostMatrices::new(directed);
        for &(i, j, s, r) in entries {
            m.insert(i, j, w(s, r));
        }
        build_solver_graph(&graph, &m).unwrap()
    }

    #[test]
    fn single_version_is_forced_to_materialize() {
        let sg = sg_from(false, 1, &[(1, 1, 7, 7)]);
        let plan = mst_undirected(&sg).unwrap();
        assert_eq!(plan.parent(1), 0);
        assert_eq!(evaluate(&plan, &sg, None).unwrap().total_storage, 7);
        let splan = spt(&sg).unwrap();
        assert_eq!(splan.parent(1), 0);
    }

    #[test]
    fn dominant_root_edges_materialize_everything() {
        // Every delta is more expensive than full storage.
        let sg = sg_from(
            false,
            3,
            &[
                (1, 1, 10, 10),
                (2, 2, 10, 10),
                (3, 3, 10, 10),
                (1, 2, 50, 50),
                (2, 3, 50, 50),
            ],
        );
        let plan = mst_undirected(&sg).unwrap();
        assert_eq!(plan, StoragePlan::all_materialized(3));
    }

    #[test]
    fn star_only_graph_yields_star_arborescence() {
        let sg = sg_from(true, 3, &[(1, 1, 5, 5), (2, 2, 6, 6), (3, 3, 7, 7)]);
        let plan = mca_directed(&sg).unwrap();
        assert_eq!(plan, StoragePlan::all_materialized(3));
    }

    #[test]
    fn cheap_chain_dominates_arborescence() {
        let sg = sg_from(
            true,
            3,
            &[
                (1, 1, 100, 100),
                (2, 2, 100, 100),
                (3, 3, 100, 100),
                (1, 2, 1, 1),
                (2, 3, 1, 1),
            ],
        );
        let plan = mca_directed(&sg).unwrap();
        assert_eq!(plan.parent(1), 0);
        assert_eq!(plan.parent(2), 1);
        assert_eq!(plan.parent(3), 2);
        assert_eq!(evaluate(&plan, &sg, None).unwrap().total_storage, 102);
    }

    #[test]
    fn edmonds_resolves_cycles() {
        // The cheapest in-edges of 1 and 2 form a 2-cycle that must be broken.
        let sg = sg_from(
            true,
            2,
            &[(1, 1, 10, 10), (2, 2, 10, 10), (1, 2, 1, 1), (2, 1, 1, 1)],
        );
        let plan = mca_directed(&sg).unwrap();
        assert!(validate_plan(&plan, &sg).is_empty());
        assert_eq!(evaluate(&plan, &sg, None).unwrap().total_storage, 11);
    }

    #[test]
    fn worked_example_spt_materializes_everything() {
        let sg = crate::fixtures::five_version_example();
        let (plan, dist) = spt_with_distances(&sg).unwrap();
        assert_eq!(plan, StoragePlan::all_materialized(5));
        let report = evaluate(&plan, &sg, None).unwrap();
        assert_eq!(report.sum_recreation, 49720);
        assert_eq!(report.max_recreation, 10120);
        assert_eq!(&dist[1..], &[10000, 10100, 9700, 9800, 10120]);
    }

    #[test]
    fn spt_follows_cheaper_delta_paths() {
        let sg = sg_from(true, 2, &[(1, 1, 10, 10), (2, 2, 100, 100), (1, 2, 5, 5)]);
        let (plan, dist) = spt_with_distances(&sg).unwrap();
        assert_eq!(plan.parent(2), 1);
        assert_eq!(dist[2], 15);
    }
}
