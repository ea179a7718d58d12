//! Threshold-bounded Prim growth: builds a storage plan whose every
//! recreation cost stays within a bound, greedily keyed on marginal
//! storage. Unlike plain Prim, a version already in the tree may be
//! re-parented later when a cheaper edge appears that does not worsen its
//! recreation cost.

use crate::error::{Error, Result};
use crate::graph::{SolverGraph, ROOT};
use crate::plan::StoragePlan;
use crate::spanners;
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Grows a plan where every version's recreation cost is at most `theta`.
///
/// Maintained per version: `l`, the marginal storage of its current edge,
/// and `d`, an upper bound on its recreation cost. Re-parenting an in-tree
/// version never increases either. Fails naming the first version that
/// cannot join within the bound.
pub fn mp(sg: &SolverGraph, theta: u64) -> Result<StoragePlan> {
    let n = sg.version_count();
    let mut l = vec![u64::MAX; n + 1];
    let mut d = vec![u64::MAX; n + 1];
    let mut parent = vec![usize::MAX; n + 1];
    let mut in_tree = vec![false; n + 1];
    l[ROOT] = 0;
    d[ROOT] = 0;
    parent[ROOT] = ROOT;

    let mut queue: BinaryHeap<Reverse<(u64, usize)>> = BinaryHeap::new();
    queue.push(Reverse((0, ROOT)));
    while let Some(Reverse((lv, v))) = queue.pop() {
        if in_tree[v] || lv != l[v] {
            continue;
        }
        in_tree[v] = true;
        for (j, w) in sg.out_edges(v) {
            if j == ROOT {
                continue;
            }
            if in_tree[j] {
                // A better path to an in-tree version: accept only if it
                // improves storage without worsening recreation and keeps
                // the structure a tree.
                if w.recreation + d[v] <= d[j] && w.storage <= l[j] && !is_ancestor(&parent, j, v) {
                    debug_assert!(w.recreation + d[v] <= d[j] && w.storage <= l[j]);
                    parent[j] = v;
                    d[j] = w.recreation + d[v];
                    l[j] = w.storage;
                }
            } else if w.recreation + d[v] <= theta && w.storage <= l[j] {
                d[j] = w.recreation + d[v];
                l[j] = w.storage;
                parent[j] = v;
                queue.push(Reverse((l[j], j)));
            }
        }
    }

    if let Some(missing) = (1..=n).find(|&v| !in_tree[v]) {
        return Err(Error::InfeasibleBound {
            bound: theta,
            version: Some(missing),
        });
    }
    Ok(StoragePlan::new(parent[1..].to_vec()))
}

/// True when `ancestor` lies on `node`'s current root path.
fn is_ancestor(parent: &[usize], ancestor: usize, node: usize) -> bool {
    let mut cur = node;
    loop {
        if cur == ancestor {
            return true;
        }
        if cur == ROOT {
            return false;
        }
        cur = parent[cur];
    }
}

/// Smallest max-recreation plan within a storage budget: binary search on
/// the bound fed to the growth above, from the largest shortest-path
/// distance (no bound below it is feasible) up to the sum of all
/// recreation weights (no tree can exceed it).
///
/// At a candidate bound the greedy growth may overshoot the budget even
/// when a within-budget tree exists, so the affordable shortest path tree
/// (which meets every bound down to the largest shortest distance) is
/// kept as a fallback candidate.
pub fn mp_budget(sg: &SolverGraph, budget: u64) -> Result<StoragePlan> {
    let min_plan = spanners::min_storage(sg)?;
    let min_cost = crate::plan::evaluate(&min_plan, sg, None)?.total_storage;
    if budget < min_cost {
        return Err(Error::InfeasibleBudget {
            budget,
            minimum: min_cost,
        });
    }
    let (spt, dist) = spanners::spt_with_distances(sg)?;
    let spt_cost = crate::plan::evaluate(&spt, sg, None)?.total_storage;
    let spt_affordable = spt_cost <= budget;
    let mut lo = dist.iter().copied().max().unwrap_or(0);
    let mut hi: u64 = sg
        .edges()
        .iter()
        .fold(0u64, |acc, &(_, _, w)| acc.saturating_add(w.recreation));
    let solve = |theta: u64| -> Result<Option<StoragePlan>> {
        match mp(sg, theta) {
            Ok(plan) => {
                if crate::plan::evaluate(&plan, sg, None)?.total_storage <= budget {
                    return Ok(Some(plan));
                }
                Ok(spt_affordable.then(|| spt.clone()))
            }
            Err(Error::InfeasibleBound { .. }) => Ok(spt_affordable.then(|| spt.clone())),
            Err(e) => Err(e),
        }
    };
    if solve(hi)?.is_none() {
        return Err(Error::InfeasibleBudget {
            budget,
            minimum: min_cost,
        });
    }
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if solve(mid)?.is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(solve(hi)?.expect("bound hi is feasible"))
}
