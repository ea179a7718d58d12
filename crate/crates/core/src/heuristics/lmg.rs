//! Local-move greedy: trades storage budget for recreation-cost reduction.
//!
//! Starting from a minimum-storage plan, repeatedly steals the shortest
//! path tree edge that buys the largest reduction in (optionally
//! workload-weighted) total recreation cost per byte of extra storage,
//! until no affordable move improves the objective.

use crate::error::{Error, Result};
use crate::graph::{SolverGraph, ROOT};
use crate::plan::{evaluate, StoragePlan, WorkloadProfile};

/// One shortest-path-tree edge not present in the working tree. Each can
/// be applied at most once; its storage increase is fixed because a node's
/// parent changes only when its own candidate is taken.
struct Candidate {
    from: usize,
    to: usize,
    recreation: u64,
    /// Storage increase of the swap; negative only for non-minimal bases.
    storage_increase: i128,
    used: bool,
}

struct TreeState {
    parent: Vec<usize>,
    children: Vec<Vec<usize>>,
    /// Recreation distance from the root in the working tree.
    dist: Vec<u64>,
    /// Workload mass (or node count) of each subtree, self included.
    mass: Vec<u64>,
    storage: u64,
    /// Euler tour stamps, rebuilt each round for O(1) subtree tests.
    tin: Vec<usize>,
    tout: Vec<usize>,
}

impl TreeState {
    fn init(
        sg: &SolverGraph,
        base: &StoragePlan,
        workload: Option<&WorkloadProfile>,
    ) -> Result<Self> {
        let n = sg.version_count();
        let report = evaluate(base, sg, workload)?;
        let mut children = vec![Vec::new(); n + 1];
        let mut parent = vec![ROOT; n + 1];
        for (v, p) in base.iter() {
            parent[v] = p;
            children[p].push(v);
        }
        let mut dist = vec![0u64; n + 1];
        dist[1..].copy_from_slice(&report.recreation);
        let mut state = TreeState {
            parent,
            children,
            dist,
            mass: vec![0; n + 1],
            storage: report.total_storage,
            tin: vec![0; n + 1],
            tout: vec![0; n + 1],
        };
        // Subtree masses, leaves first.
        for v in state.postorder() {
            let own = match workload {
                Some(w) if v != ROOT => w.freq(v),
                _ => u64::from(v != ROOT),
            };
            state.mass[v] = own
                + state.children[v]
                    .iter()
                    .map(|&c| state.mass[c])
                    .sum::<u64>();
        }
        state.restamp();
        Ok(state)
    }

    fn postorder(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.parent.len());
        let mut stack = vec![ROOT];
        while let Some(v) = stack.pop() {
            order.push(v);
            stack.extend(self.children[v].iter().copied());
        }
        order.reverse();
        order
    }

    fn restamp(&mut self) {
        let mut clock = 0;
        let mut stack = vec![(ROOT, false)];
        while let Some((v, exiting)) = stack.pop() {
            if exiting {
                self.tout[v] = clock;
                continue;
            }
            clock += 1;
            self.tin[v] = clock;
            stack.push((v, true));
            for &c in self.children[v].iter().rev() {
                stack.push((c, false));
            }
        }
    }

    fn in_subtree_of(&self, node: usize, root: usize) -> bool {
        self.tin[root] <= self.tin[node] && self.tout[node] <= self.tout[root]
    }

    fn apply(&mut self, c: &Candidate) {
        let v = c.to;
        let old_parent = self.parent[v];
        let shift_from = self.dist[v];
        let shift_to = self.dist[c.from] + c.recreation;
        let delta_mass = self.mass[v];

        let pos = self.children[old_parent]
            .iter()
            .position(|&x| x == v)
            .unwrap();
        self.children[old_parent].remove(pos);
        self.children[c.from].push(v);
        self.children[c.from].sort_unstable();
        self.parent[v] = c.from;

        let mut up = old_parent;
        loop {
            self.mass[up] -= delta_mass;
            if up == ROOT {
                break;
            }
            up = self.parent[up];
        }
        let mut up = c.from;
        loop {
            self.mass[up] += delta_mass;
            if up == ROOT {
                break;
            }
            up = self.parent[up];
        }

        // Every node under v shifts by the same amount.
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            self.dist[x] = self.dist[x] - shift_from + shift_to;
            stack.extend(self.children[x].iter().copied());
        }
        self.storage = (i128::from(self.storage) + c.storage_increase) as u64;
    }
}

/// How good a move is; larger is better. Free moves (no storage increase,
/// positive recreation reduction) outrank every priced one and order among
/// themselves by reduction; priced moves order by reduction per byte.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Gain {
    Free { reduction: u128 },
    Priced { reduction: u128, increase: u128 },
}

fn better(a: (Gain, usize, usize), b: (Gain, usize, usize)) -> bool {
    let (ga, au, av) = a;
    let (gb, bu, bv) = b;
    let ord = match (ga, gb) {
        (Gain::Free { reduction: ra }, Gain::Free { reduction: rb }) => ra.cmp(&rb),
        (Gain::Free { .. }, Gain::Priced { .. }) => std::cmp::Ordering::Greater,
        (Gain::Priced { .. }, Gain::Free { .. }) => std::cmp::Ordering::Less,
        (
            Gain::Priced {
                reduction: ra,
                increase: ia,
            },
            Gain::Priced {
                reduction: rb,
                increase: ib,
            },
        ) => (ra * ib).cmp(&(rb * ia)),
    };
    // Higher gain wins; ties prefer the lexicographically smaller edge.
    ord.then_with(|| (bu, bv).cmp(&(au, av))) == std::cmp::Ordering::Greater
}

/// Computes the gain of applying `c` now, or `None` when the move is
/// inapplicable this round: not affordable, cycle-forming, or without
/// recreation benefit.
fn gain_of(state: &TreeState, c: &Candidate, budget: u64) -> Option<Gain> {
    if c.used {
        return None;
    }
    let new_storage = i128::from(state.storage) + c.storage_increase;
    if new_storage > i128::from(budget) {
        return None;
    }
    // Re-parenting below one's own descendant would disconnect the tree.
    if state.in_subtree_of(c.from, c.to) {
        return None;
    }
    let new_dist = state.dist[c.from] + c.recreation;
    if new_dist >= state.dist[c.to] {
        return None;
    }
    let reduction = u128::from(state.mass[c.to]) * u128::from(state.dist[c.to] - new_dist);
    if reduction == 0 {
        return None;
    }
    Some(if c.storage_increase <= 0 {
        Gain::Free { reduction }
    } else {
        Gain::Priced {
            reduction,
            increase: c.storage_increase as u128,
        }
    })
}

/// Greedy local moves from `base` toward `spt` under storage budget.
///
/// Per round the best applicable move is taken; an unaffordable best move
/// is skipped in favor of the next one rather than ending the run. The
/// result always satisfies `C <= budget`. When the shortest path tree is
/// itself affordable and beats the greedy tree on the target aggregate
/// (its total recreation is the optimum), it is returned instead: a
/// sequence of expensive early moves can otherwise strand the budget
/// short of moves the final tree no longer pays for.
pub fn lmg(
    sg: &SolverGraph,
    base: &StoragePlan,
    spt: &StoragePlan,
    budget: u64,
    workload: Option<&WorkloadProfile>,
) -> Result<StoragePlan> {
    let mut state = TreeState::init(sg, base, workload)?;
    if state.storage > budget {
        return Err(Error::InfeasibleBudget {
            budget,
            minimum: state.storage,
        });
    }
    let mut candidates = Vec::new();
    for (v, u) in spt.iter() {
        if state.parent[v] == u {
            continue;
        }
        let new_edge = sg.weight(u, v).ok_or_else(|| {
            Error::InvalidInput(format!("shortest path edge ({u}, {v}) not revealed"))
        })?;
        let old_edge = sg.weight(state.parent[v], v).expect("base validated");
        candidates.push(Candidate {
            from: u,
            to: v,
            recreation: new_edge.recreation,
            storage_increase: i128::from(new_edge.storage) - i128::from(old_edge.storage),
            used: false,
        });
    }

    loop {
        state.restamp();
        let mut best: Option<((Gain, usize, usize), usize)> = None;
        for (idx, c) in candidates.iter().enumerate() {
            if let Some(gain) = gain_of(&state, c, budget) {
                let key = (gain, c.from, c.to);
                if best.is_none() || better(key, best.unwrap().0) {
                    best = Some((key, idx));
                }
            }
        }
        let Some((_, idx)) = best else { break };
        state.apply(&candidates[idx]);
        candidates[idx].used = true;
    }
    let greedy = StoragePlan::new(state.parent[1..].to_vec());

    let spt_report = evaluate(spt, sg, workload)?;
    if spt_report.total_storage > budget {
        return Ok(greedy);
    }
    let aggregate = |report: &crate::plan::CostReport| -> u128 {
        report
            .weighted_sum
            .unwrap_or(u128::from(report.sum_recreation))
    };
    let greedy_report = evaluate(&greedy, sg, workload)?;
    if aggregate(&greedy_report) > aggregate(&spt_report) {
        return Ok(spt.clone());
    }
    Ok(greedy)
}

/// Smallest-storage plan whose (weighted) total recreation cost meets the
/// bound: binary search on the budget fed to the greedy above, between the
/// base cost and the shortest-path-tree cost.
pub fn lmg_min_storage(
    sg: &SolverGraph,
    base: &StoragePlan,
    spt: &StoragePlan,
    theta_sum: u64,
    workload: Option<&WorkloadProfile>,
) -> Result<StoragePlan> {
    let aggregate = |plan: &StoragePlan| -> Result<u128> {
        let report = evaluate(plan, sg, workload)?;
        Ok(match report.weighted_sum {
            Some(ws) => ws,
            None => u128::from(report.sum_recreation),
        })
    };
    let spt_report = evaluate(spt, sg, workload)?;
    let spt_aggregate = match spt_report.weighted_sum {
        Some(ws) => ws,
        None => u128::from(spt_report.sum_recreation),
    };
    if u128::from(theta_sum) < spt_aggregate {
        return Err(Error::InfeasibleBound {
            bound: theta_sum,
            version: None,
        });
    }
    let base_cost = evaluate(base, sg, workload)?.total_storage;
    let mut lo = base_cost;
    let mut hi = spt_report.total_storage.max(base_cost);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        let plan = lmg(sg, base, spt, mid, workload)?;
        if aggregate(&plan)? <= u128::from(theta_sum) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lmg(sg, base, spt, hi, workload)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_solver_graph, CostMatrices, EdgeWeights, VersionGraph};
    use crate::spanners;

    fn w(s: u64, r: u64) -> EdgeWeights {
        EdgeWeights::new(s, r)
    }

    /// Seven-node tree mirroring the local-move illustration: versions 5
    /// and 6 sit below version 4, so pulling 4 onto a root edge improves
    /// three versions at once.
    fn move_example() -> (SolverGraph, StoragePlan) {
        let graph = VersionGraph::new(6, vec![], vec![w(1, 1); 6]).unwrap();
        let mut m = CostMatrices::new(true);
        m.insert(1, 1, w(100, 1000));
        m.insert(2, 2, w(500, 5000));
        m.insert(3, 3, w(500, 5000));
        m.insert(4, 4, w(400, 900));
        m.insert(5, 5, w(500, 5000));
        m.insert(6, 6, w(500, 5000));
        m.insert(1, 2, w(10, 100));
        m.insert(1, 3, w(10, 100));
        m.insert(1, 4, w(20, 700));
        m.insert(4, 5, w(10, 100));
        m.insert(4, 6, w(10, 100));
        let sg = build_solver_graph(&graph, &m).unwrap();
        let base = StoragePlan::new(vec![0, 1, 1, 1, 4, 4]);
        (sg, base)
    }

    #[test]
    fn gain_counts_whole_subtree() {
        let (sg, base) = move_example();
        let state = TreeState::init(&sg, &base, None).unwrap();
        let c = Candidate {
            from: 0,
            to: 4,
            recreation: 900,
            storage_increase: 400 - 20,
            used: false,
        };
        let gain = gain_of(&state, &c, u64::MAX).unwrap();
        // Numerator is three times the single-node change: the subtree
        // {4, 5, 6} shifts together by (1000 + 700) - 900.
        let expected = 3 * (1000 + 700 - 900) as u128;
        assert_eq!(
            gain,
            Gain::Priced {
                reduction: expected,
                increase: 380
            }
        );
    }

    #[test]
    fn budget_equal_to_base_returns_base() {
        let (sg, base) = move_example();
        let spt = spanners::spt(&sg).unwrap();
        let base_cost = evaluate(&base, &sg, None).unwrap().total_storage;
        let plan = lmg(&sg, &base, &spt, base_cost, None).unwrap();
        assert_eq!(plan, base);
    }

    #[test]
    fn infeasible_budget_is_rejected() {
        let (sg, base) = move_example();
        let spt = spanners::spt(&sg).unwrap();
        let base_cost = evaluate(&base, &sg, None).unwrap().total_storage;
        let err = lmg(&sg, &base, &spt, base_cost - 1, None).unwrap_err();
        assert!(matches!(err, Error::InfeasibleBudget { .. }));
    }

    #[test]
    fn unbounded_budget_reaches_shortest_path_sums() {
        let (sg, base) = move_example();
        let spt = spanners::spt(&sg).unwrap();
        let spt_report = evaluate(&spt, &sg, None).unwrap();
        let plan = lmg(&sg, &base, &spt, u64::MAX, None).unwrap();
        let report = evaluate(&plan, &sg, None).unwrap();
        assert_eq!(report.sum_recreation, spt_report.sum_recreation);
    }

    #[test]
    fn sum_recreation_never_increases_with_budget() {
        let (sg, base) = move_example();
        let spt = spanners::spt(&sg).unwrap();
        let base_cost = evaluate(&base, &sg, None).unwrap().total_storage;
        let mut last_sum = u64::MAX;
        for budget in [
            base_cost,
            base_cost + 200,
            base_cost + 400,
            base_cost + 2000,
        ] {
            let plan = lmg(&sg, &base, &spt, budget, None).unwrap();
            let report = evaluate(&plan, &sg, None).unwrap();
            assert!(report.total_storage <= budget);
            assert!(report.sum_recreation <= last_sum);
            last_sum = report.sum_recreation;
        }
    }

    #[test]
    fn workload_scaling_leaves_choices_unchanged() {
        let (sg, base) = move_example();
        let spt = spanners::spt(&sg).unwrap();
        let freq = vec![5, 1, 4, 2, 9, 1];
        let scaled: Vec<u64> = freq.iter().map(|f| f * 7).collect();
        let budget = evaluate(&base, &sg, None).unwrap().total_storage + 390;
        let a = lmg(
            &sg,
            &base,
            &spt,
            budget,
            Some(&WorkloadProfile::new(freq).unwrap()),
        )
        .unwrap();
        let b = lmg(
            &sg,
            &base,
            &spt,
            budget,
            Some(&WorkloadProfile::new(scaled).unwrap()),
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn min_storage_search_meets_bound() {
        let (sg, base) = move_example();
        let spt = spanners::spt(&sg).unwrap();
        let spt_sum = evaluate(&spt, &sg, None).unwrap().sum_recreation;
        let plan = lmg_min_storage(&sg, &base, &spt, spt_sum + 5000, None).unwrap();
        let report = evaluate(&plan, &sg, None).unwrap();
        assert!(report.sum_recreation <= spt_sum + 5000);
        // Unconstrained bound keeps the base plan's storage.
        let base_cost = evaluate(&base, &sg, None).unwrap().total_storage;
        let loose = lmg_min_storage(&sg, &base, &spt, u64::MAX, None).unwrap();
        assert_eq!(
            evaluate(&loose, &sg, None).unwrap().total_storage,
            base_cost
        );
    }
}
