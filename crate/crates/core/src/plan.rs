//! Storage plans, their validation, and cost evaluation.

use crate::error::{Error, Result};
use crate::graph::{SolverGraph, VersionId, ROOT};

/// A storage plan: for every version, either its delta parent or `0` for
/// "store this version whole". A valid plan is a spanning tree rooted at
/// the synthetic root — every version reaches the root by following
/// parents, and every parent edge is revealed in the solver graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoragePlan {
    /// `parent[i - 1]` is the parent of version `i`.
    parent: Vec<VersionId>,
}

impl StoragePlan {
    pub fn new(parent: Vec<VersionId>) -> Self {
        StoragePlan { parent }
    }

    /// The all-materialized plan: every version hangs off the root.
    pub fn all_materialized(n: usize) -> Self {
        StoragePlan {
            parent: vec![ROOT; n],
        }
    }

    pub fn version_count(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, version: VersionId) -> VersionId {
        self.parent[version - 1]
    }

    pub fn set_parent(&mut self, version: VersionId, parent: VersionId) {
        self.parent[version - 1] = parent;
    }

    /// `(version, parent)` pairs in ascending version order.
    pub fn iter(&self) -> impl Iterator<Item = (VersionId, VersionId)> + '_ {
        self.parent.iter().enumerate().map(|(i, &p)| (i + 1, p))
    }

    pub fn parents(&self) -> &[VersionId] {
        &self.parent
    }
}

/// A structural problem that makes a plan unusable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Version count differs from the solver graph's.
    WrongSize { plan: usize, graph: usize },
    /// A version names itself or an out-of-range node as parent.
    BadParent {
        version: VersionId,
        parent: VersionId,
    },
    /// Following parents from this version never reaches the root.
    Unreachable { version: VersionId },
    /// This version sits on a parent cycle.
    Cycle { version: VersionId },
    /// The parent edge is not revealed in the solver graph.
    EdgeNotRevealed {
        version: VersionId,
        parent: VersionId,
    },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::WrongSize { plan, graph } => {
                write!(f, "plan covers {plan} versions, graph has {graph}")
            }
            Violation::BadParent { version, parent } => {
                write!(f, "version {version} has invalid parent {parent}")
            }
            Violation::Unreachable { version } => {
                write!(f, "version {version} cannot reach the root")
            }
            Violation::Cycle { version } => {
                write!(f, "version {version} is on a parent cycle")
            }
            Violation::EdgeNotRevealed { version, parent } => {
                write!(f, "edge ({parent}, {version}) not revealed")
            }
        }
    }
}

/// Access frequencies per version; weights are raw counts and need not be
/// normalized. At least one weight must be positive.
#[derive(Debug, Clone)]
pub struct WorkloadProfile {
    freq: Vec<u64>,
}

impl WorkloadProfile {
    pub fn new(freq: Vec<u64>) -> Result<Self> {
        if freq.iter().all(|&f| f == 0) {
            return Err(Error::InvalidInput(
                "workload must have at least one positive weight".into(),
            ));
        }
        Ok(WorkloadProfile { freq })
    }

    pub fn version_count(&self) -> usize {
        self.freq.len()
    }

    pub fn freq(&self, version: VersionId) -> u64 {
        self.freq[version - 1]
    }
}

/// Evaluated costs of a plan: total storage, per-version recreation, and
/// the aggregates the problem formulations constrain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostReport {
    pub total_storage: u64,
    /// `recreation[i - 1]` is the recreation cost of version `i`.
    pub recreation: Vec<u64>,
    pub sum_recreation: u64,
    pub max_recreation: u64,
    /// Populated when a workload is supplied: sum of `freq_i * R_i`.
    pub weighted_sum: Option<u128>,
}

impl CostReport {
    pub fn recreation_of(&self, version: VersionId) -> u64 {
        self.recreation[version - 1]
    }
}

/// Checks that `plan` is a root-spanning tree over revealed edges.
/// All violations are reported, not just the first.
pub fn validate_plan(plan: &StoragePlan, sg: &SolverGraph) -> Vec<Violation> {
    let n = sg.version_count();
    let mut violations = Vec::new();
    if plan.version_count() != n {
        violations.push(Violation::WrongSize {
            plan: plan.version_count(),
            graph: n,
        });
        return violations;
    }

    for (v, p) in plan.iter() {
        if p == v || p > n {
            violations.push(Violation::BadParent {
                version: v,
                parent: p,
            });
        } else if sg.weight(p, v).is_none() {
            violations.push(Violation::EdgeNotRevealed {
                version: v,
                parent: p,
            });
        }
    }

    // Walk parent chains with three-state marking; versions that re-enter
    // their own in-progress chain are on a cycle, everything else that
    // fails to reach the root is reported unreachable.
    const UNSEEN: u8 = 0;
    const ON_PATH: u8 = 1;
    const REACHES: u8 = 2;
    const DEAD: u8 = 3;
    let mut state = vec![UNSEEN; n + 1];
    state[ROOT] = REACHES;
    for start in 1..=n {
        if state[start] != UNSEEN {
            continue;
        }
        let mut path = Vec::new();
        let mut cur = start;
        let verdict = loop {
            if cur != ROOT && (plan.parent(cur) == cur || plan.parent(cur) > n) {
                break DEAD;
            }
            match state[cur] {
                UNSEEN => {
                    state[cur] = ON_PATH;
                    path.push(cur);
                    cur = plan.parent(cur);
                }
                ON_PATH => break DEAD, // closed a cycle within this walk
                REACHES => break REACHES,
                _ => break DEAD,
            }
        };
        let cycle_entry = (verdict == DEAD && state[cur] == ON_PATH).then_some(cur);
        let mut in_cycle = false;
        for &v in &path {
            state[v] = verdict;
            if Some(v) == cycle_entry {
                in_cycle = true;
            }
            if verdict == DEAD {
                if in_cycle {
                    violations.push(Violation::Cycle { version: v });
                } else {
                    violations.push(Violation::Unreachable { version: v });
                }
            }
        }
    }
    violations.sort_by_key(|v| match *v {
        Violation::WrongSize { .. } => (0, 0),
        Violation::BadParent { version, .. } => (1, version),
        Violation::EdgeNotRevealed { version, .. } => (2, version),
        Violation::Cycle { version } => (3, version),
        Violation::Unreachable { version } => (4, version),
    });
    violations
}

/// Evaluates a valid plan: total storage is the sum of parent-edge storage
/// weights, and each version's recreation cost is the sum of recreation
/// weights along its root path.
pub fn evaluate(
    plan: &StoragePlan,
    sg: &SolverGraph,
    workload: Option<&WorkloadProfile>,
) -> Result<CostReport> {
    let violations = validate_plan(plan, sg);
    if !violations.is_empty() {
        return Err(Error::InvalidPlan(violations));
    }
    if let Some(w) = workload {
        if w.version_count() != sg.version_count() {
            return Err(Error::InvalidInput(format!(
                "workload covers {} versions, graph has {}",
                w.version_count(),
                sg.version_count()
            )));
        }
    }
    let n = sg.version_count();
    let mut total_storage = 0u64;
    let mut recreation = vec![0u64; n + 1];
    let mut resolved = vec![false; n + 1];
    resolved[ROOT] = true;
    for v in 1..=n {
        // Resolve the unresolved prefix of v's root path, then fill back down.
        let mut chain = Vec::new();
        let mut cur = v;
        while !resolved[cur] {
            chain.push(cur);
            cur = plan.parent(cur);
        }
        for &node in chain.iter().rev() {
            let p = plan.parent(node);
            let w = sg.weight(p, node).expect("validated edge");
            recreation[node] = recreation[p] + w.recreation;
            resolved[node] = true;
        }
    }
    for (v, p) in plan.iter() {
        total_storage += sg.weight(p, v).expect("validated edge").storage;
    }
    let recreation: Vec<u64> = recreation[1..].to_vec();
    let sum_recreation = recreation.iter().sum();
    let max_recreation = recreation.iter().copied().max().unwrap_or(0);
    let weighted_sum = workload.map(|w| {
        recreation
            .iter()
            .enumerate()
            .map(|(i, &r)| u128::from(w.freq(i + 1)) * u128::from(r))
            .sum()
    });
    Ok(CostReport {
        total_storage,
        recreation,
        sum_recreation,
        max_recreation,
        weighted_sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_solver_graph, CostMatrices, EdgeWeights, VersionGraph};

    use crate::fixtures::five_version_example as worked_example;

    fn w(s: u64, r: u64) -> EdgeWeights {
        EdgeWeights::new(s, r)
    }

    #[test]
    fn worked_example_solver_graph_edges() {
        let sg = worked_example();
        assert_eq!(sg.weight(0, 1), Some(w(10000, 10000)));
        assert_eq!(sg.weight(3, 5), Some(w(800, 2500)));
        assert_eq!(sg.weight(5, 3), None);
    }

    #[test]
    fn all_materialized_cost_matches_example() {
        let sg = worked_example();
        let plan = StoragePlan::all_materialized(5);
        let report = evaluate(&plan, &sg, None).unwrap();
        assert_eq!(report.total_storage, 49720);
        assert_eq!(report.max_recreation, 10120);
    }

    #[test]
    fn single_root_chain_costs_match_example() {
        let sg = worked_example();
        let plan = StoragePlan::new(vec![0, 1, 1, 2, 2]);
        assert!(validate_plan(&plan, &sg).is_empty());
        let report = evaluate(&plan, &sg, None).unwrap();
        assert_eq!(report.total_storage, 11450);
        assert_eq!(report.recreation_of(5), 13550);
    }

    #[test]
    fn two_cycle_is_reported_as_cycle() {
        let sg = worked_example();
        let mut plan = StoragePlan::all_materialized(5);
        plan.set_parent(1, 2);
        plan.set_parent(2, 1);
        let violations = validate_plan(&plan, &sg);
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::Cycle { version: 1 })));
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::Cycle { version: 2 })));
    }

    #[test]
    fn unrevealed_parent_edge_is_reported() {
        let sg = worked_example();
        let mut plan = StoragePlan::all_materialized(5);
        plan.set_parent(2, 4);
        let violations = validate_plan(&plan, &sg);
        assert_eq!(
            violations,
            vec![Violation::EdgeNotRevealed {
                version: 2,
                parent: 4
            }]
        );
    }

    #[test]
    fn node_hanging_off_cycle_is_unreachable() {
        let sg = worked_example();
        // 2 and 3 would need a mutual edge for a cycle; use 1 <-> 2 and hang 4 off 2.
        let mut plan = StoragePlan::all_materialized(5);
        plan.set_parent(1, 2);
        plan.set_parent(2, 1);
        plan.set_parent(4, 2);
        let violations = validate_plan(&plan, &sg);
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::Unreachable { version: 4 })));
    }

    #[test]
    fn single_materialized_version() {
        let graph = VersionGraph::new(1, vec![], vec![w(7, 9)]).unwrap();
        let mut m = CostMatrices::new(true);
        m.insert(1, 1, w(7, 9));
        let sg = build_solver_graph(&graph, &m).unwrap();
        let report = evaluate(&StoragePlan::all_materialized(1), &sg, None).unwrap();
        assert_eq!(report.total_storage, 7);
        assert_eq!(report.recreation_of(1), 9);
    }

    #[test]
    fn all_zero_workload_is_rejected() {
        assert!(WorkloadProfile::new(vec![0, 0, 0]).is_err());
        assert!(WorkloadProfile::new(vec![0, 1, 0]).is_ok());
    }

    #[test]
    fn weighted_sum_uses_raw_counts() {
        let sg = worked_example();
        let plan = StoragePlan::new(vec![0, 1, 1, 2, 2]);
        let workload = WorkloadProfile::new(vec![1, 0, 0, 0, 2]).unwrap();
        let report = evaluate(&plan, &sg, Some(&workload)).unwrap();
        assert_eq!(report.weighted_sum, Some(10000 + 2 * 13550));
    }
}
