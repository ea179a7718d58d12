//! Ground-truth oracle: exhaustive optimization over all root-spanning
//! plans of a small instance. Used to benchmark every heuristic and to
//! cross-check the polynomial solvers.

use crate::error::{Error, Result};
use crate::graph::{SolverGraph, ROOT};
use crate::plan::StoragePlan;
use rayon::prelude::*;

/// Largest instance the enumerator accepts.
pub const MAX_ENUMERATION: usize = 9;

/// What to optimize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveKind {
    MinStorage,
    MinSumRecreation,
    MinMaxRecreation,
}

/// What to constrain, if anything.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    StorageBudget,
    SumRecreation,
    MaxRecreation,
}

/// An optimization objective with an optional bound on a different metric.
#[derive(Debug, Clone, Copy)]
pub struct Objective {
    pub kind: ObjectiveKind,
    pub constraint: Option<(ConstraintKind, u64)>,
}

impl Objective {
    pub fn new(kind: ObjectiveKind) -> Self {
        Objective {
            kind,
            constraint: None,
        }
    }

    pub fn with_constraint(kind: ObjectiveKind, ckind: ConstraintKind, bound: u64) -> Result<Self> {
        let clash = matches!(
            (kind, ckind),
            (ObjectiveKind::MinStorage, ConstraintKind::StorageBudget)
                | (
                    ObjectiveKind::MinSumRecreation,
                    ConstraintKind::SumRecreation
                )
                | (
                    ObjectiveKind::MinMaxRecreation,
                    ConstraintKind::MaxRecreation
                )
        );
        if clash {
            return Err(Error::InvalidInput(
                "objective and constraint must target different metrics".into(),
            ));
        }
        Ok(Objective {
            kind,
            constraint: Some((ckind, bound)),
        })
    }
}

/// Metrics of one candidate plan.
struct Metrics {
    storage: u64,
    sum_recreation: u64,
    max_recreation: u64,
}

impl Metrics {
    fn value(&self, kind: ObjectiveKind) -> u64 {
        match kind {
            ObjectiveKind::MinStorage => self.storage,
            ObjectiveKind::MinSumRecreation => self.sum_recreation,
            ObjectiveKind::MinMaxRecreation => self.max_recreation,
        }
    }

    fn satisfies(&self, constraint: Option<(ConstraintKind, u64)>) -> bool {
        match constraint {
            None => true,
            Some((ConstraintKind::StorageBudget, b)) => self.storage <= b,
            Some((ConstraintKind::SumRecreation, b)) => self.sum_recreation <= b,
            Some((ConstraintKind::MaxRecreation, b)) => self.max_recreation <= b,
        }
    }
}

/// Exhaustively finds the optimal plan for `obj` by enumerating all parent
/// vectors over revealed edges and filtering for validity. Ties resolve to
/// the lexicographically smallest parent vector, so the result is
/// deterministic even when the candidate space is searched in parallel.
pub fn enumerate_optimal(sg: &SolverGraph, obj: Objective) -> Result<(StoragePlan, u64)> {
    let n = sg.version_count();
    if n == 0 {
        return Err(Error::InvalidInput("no versions to plan".into()));
    }
    if n > MAX_ENUMERATION {
        return Err(Error::InstanceTooLarge {
            n,
            max: MAX_ENUMERATION,
        });
    }
    // Candidate parents per version, ascending: the root edge always exists.
    let candidates: Vec<Vec<usize>> = (1..=n)
        .map(|v| sg.in_edges(v).map(|(u, _)| u).collect())
        .collect();

    let first = &candidates[0];
    let best = first
        .par_iter()
        .map(|&p1| {
            let mut parents = vec![0usize; n];
            parents[0] = p1;
            let mut local_best: Option<(u64, Vec<usize>)> = None;
            let storage = sg.weight(p1, 1).expect("candidate edge").storage;
            search(
                sg,
                &candidates,
                &mut parents,
                1,
                storage,
                obj,
                &mut local_best,
            );
            local_best
        })
        .reduce(
            || None,
            |a, b| match (a, b) {
                (None, x) | (x, None) => x,
                (Some(a), Some(b)) => Some(if (a.0, &a.1) <= (b.0, &b.1) { a } else { b }),
            },
        );

    match best {
        Some((value, parents)) => Ok((StoragePlan::new(parents), value)),
        None => Err(Error::InfeasibleBound {
            bound: obj.constraint.map(|(_, b)| b).unwrap_or(0),
            version: None,
        }),
    }
}

fn search(
    sg: &SolverGraph,
    candidates: &[Vec<usize>],
    parents: &mut Vec<usize>,
    depth: usize,
    storage_so_far: u64,
    obj: Objective,
    best: &mut Option<(u64, Vec<usize>)>,
) {
    // Storage only grows as parents are assigned, so partial sums prune
    // exactly when minimizing or bounding storage. Strict comparisons
    // keep equal-value candidates alive for the lexicographic tie-break.
    if obj.kind == ObjectiveKind::MinStorage {
        if let Some((bv, _)) = best {
            if storage_so_far > *bv {
                return;
            }
        }
    }
    if let Some((ConstraintKind::StorageBudget, bound)) = obj.constraint {
        if storage_so_far > bound {
            return;
        }
    }
    if depth == candidates.len() {
        if let Some(metrics) = measure(sg, parents) {
            if metrics.satisfies(obj.constraint) {
                let value = metrics.value(obj.kind);
                let better = match best {
                    None => true,
                    Some((bv, bp)) => (value, parents.as_slice()) < (*bv, bp.as_slice()),
                };
                if better {
                    *best = Some((value, parents.clone()));
                }
            }
        }
        return;
    }
    for &p in &candidates[depth] {
        parents[depth] = p;
        let edge = sg.weight(p, depth + 1).expect("candidate edge").storage;
        search(
            sg,
            candidates,
            parents,
            depth + 1,
            storage_so_far + edge,
            obj,
            best,
        );
    }
}

/// Evaluates a parent vector, returning `None` when it is not a
/// root-spanning tree.
fn measure(sg: &SolverGraph, parents: &[usize]) -> Option<Metrics> {
    let n = parents.len();
    let mut recreation = vec![u64::MAX; n + 1];
    recreation[ROOT] = 0;
    let mut storage = 0u64;
    for v in 1..=n {
        if recreation[v] != u64::MAX {
            continue;
        }
        // Walk up until a resolved node; abort on cycles (walks longer than n).
        let mut chain = Vec::new();
        let mut cur = v;
        while recreation[cur] == u64::MAX {
            if parents[cur - 1] == cur || chain.len() > n {
                return None;
            }
            chain.push(cur);
            cur = parents[cur - 1];
        }
        for &node in chain.iter().rev() {
            let p = parents[node - 1];
            let w = sg.weight(p, node)?;
            recreation[node] = recreation[p] + w.recreation;
        }
    }
    let mut sum = 0u64;
    let mut max = 0u64;
    for v in 1..=n {
        storage += sg.weight(parents[v - 1], v)?.storage;
        sum += recreation[v];
        max = max.max(recreation[v]);
    }
    Some(Metrics {
        storage,
        sum_recreation: sum,
        max_recreation: max,
    })
}
