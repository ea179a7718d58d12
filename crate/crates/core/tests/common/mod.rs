//! Shared helpers for the integration suites: seeded random instances,
//! worked-example fixtures in the interchange format, and independent
//! oracles kept deliberately separate from the library's solver paths.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::Path;
use verstore::formats;
use verstore::{CostMatrices, EdgeWeights, SolverGraph, StoragePlan};

/// The five-version worked example in matrix interchange form: diagonals
/// are full version costs, off-diagonals the revealed deltas, including
/// one explicitly computed entry (3, 2).
pub const FIVE_VERSION_MATRIX: &str = "directed\n\
1\t1\t10000\t10000\n\
2\t2\t10100\t10100\n\
3\t3\t9700\t9700\n\
4\t4\t9800\t9800\n\
5\t5\t10120\t10120\n\
1\t2\t200\t3000\n\
1\t3\t1000\t3000\n\
2\t4\t50\t450\n\
2\t5\t200\t550\n\
3\t5\t800\t2500\n\
3\t2\t1100\t3200\n";

/// The four-version balance example: undirected, storage equals
/// recreation on every entry.
pub const BALANCE_MATRIX: &str = "undirected\n\
1\t1\t5\t5\n\
2\t2\t3\t3\n\
3\t3\t3\t3\n\
4\t4\t4\t4\n\
1\t2\t3\t3\n\
1\t3\t2\t2\n\
1\t4\t2\t2\n";

pub fn five_version_graph() -> SolverGraph {
    let matrices = formats::parse_matrices(FIVE_VERSION_MATRIX, Path::new("five_version")).unwrap();
    verstore::solver_graph_from_matrices(&matrices).unwrap()
}

pub fn balance_graph() -> SolverGraph {
    let matrices = formats::parse_matrices(BALANCE_MATRIX, Path::new("balance")).unwrap();
    verstore::solver_graph_from_matrices(&matrices).unwrap()
}

/// Shape of a random instance.
#[derive(Clone, Copy)]
pub struct InstanceShape {
    pub n: usize,
    pub directed: bool,
    /// Probability that an off-diagonal pair is revealed.
    pub density: f64,
    /// Recreation weights drawn independently of storage weights.
    pub decoupled_recreation: bool,
}

/// Seeded random matrices: diagonals in 500..2000, revealed deltas in
/// 10..800 (recreation equal to storage unless decoupled).
pub fn random_matrices(shape: InstanceShape, seed: u64) -> CostMatrices {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = CostMatrices::new(shape.directed);
    for v in 1..=shape.n {
        let full = rng.gen_range(500..2000u64);
        m.insert(v, v, EdgeWeights::new(full, full));
    }
    for i in 1..=shape.n {
        for j in 1..=shape.n {
            if i == j || (!shape.directed && i > j) {
                continue;
            }
            if rng.gen_bool(shape.density) {
                let storage = rng.gen_range(10..800u64);
                let recreation = if shape.decoupled_recreation {
                    rng.gen_range(10..800u64)
                } else {
                    storage
                };
                m.insert(i, j, EdgeWeights::new(storage, recreation));
            }
        }
    }
    m
}

pub fn random_graph(shape: InstanceShape, seed: u64) -> SolverGraph {
    verstore::solver_graph_from_matrices(&random_matrices(shape, seed)).unwrap()
}

/// Independent single-source shortest distances over recreation weights:
/// Bellman-Ford, sharing nothing with the library's heap-based solver.
pub fn bellman_ford_distances(sg: &SolverGraph) -> Vec<u64> {
    let nodes = sg.node_count();
    let mut dist = vec![u64::MAX; nodes];
    dist[0] = 0;
    for _ in 0..nodes {
        let mut changed = false;
        for &(u, v, w) in sg.edges() {
            if dist[u] != u64::MAX && dist[u] + w.recreation < dist[v] {
                dist[v] = dist[u] + w.recreation;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    dist
}

/// Independent validity check: a plan is valid iff every version reaches
/// the root without revisiting a node and every parent edge is revealed.
pub fn independently_valid(plan: &StoragePlan, sg: &SolverGraph) -> bool {
    let n = sg.version_count();
    if plan.version_count() != n {
        return false;
    }
    for (v, p) in plan.iter() {
        if p == v || p > n || sg.weight(p, v).is_none() {
            return false;
        }
    }
    for start in 1..=n {
        let mut seen = vec![false; n + 1];
        let mut cur = start;
        while cur != 0 {
            if seen[cur] {
                return false;
            }
            seen[cur] = true;
            cur = plan.parent(cur);
        }
    }
    true
}

/// Total storage summed directly off the parent edges, bypassing
/// `evaluate`.
pub fn independent_storage_sum(plan: &StoragePlan, sg: &SolverGraph) -> u64 {
    plan.iter()
        .map(|(v, p)| sg.weight(p, v).unwrap().storage)
        .sum()
}

/// Per-version recreation computed by naive repeated chain walks.
pub fn independent_recreation(plan: &StoragePlan, sg: &SolverGraph) -> Vec<u64> {
    (1..=sg.version_count())
        .map(|v| {
            let mut total = 0u64;
            let mut cur = v;
            while cur != 0 {
                let p = plan.parent(cur);
                total += sg.weight(p, cur).unwrap().recreation;
                cur = p;
            }
            total
        })
        .collect()
}
