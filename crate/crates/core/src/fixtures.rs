//! Shared unit-test fixtures: small instances transcribed from worked
//! examples, used across solver modules.

use crate::graph::{build_solver_graph, CostMatrices, EdgeWeights, SolverGraph, VersionGraph};

fn w(s: u64, r: u64) -> EdgeWeights {
    EdgeWeights::new(s, r)
}

/// Five-version collection with branching and a merge. Diagonals are full
/// version costs; the revealed deltas include one computed off-graph entry
/// (3, 2). The all-materialized plan costs 49720; the single-root chain
/// plan {2<-1, 3<-1, 4<-2, 5<-2} costs 11450 with R_5 = 13550.
pub(crate) fn five_version_example() -> SolverGraph {
    let graph = VersionGraph::new(
        5,
        vec![(1, 2), (1, 3), (2, 4), (2, 5), (3, 5)],
        vec![
            w(10000, 10000),
            w(10100, 10100),
            w(9700, 9700),
            w(9800, 9800),
            w(10120, 10120),
        ],
    )
    .unwrap();
    let mut m = CostMatrices::new(true);
    m.insert(1, 1, w(10000, 10000));
    m.insert(2, 2, w(10100, 10100));
    m.insert(3, 3, w(9700, 9700));
    m.insert(4, 4, w(9800, 9800));
    m.insert(5, 5, w(10120, 10120));
    m.insert(1, 2, w(200, 3000));
    m.insert(1, 3, w(1000, 3000));
    m.insert(2, 4, w(50, 450));
    m.insert(2, 5, w(200, 550));
    m.insert(3, 5, w(800, 2500));
    m.insert(3, 2, w(1100, 3200));
    build_solver_graph(&graph, &m).unwrap()
}

/// Four-version undirected instance with equal storage and recreation
/// weights. Its spanning tree {2<-0, 1<-2, 3<-1, 4<-1} costs 10; balancing
/// with stretch factor 2 re-roots 3, relaxes 1 down to distance 5 over the
/// return edge, and keeps total storage at 10.
pub(crate) fn balance_example() -> SolverGraph {
    let graph = VersionGraph::new(4, vec![], vec![w(5, 5), w(3, 3), w(3, 3), w(4, 4)]).unwrap();
    let mut m = CostMatrices::new(false);
    m.insert(1, 1, w(5, 5));
    m.insert(2, 2, w(3, 3));
    m.insert(3, 3, w(3, 3));
    m.insert(4, 4, w(4, 4));
    m.insert(1, 2, w(3, 3));
    m.insert(1, 3, w(2, 2));
    m.insert(1, 4, w(2, 2));
    build_solver_graph(&graph, &m).unwrap()
}

/// Three-version directed instance for the threshold-bounded Prim growth:
/// with bound 6, version 2 first joins through (1, 2) at recreation 6,
/// the edge (1, 3) is rejected because 3 + 4 exceeds 6, and dequeuing 3
/// later improves version 2's marginal storage to 1 at recreation 6.
pub(crate) fn prim_example() -> SolverGraph {
    let graph = VersionGraph::new(3, vec![], vec![w(3, 3), w(5, 5), w(4, 4)]).unwrap();
    let mut m = CostMatrices::new(true);
    m.insert(1, 1, w(3, 3));
    m.insert(2, 2, w(5, 5));
    m.insert(3, 3, w(4, 4));
    m.insert(1, 2, w(2, 3));
    m.insert(1, 3, w(2, 4));
    m.insert(3, 2, w(1, 2));
    build_solver_graph(&graph, &m).unwrap()
}
