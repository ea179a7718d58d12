//! Storage planning for collections of dataset versions.
//!
//! Given a set of versions and the (possibly incomplete) pairwise costs of
//! storing one version as a delta of another, this crate decides which
//! versions to materialize and which to keep as deltas, trading total
//! storage against per-version recreation cost. It ships:
//!
//! - exact solvers for the two extremes: minimum storage (spanning tree /
//!   arborescence) and minimum recreation (shortest path tree);
//! - heuristics for the constrained trade-offs: a local-move greedy, a
//!   modified Prim growth, a shallow-light tree balancer, and a
//!   git-repack-style window heuristic;
//! - a brute-force enumerator and an ILP exporter for ground truth on
//!   small instances;
//! - a line-based delta engine and matrix population over file corpora;
//! - a synthetic corpus generator and Zipfian workload synthesis;
//! - a local delta-encoded repository that makes plans executable
//!   (commit / plan / checkout / stats).

pub mod delta;
pub mod error;
pub mod exact;
#[cfg(test)]
pub(crate) mod fixtures;
pub mod formats;
pub mod genlab;
pub mod graph;
pub mod heuristics;
pub mod ilp;
pub mod plan;
pub mod spanners;
pub mod store;

pub use error::{Error, ExitClass, Result};
pub use graph::{
    build_solver_graph, check_triangle, solver_graph_from_matrices, CostMatrices, EdgeWeights,
    SolverGraph, TriangleViolation, VersionGraph, VersionId, ROOT,
};
pub use plan::{evaluate, validate_plan, CostReport, StoragePlan, Violation, WorkloadProfile};
