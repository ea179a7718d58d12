//! Heuristic solvers for the four NP-hard trade-off problems: bounded
//! storage with minimal total recreation (local-move greedy), bounded
//! recreation with minimal storage (threshold Prim and its budget dual),
//! the shallow-light tree balancer, and the repack window heuristic.

mod gith;
mod last;
mod lmg;
mod mp;

pub use gith::{
    gith, name_hash, CorpusDeltaSource, DeltaSource, GitHConfig, GitHOrdering, GithVersion,
};
pub use last::{last, Stretch};
pub use lmg::{lmg, lmg_min_storage};
pub use mp::{mp, mp_budget};
