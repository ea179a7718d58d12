//! Repack-style heuristic: processes versions in a size-derived order,
//! keeping a sliding window of recent versions as delta-base candidates
//! and biasing base choice toward shallow delta chains.

use crate::error::{Error, Result};
use crate::graph::{CostMatrices, VersionId, ROOT};
use crate::plan::StoragePlan;

/// Window and depth parameters.
#[derive(Debug, Clone)]
pub struct GitHConfig {
    /// Sliding-window size; candidates come only from the window.
    pub window: usize,
    /// Maximum delta-chain depth; a version at this depth is never a base.
    pub max_depth: usize,
    pub ordering: GitHOrdering,
}

impl Default for GitHConfig {
    fn default() -> Self {
        GitHConfig {
            window: 10,
            max_depth: 50,
            ordering: GitHOrdering::SizeDesc,
        }
    }
}

/// How versions are ordered before the window pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GitHOrdering {
    /// Non-increasing size, ties by ascending version id.
    SizeDesc,
    /// Name hash then size, both descending, for file corpora where a
    /// shared name suffix predicts similar content.
    TypeNameHashSize,
}

/// A version as the heuristic sees it.
#[derive(Debug, Clone)]
pub struct GithVersion {
    pub id: VersionId,
    pub size: u64,
    /// Path or label; only consulted by the name-hash ordering.
    pub name: Option<String>,
}

/// Where candidate delta costs come from: revealed matrices (an absent
/// entry makes the base inadmissible) or an oracle computing on demand.
pub trait DeltaSource {
    fn delta_storage(&mut self, from: VersionId, to: VersionId) -> Option<u64>;
}

impl DeltaSource for &CostMatrices {
    fn delta_storage(&mut self, from: VersionId, to: VersionId) -> Option<u64> {
        if from == to {
            return None;
        }
        self.get(from, to).map(|w| w.storage)
    }
}

/// On-demand delta computation over an in-memory corpus, with a cache so
/// repeat window hits cost one diff.
pub struct CorpusDeltaSource<'a> {
    corpus: &'a std::collections::BTreeMap<VersionId, Vec<u8>>,
    mode: crate::delta::DeltaMode,
    cache: std::collections::HashMap<(VersionId, VersionId), u64>,
}

impl<'a> CorpusDeltaSource<'a> {
    pub fn new(
        corpus: &'a std::collections::BTreeMap<VersionId, Vec<u8>>,
        mode: crate::delta::DeltaMode,
    ) -> Self {
        CorpusDeltaSource {
            corpus,
            mode,
            cache: std::collections::HashMap::new(),
        }
    }
}

impl DeltaSource for CorpusDeltaSource<'_> {
    fn delta_storage(&mut self, from: VersionId, to: VersionId) -> Option<u64> {
        if from == to {
            return None;
        }
        let key = if self.mode == crate::delta::DeltaMode::Undirected && from > to {
            (to, from)
        } else {
            (from, to)
        };
        if let Some(&cost) = self.cache.get(&key) {
            return Some(cost);
        }
        let src = self.corpus.get(&key.0)?;
        let dst = self.corpus.get(&key.1)?;
        let cost = crate::delta::compute_delta(src, dst, self.mode).storage_cost();
        self.cache.insert(key, cost);
        Some(cost)
    }
}

/// Hash built from the last sixteen non-whitespace bytes, the final bytes
/// counting the most, so names sharing a suffix land near each other when
/// sorted. Empty input hashes to zero.
pub fn name_hash(path: &[u8]) -> u32 {
    let mut hash = 0u32;
    for &byte in path {
        if byte.is_ascii_whitespace() {
            continue;
        }
        hash = (hash >> 2).wrapping_add(u32::from(byte) << 24);
    }
    hash
}

/// Runs the window heuristic and returns the resulting plan along with
/// each version's delta-chain depth.
pub fn gith(
    versions: &[GithVersion],
    source: &mut dyn DeltaSource,
    cfg: &GitHConfig,
) -> Result<(StoragePlan, Vec<usize>)> {
    if versions.is_empty() {
        return Err(Error::InvalidInput("no versions to plan".into()));
    }
    if cfg.window == 0 || cfg.max_depth == 0 {
        return Err(Error::InvalidInput(
            "window and max depth must be at least one".into(),
        ));
    }
    let n = versions.len();
    let mut order: Vec<&GithVersion> = versions.iter().collect();
    match cfg.ordering {
        GitHOrdering::SizeDesc => order.sort_by(|a, b| b.size.cmp(&a.size).then(a.id.cmp(&b.id))),
        GitHOrdering::TypeNameHashSize => order.sort_by(|a, b| {
            let ha = name_hash(a.name.as_deref().unwrap_or("").as_bytes());
            let hb = name_hash(b.name.as_deref().unwrap_or("").as_bytes());
            hb.cmp(&ha).then(b.size.cmp(&a.size)).then(a.id.cmp(&b.id))
        }),
    }

    let mut parent = vec![ROOT; n + 1];
    let mut depth = vec![0usize; n + 1];
    let mut window: std::collections::VecDeque<VersionId> = std::collections::VecDeque::new();

    for version in order {
        let id = version.id;
        // Pick the window member minimizing delta size over remaining
        // depth headroom; only members strictly below the depth cap are
        // admissible. Comparison is exact by cross-multiplication; ties
        // prefer the shallower base, then the smaller id.
        let mut best: Option<(u64, usize, VersionId)> = None;
        for &candidate in window.iter() {
            let cand_depth = depth[candidate];
            if cand_depth >= cfg.max_depth {
                continue;
            }
            let Some(delta) = source.delta_storage(candidate, id) else {
                continue;
            };
            let headroom = (cfg.max_depth - cand_depth) as u128;
            let improves = match best {
                None => true,
                Some((best_delta, best_depth, best_id)) => {
                    let best_headroom = (cfg.max_depth - best_depth) as u128;
                    let lhs = u128::from(delta) * best_headroom;
                    let rhs = u128::from(best_delta) * headroom;
                    lhs.cmp(&rhs)
                        .then(cand_depth.cmp(&best_depth))
                        .then(candidate.cmp(&best_id))
                        == std::cmp::Ordering::Less
                }
            };
            if improves {
                best = Some((delta, cand_depth, candidate));
            }
        }

        match best {
            Some((_, base_depth, base)) => {
                parent[id] = base;
                depth[id] = base_depth + 1;
                let pos = window.iter().position(|&x| x == base).unwrap();
                window.remove(pos);
                window.push_back(id);
                window.push_back(base);
            }
            None => {
                parent[id] = ROOT;
                depth[id] = 0;
                window.push_back(id);
            }
        }
        while window.len() > cfg.window {
            window.pop_front();
        }
    }

    Ok((StoragePlan::new(parent[1..].to_vec()), depth[1..].to_vec()))
}
