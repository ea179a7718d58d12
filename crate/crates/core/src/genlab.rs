//! Synthetic version-history and dataset generation, plus workload
//! synthesis.
//!
//! Generation is a two-step process: first a version graph with the
//! desired branching structure, where every derivation edge is annotated
//! with edit commands; then the actual CSV files, produced by applying
//! each edge's commands to the parent's content. Both steps run off a
//! ChaCha8 stream seeded explicitly, and the draw order is part of the
//! contract, so a `(params, seed)` pair reproduces a corpus bit for bit
//! on any platform.

use crate::error::{Error, Result};
use crate::graph::{EdgeWeights, VersionGraph, VersionId};
use crate::plan::WorkloadProfile;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

/// Version-graph shape parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    /// Total number of versions to create.
    pub num_commits: usize,
    /// Mainline commits between branch opportunities.
    pub branch_interval: usize,
    /// Probability of branching at an opportunity.
    pub branch_probability: f64,
    /// Branch count is uniform in `1..=branch_limit`.
    pub branch_limit: usize,
    /// Branch length is uniform in `1..=branch_length`.
    pub branch_length: usize,
    pub seed: u64,
}

impl GenParams {
    pub fn validate(&self) -> Result<()> {
        if self.num_commits == 0
            || self.branch_interval == 0
            || self.branch_limit == 0
            || self.branch_length == 0
        {
            return Err(Error::InvalidInput(
                "generator counts and intervals must be positive".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.branch_probability) {
            return Err(Error::InvalidInput(
                "branch probability must lie in [0, 1]".into(),
            ));
        }
        Ok(())
    }
}

/// Dataset shape parameters: the root file plus edit magnitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetParams {
    pub root_rows: usize,
    pub root_cols: usize,
    /// Edit commands per derivation edge, uniform inclusive range.
    pub edits_per_commit: (usize, usize),
    /// Rows touched per row-oriented command, uniform inclusive range.
    pub rows_per_edit: (usize, usize),
    /// Per-hundred share of whole-column add/remove commands. These
    /// rewrite every line, which puts the affected pairs outside the
    /// symmetric-delta realizability regime, so they are off by default.
    pub column_restructure_share: u8,
}

impl Default for DatasetParams {
    fn default() -> Self {
        DatasetParams {
            root_rows: 10_000,
            root_cols: 10,
            edits_per_commit: (1, 4),
            rows_per_edit: (1, 50),
            column_restructure_share: 0,
        }
    }
}

/// One edit command on ordered CSV content. Positions are raw draws,
/// interpreted modulo the current dimensions at application time so a
/// command stays meaningful whatever the file has grown or shrunk to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EditCmd {
    AddRows {
        at: u64,
        count: u64,
    },
    DeleteRows {
        at: u64,
        count: u64,
    },
    ModifyRows {
        at: u64,
        count: u64,
    },
    AddColumn {
        at: u64,
    },
    RemoveColumn {
        at: u64,
    },
    /// Rewrites one column's cells over a bounded row window.
    ModifyColumn {
        at: u64,
        row_at: u64,
        count: u64,
    },
}

/// A generated version: its derivation parents (ascending, the first is
/// the content parent) and the edit commands that produce its content.
#[derive(Debug, Clone)]
pub struct SkeletonNode {
    pub id: VersionId,
    pub parents: Vec<VersionId>,
    pub edits: Vec<EditCmd>,
}

/// Output of the first generation step.
#[derive(Debug, Clone)]
pub struct Skeleton {
    pub nodes: Vec<SkeletonNode>,
    pub params: GenParams,
    pub dataset: DatasetParams,
}

impl Skeleton {
    pub fn version_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn derivation_edges(&self) -> Vec<(VersionId, VersionId)> {
        let mut edges = Vec::new();
        for node in &self.nodes {
            for &p in &node.parents {
                edges.push((p, node.id));
            }
        }
        edges
    }
}

fn draw_edits(rng: &mut ChaCha8Rng, dataset: &DatasetParams) -> Vec<EditCmd> {
    let (lo, hi) = dataset.edits_per_commit;
    let count = rng.gen_range(lo..=hi);
    let (rlo, rhi) = dataset.rows_per_edit;
    (0..count)
        .map(|_| {
            let roll = rng.gen_range(0u8..100);
            let at = rng.gen::<u64>();
            if roll < dataset.column_restructure_share {
                if rng.gen_bool(0.5) {
                    EditCmd::AddColumn { at }
                } else {
                    EditCmd::RemoveColumn { at }
                }
            } else {
                // Content edits stay row-windowed so deltas track the
                // number of rows touched, not the file size.
                match rng.gen_range(0u8..4) {
                    0 => EditCmd::AddRows {
                        at,
                        count: rng.gen_range(rlo..=rhi) as u64,
                    },
                    1 => EditCmd::DeleteRows {
                        at,
                        count: rng.gen_range(rlo..=rhi) as u64,
                    },
                    2 => EditCmd::ModifyRows {
                        at,
                        count: rng.gen_range(rlo..=rhi) as u64,
                    },
                    _ => EditCmd::ModifyColumn {
                        at,
                        row_at: rng.gen::<u64>(),
                        count: rng.gen_range(rlo..=rhi) as u64,
                    },
                }
            }
        })
        .collect()
}

/// Generates the version graph skeleton: a mainline with branch bursts at
/// interval boundaries. Each completed branch merges into the next
/// mainline commit, which records the branch tip as an extra derivation
/// parent (content still derives from the first parent only).
pub fn gen_version_graph(params: &GenParams, dataset: &DatasetParams) -> Result<Skeleton> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut nodes = vec![SkeletonNode {
        id: 1,
        parents: Vec::new(),
        edits: Vec::new(),
    }];
    let mut mainline_tip: VersionId = 1;
    let mut since_boundary = 0usize;
    let mut pending_merges: Vec<VersionId> = Vec::new();

    while nodes.len() < params.num_commits {
        // Next mainline commit, absorbing any branches finished since the
        // previous one.
        let id = nodes.len() + 1;
        let mut parents = vec![mainline_tip];
        parents.append(&mut pending_merges);
        parents.sort_unstable();
        nodes.push(SkeletonNode {
            id,
            parents,
            edits: draw_edits(&mut rng, dataset),
        });
        mainline_tip = id;
        since_boundary += 1;

        if since_boundary == params.branch_interval && nodes.len() < params.num_commits {
            since_boundary = 0;
            if params.branch_probability > 0.0 && rng.gen_bool(params.branch_probability) {
                let branches = rng.gen_range(1..=params.branch_limit);
                for _ in 0..branches {
                    let length = rng.gen_range(1..=params.branch_length);
                    let mut base = mainline_tip;
                    for _ in 0..length {
                        if nodes.len() >= params.num_commits {
                            break;
                        }
                        let id = nodes.len() + 1;
                        nodes.push(SkeletonNode {
                            id,
                            parents: vec![base],
                            edits: draw_edits(&mut rng, dataset),
                        });
                        base = id;
                    }
                    if base != mainline_tip {
                        pending_merges.push(base);
                    }
                }
            }
        }
    }

    Ok(Skeleton {
        nodes,
        params: params.clone(),
        dataset: dataset.clone(),
    })
}

/// The skeleton's derivation DAG with full sizes taken from `corpus`.
pub fn skeleton_version_graph(
    skeleton: &Skeleton,
    corpus: &BTreeMap<VersionId, Vec<u8>>,
) -> Result<VersionGraph> {
    let n = skeleton.version_count();
    let full_sizes = (1..=n)
        .map(|v| {
            let size = corpus
                .get(&v)
                .map(|c| c.len() as u64)
                .ok_or(Error::UnknownVersion(v))?;
            Ok(EdgeWeights::new(size, size))
        })
        .collect::<Result<Vec<_>>>()?;
    VersionGraph::new(n, skeleton.derivation_edges(), full_sizes)
}

const CELL_CHARS: &[u8] = b"abcdefghijklmnopqrstuvwxyz0123456789";
const CELL_WIDTH: usize = 8;

fn gen_cell(rng: &mut ChaCha8Rng) -> String {
    (0..CELL_WIDTH)
        .map(|_| CELL_CHARS[rng.gen_range(0..CELL_CHARS.len())] as char)
        .collect()
}

fn gen_row(rng: &mut ChaCha8Rng, cols: usize) -> Vec<String> {
    (0..cols).map(|_| gen_cell(rng)).collect()
}

fn render(rows: &[Vec<String>]) -> Vec<u8> {
    let mut out = Vec::new();
    for row in rows {
        out.extend_from_slice(row.join(",").as_bytes());
        out.push(b'\n');
    }
    out
}

fn parse_rows(bytes: &[u8]) -> Vec<Vec<String>> {
    bytes
        .split(|&b| b == b'\n')
        .filter(|line| !line.is_empty())
        .map(|line| {
            String::from_utf8_lossy(line)
                .split(',')
                .map(str::to_string)
                .collect()
        })
        .collect()
}

/// Row-count band: add/delete commands are clamped so files hover around
/// the root size instead of drifting without bound over long histories.
fn row_band(root_rows: usize) -> (usize, usize) {
    ((root_rows / 2).max(1), root_rows.saturating_mul(2).max(2))
}

fn apply_edit(
    rows: &mut Vec<Vec<String>>,
    cmd: EditCmd,
    band: (usize, usize),
    rng: &mut ChaCha8Rng,
) {
    let cols = rows.first().map(|r| r.len()).unwrap_or(0);
    let (min_rows, max_rows) = band;
    match cmd {
        EditCmd::AddRows { at, count } => {
            let pos = (at % (rows.len() as u64 + 1)) as usize;
            let headroom = max_rows.saturating_sub(rows.len());
            let count = (count as usize).min(headroom);
            let fresh: Vec<_> = (0..count).map(|_| gen_row(rng, cols.max(1))).collect();
            rows.splice(pos..pos, fresh);
        }
        EditCmd::DeleteRows { at, count } => {
            if rows.is_empty() {
                return;
            }
            let pos = (at % rows.len() as u64) as usize;
            let slack = rows.len().saturating_sub(min_rows);
            let count = (count as usize).min(slack).min(rows.len() - pos);
            rows.drain(pos..pos + count);
        }
        EditCmd::ModifyRows { at, count } => {
            if rows.is_empty() {
                return;
            }
            let pos = (at % rows.len() as u64) as usize;
            let end = (pos + count as usize).min(rows.len());
            for row in &mut rows[pos..end] {
                for cell in row.iter_mut() {
                    *cell = gen_cell(rng);
                }
            }
        }
        EditCmd::AddColumn { at } => {
            let pos = (at % (cols as u64 + 1)) as usize;
            for row in rows.iter_mut() {
                row.insert(pos.min(row.len()), gen_cell(rng));
            }
        }
        EditCmd::RemoveColumn { at } => {
            if cols <= 1 {
                return;
            }
            let pos = (at % cols as u64) as usize;
            for row in rows.iter_mut() {
                if pos < row.len() {
                    row.remove(pos);
                }
            }
        }
        EditCmd::ModifyColumn { at, row_at, count } => {
            if cols == 0 || rows.is_empty() {
                return;
            }
            let col = (at % cols as u64) as usize;
            let start = (row_at % rows.len() as u64) as usize;
            let end = (start + count as usize).min(rows.len());
            for row in &mut rows[start..end] {
                if col < row.len() {
                    row[col] = gen_cell(rng);
                }
            }
        }
    }
}

/// Generates the corpus for a skeleton: the root file is seeded random
/// tabular CSV, and every other version applies its edge's edit commands
/// to its first parent's content. Versions are produced in id order (ids
/// ascend along derivation edges by construction).
pub fn gen_datasets(skeleton: &Skeleton, seed: u64) -> BTreeMap<VersionId, Vec<u8>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let band = row_band(skeleton.dataset.root_rows);
    let mut corpus: BTreeMap<VersionId, Vec<u8>> = BTreeMap::new();
    let root_rows: Vec<Vec<String>> = (0..skeleton.dataset.root_rows)
        .map(|_| gen_row(&mut rng, skeleton.dataset.root_cols))
        .collect();
    corpus.insert(1, render(&root_rows));

    for node in skeleton.nodes.iter().skip(1) {
        let content_parent = *node.parents.first().expect("non-root has a parent");
        let mut rows = parse_rows(&corpus[&content_parent]);
        for &cmd in &node.edits {
            apply_edit(&mut rows, cmd, band, &mut rng);
        }
        corpus.insert(node.id, render(&rows));
    }
    corpus
}

/// Rank-based Zipf workload: weight `round(1e6 / rank^s)` (at least 1) is
/// assigned to a seeded random permutation of the versions.
pub fn gen_workload(n: usize, exponent: f64, seed: u64) -> Result<WorkloadProfile> {
    if n == 0 || exponent <= 0.0 {
        return Err(Error::InvalidInput(
            "workload needs at least one version and a positive exponent".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (1..=n).collect();
    // Fisher-Yates with explicit draws so the stream is stable.
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    const SCALE: f64 = 1_000_000.0;
    let mut freq = vec![0u64; n];
    for (rank, &version) in order.iter().enumerate() {
        let weight = (SCALE / ((rank + 1) as f64).powf(exponent))
            .round()
            .max(1.0);
        freq[version - 1] = weight as u64;
    }
    WorkloadProfile::new(freq)
}

/// On-disk corpus layout: `versions/<id>.csv`, `graph.tsv` (one
/// `parent<TAB>child` line per derivation edge), and `manifest` with
/// `key = value` parameter lines.
pub fn write_corpus(
    dir: &Path,
    skeleton: &Skeleton,
    corpus: &BTreeMap<VersionId, Vec<u8>>,
    data_seed: u64,
) -> Result<()> {
    let versions = dir.join("versions");
    std::fs::create_dir_all(&versions)?;
    for (&id, content) in corpus {
        std::fs::write(versions.join(format!("{id}.csv")), content)?;
    }
    let mut graph = String::new();
    for (u, v) in skeleton.derivation_edges() {
        writeln!(graph, "{u}\t{v}").unwrap();
    }
    std::fs::write(dir.join("graph.tsv"), graph)?;

    let p = &skeleton.params;
    let d = &skeleton.dataset;
    let manifest = format!(
        "generator = chacha8\n\
         num_commits = {}\n\
         branch_interval = {}\n\
         branch_probability = {}\n\
         branch_limit = {}\n\
         branch_length = {}\n\
         seed = {}\n\
         data_seed = {}\n\
         root_rows = {}\n\
         root_cols = {}\n\
         edits_min = {}\n\
         edits_max = {}\n\
         rows_per_edit_min = {}\n\
         rows_per_edit_max = {}\n\
         column_restructure_share = {}\n",
        p.num_commits,
        p.branch_interval,
        p.branch_probability,
        p.branch_limit,
        p.branch_length,
        p.seed,
        data_seed,
        d.root_rows,
        d.root_cols,
        d.edits_per_commit.0,
        d.edits_per_commit.1,
        d.rows_per_edit.0,
        d.rows_per_edit.1,
        d.column_restructure_share,
    );
    std::fs::write(dir.join("manifest"), manifest)?;
    Ok(())
}

/// Reads a corpus directory back: the derivation DAG plus file contents.
pub fn read_corpus(dir: &Path) -> Result<(VersionGraph, BTreeMap<VersionId, Vec<u8>>)> {
    let versions_dir = dir.join("versions");
    let mut corpus = BTreeMap::new();
    for entry in std::fs::read_dir(&versions_dir)? {
        let entry = entry?;
        let name = entry.file_name();
        let name = name.to_string_lossy();
        let Some(stem) = name.strip_suffix(".csv") else {
            continue;
        };
        let id: usize = stem
            .parse()
            .map_err(|_| Error::InvalidInput(format!("unexpected corpus file name `{name}`")))?;
        corpus.insert(id, std::fs::read(entry.path())?);
    }
    let n = corpus.len();
    for v in 1..=n {
        if !corpus.contains_key(&v) {
            return Err(Error::InvalidInput(format!(
                "corpus versions are not contiguous: missing {v}"
            )));
        }
    }
    let graph_path = dir.join("graph.tsv");
    let text = std::fs::read_to_string(&graph_path)?;
    let mut edges = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let parse = |f: Option<&str>| -> Result<usize> {
            f.and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::Parse {
                    path: graph_path.display().to_string(),
                    line: idx + 1,
                    msg: "expected `parent<TAB>child`".into(),
                })
        };
        let u = parse(fields.next())?;
        let v = parse(fields.next())?;
        edges.push((u, v));
    }
    let full_sizes = (1..=n)
        .map(|v| {
            let size = corpus[&v].len() as u64;
            EdgeWeights::new(size, size)
        })
        .collect();
    let graph = VersionGraph::new(n, edges, full_sizes)?;
    Ok((graph, corpus))
}

/// Parses a `key = value` parameter file into generator parameters.
/// Unknown keys are rejected; dataset keys are optional.
pub fn parse_params(text: &str, path: &Path) -> Result<(GenParams, DatasetParams, u64)> {
    let mut params = GenParams {
        num_commits: 100,
        branch_interval: 5,
        branch_probability: 0.3,
        branch_limit: 2,
        branch_length: 3,
        seed: 1,
    };
    let mut dataset = DatasetParams::default();
    let mut data_seed: Option<u64> = None;
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::Parse {
            path: path.display().to_string(),
            line: idx + 1,
            msg,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err("expected `key = value`".into()))?;
        let key = key.trim();
        let value = value.trim();
        let bad = |what: &str| err(format!("invalid value for {what}"));
        match key {
            "generator" => {
                if value != "chacha8" {
                    return Err(err(format!("unsupported generator `{value}`")));
                }
            }
            "num_commits" => params.num_commits = value.parse().map_err(|_| bad(key))?,
            "branch_interval" => params.branch_interval = value.parse().map_err(|_| bad(key))?,
            "branch_probability" => {
                params.branch_probability = value.parse().map_err(|_| bad(key))?
            }
            "branch_limit" => params.branch_limit = value.parse().map_err(|_| bad(key))?,
            "branch_length" => params.branch_length = value.parse().map_err(|_| bad(key))?,
            "seed" => params.seed = value.parse().map_err(|_| bad(key))?,
            "data_seed" => data_seed = Some(value.parse().map_err(|_| bad(key))?),
            "root_rows" => dataset.root_rows = value.parse().map_err(|_| bad(key))?,
            "root_cols" => dataset.root_cols = value.parse().map_err(|_| bad(key))?,
            "edits_min" => dataset.edits_per_commit.0 = value.parse().map_err(|_| bad(key))?,
            "edits_max" => dataset.edits_per_commit.1 = value.parse().map_err(|_| bad(key))?,
            "rows_per_edit_min" => dataset.rows_per_edit.0 = value.parse().map_err(|_| bad(key))?,
            "rows_per_edit_max" => dataset.rows_per_edit.1 = value.parse().map_err(|_| bad(key))?,
            "column_restructure_share" => {
                dataset.column_restructure_share = value.parse().map_err(|_| bad(key))?
            }
            other => return Err(err(format!("unknown key `{other}`"))),
        }
    }
    params.validate()?;
    let fallback = params.seed;
    Ok((params, dataset, data_seed.unwrap_or(fallback)))
}
