//! Line-based delta computation and application, plus population of cost
//! matrices from a file corpus.
//!
//! Inputs are treated as LF-separated byte runs (the final run may lack a
//! newline), which keeps the engine binary-safe and byte-exact. Scripts are
//! minimal line edit sequences (Myers), encoded as copy/skip/insert
//! commands with explicit counts.
//!
//! # Artifact wire format
//!
//! Stable across releases; all integers little-endian:
//!
//! ```text
//! offset  size  field
//! 0       4     magic "VSDA"
//! 4       1     format version (currently 1)
//! 5       1     direction: 0 forward, 1 undirected
//! 6       32    SHA-256 of the source bytes
//! 38      32    SHA-256 of the target bytes
//! 70      8     payload length
//! 78      ..    payload
//! ```
//!
//! A forward payload is one edit script. An undirected payload is the
//! forward script length as a u64, the forward script, then the backward
//! script; it reconstructs either endpoint from the other. Scripts are
//! command sequences: `0x01` copy (varint line count), `0x02` skip (varint
//! line count), `0x03` insert (varint byte length, then the bytes).

use crate::error::{Error, Result};
use crate::graph::{CostMatrices, EdgeWeights, VersionGraph, VersionId};
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

const MAGIC: &[u8; 4] = b"VSDA";
const FORMAT_VERSION: u8 = 1;
/// Serialized header size; the smallest possible artifact.
pub const HEADER_LEN: u64 = 78;

const CMD_COPY: u8 = 0x01;
const CMD_SKIP: u8 = 0x02;
const CMD_INSERT: u8 = 0x03;

/// Whether a delta reconstructs only source -> target or either endpoint
/// from the other.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaMode {
    Directed,
    Undirected,
}

/// A computed delta between two byte strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaArtifact {
    pub mode: DeltaMode,
    pub src_digest: [u8; 32],
    pub dst_digest: [u8; 32],
    payload: Vec<u8>,
}

impl DeltaArtifact {
    /// Serialized byte size: header plus payload. This is the artifact's
    /// storage cost.
    pub fn storage_cost(&self) -> u64 {
        HEADER_LEN + self.payload.len() as u64
    }

    /// Recreation cost under the proportional regime: equal to storage.
    pub fn recreation_cost(&self) -> u64 {
        self.storage_cost()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN as usize + self.payload.len());
        out.extend_from_slice(MAGIC);
        out.push(FORMAT_VERSION);
        out.push(match self.mode {
            DeltaMode::Directed => 0,
            DeltaMode::Undirected => 1,
        });
        out.extend_from_slice(&self.src_digest);
        out.extend_from_slice(&self.dst_digest);
        out.extend_from_slice(&(self.payload.len() as u64).to_le_bytes());
        out.extend_from_slice(&self.payload);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let corrupt = |detail: &str| Error::Corruption {
            version: None,
            detail: detail.to_string(),
        };
        if bytes.len() < HEADER_LEN as usize {
            return Err(corrupt("artifact shorter than header"));
        }
        if &bytes[0..4] != MAGIC {
            return Err(corrupt("bad artifact magic"));
        }
        if bytes[4] != FORMAT_VERSION {
            return Err(corrupt("unsupported artifact format version"));
        }
        let mode = match bytes[5] {
            0 => DeltaMode::Directed,
            1 => DeltaMode::Undirected,
            _ => return Err(corrupt("bad direction byte")),
        };
        let mut src_digest = [0u8; 32];
        src_digest.copy_from_slice(&bytes[6..38]);
        let mut dst_digest = [0u8; 32];
        dst_digest.copy_from_slice(&bytes[38..70]);
        let len = u64::from_le_bytes(bytes[70..78].try_into().unwrap()) as usize;
        if bytes.len() != HEADER_LEN as usize + len {
            return Err(corrupt("payload length mismatch"));
        }
        Ok(DeltaArtifact {
            mode,
            src_digest,
            dst_digest,
            payload: bytes[78..].to_vec(),
        })
    }
}

pub fn digest(bytes: &[u8]) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher.finalize().into()
}

/// Computes the delta from `src` to `dst`. In undirected mode the payload
/// concatenates both directional scripts and the cost covers both.
pub fn compute_delta(src: &[u8], dst: &[u8], mode: DeltaMode) -> DeltaArtifact {
    let forward = script(src, dst);
    let payload = match mode {
        DeltaMode::Directed => forward,
        DeltaMode::Undirected => {
            let backward = script(dst, src);
            let mut payload = Vec::with_capacity(8 + forward.len() + backward.len());
            payload.extend_from_slice(&(forward.len() as u64).to_le_bytes());
            payload.extend_from_slice(&forward);
            payload.extend_from_slice(&backward);
            payload
        }
    };
    DeltaArtifact {
        mode,
        src_digest: digest(src),
        dst_digest: digest(dst),
        payload,
    }
}

/// Applies `artifact` to `base`, returning the reconstructed bytes.
/// The base must match one of the artifact's recorded digests (only the
/// source digest for forward artifacts); the output is digest-verified.
pub fn apply_delta(base: &[u8], artifact: &DeltaArtifact) -> Result<Vec<u8>> {
    let base_digest = digest(base);
    let (script_bytes, expected): (&[u8], [u8; 32]) = match artifact.mode {
        DeltaMode::Directed => {
            if base_digest != artifact.src_digest {
                return Err(Error::WrongBase);
            }
            (&artifact.payload, artifact.dst_digest)
        }
        DeltaMode::Undirected => {
            if artifact.payload.len() < 8 {
                return Err(Error::Corruption {
                    version: None,
                    detail: "undirected payload truncated".into(),
                });
            }
            let fwd_len = u64::from_le_bytes(artifact.payload[0..8].try_into().unwrap()) as usize;
            if artifact.payload.len() < 8 + fwd_len {
                return Err(Error::Corruption {
                    version: None,
                    detail: "undirected payload truncated".into(),
                });
            }
            if base_digest == artifact.src_digest {
                (&artifact.payload[8..8 + fwd_len], artifact.dst_digest)
            } else if base_digest == artifact.dst_digest {
                (&artifact.payload[8 + fwd_len..], artifact.src_digest)
            } else {
                return Err(Error::WrongBase);
            }
        }
    };
    let out = apply_script(base, script_bytes)?;
    if digest(&out) != expected {
        return Err(Error::Corruption {
            version: None,
            detail: "delta application produced unexpected bytes".into(),
        });
    }
    Ok(out)
}

/// Splits into LF-terminated runs; the final run may lack the newline.
fn split_lines(bytes: &[u8]) -> Vec<&[u8]> {
    if bytes.is_empty() {
        return Vec::new();
    }
    bytes.split_inclusive(|&b| b == b'\n').collect()
}

/// Builds the edit script turning `src` into `dst`.
fn script(src: &[u8], dst: &[u8]) -> Vec<u8> {
    let src_lines = split_lines(src);
    let dst_lines = split_lines(dst);

    // Intern lines so the diff runs over small integers.
    let mut table: std::collections::HashMap<&[u8], u32> = std::collections::HashMap::new();
    let mut a = Vec::with_capacity(src_lines.len());
    for line in &src_lines {
        let next = table.len() as u32;
        a.push(*table.entry(*line).or_insert(next));
    }
    let mut b = Vec::with_capacity(dst_lines.len());
    for line in &dst_lines {
        let next = table.len() as u32;
        b.push(*table.entry(*line).or_insert(next));
    }

    let ops = myers_ops(&a, &b);
    let mut out = Vec::new();
    let mut dst_cursor = 0usize;
    for op in ops {
        match op {
            RawOp::Equal(count) => {
                out.push(CMD_COPY);
                write_varint(&mut out, count as u64);
                dst_cursor += count;
            }
            RawOp::Delete(count) => {
                out.push(CMD_SKIP);
                write_varint(&mut out, count as u64);
            }
            RawOp::Insert(count) => {
                let bytes: usize = dst_lines[dst_cursor..dst_cursor + count]
                    .iter()
                    .map(|l| l.len())
                    .sum();
                out.push(CMD_INSERT);
                write_varint(&mut out, bytes as u64);
                for line in &dst_lines[dst_cursor..dst_cursor + count] {
                    out.extend_from_slice(line);
                }
                dst_cursor += count;
            }
        }
    }
    out
}

fn apply_script(base: &[u8], script: &[u8]) -> Result<Vec<u8>> {
    let corrupt = |detail: &str| Error::Corruption {
        version: None,
        detail: detail.to_string(),
    };
    let lines = split_lines(base);
    let mut out = Vec::with_capacity(base.len());
    let mut cursor = 0usize;
    let mut pos = 0usize;
    while pos < script.len() {
        let cmd = script[pos];
        pos += 1;
        let (value, used) =
            read_varint(&script[pos..]).ok_or_else(|| corrupt("truncated command"))?;
        pos += used;
        match cmd {
            CMD_COPY => {
                let count = value as usize;
                if cursor + count > lines.len() {
                    return Err(corrupt("copy past end of base"));
                }
                for line in &lines[cursor..cursor + count] {
                    out.extend_from_slice(line);
                }
                cursor += count;
            }
            CMD_SKIP => {
                let count = value as usize;
                if cursor + count > lines.len() {
                    return Err(corrupt("skip past end of base"));
                }
                cursor += count;
            }
            CMD_INSERT => {
                let len = value as usize;
                if pos + len > script.len() {
                    return Err(corrupt("truncated insert payload"));
                }
                out.extend_from_slice(&script[pos..pos + len]);
                pos += len;
            }
            _ => return Err(corrupt("unknown command byte")),
        }
    }
    Ok(out)
}

fn write_varint(out: &mut Vec<u8>, mut value: u64) {
    loop {
        let byte = (value & 0x7f) as u8;
        value >>= 7;
        if value == 0 {
            out.push(byte);
            break;
        }
        out.push(byte | 0x80);
    }
}

fn read_varint(bytes: &[u8]) -> Option<(u64, usize)> {
    let mut value = 0u64;
    let mut shift = 0u32;
    for (i, &b) in bytes.iter().enumerate() {
        value |= u64::from(b & 0x7f) << shift;
        if b & 0x80 == 0 {
            return Some((value, i + 1));
        }
        shift += 7;
        if shift >= 64 {
            return None;
        }
    }
    None
}

#[derive(Debug, Clone, Copy)]
enum RawOp {
    Equal(usize),
    Delete(usize),
    Insert(usize),
}

/// Myers O(ND) diff over interned lines, producing a minimal edit script
/// as run-length ops in forward order.
fn myers_ops(a: &[u32], b: &[u32]) -> Vec<RawOp> {
    // Common affixes keep the quadratic part small on near-identical files.
    let mut prefix = 0;
    while prefix < a.len() && prefix < b.len() && a[prefix] == b[prefix] {
        prefix += 1;
    }
    let mut suffix = 0;
    while suffix < a.len() - prefix
        && suffix < b.len() - prefix
        && a[a.len() - 1 - suffix] == b[b.len() - 1 - suffix]
    {
        suffix += 1;
    }
    let core_a = &a[prefix..a.len() - suffix];
    let core_b = &b[prefix..b.len() - suffix];

    let mut ops = Vec::new();
    if prefix > 0 {
        ops.push(RawOp::Equal(prefix));
    }
    myers_core(core_a, core_b, &mut ops);
    if suffix > 0 {
        ops.push(RawOp::Equal(suffix));
    }
    coalesce(ops)
}

fn myers_core(a: &[u32], b: &[u32], ops: &mut Vec<RawOp>) {
    let n = a.len() as isize;
    let m = b.len() as isize;
    if n == 0 {
        if m > 0 {
            ops.push(RawOp::Insert(m as usize));
        }
        return;
    }
    if m == 0 {
        ops.push(RawOp::Delete(n as usize));
        return;
    }

    // Frontier per diagonal k, indexed at k + offset. trace[d] snapshots
    // the band [-d, d] as the frontier stood when round d started, which is
    // exactly what round d read; the backtrack replays those reads.
    let max = n + m;
    let offset = max;
    let mut v = vec![0u32; (2 * max + 1) as usize];
    let mut trace: Vec<Vec<u32>> = Vec::new();
    let mut d_final = None;
    'outer: for d in 0..=max {
        trace.push(v[(offset - d) as usize..=(offset + d) as usize].to_vec());
        let mut k = -d;
        while k <= d {
            let down =
                k == -d || (k != d && v[(k - 1 + offset) as usize] < v[(k + 1 + offset) as usize]);
            let mut x = if down {
                v[(k + 1 + offset) as usize] as isize
            } else {
                v[(k - 1 + offset) as usize] as isize + 1
            };
            let mut y = x - k;
            while x < n && y < m && a[x as usize] == b[y as usize] {
                x += 1;
                y += 1;
            }
            v[(k + offset) as usize] = x as u32;
            if x >= n && y >= m {
                d_final = Some(d);
                break 'outer;
            }
            k += 2;
        }
    }
    let d_final = d_final.expect("edit distance is bounded by n + m");

    let mut rev = Vec::new();
    let mut x = n;
    let mut y = m;
    for d in (1..=d_final).rev() {
        let band = &trace[d as usize];
        let bget = |k: isize| band[(k + d) as usize] as isize;
        let k = x - y;
        let down = k == -d || (k != d && bget(k - 1) < bget(k + 1));
        let prev_k = if down { k + 1 } else { k - 1 };
        let prev_x = bget(prev_k);
        let prev_y = prev_x - prev_k;
        // The step from the previous frontier is one edit then a snake.
        let edit_x = if down { prev_x } else { prev_x + 1 };
        let snake = x - edit_x;
        if snake > 0 {
            rev.push(RawOp::Equal(snake as usize));
        }
        rev.push(if down {
            RawOp::Insert(1)
        } else {
            RawOp::Delete(1)
        });
        x = prev_x;
        y = prev_y;
    }
    if x > 0 {
        debug_assert_eq!(x, y);
        rev.push(RawOp::Equal(x as usize));
    }
    rev.reverse();
    ops.extend(rev);
}

fn coalesce(ops: Vec<RawOp>) -> Vec<RawOp> {
    let mut out: Vec<RawOp> = Vec::with_capacity(ops.len());
    for op in ops {
        match (out.last_mut(), op) {
            (Some(RawOp::Equal(a)), RawOp::Equal(b)) => *a += b,
            (Some(RawOp::Delete(a)), RawOp::Delete(b)) => *a += b,
            (Some(RawOp::Insert(a)), RawOp::Insert(b)) => *a += b,
            _ => out.push(op),
        }
    }
    out
}

/// Which version pairs get deltas computed during matrix population.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaPolicy {
    /// Pairs within `k` hops on the undirected view of the version graph.
    KHop(usize),
    /// Pairs whose full sizes differ by strictly less than the threshold.
    SizeThreshold(u64),
}

/// Maps delta artifacts and full sizes to recreation costs. The default
/// proportional model makes recreation equal storage; alternative models
/// support regimes where applying a delta costs differently than reading it.
pub trait CostModel: Sync {
    fn full_recreation(&self, size: u64) -> u64;
    fn delta_recreation(&self, artifact: &DeltaArtifact) -> u64;
}

/// Recreation cost equals storage cost.
pub struct ProportionalCost;

impl CostModel for ProportionalCost {
    fn full_recreation(&self, size: u64) -> u64 {
        size
    }
    fn delta_recreation(&self, artifact: &DeltaArtifact) -> u64 {
        artifact.storage_cost()
    }
}

/// Computes cost matrices over a corpus: diagonal entries from full file
/// sizes, off-diagonal entries for every pair admitted by the policy.
/// Directed mode records forward deltas from the older version (smaller
/// index) to the newer; undirected mode records symmetric artifacts.
pub fn populate_matrices(
    corpus: &BTreeMap<VersionId, Vec<u8>>,
    graph: &VersionGraph,
    policy: DeltaPolicy,
    mode: DeltaMode,
) -> Result<CostMatrices> {
    populate_matrices_with_model(corpus, graph, policy, mode, &ProportionalCost)
}

pub fn populate_matrices_with_model(
    corpus: &BTreeMap<VersionId, Vec<u8>>,
    graph: &VersionGraph,
    policy: DeltaPolicy,
    mode: DeltaMode,
    model: &dyn CostModel,
) -> Result<CostMatrices> {
    let n = graph.version_count();
    for v in 1..=n {
        if !corpus.contains_key(&v) {
            return Err(Error::InvalidInput(format!(
                "corpus is missing version {v}"
            )));
        }
    }

    let pairs: Vec<(VersionId, VersionId)> = match policy {
        DeltaPolicy::KHop(k) => {
            let hoods = graph.undirected_neighborhoods(k);
            let mut pairs = Vec::new();
            for i in 1..=n {
                for &j in &hoods[i - 1] {
                    if i < j {
                        pairs.push((i, j));
                    }
                }
            }
            pairs
        }
        DeltaPolicy::SizeThreshold(threshold) => {
            let mut pairs = Vec::new();
            for i in 1..=n {
                for j in (i + 1)..=n {
                    let si = corpus[&i].len() as u64;
                    let sj = corpus[&j].len() as u64;
                    if si.abs_diff(sj) < threshold {
                        pairs.push((i, j));
                    }
                }
            }
            pairs
        }
    };

    let computed: Vec<((VersionId, VersionId), EdgeWeights)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let artifact = compute_delta(&corpus[&i], &corpus[&j], mode);
            let w = EdgeWeights::new(artifact.storage_cost(), model.delta_recreation(&artifact));
            ((i, j), w)
        })
        .collect();

    let mut matrices = CostMatrices::new(mode == DeltaMode::Directed);
    for v in 1..=n {
        let size = corpus[&v].len() as u64;
        matrices.insert(v, v, EdgeWeights::new(size, model.full_recreation(size)));
    }
    for ((i, j), w) in computed {
        matrices.insert(i, j, w);
    }
    Ok(matrices)
}
