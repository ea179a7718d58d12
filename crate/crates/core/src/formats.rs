//! Line-oriented interchange files: cost matrices, plans, and workloads.
//!
//! All files are UTF-8 with LF newlines and tab-separated fields.
//!
//! Matrix file: a header line `directed` or `undirected`, then one record
//! per revealed entry as `i<TAB>j<TAB>delta_storage<TAB>phi_recreation`.
//! Diagonal entries use `i == j`. For undirected matrices each unordered
//! pair is written once (`i <= j`) and mirrored on read; readers also
//! accept redundant mirrors as long as they agree.
//!
//! Plan file: one record per version, `i<TAB>parent`.
//!
//! Workload file: one record per version, `i<TAB>frequency`.

use crate::error::{Error, Result};
use crate::graph::{CostMatrices, EdgeWeights};
use crate::plan::{StoragePlan, WorkloadProfile};
use std::fmt::Write as _;
use std::path::Path;

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        msg: msg.into(),
    }
}

fn parse_field<T: std::str::FromStr>(
    field: Option<&str>,
    path: &Path,
    line: usize,
    what: &str,
) -> Result<T> {
    field
        .ok_or_else(|| parse_err(path, line, format!("missing {what}")))?
        .trim()
        .parse()
        .map_err(|_| parse_err(path, line, format!("invalid {what}")))
}

pub fn matrices_to_string(matrices: &CostMatrices) -> String {
    let mut out = String::new();
    out.push_str(if matrices.directed() {
        "directed\n"
    } else {
        "undirected\n"
    });
    for (i, j, w) in matrices.entries() {
        if !matrices.directed() && i > j {
            continue;
        }
        writeln!(out, "{i}\t{j}\t{}\t{}", w.storage, w.recreation).unwrap();
    }
    out
}

pub fn write_matrices(path: &Path, matrices: &CostMatrices) -> Result<()> {
    std::fs::write(path, matrices_to_string(matrices))?;
    Ok(())
}

pub fn read_matrices(path: &Path) -> Result<CostMatrices> {
    let text = std::fs::read_to_string(path)?;
    parse_matrices(&text, path)
}

pub fn parse_matrices(text: &str, path: &Path) -> Result<CostMatrices> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty matrix file"))?;
    let directed = match header.trim() {
        "directed" => true,
        "undirected" => false,
        other => {
            return Err(parse_err(
                path,
                1,
                format!("expected `directed` or `undirected`, got `{other}`"),
            ))
        }
    };
    let mut matrices = CostMatrices::new(directed);
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let i: usize = parse_field(fields.next(), path, lineno, "version index i")?;
        let j: usize = parse_field(fields.next(), path, lineno, "version index j")?;
        let storage: u64 = parse_field(fields.next(), path, lineno, "delta storage cost")?;
        let recreation: u64 = parse_field(fields.next(), path, lineno, "phi recreation cost")?;
        if i == 0 || j == 0 {
            return Err(parse_err(path, lineno, "version indices start at 1"));
        }
        let w = EdgeWeights::new(storage, recreation);
        if let Some(existing) = matrices.get(i, j) {
            if existing != w {
                return Err(parse_err(
                    path,
                    lineno,
                    format!("conflicting duplicate entry ({i}, {j})"),
                ));
            }
        }
        matrices.insert(i, j, w);
    }
    Ok(matrices)
}

pub fn plan_to_string(plan: &StoragePlan) -> String {
    let mut out = String::new();
    for (v, p) in plan.iter() {
        writeln!(out, "{v}\t{p}").unwrap();
    }
    out
}

pub fn write_plan(path: &Path, plan: &StoragePlan) -> Result<()> {
    std::fs::write(path, plan_to_string(plan))?;
    Ok(())
}

pub fn read_plan(path: &Path) -> Result<StoragePlan> {
    let text = std::fs::read_to_string(path)?;
    let mut entries = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let v: usize = parse_field(fields.next(), path, lineno, "version index")?;
        let p: usize = parse_field(fields.next(), path, lineno, "parent index")?;
        entries.push((v, p, lineno));
    }
    let n = entries.len();
    let mut parent = vec![None; n];
    for (v, p, lineno) in entries {
        if v == 0 || v > n {
            return Err(parse_err(
                path,
                lineno,
                format!("version {v} out of range 1..={n}"),
            ));
        }
        if parent[v - 1].replace(p).is_some() {
            return Err(parse_err(
                path,
                lineno,
                format!("duplicate record for version {v}"),
            ));
        }
    }
    Ok(StoragePlan::new(
        parent.into_iter().map(|p| p.unwrap()).collect(),
    ))
}

pub fn read_workload(path: &Path) -> Result<WorkloadProfile> {
    let text = std::fs::read_to_string(path)?;
    let mut entries = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let v: usize = parse_field(fields.next(), path, lineno, "version index")?;
        let f: u64 = parse_field(fields.next(), path, lineno, "frequency")?;
        entries.push((v, f, lineno));
    }
    let n = entries.len();
    let mut freq = vec![None; n];
    for (v, f, lineno) in entries {
        if v == 0 || v > n {
            return Err(parse_err(
                path,
                lineno,
                format!("version {v} out of range 1..={n}"),
            ));
        }
        if freq[v - 1].replace(f).is_some() {
            return Err(parse_err(
                path,
                lineno,
                format!("duplicate record for version {v}"),
            ));
        }
    }
    WorkloadProfile::new(freq.into_iter().map(|f| f.unwrap()).collect())
}

pub fn workload_to_string(workload: &WorkloadProfile) -> String {
    let mut out = String::new();
    for v in 1..=workload.version_count() {
        writeln!(out, "{v}\t{}", workload.freq(v)).unwrap();
    }
    out
}

pub fn write_workload(path: &Path, workload: &WorkloadProfile) -> Result<()> {
    std::fs::write(path, workload_to_string(workload))?;
    Ok(())
}
