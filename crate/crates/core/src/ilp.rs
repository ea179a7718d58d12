//! Export of the max-recreation-bounded storage minimization as an integer
//! linear program in LP file format, consumable by external MILP solvers.
//!
//! Variables: one binary `x_i_j` per solver edge (1 means the edge is in
//! the storage plan) and one continuous `r_j` per version (its recreation
//! cost). The root's recreation variable is identically zero and is
//! eliminated from the emitted rows.
//!
//! Rows:
//!   minimize   sum over edges of `storage(i, j) * x_i_j`
//!   assign_j:  sum over in-edges of j of `x_i_j` = 1          (each j)
//!   order_i_j: `C x_i_j + r_i - r_j <= C - phi(i, j)`          (each edge)
//!   bounds:    `0 <= r_j <= theta`                             (each j)
//!
//! The order rows linearize "if `x_i_j` then `r_j - r_i >= phi(i, j)`"
//! with the big constant `C = 2 * theta`. Edges whose recreation weight
//! exceeds `theta` cannot appear in any bounded solution (using one would
//! push the target's recreation variable past the bound), so they are not
//! emitted; for every remaining edge the zero case is inert, because
//! `phi + r_i <= 2 * theta` always holds.

use crate::error::{Error, Result};
use crate::graph::{EdgeWeights, SolverGraph, VersionId, ROOT};
use std::fmt::Write as _;

/// Renders the ILP for `sg` under max-recreation bound `theta`.
pub fn export_ilp(sg: &SolverGraph, theta: u64) -> Result<String> {
    if theta == 0 {
        return Err(Error::InvalidInput(
            "recreation bound must be positive".into(),
        ));
    }
    let big_c = 2 * u128::from(theta);
    let n = sg.version_count();
    let edges: Vec<&(VersionId, VersionId, EdgeWeights)> = sg
        .edges()
        .iter()
        .filter(|(_, _, w)| w.recreation <= theta)
        .collect();
    let mut out = String::new();

    out.push_str("Minimize\n obj:");
    let mut first = true;
    for &&(u, v, w) in &edges {
        if !first {
            out.push_str(" +");
        }
        first = false;
        write!(out, " {} x_{}_{}", w.storage, u, v).unwrap();
    }
    out.push('\n');

    out.push_str("Subject To\n");
    for v in 1..=n {
        write!(out, " assign_{v}:").unwrap();
        let mut first = true;
        for (u, w) in sg.in_edges(v) {
            if w.recreation > theta {
                continue;
            }
            if !first {
                out.push_str(" +");
            }
            first = false;
            write!(out, " x_{u}_{v}").unwrap();
        }
        out.push_str(" = 1\n");
    }
    for &&(u, v, w) in &edges {
        let rhs = big_c - u128::from(w.recreation);
        if u == ROOT {
            writeln!(out, " order_{u}_{v}: {big_c} x_{u}_{v} - r_{v} <= {rhs}").unwrap();
        } else {
            writeln!(
                out,
                " order_{u}_{v}: {big_c} x_{u}_{v} + r_{u} - r_{v} <= {rhs}"
            )
            .unwrap();
        }
    }

    out.push_str("Bounds\n");
    for v in 1..=n {
        writeln!(out, " 0 <= r_{v} <= {theta}").unwrap();
    }

    out.push_str("Binary\n");
    for &&(u, v, _) in &edges {
        writeln!(out, " x_{u}_{v}").unwrap();
    }
    out.push_str("End\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_solver_graph, CostMatrices, EdgeWeights, VersionGraph};

    fn two_version_star() -> SolverGraph {
        let graph = VersionGraph::new(
            2,
            vec![(1, 2)],
            vec![EdgeWeights::new(10, 10), EdgeWeights::new(12, 12)],
        )
        .unwrap();
        let mut m = CostMatrices::new(true);
        m.insert(1, 1, EdgeWeights::new(10, 10));
        m.insert(2, 2, EdgeWeights::new(12, 12));
        m.insert(1, 2, EdgeWeights::new(3, 4));
        build_solver_graph(&graph, &m).unwrap()
    }

    fn count_lines_with(text: &str, section: &str, prefix: &str) -> usize {
        let mut in_section = false;
        let mut count = 0;
        for line in text.lines() {
            if !line.starts_with(' ') {
                in_section = line == section;
                continue;
            }
            if in_section && line.trim_start().starts_with(prefix) {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn structural_counts_for_two_version_star() {
        let sg = two_version_star();
        let text = export_ilp(&sg, 20).unwrap();
        assert_eq!(count_lines_with(&text, "Binary", "x_"), 3);
        assert_eq!(count_lines_with(&text, "Subject To", "assign_"), 2);
        assert_eq!(count_lines_with(&text, "Subject To", "order_"), 3);
        assert_eq!(count_lines_with(&text, "Bounds", "0 <= r_"), 2);
    }

    #[test]
    fn big_constant_doubles_with_theta() {
        let sg = two_version_star();
        let a = export_ilp(&sg, 20).unwrap();
        let b = export_ilp(&sg, 40).unwrap();
        assert!(a.contains("40 x_0_1"));
        assert!(b.contains("80 x_0_1"));
    }

    #[test]
    fn zero_theta_rejected() {
        let sg = two_version_star();
        assert!(export_ilp(&sg, 0).is_err());
    }

    #[test]
    fn unusable_edges_are_not_emitted() {
        // At theta 11 the edge (1, 2) with recreation 4 stays usable only
        // when reached cheaply; at theta 3 every diagonal busts the bound
        // except none -- use 11 so only (2, 2) with recreation 12 drops.
        let sg = two_version_star();
        let text = export_ilp(&sg, 11).unwrap();
        assert!(
            !text.contains("x_0_2"),
            "edge over the bound must vanish:\n{text}"
        );
        assert!(text.contains("x_0_1"));
        assert!(text.contains("x_1_2"));
    }

    #[test]
    fn zero_rows_are_inert_for_plan_assignments() {
        // For any valid plan within the bound, setting r to the plan's
        // recreation costs satisfies every emitted order row, including
        // the rows of unused edges.
        let sg = two_version_star();
        let theta = 20u64;
        let big_c = 2 * theta as i128;
        let plan = crate::plan::StoragePlan::new(vec![0, 1]);
        let report = crate::plan::evaluate(&plan, &sg, None).unwrap();
        let r = |v: usize| -> i128 {
            if v == 0 {
                0
            } else {
                report.recreation_of(v) as i128
            }
        };
        for &(u, v, w) in sg.edges() {
            if w.recreation > theta {
                continue;
            }
            let x = i128::from(plan.parent(v) == u);
            let lhs = big_c * x + r(u) - r(v);
            let rhs = big_c - w.recreation as i128;
            assert!(lhs <= rhs, "row ({u}, {v}) violated: {lhs} > {rhs}");
        }
    }
}
