//! Reference tables of strata and their comparison with computed records.
//!
//! Rows are compared as multisets of formatted cells. Conjugacy names of the
//! symplectic groups and the component counts `(r, c)` are not recomputed;
//! the symplectic group order is.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::census::Record;
use crate::symmetry::acts_trivially_on_discriminant;

/// One row of a reference table.
#[derive(Debug, Clone, Copy)]
pub struct GoldenRow {
    pub label: &'static str,
    /// Cluster types, numbered from 1 in the order of the codim-1 table.
    pub clusters: &'static [usize],
    pub lines: usize,
    pub reducible: usize,
    pub conics: usize,
    pub aut: &'static str,
    pub i_delta: u128,
    pub symplectic: u128,
    /// `|det|` with the Fano index as `^k`; empty for rank 20.
    pub det: &'static str,
    pub transcendental: &'static [&'static str],
}

const fn row(
    label: &'static str,
    clusters: &'static [usize],
    lines: usize,
    reducible: usize,
    conics: usize,
    aut: &'static str,
    i_delta: u128,
    symplectic: u128,
    det: &'static str,
    transcendental: &'static [&'static str],
) -> GoldenRow {
    GoldenRow {
        label,
        clusters,
        lines,
        reducible,
        conics,
        aut,
        i_delta,
        symplectic,
        det,
        transcendental,
    }
}

pub const CODIM1_ROWS: &[GoldenRow] = &[
    row("", &[1], 4, 0, 32, "1152", 2, 16, "400", &[]),
    row("", &[2], 20, 16, 20, "576", 1, 16, "144", &[]),
    row("", &[3], 0, 0, 40, "1024·16", 2, 16, "576^2", &[]),
    row("", &[4], 0, 0, 64, "3072", 4, 16, "384", &[]),
    row("", &[5], 0, 0, 80, "2048", 2, 16, "320", &[]),
];

pub const CODIM2_ROWS: &[GoldenRow] = &[
    row("", &[1, 1], 8, 0, 32, "384", 2, 16, "240", &[]),
    row("", &[1, 1, 5], 8, 8, 72, "256", 2, 16, "160", &[]),
    row("", &[1, 2, 4], 24, 32, 36, "192", 2, 16, "80", &[]),
    row("same1", &[1, 3], 4, 0, 40, "64", 1, 16, "320", &[]),
    row("same1", &[1, 3], 4, 0, 40, "64", 1, 16, "320", &[]),
    row("", &[1, 4], 4, 0, 64, "384", 4, 16, "240", &[]),
    row("", &[2, 3], 20, 16, 28, "64", 1, 16, "128", &[]),
    row("", &[3, 3], 0, 0, 48, "256", 2, 16, "416", &[]),
    row("", &[3, 3], 0, 0, 48, "512·16", 2, 16, "512^2", &[]),
    row("", &[3, 3], 0, 0, 48, "512", 2, 16, "512", &[]),
    row("", &[3, 3, 4], 0, 0, 80, "512", 4, 16, "288", &[]),
    row("", &[3, 4], 0, 0, 72, "512", 4, 16, "320", &[]),
    row("", &[3, 5], 0, 0, 88, "256", 2, 16, "288", &[]),
    row("", &[4, 4], 0, 0, 96, "2304", 6, 48, "224", &[]),
    row("", &[4, 5], 0, 0, 112, "1024", 4, 16, "192", &[]),
    row("maxr1", &[5, 5], 0, 0, 128, "1024", 2, 32, "160", &[]),
];

pub const RIGID_LARGE: &[GoldenRow] = &[
    row("X176", &[5, 5, 5], 0, 0, 176, "15360", 10, 960, "", &["[8,4,12]"]),
    row("X160", &[4, 5, 5], 0, 0, 160, "3072", 12, 192, "", &["[4,0,24]"]),
    row("", &[3, 5, 5], 0, 0, 136, "512", 2, 32, "", &["[4,0,36]"]),
    row("", &[1, 1, 1, 1, 5, 5], 16, 32, 96, "256", 2, 32, "", &["[4,2,16]"]),
    row("", &[3, 3, 3, 4, 4], 0, 0, 120, "384", 6, 48, "", &["[8,4,20]"]),
    row("", &[3, 4, 5], 0, 0, 120, "256", 4, 16, "", &["[8,0,20]"]),
    row("", &[1, 1, 4, 5], 8, 8, 104, "256", 4, 16, "", &["[4,0,24]"]),
    row("maxr2", &[1, 1, 2, 4, 4], 28, 48, 52, "288", 3, 48, "", &["[4,2,12]"]),
    row("", &[1, 4, 4], 4, 0, 96, "576", 6, 48, "", &["[4,2,36]"]),
    row("", &[3, 3, 5], 0, 0, 96, "256", 2, 16, "", &["[8,4,28]"]),
    row("", &[3, 3, 5], 0, 0, 96, "256", 2, 16, "", &["[8,0,32]"]),
    row("", &[3, 3, 5], 0, 0, 96, "256", 2, 16, "", &["[8,0,32]"]),
    row("", &[3, 3, 3, 3, 4], 0, 0, 96, "256", 4, 32, "", &["[8,0,24]"]),
    row("", &[3, 3, 3, 4], 0, 0, 88, "128", 4, 16, "", &["[8,4,32]"]),
    row("", &[1, 1, 3, 5], 8, 8, 80, "32", 2, 16, "", &["[4,2,32]", "[8,2,16]"]),
    row("", &[1, 2, 3, 3, 4], 24, 32, 52, "64", 2, 16, "", &["[8,2,8]"]),
];

pub const RIGID_OTHER: &[GoldenRow] = &[
    row("", &[1, 3, 3, 4], 4, 0, 80, "64", 4, 16, "", &["[8,2,20]"]),
    row("", &[3, 3, 4], 0, 0, 80, "256", 4, 32, "", &["[12,4,20]"]),
    row("", &[1, 1, 1, 1, 5], 16, 16, 64, "512", 2, 32, "", &["[8,4,12]"]),
    row("", &[1, 2, 3, 4], 24, 32, 44, "64", 2, 16, "", &["[4,0,16]"]),
    row("same1", &[1, 3, 4], 4, 0, 72, "64", 2, 16, "", &["[4,0,44]", "[12,4,16]"]),
    row("same1", &[1, 3, 4], 4, 0, 72, "64", 2, 16, "", &["[4,0,44]", "[12,4,16]"]),
    row("", &[1, 1, 4], 8, 0, 64, "256", 4, 32, "", &["[12,0,12]"]),
    row("", &[3, 3, 3, 3], 0, 0, 64, "256", 2, 32, "", &["[8,0,32]"]),
    row("", &[3, 3, 3], 0, 0, 56, "384", 2, 48, "", &["[4,0,68]", "[8,4,36]"]),
    row("", &[3, 3, 3], 0, 0, 56, "64", 2, 16, "", &["[8,4,48]", "[16,4,24]"]),
    row("", &[2, 3, 3], 20, 16, 36, "64", 1, 16, "", &["[8,4,16]"]),
    row("", &[2, 3, 3], 20, 16, 36, "64", 1, 16, "", &["[8,4,16]"]),
    row("", &[2, 3, 3], 20, 16, 36, "32", 1, 16, "", &["[4,2,24]", "[8,2,12]"]),
    row("", &[1, 1, 3, 3], 8, 0, 48, "64", 2, 16, "", &["[8,2,20]"]),
    row("", &[1, 3, 3], 4, 0, 48, "64", 2, 16, "", &["[16,0,16]"]),
    row("", &[1, 3, 3], 4, 0, 48, "64", 2, 16, "", &["[16,0,16]"]),
    row("same2", &[1, 3, 3], 4, 0, 48, "64", 1, 16, "", &["[8,4,32]"]),
    row("same2", &[1, 3, 3], 4, 0, 48, "64", 1, 16, "", &["[8,4,32]"]),
    row("same3", &[1, 3, 3], 4, 0, 48, "64", 1, 16, "", &["[8,4,32]"]),
    row("same3", &[1, 3, 3], 4, 0, 48, "64", 1, 16, "", &["[8,4,32]"]),
    row("same4", &[1, 3, 3], 4, 0, 48, "32", 1, 16, "", &["[4,2,56]", "[16,6,16]"]),
    row("same4", &[1, 3, 3], 4, 0, 48, "32", 1, 16, "", &["[4,2,56]", "[16,6,16]"]),
    row("same5", &[1, 1, 3], 8, 0, 40, "64", 1, 16, "", &["[4,0,44]", "[12,4,16]"]),
    row("same5", &[1, 1, 3], 8, 0, 40, "64", 1, 16, "", &["[4,0,44]", "[12,4,16]"]),
    row("", &[1, 1, 1], 12, 0, 32, "576", 2, 48, "", &["[4,2,36]"]),
];

/// Formatted cells of a row, in table order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Cells {
    pub clusters: String,
    pub lines: String,
    pub conics: String,
    pub aut: String,
    pub i_delta: String,
    pub symplectic: String,
    pub det: String,
    pub transcendental: String,
}

impl Cells {
    pub fn header() -> &'static str {
        "clusters;lines;conics;aut;i_delta;symplectic;det;transcendental"
    }

    pub fn to_csv(&self) -> String {
        [
            &self.clusters,
            &self.lines,
            &self.conics,
            &self.aut,
            &self.i_delta,
            &self.symplectic,
            &self.det,
            &self.transcendental,
        ]
        .iter()
        .map(|s| s.as_str())
        .collect::<Vec<_>>()
        .join(";")
    }
}

fn conics_cell(reducible: usize, conics: usize) -> String {
    if reducible > 0 {
        format!("{reducible}+{conics}")
    } else {
        conics.to_string()
    }
}

fn lines_cell(lines: usize) -> String {
    if lines > 0 {
        lines.to_string()
    } else {
        "-".into()
    }
}

impl GoldenRow {
    pub fn cells(&self) -> Cells {
        Cells {
            clusters: self.clusters.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","),
            lines: lines_cell(self.lines),
            conics: conics_cell(self.reducible, self.conics),
            aut: self.aut.to_string(),
            i_delta: self.i_delta.to_string(),
            symplectic: self.symplectic.to_string(),
            det: self.det.to_string(),
            transcendental: self.transcendental.join(" "),
        }
    }
}

/// Number of elements of the lattice stabilizer fixing `h` that act
/// trivially on the discriminant (symplectic automorphisms).
pub fn symplectic_order(rec: &Record) -> Option<u128> {
    let elems = rec.absolute.stabilizer_elements(&rec.graph, 1 << 20)?;
    let lat = rec.lattice();
    Some(elems.iter().filter(|m| acts_trivially_on_discriminant(lat, m)).count() as u128)
}

pub fn record_cells(rec: &Record) -> Cells {
    let mut clusters = rec.clusters.clone();
    clusters.sort_unstable();
    let aut = if rec.oh_index() > 1 {
        format!("{}·{}", rec.oh_order(), rec.oh_index())
    } else {
        rec.aut_order().to_string()
    };
    let det = if rec.rank() == 20 {
        String::new()
    } else if rec.fano_index > 1 {
        format!("{}^{}", rec.det(), rec.fano_index)
    } else {
        rec.det().to_string()
    };
    Cells {
        clusters: clusters.iter().map(|c| (c + 1).to_string()).collect::<Vec<_>>().join(","),
        lines: lines_cell(rec.lines()),
        conics: conics_cell(rec.reducible(), rec.conics()),
        aut,
        i_delta: rec.i_delta().to_string(),
        symplectic: symplectic_order(rec).map_or("?".into(), |o| o.to_string()),
        det,
        transcendental: rec.transcendental.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" "),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TableDiff {
    pub name: String,
    pub expected: usize,
    pub computed: usize,
    /// Rows in the reference but not computed (with multiplicity).
    pub missing: Vec<Cells>,
    /// Rows computed but not in the reference.
    pub extra: Vec<Cells>,
    pub skipped: Vec<&'static str>,
}

impl TableDiff {
    pub fn is_match(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }
}

/// Multiset comparison of reference and computed rows.
pub fn compare(name: &str, golden: &[GoldenRow], computed: &[Cells]) -> TableDiff {
    let mut count: BTreeMap<Cells, i64> = BTreeMap::new();
    for g in golden {
        *count.entry(g.cells()).or_insert(0) += 1;
    }
    for c in computed {
        *count.entry(c.clone()).or_insert(0) -= 1;
    }
    let mut missing = Vec::new();
    let mut extra = Vec::new();
    for (cells, n) in count {
        for _ in 0..n.max(0) {
            missing.push(cells.clone());
        }
        for _ in 0..(-n).max(0) {
            extra.push(cells.clone());
        }
    }
    TableDiff {
        name: name.to_string(),
        expected: golden.len(),
        computed: computed.len(),
        missing,
        extra,
        skipped: vec!["symplectic group names and index superscripts", "component counts (r,c)"],
    }
}

/// Splits rank-20 records between the two rigid tables (more than 80
/// conics in total, or not).
pub fn split_rigid(records: &[Record]) -> (Vec<&Record>, Vec<&Record>) {
    records.iter().partition(|r| r.conics() + r.reducible() > 80)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_totals() {
        assert_eq!(CODIM1_ROWS.len(), 5);
        assert_eq!(CODIM2_ROWS.len(), 16);
        assert_eq!(RIGID_LARGE.len() + RIGID_OTHER.len(), 41);
        let max_lines = RIGID_LARGE.iter().chain(RIGID_OTHER).map(|r| r.lines).max();
        assert_eq!(max_lines, Some(28));
    }

    #[test]
    fn multiset_comparison() {
        let cells: Vec<Cells> = CODIM2_ROWS.iter().map(|r| r.cells()).collect();
        assert!(compare("t2", CODIM2_ROWS, &cells).is_match());
        let d = compare("t2", CODIM2_ROWS, &cells[1..]);
        assert_eq!(d.missing.len(), 1);
        assert!(d.extra.is_empty());
    }
}
