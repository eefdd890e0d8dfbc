//! The (p, k, n) classification table as a validated lookup.
//!
//! The table ships as `data/classification.json`. Its column index is read
//! as the space dimension n; p only enters through the range check
//! `k ≤ p ≤ 3`. Entries carrying a trailing `?` are kept verbatim and
//! flagged uncertain.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

const BUILTIN: &str = include_str!("../data/classification.json");

pub const MAX_P: usize = 3;
pub const MAX_N: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interaction {
    Strong,
    Weak,
    Electromagnetic,
    Gravitation,
}

impl Interaction {
    pub fn from_degree(k: usize) -> Option<Self> {
        Some(match k {
            0 => Interaction::Strong,
            1 => Interaction::Weak,
            2 => Interaction::Electromagnetic,
            3 => Interaction::Gravitation,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Interaction::Strong => "strong",
            Interaction::Weak => "weak",
            Interaction::Electromagnetic => "electromagnetic",
            Interaction::Gravitation => "gravitation",
        }
    }
}

impl fmt::Display for Interaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    columns: Vec<usize>,
    rows: Vec<RowFile>,
    material_particles: MaterialFile,
    metric_dimension: MetricFile,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RowFile {
    k: usize,
    interaction: Interaction,
    cells: Vec<CellFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CellFile {
    column: usize,
    structure: String,
    sources: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaterialFile {
    label: String,
    kind: String,
    by_column: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetricFile {
    by_column: Vec<MetricDimension>,
}

/// A table entry, with its `?` flag split out.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Entry {
    /// Verbatim text, including any trailing `?`.
    pub name: String,
    pub uncertain: bool,
}

impl Entry {
    fn new(name: &str) -> Self {
        Entry {
            name: name.to_string(),
            uncertain: name.ends_with('?'),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricDimension {
    pub n: usize,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Cell {
    structure: Entry,
    sources: Vec<Entry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationTable {
    /// `cells[k][column]`.
    cells: Vec<Vec<Option<Cell>>>,
    material: Vec<Entry>,
    material_label: Entry,
    material_kind: String,
    metric: Vec<MetricDimension>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CellStatus {
    #[serde(rename = "STRUCTURE")]
    Structure,
    #[serde(rename = "NO-STRUCTURE")]
    NoStructure,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationRecord {
    pub p: usize,
    pub k: usize,
    pub n: usize,
    pub interaction: Interaction,
    pub status: CellStatus,
    pub structure: Option<Entry>,
    /// True when the structure or any source carries a `?`.
    pub uncertain: bool,
    pub sources: Vec<Entry>,
    pub material_particle: Entry,
    pub metric_dimension: MetricDimension,
    /// `n + 1 − k`; zero or negative on the table's blank cells.
    pub pseudostructure_dim: i64,
}

impl ClassificationTable {
    pub fn builtin() -> Self {
        ClassificationTable::from_json(BUILTIN).expect("bundled classification table is valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: TableFile =
            serde_json::from_str(text).map_err(|e| Error::Table(format!("{e}")))?;
        let ncols = MAX_N + 1;
        if file.columns != (0..ncols).collect::<Vec<_>>() {
            return Err(Error::Table(format!("columns must be 0..={MAX_N}")));
        }
        let mut cells: Vec<Vec<Option<Cell>>> =
            (0..=MAX_P).map(|_| alloc::vec![None; ncols]).collect();
        let mut seen = [false; MAX_P + 1];
        for row in file.rows {
            if row.k > MAX_P || seen[row.k] {
                return Err(Error::Table(format!("bad or repeated row k = {}", row.k)));
            }
            seen[row.k] = true;
            if Interaction::from_degree(row.k) != Some(row.interaction) {
                return Err(Error::Table(format!(
                    "row k = {} names interaction {}",
                    row.k, row.interaction
                )));
            }
            for cell in row.cells {
                if cell.column >= ncols || cells[row.k][cell.column].is_some() {
                    return Err(Error::Table(format!(
                        "bad or repeated cell ({}, {})",
                        row.k, cell.column
                    )));
                }
                if cell.column < row.k {
                    return Err(Error::Table(format!(
                        "cell ({}, {}) lies where no closed {}-form fits",
                        row.k, cell.column, row.k
                    )));
                }
                cells[row.k][cell.column] = Some(Cell {
                    structure: Entry::new(&cell.structure),
                    sources: cell.sources.iter().map(|s| Entry::new(s)).collect(),
                });
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Table("missing row".into()));
        }
        if file.material_particles.by_column.len() != ncols
            || file.metric_dimension.by_column.len() != ncols
        {
            return Err(Error::Table("bottom rows must cover every column".into()));
        }
        Ok(ClassificationTable {
            cells,
            material: file
                .material_particles
                .by_column
                .iter()
                .map(|s| Entry::new(s))
                .collect(),
            material_label: Entry::new(&file.material_particles.label),
            material_kind: file.material_particles.kind,
            metric: file.metric_dimension.by_column,
        })
    }

    /// Label of the material-particle row, e.g. for rendering.
    pub fn material_label(&self) -> &Entry {
        &self.material_label
    }

    pub fn material_kind(&self) -> &str {
        &self.material_kind
    }

    pub fn classify(&self, p: usize, k: usize, n: usize) -> Result<ClassificationRecord> {
        if p > MAX_P {
            return Err(Error::ClassifyRange(format!("p = {p} exceeds {MAX_P}")));
        }
        if k > p {
            return Err(Error::ClassifyRange(format!("k = {k} exceeds p = {p}")));
        }
        if n > MAX_N {
            return Err(Error::ClassifyRange(format!("n = {n} exceeds {MAX_N}")));
        }
        let interaction = Interaction::from_degree(k).expect("k ≤ 3");
        let cell = self.cells[k][n].as_ref();
        let structure = cell.map(|c| c.structure.clone());
        let sources = cell.map(|c| c.sources.clone()).unwrap_or_default();
        let uncertain =
            structure.as_ref().is_some_and(|s| s.uncertain) || sources.iter().any(|s| s.uncertain);
        Ok(ClassificationRecord {
            p,
            k,
            n,
            interaction,
            status: if structure.is_some() {
                CellStatus::Structure
            } else {
                CellStatus::NoStructure
            },
            structure,
            uncertain,
            sources,
            material_particle: self.material[n].clone(),
            metric_dimension: self.metric[n].clone(),
            pseudostructure_dim: n as i64 + 1 - k as i64,
        })
    }
}

/// Lookup in the bundled table.
pub fn classify(p: usize, k: usize, n: usize) -> Result<ClassificationRecord> {
    ClassificationTable::builtin().classify(p, k, n)
}
