//! The JSON report and CSV tables written by every command.

use std::io::Write;
use std::path::Path;

use enhanced_zeta::report::{CheckRecord, Tolerance};
use serde::Serialize;

use crate::config::RunConfig;

pub const SCHEMA_VERSION: u32 = 1;

/// A named table of plot-ready values; empty cells are `None`.
#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
#[serde(untagged)]
pub enum Cell {
    Num(Option<f64>),
    Text(String),
}

impl Cell {
    pub fn num(v: f64) -> Self {
        Cell::Num(v.is_finite().then_some(v))
    }

    fn csv(&self) -> String {
        match self {
            Cell::Num(Some(v)) => format!("{v:e}"),
            Cell::Num(None) => String::new(),
            Cell::Text(t) => t.clone(),
        }
    }
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct Environment {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: RunConfig,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct Report {
    pub schema_version: u32,
    pub environment: Environment,
    pub summary: Summary,
    pub records: Vec<CheckRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub tables: Vec<Table>,
}

impl Report {
    /// Sorts records by id and applies any tolerance override.
    pub fn new(config: &RunConfig, mut records: Vec<CheckRecord>, tables: Vec<Table>) -> Self {
        if let Some(t) = config.tol {
            records = records.into_iter().map(|r| override_tolerance(r, t)).collect();
        }
        records.sort_by(|a, b| a.id.cmp(&b.id));
        let passed = records.iter().filter(|r| r.pass).count();
        Self {
            schema_version: SCHEMA_VERSION,
            environment: Environment { tool: "enhanced-zeta", version: env!("CARGO_PKG_VERSION"), config: config.clone() },
            summary: Summary { total: records.len(), passed, failed: records.len() - passed },
            records,
            tables,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn write_json(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json())
    }

    /// Writes every table to `path`; with several tables the table name is
    /// inserted before the extension.
    pub fn write_csv(&self, path: &Path) -> std::io::Result<()> {
        for (k, table) in self.tables.iter().enumerate() {
            let target = if k == 0 {
                path.to_path_buf()
            } else {
                let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("table");
                let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("csv");
                path.with_file_name(format!("{stem}.{}.{ext}", table.name))
            };
            write_table(table, std::fs::File::create(target)?)?;
        }
        Ok(())
    }

    /// One line per record.
    pub fn text_summary(&self) -> String {
        let mut s = String::new();
        for r in &self.records {
            s.push_str(&r.summary());
            s.push('\n');
        }
        s.push_str(&format!("{} passed, {} failed\n", self.summary.passed, self.summary.failed));
        s
    }
}

fn override_tolerance(record: CheckRecord, t: f64) -> CheckRecord {
    let tol = match record.tolerance {
        Tolerance::Relative(_) => Tolerance::Relative(t),
        Tolerance::Stderr(_) => Tolerance::Stderr(t),
        Tolerance::Absolute(_) => Tolerance::Absolute(t),
        Tolerance::Exact => return record,
    };
    record.with_tolerance(tol)
}

pub fn write_table(table: &Table, out: impl Write) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::csv))?;
    }
    w.flush()
}
