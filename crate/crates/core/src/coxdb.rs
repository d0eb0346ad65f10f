//! File backed database of Cox ring records: one JSON object per line,
//! UTF-8, append friendly. Lookup is by numeric id, search is an AND of
//! case insensitive substring terms over name, description and tags.
//! Writes replace the file atomically via a sibling temp file.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spacefile::{SpaceFile, SpaceFileError};

#[derive(Debug, Error)]
pub enum DbError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {source}")]
    Parse { line: usize, source: serde_json::Error },
    #[error("duplicate id {id}")]
    DuplicateId { id: u64 },
    #[error("no record with id {id}")]
    NotFound { id: u64 },
    #[error("record {id}: {source}")]
    InvalidData { id: u64, source: SpaceFileError },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DbRecord {
    pub id: u64,
    pub name: String,
    pub description: String,
    #[serde(default)]
    pub tags: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub picard_number: Option<u32>,
    pub data: SpaceFile,
    pub source: String,
}

impl DbRecord {
    fn matches(&self, term: &str) -> bool {
        self.name.to_lowercase().contains(term)
            || self.description.to_lowercase().contains(term)
            || self.tags.iter().any(|tag| tag.to_lowercase().contains(term))
    }
}

#[derive(Debug, Default, Clone)]
pub struct Database {
    records: Vec<DbRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Spacefile,
    Latex,
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "spacefile" => Ok(ExportFormat::Spacefile),
            "latex" => Ok(ExportFormat::Latex),
            other => Err(format!("unknown export format {other:?}")),
        }
    }
}

impl Database {
    pub fn new() -> Database {
        Database::default()
    }

    /// Parses a newline delimited JSON database. Every record is fully
    /// validated: ids must be unique and each payload must describe a
    /// well formed graded ring.
    pub fn parse(text: &str) -> Result<Database, DbError> {
        let mut db = Database::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let record: DbRecord = serde_json::from_str(line)
                .map_err(|source| DbError::Parse { line: i + 1, source })?;
            db.add(record)?;
        }
        Ok(db)
    }

    pub fn load(path: &Path) -> Result<Database, DbError> {
        Database::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_ndjson(&self) -> String {
        let mut out = String::new();
        for record in &self.records {
            out.push_str(&serde_json::to_string(record).expect("serializable"));
            out.push('\n');
        }
        out
    }

    /// Writes the whole database next to `path` and renames over it, so
    /// a concurrent reader never observes a half written file.
    pub fn save(&self, path: &Path) -> Result<(), DbError> {
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(format!(".tmp.{}", std::process::id()));
        let tmp = std::path::PathBuf::from(tmp);
        std::fs::write(&tmp, self.to_ndjson())?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn records(&self) -> &[DbRecord] {
        &self.records
    }

    pub fn get(&self, id: u64) -> Result<&DbRecord, DbError> {
        self.records
            .iter()
            .find(|r| r.id == id)
            .ok_or(DbError::NotFound { id })
    }

    /// AND query: terms separated by the literal word AND, each matched
    /// as a case insensitive substring of name, description or a tag.
    /// The empty query returns everything. Results are sorted by id.
    pub fn search(&self, query: &str) -> Vec<&DbRecord> {
        let terms: Vec<String> = query
            .split(" AND ")
            .map(|t| t.trim().to_lowercase())
            .filter(|t| !t.is_empty())
            .collect();
        let mut hits: Vec<&DbRecord> = self
            .records
            .iter()
            .filter(|r| terms.iter().all(|t| r.matches(t)))
            .collect();
        hits.sort_by_key(|r| r.id);
        hits
    }

    /// Appends a record after checking that the id is fresh and that the
    /// payload builds, homogeneity test included.
    pub fn add(&mut self, record: DbRecord) -> Result<(), DbError> {
        if self.records.iter().any(|r| r.id == record.id) {
            return Err(DbError::DuplicateId { id: record.id });
        }
        record
            .data
            .build(true)
            .map_err(|source| DbError::InvalidData { id: record.id, source })?;
        self.records.push(record);
        Ok(())
    }
}

pub fn export(record: &DbRecord, format: ExportFormat) -> String {
    match format {
        ExportFormat::Spacefile => record.data.to_json(),
        ExportFormat::Latex => export_latex(record),
    }
}

/// LaTeX fragment: the relations as an align* block (verbatim strings,
/// one per line) followed by the degree matrix as a tabular.
fn export_latex(record: &DbRecord) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "% {} (id {})", record.name, record.id);
    if !record.data.relations.is_empty() {
        out.push_str("\\begin{align*}\n");
        for (i, g) in record.data.relations.iter().enumerate() {
            let sep = if i + 1 < record.data.relations.len() { " \\\\" } else { "" };
            let _ = writeln!(out, "  g_{{{}}} &= {}{}", i + 1, g, sep);
        }
        out.push_str("\\end{align*}\n");
    }
    let grading = &record.data.grading;
    let cols = "r".repeat(record.data.nvars());
    let _ = writeln!(out, "\\begin{{tabular}}{{{cols}}}");
    for row in &grading.matrix {
        let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(out, "  {} \\\\", cells.join(" & "));
    }
    out.push_str("\\end{tabular}\n");
    if !grading.torsion.is_empty() {
        let orders: Vec<String> =
            grading.torsion.iter().map(|d| d.to_string()).collect();
        let _ = writeln!(
            out,
            "% the last {} row(s) are taken modulo {}",
            grading.torsion.len(),
            orders.join(", ")
        );
    }
    out
}
