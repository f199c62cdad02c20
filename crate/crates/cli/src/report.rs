use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

/// Named check of a report; `invariant` points at the property it tests.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub invariant: String,
    pub passed: bool,
    pub detail: String,
}

impl Assertion {
    pub fn new(name: &str, invariant: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            invariant: invariant.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// A CSV export: file name, header and rows.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub file: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(file: &str, header: &[&str]) -> Self {
        Self {
            file: file.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: &[f64]) {
        self.rows
            .push(row.iter().map(|v| format!("{v:e}")).collect());
    }

    pub fn push_cells(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(dir.join(&self.file))?);
        writeln!(out, "{}", self.header.join(","))?;
        for row in &self.rows {
            writeln!(out, "{}", row.join(","))?;
        }
        out.flush()
    }
}

/// What a scenario hands back to the runner.
#[derive(Debug, Default)]
pub struct Outcome {
    pub assertions: Vec<Assertion>,
    pub results: serde_json::Map<String, Value>,
    pub tables: Vec<Table>,
}

impl Outcome {
    pub fn check(&mut self, name: &str, invariant: &str, passed: bool, detail: impl Into<String>) {
        self.assertions
            .push(Assertion::new(name, invariant, passed, detail));
    }

    pub fn result(&mut self, key: &str, value: impl Serialize) {
        self.results.insert(
            key.into(),
            serde_json::to_value(value).expect("result serializes"),
        );
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub scenario: String,
    pub seed: u64,
    pub expect_violation: bool,
    pub parameters: Value,
    pub assertions: Vec<Assertion>,
    pub results: serde_json::Map<String, Value>,
    pub exports: Vec<String>,
    pub pass: bool,
}

impl Report {
    pub fn failing(&self) -> Vec<&Assertion> {
        self.assertions.iter().filter(|a| !a.passed).collect()
    }
}
