use std::fs;
use std::path::Path;

use anyhow::Context;
use serde::Serialize;
use serde_json::Value;

use crate::config::Resolved;

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Self {
            headers: headers.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<I: IntoIterator<Item = String>>(&mut self, row: I) {
        self.rows.push(row.into_iter().collect());
    }
}

/// What a subcommand produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub results: Value,
    pub assertions: Vec<Assertion>,
    pub table: Option<Table>,
}

impl Outcome {
    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.assertions.push(Assertion {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }
}

#[derive(Serialize)]
struct RunReport<'a> {
    schema: u32,
    command: &'a str,
    version: &'a str,
    library_version: &'a str,
    rng: &'a str,
    config: &'a Resolved,
    results: &'a Value,
    assertions: &'a [Assertion],
    passed: bool,
}

#[derive(Serialize)]
struct Timing {
    schema: u32,
    wall_seconds: f64,
}

pub struct Writer<'a> {
    pub dir: &'a Path,
    pub json: bool,
    pub csv: bool,
}

impl Writer<'_> {
    pub fn write(&self, command: &str, cfg: &Resolved, out: &Outcome, wall_seconds: f64) -> anyhow::Result<()> {
        fs::create_dir_all(self.dir).with_context(|| format!("creating {}", self.dir.display()))?;
        if self.json {
            let report = RunReport {
                schema: SCHEMA,
                command,
                version: env!("CARGO_PKG_VERSION"),
                library_version: shadow_geom::VERSION,
                rng: shadow_geom::RandomSource::ALGORITHM,
                config: cfg,
                results: &out.results,
                assertions: &out.assertions,
                passed: out.passed(),
            };
            write_json(&self.dir.join("report.json"), &report)?;
            write_json(
                &self.dir.join("timing.json"),
                &Timing {
                    schema: SCHEMA,
                    wall_seconds,
                },
            )?;
        }
        if self.csv {
            if let Some(table) = &out.table {
                let path = self.dir.join("table.csv");
                let mut w = csv::Writer::from_path(&path).with_context(|| format!("creating {}", path.display()))?;
                w.write_record(&table.headers)?;
                for row in &table.rows {
                    w.write_record(row)?;
                }
                w.flush()?;
            }
        }
        Ok(())
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
