//! Deterministic experiment reports: a JSON document plus one CSV per table.
//!
//! Reports are pure functions of (config, seed): tables are assembled in
//! sorted key order, statistics carry their parameter keys, and timing is
//! deliberately kept out of the JSON (it goes to a sidecar) so that two runs
//! with the same config produce byte-identical report files.

use crate::config::ExperimentConfig;
use serde::Serialize;
use std::io::Write;
use std::path::Path;
use vnlw_core::random::McStat;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    pub fn check(name: &str, pass: bool, detail: String) -> Self {
        Self { name: name.into(), pass, detail }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FitEntry {
    pub name: String,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StatEntry {
    pub name: String,
    pub estimate: f64,
    pub stderr: f64,
    pub samples: usize,
    pub ci95: (f64, f64),
}

impl StatEntry {
    pub fn from_mc(name: &str, st: &McStat) -> Self {
        Self {
            name: name.into(),
            estimate: st.estimate,
            stderr: st.stderr,
            samples: st.samples,
            ci95: st.ci95,
        }
    }
}

/// One rectangular table destined for `<name>.csv`.
#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }

    fn write_csv(&self, dir: &Path) -> anyhow::Result<()> {
        let path = dir.join(format!("{}.csv", self.name));
        let mut f = std::fs::File::create(path)?;
        writeln!(f, "# schema=vnlw.{}.v{}", self.name, SCHEMA_VERSION)?;
        writeln!(f, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            writeln!(f, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub experiment: String,
    /// Full parsed configuration, echoed back.
    pub config: ExperimentConfig,
    /// Number of lattice modes the main grid carries.
    pub mode_count: usize,
    pub tables: Vec<Table>,
    pub fits: Vec<FitEntry>,
    pub stats: Vec<StatEntry>,
    pub verdicts: Vec<Verdict>,
    /// Set when a typed resource ceiling was reached (exit code 3).
    pub ceiling: Option<String>,
}

impl ExperimentReport {
    pub fn new(cfg: &ExperimentConfig) -> Self {
        let mode_count = cfg
            .grid
            .build()
            .map(|g| g.len())
            .unwrap_or(0);
        Self {
            schema_version: SCHEMA_VERSION,
            experiment: cfg.experiment.name().into(),
            config: cfg.clone(),
            mode_count,
            tables: Vec::new(),
            fits: Vec::new(),
            stats: Vec::new(),
            verdicts: Vec::new(),
            ceiling: None,
        }
    }

    pub fn verdict(&mut self, name: &str, pass: bool, detail: String) {
        self.verdicts.push(Verdict::check(name, pass, detail));
    }

    pub fn fit(&mut self, name: &str, fit: &vnlw_core::fit::LogLogFit<f64>) {
        self.fits.push(FitEntry {
            name: name.into(),
            slope: fit.slope,
            intercept: fit.intercept,
            r_squared: fit.r_squared,
        });
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Write `report.json` and one CSV per table into `dir`.
    pub fn write(&self, dir: &Path) -> anyhow::Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), self.to_json())?;
        for t in &self.tables {
            t.write_csv(dir)?;
        }
        Ok(())
    }
}

/// Exit-code contract: 0 pass, 1 malformed config (decided by the caller),
/// 2 verdict failure, 3 resource ceiling.
pub fn exit_code(report: &ExperimentReport) -> i32 {
    if report.ceiling.is_some() {
        3
    } else if report.all_pass() {
        0
    } else {
        2
    }
}
