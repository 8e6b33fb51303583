//! Run records: per-check results plus provenance, written as JSON with a
//! deterministic CSV companion.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    /// A check that passes when `measured <= tolerance`.
    pub fn bounded(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        CheckResult {
            name: name.into(),
            measured,
            tolerance,
            passed: measured <= tolerance,
        }
    }

    /// A check that passes when `measured >= threshold`; recorded with the
    /// threshold in the tolerance column.
    pub fn at_least(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        CheckResult {
            name: name.into(),
            measured,
            tolerance: threshold,
            passed: measured >= threshold,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub experiment: String,
    pub config_hash: String,
    pub tool_version: String,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<String>,
}

impl RunRecord {
    pub fn new(experiment: &str, config_hash: &str, seed: u64) -> Self {
        RunRecord {
            experiment: experiment.into(),
            config_hash: config_hash.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            seed,
            checks: Vec::new(),
            wall_clock_seconds: 0.0,
            outputs: Vec::new(),
        }
    }

    pub fn push(&mut self, check: CheckResult) {
        self.checks.push(check);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Deterministic CSV of the checks (no wall clock), one row per check,
    /// with the config hash and version on every row.
    pub fn write_csv(&self, path: &Path) -> anyhow::Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["check", "measured", "tolerance", "passed", "config_hash", "version"])?;
        for c in &self.checks {
            w.write_record([
                c.name.as_str(),
                &format!("{:.17e}", c.measured),
                &format!("{:.17e}", c.tolerance),
                if c.passed { "true" } else { "false" },
                self.config_hash.as_str(),
                self.tool_version.as_str(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json(&self, path: &Path) -> anyhow::Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    /// Write `<out>/<experiment>.csv` and `.json`, returning the CSV path.
    pub fn finalize(
        &mut self,
        out_dir: &Path,
        started: std::time::Instant,
    ) -> anyhow::Result<PathBuf> {
        std::fs::create_dir_all(out_dir)?;
        self.wall_clock_seconds = started.elapsed().as_secs_f64();
        let csv_path = out_dir.join(format!("{}.csv", self.experiment));
        let json_path = out_dir.join(format!("{}.json", self.experiment));
        self.outputs.push(csv_path.display().to_string());
        self.outputs.push(json_path.display().to_string());
        self.write_csv(&csv_path)?;
        self.write_json(&json_path)?;
        Ok(csv_path)
    }

    /// Print the per-check summary to stdout.
    pub fn report(&self) {
        for c in &self.checks {
            println!(
                "{:<44} {} (measured {:.3e}, tolerance {:.3e})",
                c.name,
                if c.passed { "PASS" } else { "FAIL" },
                c.measured,
                c.tolerance
            );
        }
    }
}
