use std::fs;
use std::path::{Path, PathBuf};

use lqrpid::SimTrace;
use serde::Serialize;

use crate::error::CliError;

/// Significant digits written to CSV files.
pub const CSV_DIGITS: usize = 15;

/// Plain decimal rendering with [`CSV_DIGITS`] significant digits.
pub fn decimal(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return format!("{:.*}", CSV_DIGITS - 1, 0.0);
    }
    let magnitude = x.abs().log10().floor() as i64;
    let places = (CSV_DIGITS as i64 - 1 - magnitude).max(0) as usize;
    format!("{x:.places$}")
}

/// Rounds to `places` decimals.
pub fn round_to(x: f64, places: i32) -> f64 {
    let s = 10f64.powi(places);
    (x * s).round() / s
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(io_err(root))?;
        Ok(Self { root: root.to_path_buf() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_json<S: Serialize>(&self, name: &str, value: &S) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        let mut text = serde_json::to_string_pretty(value).expect("result records serialize");
        text.push('\n');
        fs::write(&path, text).map_err(io_err(&path))?;
        Ok(path)
    }

    pub fn write_csv(&self, name: &str, header: &[String], rows: &[Vec<f64>]) -> Result<PathBuf, CliError> {
        let text: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|&v| decimal(v)).collect()).collect();
        self.write_records(name, header, &text)
    }

    /// CSV with preformatted cells.
    pub fn write_records(&self, name: &str, header: &[String], rows: &[Vec<String>]) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        let to_io = |e: csv::Error| CliError::Io { path: path.display().to_string(), source: e.into() };
        let mut w = csv::Writer::from_path(&path).map_err(to_io)?;
        w.write_record(header).map_err(to_io)?;
        for row in rows {
            w.write_record(row).map_err(to_io)?;
        }
        w.flush().map_err(io_err(&path))?;
        Ok(path)
    }

    /// `t,r,y,u,e`, one row per sample.
    pub fn write_trace(&self, name: &str, trace: &SimTrace<f64>) -> Result<PathBuf, CliError> {
        let header: Vec<String> = ["t", "r", "y", "u", "e"].iter().map(|s| s.to_string()).collect();
        let rows: Vec<Vec<f64>> = (0..trace.len())
            .map(|k| vec![trace.times[k], trace.setpoint, trace.y[k], trace.u[k], trace.e[k]])
            .collect();
        self.write_csv(name, &header, &rows)
    }
}
