//! File outputs: fixed-schema CSV for time series, JSON reports that embed
//! the resolved config and the build version. Float text carries 17
//! significant digits so repeated runs diff clean.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use becrad::experiments::{ScalingSweepResult, SweepRecord};
use becrad::{Error, TimeSeries};

use crate::config::RunConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn io_err(context: &str, err: std::io::Error) -> Error {
    Error::InvalidConfig(format!("{context}: {err}"))
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_timeseries_csv(path: &Path, series: &TimeSeries) -> Result<(), Error> {
    let mut out = String::with_capacity(series.len() * 120 + 64);
    out.push_str("t,norm2,x_mean,v_mean,a_mean,a2_mean\n");
    for i in 0..series.len() {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt(series.times[i]),
            fmt(series.norm2[i]),
            fmt(series.x_mean[i]),
            fmt(series.v_mean[i]),
            fmt(series.a_mean[i]),
            fmt(series.a2_mean[i]),
        ));
    }
    fs::write(path, out).map_err(|e| io_err("writing time-series CSV", e))
}

fn sweep_csv_row(r: &SweepRecord) -> String {
    let (ch, ci, ce) = match &r.coupled {
        Some(c) => (fmt(c.i_hydro), fmt(c.i_incoherent), fmt(c.e_condensate)),
        None => (String::new(), String::new(), String::new()),
    };
    format!(
        "{},{},{},{},{},{},{},{},{},{}\n",
        fmt(r.sigma),
        fmt(r.i_hydro),
        fmt(r.i_incoherent),
        fmt(r.e_condensate),
        fmt(r.impulse),
        fmt(r.norm_drift),
        r.violations.len(),
        ch,
        ci,
        ce,
    )
}

pub fn write_sweep_csv(path: &Path, result: &ScalingSweepResult) -> Result<(), Error> {
    let mut out = String::new();
    out.push_str(
        "sigma,i_hydro,i_incoherent,e_condensate,impulse,norm_drift,n_violations,\
         i_hydro_coupled,i_incoherent_coupled,e_condensate_coupled\n",
    );
    for r in &result.records {
        out.push_str(&sweep_csv_row(r));
    }
    fs::write(path, out).map_err(|e| io_err("writing sweep CSV", e))
}

/// Outcome of `--check`, embedded in the report and mapped to the exit code.
#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub passed: bool,
    pub failures: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct Report<'a, T: Serialize> {
    pub version: &'static str,
    pub experiment: &'a str,
    pub config: &'a RunConfig,
    pub warnings: &'a [String],
    #[serde(flatten)]
    pub payload: T,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check: Option<&'a CheckOutcome>,
}

pub fn write_json<T: Serialize>(path: &Path, report: &T) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(report)
        .map_err(|e| Error::InvalidConfig(format!("serializing report: {e}")))?;
    let mut file = fs::File::create(path).map_err(|e| io_err("creating report file", e))?;
    file.write_all(text.as_bytes())
        .and_then(|_| file.write_all(b"\n"))
        .map_err(|e| io_err("writing report file", e))
}

/// Output directory after the `BECRAD_OUTPUT_DIR` override, created on demand.
pub fn resolve_output_dir(config_dir: &Path) -> Result<PathBuf, Error> {
    let dir = match std::env::var_os("BECRAD_OUTPUT_DIR") {
        Some(v) => PathBuf::from(v),
        None => config_dir.to_path_buf(),
    };
    fs::create_dir_all(&dir).map_err(|e| io_err("creating output directory", e))?;
    Ok(dir)
}
