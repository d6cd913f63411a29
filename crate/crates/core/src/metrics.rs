//! Run instrumentation and the files derived from it.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use thiserror::Error;

use crate::engine::RunReport;

/// One master-loop observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub elapsed_seconds: f64,
    pub busy_workers: usize,
    pub joblist_len: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunMetrics {
    pub samples: Vec<Sample>,
}

pub fn write_histogram<W: Write>(metrics: &RunMetrics, mut out: W) -> io::Result<()> {
    writeln!(out, "elapsed_seconds,busy_workers,joblist_len")?;
    for s in &metrics.samples {
        writeln!(
            out,
            "{:.3},{},{}",
            s.elapsed_seconds, s.busy_workers, s.joblist_len
        )?;
    }
    out.flush()
}

pub fn write_frequencies<W: Write>(report: &RunReport, mut out: W) -> io::Result<()> {
    for f in &report.frequencies {
        writeln!(out, "{f}")?;
    }
    out.flush()
}

/// Writes whichever of the histogram and frequency files were requested.
/// Failures are returned as warnings; they never affect the run result.
pub fn emit_histograms(
    metrics: &RunMetrics,
    report: &RunReport,
    hist: Option<&Path>,
    freq: Option<&Path>,
) -> Vec<String> {
    let mut warnings = Vec::new();
    let mut emit = |path: &Path, f: &dyn Fn(BufWriter<File>) -> io::Result<()>| {
        if let Err(e) = File::create(path).and_then(|file| f(BufWriter::new(file))) {
            warnings.push(format!("cannot write {}: {e}", path.display()));
        }
    };
    if let Some(p) = hist {
        emit(p, &|w| write_histogram(metrics, w));
    }
    if let Some(p) = freq {
        emit(p, &|w| write_frequencies(report, w));
    }
    warnings
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyRecord {
    pub single_seconds: f64,
    pub cores: u32,
    pub multi_seconds: f64,
    pub efficiency: f64,
    pub speedup: f64,
}

#[derive(Debug, Error, PartialEq)]
#[error("efficiency inputs must be positive (single={single}, cores={cores}, multi={multi})")]
pub struct EfficiencyError {
    pub single: f64,
    pub cores: u32,
    pub multi: f64,
}

/// efficiency = single / (cores * multi); speedup = efficiency * cores.
pub fn compute_efficiency(
    single_seconds: f64,
    cores: u32,
    multi_seconds: f64,
) -> Result<EfficiencyRecord, EfficiencyError> {
    let valid = |x: f64| x.is_finite() && x > 0.0;
    if !valid(single_seconds) || cores == 0 || !valid(multi_seconds) {
        return Err(EfficiencyError {
            single: single_seconds,
            cores,
            multi: multi_seconds,
        });
    }
    let efficiency = single_seconds / (f64::from(cores) * multi_seconds);
    Ok(EfficiencyRecord {
        single_seconds,
        cores,
        multi_seconds,
        efficiency,
        speedup: efficiency * f64::from(cores),
    })
}
