use std::fmt::Write as _;

use crate::config::{DataSource, ExperimentConfig, Mode, UpdatePath};
use crate::error::Result;

/// Fixed CSV column order; the first six columns are the stable core.
pub const CSV_HEADER: [&str; 10] = [
    "path",
    "n",
    "K",
    "rmse",
    "seconds",
    "speedup",
    "rmse_updated_truth",
    "speedup_max",
    "speedup_mean",
    "mode",
];

#[derive(Debug, Clone, PartialEq)]
pub struct PathRow {
    pub mode: Mode,
    pub path: UpdatePath,
    pub n: usize,
    pub num_perms: usize,
    /// Against Jaccard on the original, unedited points.
    pub rmse: f64,
    /// Against Jaccard on the edited points.
    pub rmse_updated_truth: f64,
    /// Median over the timed repetitions.
    pub seconds: f64,
    pub rep_seconds: Vec<f64>,
    /// Median scratch time over median path time.
    pub speedup: Option<f64>,
    /// Max and mean of the per-repetition scratch/path ratios.
    pub speedup_max: Option<f64>,
    pub speedup_mean: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityCheck {
    pub n: usize,
    pub left: UpdatePath,
    pub right: UpdatePath,
    pub mismatched_slots: usize,
    pub total_slots: usize,
}

impl IdentityCheck {
    pub fn identical(&self) -> bool {
        self.mismatched_slots == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub dim: usize,
    pub points: usize,
    pub rows: Vec<PathRow>,
    pub checks: Vec<IdentityCheck>,
    /// Workload checksum per `n`.
    pub checksums: Vec<(usize, u64)>,
}

impl ExperimentReport {
    pub fn new(config: ExperimentConfig, dim: usize, points: usize) -> Self {
        Self {
            config,
            dim,
            points,
            rows: Vec::new(),
            checks: Vec::new(),
            checksums: Vec::new(),
        }
    }

    pub fn row(&self, path: UpdatePath, n: usize) -> Option<&PathRow> {
        self.rows.iter().find(|r| r.path == path && r.n == n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Human,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "human" => Ok(Format::Human),
            _ => Err(format!("unknown format {s:?} (expected csv or human)")),
        }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn emit_report(report: &ExperimentReport, format: Format) -> Result<String> {
    match format {
        Format::Csv => emit_csv(report),
        Format::Human => Ok(emit_human(report)),
    }
}

fn emit_csv(report: &ExperimentReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in &report.rows {
        w.write_record([
            r.path.name().to_string(),
            r.n.to_string(),
            r.num_perms.to_string(),
            r.rmse.to_string(),
            r.seconds.to_string(),
            opt(r.speedup),
            r.rmse_updated_truth.to_string(),
            opt(r.speedup_max),
            opt(r.speedup_mean),
            r.mode.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn emit_human(report: &ExperimentReport) -> String {
    let c = &report.config;
    let mut out = String::new();
    let source = match &c.source {
        DataSource::File(p) => p.display().to_string(),
        DataSource::Synthetic { dim, ones, points } => format!("synthetic d={dim} k={ones} points={points}"),
    };
    let _ = writeln!(out, "mode        {}", c.mode);
    let _ = writeln!(out, "data        {source}");
    let _ = writeln!(out, "points      {} (dimension {})", report.points, report.dim);
    let _ = writeln!(out, "K           {}", c.num_perms);
    if c.mode == Mode::Insert {
        let _ = writeln!(out, "one-prob    {}", c.insert_one_prob);
    }
    let _ = writeln!(out, "seed        {}", c.master_seed);
    let _ = writeln!(out, "timing      median of {} runs after 1 warm-up", c.repetitions);
    for (n, sum) in &report.checksums {
        let _ = writeln!(out, "workload    n={n} checksum={sum:016x}");
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:<11} {:>6} {:>5} {:>10} {:>12} {:>9} {:>12} {:>9} {:>9}",
        "path", "n", "K", "rmse", "seconds", "speedup", "rmse(upd)", "max", "mean"
    );
    let fmt_opt = |v: Option<f64>| v.map(|x| format!("{x:.2}x")).unwrap_or_else(|| "-".into());
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{:<11} {:>6} {:>5} {:>10.6} {:>12.6} {:>9} {:>12.6} {:>9} {:>9}",
            r.path.name(),
            r.n,
            r.num_perms,
            r.rmse,
            r.seconds,
            fmt_opt(r.speedup),
            r.rmse_updated_truth,
            fmt_opt(r.speedup_max),
            fmt_opt(r.speedup_mean),
        );
    }
    if !report.checks.is_empty() {
        let _ = writeln!(out);
        for ch in &report.checks {
            let _ = writeln!(
                out,
                "n={} {} vs {}: {} ({} of {} slots differ)",
                ch.n,
                ch.left,
                ch.right,
                if ch.identical() { "identical" } else { "MISMATCH" },
                ch.mismatched_slots,
                ch.total_slots
            );
        }
    }
    out
}
