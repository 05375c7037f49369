use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Insert,
    Delete,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Insert => "insert",
            Mode::Delete => "delete",
        })
    }
}

/// The ways a sketch is brought to the new dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UpdatePath {
    /// One single-feature update per edited feature.
    Sequential,
    /// One batch update for all edited features.
    Batch,
    /// Fresh permutations at the new dimension, every point re-sketched.
    Scratch,
    /// Re-sketch under the explicitly lifted/dropped permutations.
    Oracle,
}

impl UpdatePath {
    pub const ALL: [UpdatePath; 4] = [
        UpdatePath::Sequential,
        UpdatePath::Batch,
        UpdatePath::Scratch,
        UpdatePath::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            UpdatePath::Sequential => "sequential",
            UpdatePath::Batch => "batch",
            UpdatePath::Scratch => "scratch",
            UpdatePath::Oracle => "oracle",
        }
    }
}

impl fmt::Display for UpdatePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for UpdatePath {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        UpdatePath::ALL
            .into_iter()
            .find(|p| p.name() == s.trim())
            .ok_or_else(|| CliError::validation(format!("unknown path {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    File(PathBuf),
    /// Every point gets `ones` features drawn uniformly from `1..=dim`.
    Synthetic { dim: usize, ones: usize, points: usize },
}

impl FromStr for DataSource {
    type Err = CliError;

    /// Parses the `d,k,points` form of `--synthetic`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<usize> = s
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| CliError::validation(format!("--synthetic expects d,k,points; got {s:?}")))?;
        match parts[..] {
            [dim, ones, points] => Ok(DataSource::Synthetic { dim, ones, points }),
            _ => Err(CliError::validation(format!("--synthetic expects d,k,points; got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub source: DataSource,
    /// Points drawn from the corpus; `None` keeps all of them.
    pub sample_size: Option<usize>,
    pub num_perms: usize,
    /// Number of edited features; several values run a sweep.
    pub n: Vec<usize>,
    pub insert_one_prob: f64,
    pub master_seed: u64,
    pub mode: Mode,
    pub paths: Vec<UpdatePath>,
    /// Timed repetitions per path, after one discarded warm-up.
    pub repetitions: usize,
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn synthetic(mode: Mode, dim: usize, ones: usize, points: usize) -> Self {
        Self {
            source: DataSource::Synthetic { dim, ones, points },
            sample_size: None,
            num_perms: 500,
            n: vec![50],
            insert_one_prob: 0.1,
            master_seed: 0,
            mode,
            paths: vec![UpdatePath::Sequential, UpdatePath::Batch, UpdatePath::Scratch],
            repetitions: 5,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.insert_one_prob) {
            return Err(CliError::validation("one-probability must lie in [0, 1]"));
        }
        if self.n.is_empty() || self.n.contains(&0) {
            return Err(CliError::validation("n must be >= 1"));
        }
        if self.num_perms == 0 {
            return Err(CliError::validation("number of permutations must be >= 1"));
        }
        if self.paths.is_empty() {
            return Err(CliError::validation("select at least one path"));
        }
        if self.repetitions == 0 {
            return Err(CliError::validation("repetitions must be >= 1"));
        }
        if self.sample_size == Some(0) {
            return Err(CliError::validation("sample size must be >= 1"));
        }
        if self.threads == Some(0) {
            return Err(CliError::validation("threads must be >= 1"));
        }
        if let DataSource::Synthetic { dim, ones, points } = self.source {
            if dim == 0 || points == 0 || ones > dim {
                return Err(CliError::validation("--synthetic needs d >= 1, k <= d, points >= 1"));
            }
        }
        Ok(())
    }
}

pub fn parse_list<T: FromStr>(s: &str) -> std::result::Result<Vec<T>, String> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse::<T>().map_err(|_| format!("invalid list entry {p:?}")))
        .collect()
}
