//! Insertion and deletion experiments: update every sampled point's sketch
//! along each selected path, time it, and score the sketches by RMSE.

use std::time::Instant;

use dynsketch_core::estimate::{count_collisions, jaccard_true, rmse, PairEstimate};
use dynsketch_core::ingest::{read_docword, sample_corpus};
use dynsketch_core::permgen::{multiple_drop_perm, multiple_lift_perm, random_permutation};
use dynsketch_core::sketch::{DropSteps, LiftSteps};
use dynsketch_core::{
    delete_features, insert_features, Corpus, DeletionBatch, DropFamily, HashValue, InsertionBatch, LiftFamily,
    Permutation,
    PermutationSeed, SparseBinaryVector,
};
use rayon::prelude::*;

use crate::config::{DataSource, ExperimentConfig, Mode, UpdatePath};
use crate::error::{CliError, Result};
use crate::report::{ExperimentReport, IdentityCheck, PathRow};
use crate::workload::{derive_seed, synthetic_corpus, DeletionWorkload, InsertionWorkload};

const CORPUS_STREAM: u64 = 1;
const SAMPLE_STREAM: u64 = 2;
const PERM_STREAM: u64 = 3;
const WORKLOAD_STREAM: u64 = 1 << 20;
const FRESH_PERM_STREAM: u64 = 2 << 20;

type Sketches = Vec<Vec<HashValue>>;

/// Points, their permutations, and their sketches before any edit.
#[derive(Debug, Clone)]
pub struct Baseline {
    pub dim: usize,
    pub points: Vec<SparseBinaryVector>,
    pub perms: Vec<Permutation>,
    pub sketches: Sketches,
}

pub fn load_points(cfg: &ExperimentConfig) -> Result<Corpus> {
    let corpus = match &cfg.source {
        DataSource::File(path) => read_docword(path)?,
        DataSource::Synthetic { dim, ones, points } => {
            synthetic_corpus(*dim, *ones, *points, derive_seed(cfg.master_seed, CORPUS_STREAM))?
        }
    };
    match cfg.sample_size {
        Some(n) => Ok(sample_corpus(&corpus, n, derive_seed(cfg.master_seed, SAMPLE_STREAM))?),
        None => Ok(corpus),
    }
}

fn family(dim: usize, k: usize, seed: u64) -> Result<Vec<Permutation>> {
    (0..k as u64)
        .into_par_iter()
        .map(|j| random_permutation(dim, PermutationSeed::new(seed, j)))
        .collect::<dynsketch_core::Result<Vec<_>>>()
        .map_err(Into::into)
}

/// Minhash of every point under every permutation.
pub fn sketch_all(points: &[SparseBinaryVector], perms: &[Permutation]) -> Sketches {
    points
        .par_iter()
        .map(|x| {
            perms
                .iter()
                .map(|pi| x.support().iter().map(|&s| pi.rank(s)).min().into())
                .collect()
        })
        .collect()
}

impl Baseline {
    pub fn build(cfg: &ExperimentConfig) -> Result<Self> {
        let corpus = load_points(cfg)?;
        let dim = corpus.vocab_size;
        let perms = family(dim, cfg.num_perms, derive_seed(cfg.master_seed, PERM_STREAM))?;
        let sketches = sketch_all(&corpus.vectors, &perms);
        Ok(Self {
            dim,
            points: corpus.vectors,
            perms,
            sketches,
        })
    }
}

/// Runs `f` once untimed, then `reps` timed; returns the last output and the timings.
fn timed<T>(reps: usize, mut f: impl FnMut() -> Result<T>) -> Result<(T, Vec<f64>)> {
    f()?;
    let mut times = Vec::with_capacity(reps);
    let mut last = None;
    for _ in 0..reps {
        let start = Instant::now();
        let out = f()?;
        times.push(start.elapsed().as_secs_f64().max(1e-9));
        last = Some(out);
    }
    Ok((last.expect("reps >= 1"), times))
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::validation(format!("cannot start worker pool: {e}")))?;
    pool.install(f)
}

pub fn run_insertion_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    if cfg.mode != Mode::Insert {
        return Err(CliError::validation("insertion experiment needs mode = insert"));
    }
    run_experiment(cfg)
}

pub fn run_deletion_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    if cfg.mode != Mode::Delete {
        return Err(CliError::validation("deletion experiment needs mode = delete"));
    }
    run_experiment(cfg)
}

fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    with_pool(cfg.threads, || {
        let base = Baseline::build(cfg)?;
        let mut report = ExperimentReport::new(cfg.clone(), base.dim, base.points.len());
        for &n in &cfg.n {
            match cfg.mode {
                Mode::Insert => insertion_round(cfg, &base, n, &mut report)?,
                Mode::Delete => deletion_round(cfg, &base, n, &mut report)?,
            }
        }
        Ok(report)
    })
}

struct PathRun {
    path: UpdatePath,
    sketches: Sketches,
    times: Vec<f64>,
}

fn insertion_round(cfg: &ExperimentConfig, base: &Baseline, n: usize, report: &mut ExperimentReport) -> Result<()> {
    let wl = InsertionWorkload::draw(
        derive_seed(cfg.master_seed, WORKLOAD_STREAM + n as u64),
        base.dim,
        n,
        base.points.len(),
        cfg.insert_one_prob,
    )?;
    let checksum = wl.checksum();
    let edited = base
        .points
        .iter()
        .zip(&wl.bits)
        .map(|(x, b)| insert_features(x, &InsertionBatch::new(wl.positions.clone(), b.clone())?))
        .collect::<dynsketch_core::Result<Vec<_>>>()?;
    let new_dim = base.dim + n;
    let fresh_seed = derive_seed(cfg.master_seed, FRESH_PERM_STREAM + n as u64);

    let mut runs = Vec::new();
    for &path in &cfg.paths {
        let (sketches, times) = match path {
            UpdatePath::Sequential => timed(cfg.repetitions, || {
                let steps = base
                    .perms
                    .par_iter()
                    .map(|pi| LiftSteps::new(pi, &wl.positions))
                    .collect::<dynsketch_core::Result<Vec<_>>>()?;
                Ok(base
                    .sketches
                    .par_iter()
                    .zip(&wl.bits)
                    .map(|(sk, bits)| sk.iter().zip(&steps).map(|(&h, s)| s.apply(h, bits)).collect())
                    .collect::<Sketches>())
            })?,
            UpdatePath::Batch => timed(cfg.repetitions, || {
                let plan = LiftFamily::new(&base.perms, &wl.positions)?;
                Ok(base
                    .sketches
                    .par_iter()
                    .zip(&wl.bits)
                    .map(|(sk, bits)| plan.apply(sk, bits))
                    .collect::<dynsketch_core::Result<Sketches>>()?)
            })?,
            UpdatePath::Scratch => timed(cfg.repetitions, || {
                let fresh = family(new_dim, cfg.num_perms, fresh_seed)?;
                Ok(sketch_all(&edited, &fresh))
            })?,
            UpdatePath::Oracle => timed(cfg.repetitions, || {
                let lifted = base
                    .perms
                    .par_iter()
                    .map(|pi| multiple_lift_perm(pi, &wl.positions))
                    .collect::<dynsketch_core::Result<Vec<_>>>()?;
                Ok(sketch_all(&edited, &lifted))
            })?,
        };
        runs.push(PathRun { path, sketches, times });
    }
    if wl.checksum() != checksum {
        return Err(CliError::validation("workload changed while paths were running"));
    }
    finish_round(cfg, base, &edited, n, checksum, runs, report)
}

fn deletion_round(cfg: &ExperimentConfig, base: &Baseline, n: usize, report: &mut ExperimentReport) -> Result<()> {
    let wl = DeletionWorkload::draw(derive_seed(cfg.master_seed, WORKLOAD_STREAM + n as u64), base.dim, n)?;
    let checksum = wl.checksum();
    let batch = DeletionBatch::new(wl.positions.clone())?;
    let edited = base
        .points
        .iter()
        .map(|x| delete_features(x, &batch))
        .collect::<dynsketch_core::Result<Vec<_>>>()?;
    let new_dim = base.dim - n;
    let fresh_seed = derive_seed(cfg.master_seed, FRESH_PERM_STREAM + n as u64);

    let mut runs = Vec::new();
    for &path in &cfg.paths {
        let (sketches, times) = match path {
            UpdatePath::Sequential => timed(cfg.repetitions, || {
                let steps = base
                    .perms
                    .par_iter()
                    .map(|pi| DropSteps::new(pi, &wl.positions))
                    .collect::<dynsketch_core::Result<Vec<_>>>()?;
                Ok(base
                    .sketches
                    .par_iter()
                    .zip(&base.points)
                    .map(|(sk, x)| sk.iter().zip(&steps).map(|(&h, s)| s.apply(h, x.support())).collect())
                    .collect::<Sketches>())
            })?,
            UpdatePath::Batch => timed(cfg.repetitions, || {
                let plan = DropFamily::new(&base.perms, &wl.positions)?;
                Ok(base
                    .sketches
                    .par_iter()
                    .zip(&base.points)
                    .map(|(sk, x)| plan.apply(sk, x.support()))
                    .collect::<dynsketch_core::Result<Sketches>>()?)
            })?,
            UpdatePath::Scratch => timed(cfg.repetitions, || {
                let fresh = family(new_dim, cfg.num_perms, fresh_seed)?;
                Ok(sketch_all(&edited, &fresh))
            })?,
            UpdatePath::Oracle => timed(cfg.repetitions, || {
                let dropped = base
                    .perms
                    .par_iter()
                    .map(|pi| multiple_drop_perm(pi, &wl.positions))
                    .collect::<dynsketch_core::Result<Vec<_>>>()?;
                Ok(sketch_all(&edited, &dropped))
            })?,
        };
        runs.push(PathRun { path, sketches, times });
    }
    if wl.checksum() != checksum {
        return Err(CliError::validation("workload changed while paths were running"));
    }
    finish_round(cfg, base, &edited, n, checksum, runs, report)
}

/// Ground truth per pair `i < j`: on the original data and on the edited data.
/// Pairs where both original supports are empty are skipped.
fn pair_truths(original: &[SparseBinaryVector], edited: &[SparseBinaryVector]) -> Result<Vec<(usize, usize, f64, f64)>> {
    let rows: Vec<Vec<(usize, usize, f64, f64)>> = (0..original.len())
        .into_par_iter()
        .map(|i| {
            ((i + 1)..original.len())
                .filter(|&j| !(original[i].is_empty() && original[j].is_empty()))
                .map(|j| {
                    Ok((
                        i,
                        j,
                        jaccard_true(&original[i], &original[j])?,
                        jaccard_true(&edited[i], &edited[j])?,
                    ))
                })
                .collect::<dynsketch_core::Result<Vec<_>>>()
        })
        .collect::<dynsketch_core::Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

fn path_rmse(truths: &[(usize, usize, f64, f64)], sketches: &Sketches) -> Result<(f64, f64)> {
    if truths.is_empty() {
        return Ok((f64::NAN, f64::NAN));
    }
    let (orig, upd): (Vec<PairEstimate>, Vec<PairEstimate>) = truths
        .par_iter()
        .map(|&(i, j, t0, t1)| {
            let c = count_collisions(&sketches[i], &sketches[j]);
            (PairEstimate::new(t0, c), PairEstimate::new(t1, c))
        })
        .unzip();
    Ok((rmse(&orig)?, rmse(&upd)?))
}

fn mismatches(a: &Sketches, b: &Sketches) -> usize {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).filter(|(p, q)| p != q).count())
        .sum()
}

fn finish_round(
    cfg: &ExperimentConfig,
    base: &Baseline,
    edited: &[SparseBinaryVector],
    n: usize,
    checksum: u64,
    runs: Vec<PathRun>,
    report: &mut ExperimentReport,
) -> Result<()> {
    let truths = pair_truths(&base.points, edited)?;
    let scratch = runs.iter().find(|r| r.path == UpdatePath::Scratch);
    for run in &runs {
        let (rmse_original, rmse_updated) = path_rmse(&truths, &run.sketches)?;
        let seconds = median(&run.times);
        let (speedup, speedup_max, speedup_mean) = match scratch {
            Some(s) => {
                let ratios: Vec<f64> = s.times.iter().zip(&run.times).map(|(a, b)| a / b).collect();
                (
                    Some(median(&s.times) / seconds),
                    Some(ratios.iter().copied().fold(f64::MIN, f64::max)),
                    Some(ratios.iter().sum::<f64>() / ratios.len() as f64),
                )
            }
            None => (None, None, None),
        };
        report.rows.push(PathRow {
            mode: cfg.mode,
            path: run.path,
            n,
            num_perms: cfg.num_perms,
            rmse: rmse_original,
            rmse_updated_truth: rmse_updated,
            seconds,
            rep_seconds: run.times.clone(),
            speedup,
            speedup_max,
            speedup_mean,
        });
    }
    // Paths that share the permutation lineage must agree slot for slot.
    let exact: Vec<&PathRun> = runs.iter().filter(|r| r.path != UpdatePath::Scratch).collect();
    for (a, left) in exact.iter().enumerate() {
        for right in &exact[a + 1..] {
            report.checks.push(IdentityCheck {
                n,
                left: left.path,
                right: right.path,
                mismatched_slots: mismatches(&left.sketches, &right.sketches),
                total_slots: base.points.len() * cfg.num_perms,
            });
        }
    }
    report.checksums.push((n, checksum));
    Ok(())
}
