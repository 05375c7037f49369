use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dynsketch_cli::config::parse_list;
use dynsketch_cli::uniformity::{run_uniformity, PermSource};
use dynsketch_cli::{
    emit_report, run_deletion_experiment, run_insertion_experiment, CliError, DataSource, ExperimentConfig,
    Format, Mode, Result, UpdatePath,
};
use dynsketch_core::ingest::read_docword;

#[derive(Parser)]
#[command(name = "dynsketch", version, about = "MinHash sketches under feature insertion and deletion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Insert features into every point and update the sketches.
    Insert(ExperimentArgs),
    /// Delete features from every point and update the sketches.
    Delete(ExperimentArgs),
    /// Measure how evenly a permutation construction spreads the minimum over a fixed set.
    Uniformity(UniformityArgs),
    /// Parse a docword file and print its shape.
    ParseCheck(ParseCheckArgs),
}

#[derive(Args)]
struct ExperimentArgs {
    /// UCI docword file (optionally gzip-compressed).
    #[arg(long, conflicts_with = "synthetic", required_unless_present = "synthetic")]
    data: Option<PathBuf>,
    /// Synthetic corpus as d,k,points: `points` vectors with k ones each over d features.
    #[arg(long)]
    synthetic: Option<String>,
    /// Number of points sampled from the corpus.
    #[arg(long)]
    sample: Option<usize>,
    #[arg(long, default_value_t = 500)]
    num_perms: usize,
    /// Features inserted or deleted; a comma list runs a sweep.
    #[arg(long, default_value = "50")]
    n: String,
    /// Probability that an inserted feature is 1.
    #[arg(long, default_value_t = 0.1)]
    one_prob: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma list of sequential, batch, scratch, oracle.
    #[arg(long, default_value = "sequential,batch,scratch")]
    paths: String,
    #[arg(long, default_value = "csv")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = "DYNSKETCH_THREADS")]
    threads: Option<usize>,
    /// Timed repetitions per path (one extra warm-up run is discarded).
    #[arg(long, default_value_t = 5)]
    repetitions: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum SourceArg {
    Random,
    Lift,
    Drop,
}

#[derive(Args)]
struct UniformityArgs {
    #[arg(long, value_enum, default_value = "random")]
    source: SourceArg,
    /// Dimension of the permutation before lifting or dropping.
    #[arg(long, default_value_t = 32)]
    dim: usize,
    /// Fixed drop position (defaults to dim / 2).
    #[arg(long)]
    r: Option<u32>,
    /// Comma list of 1-based feature indices forming the test set.
    #[arg(long, default_value = "1,2,3,4,5")]
    set: String,
    #[arg(long, default_value_t = 200_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ParseCheckArgs {
    #[arg(long)]
    data: PathBuf,
}

fn experiment_config(mode: Mode, a: &ExperimentArgs) -> Result<ExperimentConfig> {
    let source = match (&a.data, &a.synthetic) {
        (Some(p), _) => DataSource::File(p.clone()),
        (None, Some(s)) => s.parse()?,
        (None, None) => return Err(CliError::validation("one of --data or --synthetic is required")),
    };
    let paths = a
        .paths
        .split(',')
        .map(str::parse::<UpdatePath>)
        .collect::<Result<Vec<_>>>()?;
    let cfg = ExperimentConfig {
        source,
        sample_size: a.sample,
        num_perms: a.num_perms,
        n: parse_list(&a.n).map_err(CliError::validation)?,
        insert_one_prob: a.one_prob,
        master_seed: a.seed,
        mode,
        paths,
        repetitions: a.repetitions,
        threads: a.threads,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn write_out(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Insert(a) => {
            let report = run_insertion_experiment(&experiment_config(Mode::Insert, &a)?)?;
            write_out(&emit_report(&report, a.format)?, a.out.as_ref())
        }
        Command::Delete(a) => {
            let report = run_deletion_experiment(&experiment_config(Mode::Delete, &a)?)?;
            write_out(&emit_report(&report, a.format)?, a.out.as_ref())
        }
        Command::Uniformity(a) => {
            let set: Vec<u32> = parse_list(&a.set).map_err(CliError::validation)?;
            let source = match a.source {
                SourceArg::Random => PermSource::Random,
                SourceArg::Lift => PermSource::Lift,
                SourceArg::Drop => PermSource::Drop {
                    r: a.r.unwrap_or((a.dim / 2).max(1) as u32),
                },
            };
            let rep = run_uniformity(source, a.dim, &set, a.trials, a.seed)?;
            println!("element,count,frequency");
            for ((u, c), f) in rep.support.iter().zip(&rep.counts).zip(&rep.frequencies) {
                println!("{u},{c},{f}");
            }
            println!("# max_deviation={} target={} trials={}", rep.max_deviation, 1.0 / set.len() as f64, rep.trials);
            Ok(())
        }
        Command::ParseCheck(a) => {
            let c = read_docword(&a.data)?;
            let empty = c.vectors.iter().filter(|v| v.is_empty()).count();
            println!("documents  {}", c.num_docs);
            println!("vocabulary {}", c.vocab_size);
            println!("nonzeros   {}", c.nnz());
            println!("empty docs {empty}");
            println!("mean ones  {:.2}", c.nnz() as f64 / c.num_docs.max(1) as f64);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
