use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

use dynsketch_cli::{run_deletion_experiment, run_insertion_experiment, ExperimentConfig, Mode, UpdatePath};
use flate2::write::GzEncoder;
use flate2::Compression;

fn dynsketch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynsketch"))
        .args(args)
        .env_remove("DYNSKETCH_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const DOCWORD: &str = "3\n6\n5\n1 1 2\n1 4 1\n2 2 1\n2 6 3\n3 4 1\n";

fn write_gz(path: &Path, text: &str) {
    let mut enc = GzEncoder::new(fs::File::create(path).unwrap(), Compression::default());
    enc.write_all(text.as_bytes()).unwrap();
    enc.finish().unwrap();
}

#[test]
fn insert_emits_csv() {
    let o = dynsketch(&[
        "insert",
        "--synthetic",
        "200,10,20",
        "--num-perms",
        "16",
        "--n",
        "4,8",
        "--repetitions",
        "1",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(&header[..6], ["path", "n", "K", "rmse", "seconds", "speedup"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    // three default paths at two values of n
    assert_eq!(rows.len(), 6);
    for r in &rows {
        assert_eq!(&r[2], "16");
        let rmse: f64 = r[3].parse().unwrap();
        assert!((0.0..=1.0).contains(&rmse));
        assert_eq!(&r[9], "insert");
    }
}

#[test]
fn delete_writes_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.txt");
    let o = dynsketch(&[
        "delete",
        "--synthetic",
        "100,20,10",
        "--num-perms",
        "8",
        "--n",
        "5",
        "--repetitions",
        "1",
        "--paths",
        "batch,oracle",
        "--format",
        "human",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("mode        delete"));
    assert!(text.contains("batch vs oracle: identical"));
}

#[test]
fn exit_codes() {
    // validation failures
    assert_eq!(dynsketch(&["insert", "--synthetic", "10,3"]).status.code(), Some(1));
    assert_eq!(
        dynsketch(&["insert", "--synthetic", "10,3,5", "--one-prob", "1.5"]).status.code(),
        Some(1)
    );
    assert_eq!(
        dynsketch(&["delete", "--synthetic", "10,3,5", "--n", "10"]).status.code(),
        Some(1)
    );
    assert_eq!(dynsketch(&["insert", "--synthetic", "10,3,5", "--paths", "magic"]).status.code(), Some(1));
    assert_eq!(dynsketch(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(dynsketch(&["--help"]).status.code(), Some(0));

    // I/O failures
    assert_eq!(
        dynsketch(&["parse-check", "--data", "/nonexistent/docword.txt"]).status.code(),
        Some(2)
    );
    assert_eq!(
        dynsketch(&[
            "insert",
            "--synthetic",
            "50,5,5",
            "--num-perms",
            "4",
            "--n",
            "2",
            "--repetitions",
            "1",
            "--out",
            "/nonexistent/dir/out.csv"
        ])
        .status
        .code(),
        Some(2)
    );

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "2\n5\n1\n1 9 1\n").unwrap();
    assert_eq!(dynsketch(&["parse-check", "--data", bad.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn parse_check_plain_and_gzip() {
    let dir = tempfile::tempdir().unwrap();
    let plain = dir.path().join("docword.test.txt");
    let gz = dir.path().join("docword.test.txt.gz");
    fs::write(&plain, DOCWORD).unwrap();
    write_gz(&gz, DOCWORD);
    for p in [&plain, &gz] {
        let o = dynsketch(&["parse-check", "--data", p.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let text = stdout(&o);
        assert!(text.contains("documents  3"), "{text}");
        assert!(text.contains("vocabulary 6"));
        assert!(text.contains("nonzeros   5"));
    }
}

#[test]
fn experiment_on_docword_file() {
    let dir = tempfile::tempdir().unwrap();
    let gz = dir.path().join("docword.test.txt.gz");
    write_gz(&gz, DOCWORD);
    let o = dynsketch(&[
        "delete",
        "--data",
        gz.to_str().unwrap(),
        "--num-perms",
        "8",
        "--n",
        "5",
        "--repetitions",
        "1",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 4);
}

#[test]
fn uniformity_subcommand() {
    let o = dynsketch(&[
        "uniformity",
        "--source",
        "drop",
        "--dim",
        "16",
        "--r",
        "3",
        "--trials",
        "20000",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "element,count,frequency");
    assert_eq!(lines.len(), 7);
    let total: u64 = lines[1..6]
        .iter()
        .map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 20000);
    assert!(lines[6].starts_with("# max_deviation="));

    assert_eq!(
        dynsketch(&["uniformity", "--source", "drop", "--dim", "8", "--r", "9"]).status.code(),
        Some(1)
    );
}

fn config(mode: Mode, dim: usize, ones: usize, n: usize) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::synthetic(mode, dim, ones, 30);
    cfg.num_perms = 32;
    cfg.n = vec![n];
    cfg.paths = vec![UpdatePath::Sequential, UpdatePath::Batch, UpdatePath::Oracle];
    cfg.repetitions = 1;
    cfg.threads = Some(1);
    cfg
}

#[test]
fn single_feature_paths_agree() {
    for mode in [Mode::Insert, Mode::Delete] {
        let cfg = config(mode, 60, 12, 1);
        let report = match mode {
            Mode::Insert => run_insertion_experiment(&cfg),
            Mode::Delete => run_deletion_experiment(&cfg),
        }
        .unwrap();
        assert_eq!(report.checks.len(), 3);
        assert!(report.checks.iter().all(|c| c.identical()), "{:?}", report.checks);
        let rmse = |p| report.row(p, 1).unwrap().rmse;
        assert_eq!(rmse(UpdatePath::Sequential), rmse(UpdatePath::Batch));
    }
}

#[test]
fn delete_all_but_one_feature() {
    let dim = 40;
    let cfg = config(Mode::Delete, dim, 10, dim - 1);
    let report = run_deletion_experiment(&cfg).unwrap();
    assert!(report.checks.iter().all(|c| c.identical()), "{:?}", report.checks);
    assert!(report.row(UpdatePath::Batch, dim - 1).is_some());
}
