use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn trendrank(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trendrank"))
        .args(args)
        .output()
        .unwrap()
}

fn ok(args: &[&str]) {
    let out = trendrank(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn exit_code(args: &[&str]) -> (i32, String) {
    let out = trendrank(args);
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

struct Fixture {
    dir: TempDir,
    edges: PathBuf,
}

impl Fixture {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let edges = dir.path().join("edges.tsv");
        ok(&[
            "generate",
            "--seed",
            "2",
            "--horizon",
            "200",
            "--output",
            edges.to_str().unwrap(),
        ]);
        Self { dir, edges }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn edges(&self) -> &str {
        self.edges.to_str().unwrap()
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn m3_with_full_delta_writes_the_pagerank_list() {
    let f = Fixture::new();
    let (a, b) = (f.path("m3.tsv"), f.path("pr.tsv"));
    ok(&[
        "predict",
        "--input",
        f.edges(),
        "--variant",
        "m3",
        "--delta",
        "1.0",
        "--t",
        "120",
        "--output",
        s(&a),
    ]);
    ok(&[
        "predict",
        "--input",
        f.edges(),
        "--variant",
        "pagerank",
        "--t",
        "120",
        "--output",
        s(&b),
    ]);
    let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn pbp_without_decay_ranks_by_total_in_degree() {
    let f = Fixture::new();
    let out = f.path("pbp.tsv");
    ok(&[
        "predict",
        "--input",
        f.edges(),
        "--variant",
        "pbp",
        "--lambda",
        "0",
        "--t",
        "120",
        "--output",
        s(&out),
    ]);

    let mut degree: HashMap<String, f64> = HashMap::new();
    for line in std::fs::read_to_string(&f.edges).unwrap().lines() {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields[2].parse::<f64>().unwrap() < 120.0 {
            *degree.entry(fields[1].to_owned()).or_default() += 1.0;
        }
    }
    let listed = std::fs::read_to_string(&out).unwrap();
    let mut previous = f64::INFINITY;
    for (i, line) in listed.lines().enumerate() {
        let fields: Vec<&str> = line.split('\t').collect();
        let score: f64 = fields[1].parse().unwrap();
        assert_eq!(
            score,
            degree.get(fields[0]).copied().unwrap_or(0.0),
            "{line}"
        );
        assert_eq!(fields[2], (i + 1).to_string());
        assert!(score <= previous);
        previous = score;
    }
}

#[test]
fn top_n_truncates_ranked_list() {
    let f = Fixture::new();
    let out = f.path("top.tsv");
    ok(&[
        "predict",
        "--input",
        f.edges(),
        "--variant",
        "m1",
        "--t",
        "120",
        "--top-n",
        "7",
        "--output",
        s(&out),
    ]);
    assert_eq!(std::fs::read_to_string(out).unwrap().lines().count(), 7);
}

#[test]
fn pagerank_dump_sums_to_one_and_is_sorted() {
    let f = Fixture::new();
    let out = f.path("pr.tsv");
    ok(&[
        "pagerank",
        "--input",
        f.edges(),
        "--at",
        "100",
        "--alpha",
        "0.85",
        "--output",
        s(&out),
    ]);
    let values: Vec<f64> = std::fs::read_to_string(out)
        .unwrap()
        .lines()
        .map(|l| l.split('\t').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!((values.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    assert!(values.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn evaluate_writes_one_row() {
    let f = Fixture::new();
    let out = f.path("eval.csv");
    ok(&[
        "evaluate",
        "--input",
        f.edges(),
        "--variant",
        "m2",
        "--t",
        "100",
        "--top-n",
        "20",
        "--tau",
        "b",
        "--output",
        s(&out),
    ]);
    let text = std::fs::read_to_string(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(
        lines[0],
        "t,T_P,T_F,predictor,params,precision,novelty,auc,tau,flags"
    );
    assert!(lines[1].starts_with("100,30,30,m2,gamma=0.1;alpha=0.1,"));
}

#[test]
fn sweep_is_byte_reproducible_and_leaves_no_temp_files() {
    let f = Fixture::new();
    std::fs::write(
        f.path("sweep.toml"),
        "input = \"edges.tsv\"\noutput = \"out/first.csv\"\nnum_samples = 4\nwindows = [20, 40]\n\
         predictors = [\"m1\", \"m3\", \"pbp\", \"recent\"]\ngamma = [0.1, 0.3]\nlambda = [0.5]\n",
    )
    .unwrap();
    std::fs::create_dir(f.path("out")).unwrap();
    let config = f.path("sweep.toml");
    ok(&["sweep", "--config", s(&config)]);
    ok(&[
        "sweep",
        "--config",
        s(&config),
        "--output",
        s(&f.path("out/second.csv")),
    ]);

    let read = |name: &str| std::fs::read(f.path(name)).unwrap();
    assert_eq!(read("out/first.csv"), read("out/second.csv"));
    let csv = String::from_utf8(read("out/first.csv")).unwrap();
    // 2 windows x (2 m1 + 2 m3 + 1 pbp + 1 recent) cells, 4 runs + 1 aggregate each
    assert_eq!(csv.lines().count(), 1 + 2 * 6 * 5);

    let manifest: serde_json::Value =
        serde_json::from_slice(&read("out/first.csv.manifest.json")).unwrap();
    assert_eq!(manifest["config"]["num_samples"], 4);
    assert_eq!(manifest["config"]["top_n"], 100);
    assert_eq!(manifest["config"]["tau"], "gamma");
    assert_eq!(manifest["cells"], 12);
    assert_eq!(manifest["dataset"]["sha256"].as_str().unwrap().len(), 64);

    let mut names: Vec<String> = std::fs::read_dir(f.path("out"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        [
            "first.csv",
            "first.csv.manifest.json",
            "second.csv",
            "second.csv.manifest.json"
        ]
    );
}

#[test]
fn ingest_cleans_a_rating_log() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("ratings.csv");
    let mut text = String::from("user,item,rating,ts\n");
    for i in 0..3 {
        text.push_str(&format!("u1,m{i},5,{}\n", 86_400 * (i + 1)));
    }
    text.push_str("u1,m9,2,86400\nu1,u1,5,86400\nu2,m1,5,0\n");
    std::fs::write(&log, text).unwrap();
    let out = dir.path().join("edges.tsv");
    ok(&[
        "ingest",
        "--input",
        s(&log),
        "--header",
        "--min-activity",
        "3",
        "--output",
        s(&out),
    ]);
    assert_eq!(
        std::fs::read_to_string(out).unwrap(),
        "u1\tm0\t0.000000\nu1\tm1\t1.000000\nu1\tm2\t2.000000\n"
    );
}

#[test]
fn failures_map_to_documented_exit_codes() {
    let f = Fixture::new();
    let missing = f.path("missing.tsv");
    let (code, err) = exit_code(&[
        "predict",
        "--input",
        s(&missing),
        "--variant",
        "m1",
        "--t",
        "1",
    ]);
    assert_eq!(code, 3);
    assert!(err.starts_with("error: code=io exit=3 msg="), "{err}");
    assert_eq!(err.trim_end().lines().count(), 1);

    assert_eq!(exit_code(&["predict", "--no-such-flag"]).0, 2);

    let bad = f.path("bad.tsv");
    std::fs::write(&bad, "a\tb\t1.0\na\tb\n").unwrap();
    let (code, err) = exit_code(&["pagerank", "--input", s(&bad), "--at", "5"]);
    assert_eq!(code, 4, "{err}");
    assert!(err.contains("line 2"), "{err}");

    let (code, err) = exit_code(&[
        "evaluate",
        "--input",
        f.edges(),
        "--variant",
        "m1",
        "--t",
        "100",
        "--tp",
        "150",
        "--tf",
        "150",
    ]);
    assert_eq!(code, 5, "{err}");
    assert!(err.contains("code=infeasible_window"));

    let log = f.path("log.csv");
    std::fs::write(&log, "u1,m1,5,10\n").unwrap();
    assert_eq!(exit_code(&["ingest", "--input", s(&log)]).0, 6);

    assert_eq!(
        exit_code(&[
            "pagerank",
            "--input",
            f.edges(),
            "--at",
            "50",
            "--alpha",
            "1.5"
        ])
        .0,
        7
    );
    assert_eq!(
        exit_code(&[
            "pagerank",
            "--input",
            f.edges(),
            "--at",
            "50",
            "--max-iterations",
            "1"
        ])
        .0,
        8
    );

    let config = f.path("typo.toml");
    std::fs::write(
        &config,
        "input = \"edges.tsv\"\noutput = \"x.csv\"\nwindow = [30]\n",
    )
    .unwrap();
    assert_eq!(exit_code(&["sweep", "--config", s(&config)]).0, 4);
}

#[test]
fn help_documents_exit_codes_and_defaults() {
    let out = trendrank(&["--help"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("Exit codes"));
    assert!(text.contains("infeasible window"));
    let predict = String::from_utf8(trendrank(&["predict", "--help"]).stdout).unwrap();
    for flag in [
        "--variant",
        "--t ",
        "--tp",
        "--gamma",
        "--delta",
        "--lambda",
        "--alpha",
        "--top-n",
        "[default: 0.1]",
    ] {
        assert!(predict.contains(flag), "missing {flag}");
    }
}
