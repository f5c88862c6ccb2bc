use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_greedy-lab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|x| x.unwrap().iter().map(str::to_string).collect()).collect()
}

#[test]
fn run_gab_collapses() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = run(&[
        "run", "--family", "gab", "--a", "2500", "--b", "50", "--algo", "mingreedy", "--trials", "100", "--seed", "7",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 100);
    let mean: f64 = rows.iter().map(|r| r[9].parse::<f64>().unwrap()).sum::<f64>() / 100.0;
    assert!(mean <= 0.60, "mean {mean}");
}

#[test]
fn run_is_deterministic_and_runtime_separate() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = (0..2).map(|i| dir.path().join(format!("r{i}.csv"))).collect();
    for (i, p) in paths.iter().enumerate() {
        let rt = dir.path().join(format!("t{i}.csv"));
        let o = run(&[
            "run", "--family", "erdos-renyi", "--n", "200", "--m", "500", "--algo", "karp-sipser", "--trials", "20",
            "--seed", "3", "--out", p.to_str().unwrap(), "--runtime", rt.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        assert_eq!(csv_rows(&rt).len(), 20);
    }
    assert_eq!(fs::read(&paths[0]).unwrap(), fs::read(&paths[1]).unwrap());
}

#[test]
fn certify_exhaustive_cubic() {
    let o = run(&["certify", "--family", "random-regular", "--n", "10", "--d", "3", "--algo", "mingreedy-det", "--exhaustive"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["failed"], 0);
    assert!(v["executions"].as_u64().unwrap() > 0);
    let (p, q) = v["worst_ratio"].as_str().unwrap().split_once('/').unwrap();
    let (p, q): (i64, i64) = (p.parse().unwrap(), q.parse().unwrap());
    assert!(3 * p >= 2 * q);
}

#[test]
fn generate_then_run_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["generate", "--family", "gab", "--a", "16", "--b", "4", "--out", dir.path().to_str().unwrap(), "--name", "g"]);
    assert!(o.status.success());
    let g = dir.path().join("g.graph");
    assert!(g.exists() && dir.path().join("g.meta.json").exists());
    let o = run(&["run", "--input", g.to_str().unwrap(), "--algo", "edsm", "--trials", "3"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().nth(1).unwrap().contains(",20,"));
}

#[test]
fn game_thm6_and_yao() {
    let o = run(&["game", "run", "--adversary", "thm6", "--strategy", "min-degree-first", "--delta", "5"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["ratio"], "4/7");
    assert_eq!(v[0]["consistent"], true);

    let o = run(&["game", "run", "--adversary", "yao", "--strategy", "random-order:1", "--trials", "20000"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v[0]["yao"]["mean"].as_f64().unwrap() - 5.0 / 6.0).abs() < 0.02);
}

#[test]
fn bench_reports_rows() {
    let o = run(&["bench", "--n", "2e3,4e3", "--repeats", "1"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().nth(1).unwrap().starts_with("dynamic,2000,6000,"));
}

#[test]
fn sweep_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = dir.path().join("cfg.json");
    let body = serde_json::json!({
        "id": "demo",
        "family": "gab",
        "grid": {"a": [16, 36], "b": [2]},
        "algorithms": ["mingreedy", "mds"],
        "trials": 5,
        "seed": 1,
        "output": out,
    });
    fs::write(&cfg, body.to_string()).unwrap();
    let go = |threads: &str| {
        let o = bin()
            .args(["sweep", "--config", cfg.to_str().unwrap(), "--emit-plot-data"])
            .env("GREEDY_LAB_THREADS", threads)
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        fs::read(out.join("results.csv")).unwrap()
    };
    let a = go("1");
    let b = go("2");
    assert_eq!(a, b);
    assert_eq!(csv_rows(&out.join("results.csv")).len(), 2 * 2 * 5);
    assert!(out.join("summary.json").exists());
    assert!(out.join("plot").join("mean_ratio_mds.dat").exists());
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["run", "--family", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["run", "--family", "gab", "--a", "10", "--b", "3"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["run", "--input", "/nonexistent/x.graph"]).status.code(), Some(3));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"id":"x","family":"gab","grid":{"a":[]},"algorithms":["mds"],"trials":1,"seed":0,"output":"o"}"#)
        .unwrap();
    assert_eq!(run(&["sweep", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}
