mod common;

use std::fs;
use std::path::Path;

use common::{golden_dir, run_cli};
use costshift::generate::grid_model;
use costshift::uai::write_uai;

fn m3() -> String {
    golden_dir().join("m3.uai").display().to_string()
}

fn ln_of(stdout: &str) -> f64 {
    let first = stdout.lines().next().unwrap();
    let words: Vec<&str> = first.split_whitespace().collect();
    let k = words.iter().position(|w| *w == "LN").unwrap();
    words[k + 1].parse().unwrap()
}

/// `SOLVED|TIMEOUT time nodes value` then the assignment line.
fn solved(stdout: &str) -> (String, u64, f64, String) {
    let mut lines = stdout.lines();
    let w: Vec<&str> = lines.next().unwrap().split_whitespace().collect();
    (
        w[0].to_string(),
        w[2].parse().unwrap(),
        w[3].parse().unwrap(),
        lines.next().unwrap_or("").to_string(),
    )
}

fn trace_values(path: &Path) -> Vec<f64> {
    let text = fs::read_to_string(path).unwrap();
    text.lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn bound_mbe_on_m3() {
    let r = run_cli(&["bound", "--alg", "mbe", "-z", "2", &m3()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.starts_with("STATUS bound LN "));
    assert!((ln_of(&r.stdout) - 7.0).abs() < 1e-6);
    let log10 = 7.0 / std::f64::consts::LN_10;
    assert!(r.stdout.contains(&format!("LOG10 {log10:.6}")));
}

#[test]
fn bound_fglp_trace_is_sandwiched_and_falls() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("fglp.csv");
    let r = run_cli(&[
        "bound",
        "--alg",
        "fglp",
        "--time-limit",
        "5",
        "--trace",
        trace.to_str().unwrap(),
        &m3(),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let ln = ln_of(&r.stdout);
    assert!((7.0 - 1e-9..=8.0 + 1e-9).contains(&ln));
    let header = fs::read_to_string(&trace).unwrap();
    assert!(header.starts_with("elapsed_seconds,bound_ln\n"));
    let vals = trace_values(&trace);
    assert!(vals.len() >= 2);
    assert!((vals[0] - 8.0).abs() < 1e-9);
    assert!(vals.windows(2).all(|w| w[1] <= w[0] + 1e-9));
}

#[test]
fn bound_jglp_converges_to_seven() {
    let r = run_cli(&["bound", "--alg", "jglp", "-z", "1", "--eps", "1e-9", &m3()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!((ln_of(&r.stdout) - 7.0).abs() < 1e-6);
}

#[test]
fn solve_with_each_heuristic() {
    for heur in ["mbe", "mbe-mm", "fglp+mbe", "jglp"] {
        let r = run_cli(&["solve", "--heur", heur, "-z", "2", &m3()]);
        assert_eq!(r.code, 0, "{heur}: {}", r.stderr);
        let (status, nodes, value, x) = solved(&r.stdout);
        assert_eq!(status, "SOLVED");
        assert!(nodes > 0);
        assert!((value - 7.0).abs() < 1e-6, "{heur}");
        assert_eq!(x, "1 0 1", "{heur}");
    }
}

#[test]
fn zero_lp_time_matches_plain_mbe() {
    let a = run_cli(&[
        "solve",
        "--heur",
        "fglp+mbe",
        "-z",
        "2",
        "--lp-time",
        "0",
        &m3(),
    ]);
    let b = run_cli(&["solve", "--heur", "mbe", "-z", "2", &m3()]);
    assert_eq!((a.code, b.code), (0, 0));
    let (_, _, va, xa) = solved(&a.stdout);
    let (_, _, vb, xb) = solved(&b.stdout);
    assert_eq!(va, vb);
    assert_eq!(xa, xb);
}

#[test]
fn solve_with_evidence_drops_the_observed_variable() {
    let evid = golden_dir().join("m3.uai.evid");
    let r = run_cli(&[
        "solve",
        "--heur",
        "mbe",
        "-z",
        "2",
        "--evid",
        evid.to_str().unwrap(),
        &m3(),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let (_, _, value, x) = solved(&r.stdout);
    assert!((value - 7.0).abs() < 1e-6);
    assert_eq!(x, "1 0");
}

#[test]
fn solve_trace_never_falls() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.uai");
    fs::write(&path, write_uai(&grid_model(4, 4, 2, 3))).unwrap();
    let trace = dir.path().join("solve.csv");
    let r = run_cli(&[
        "solve",
        "--heur",
        "mbe",
        "-z",
        "1",
        "--trace",
        trace.to_str().unwrap(),
        path.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let text = fs::read_to_string(&trace).unwrap();
    assert!(text.starts_with("elapsed_seconds,best_value_ln\n"));
    let vals = trace_values(&trace);
    assert!(!vals.is_empty());
    assert!(vals.windows(2).all(|w| w[1] >= w[0] - 1e-9));
    let (_, _, value, _) = solved(&r.stdout);
    assert!((vals.last().unwrap() - value).abs() < 1e-6);
}

#[test]
fn solve_timeout_reports_best_so_far() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("big.uai");
    fs::write(&path, write_uai(&grid_model(14, 14, 3, 1))).unwrap();
    let r = run_cli(&[
        "solve",
        "--heur",
        "mbe",
        "-z",
        "1",
        "--time-limit",
        "0.2",
        path.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 5, "{}", r.stderr);
    let (status, _, value, x) = solved(&r.stdout);
    assert_eq!(status, "TIMEOUT");
    assert!(value.is_finite());
    assert_eq!(x.split_whitespace().count(), 196);
}

#[test]
fn exact_and_brute_agree() {
    let a = run_cli(&["exact", &m3()]);
    let b = run_cli(&["exact", "--brute", &m3()]);
    assert_eq!((a.code, b.code), (0, 0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, "STATUS exact LN 7.000000 LOG10 3.040061\n1 0 1\n");
}

#[test]
fn bayes_files_are_read_as_log_probabilities() {
    let path = golden_dir().join("chain.bayes.uai");
    let r = run_cli(&["exact", path.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(ln_of(&r.stdout) < 0.0);
}

#[test]
fn capacity_error_names_the_bucket() {
    let r = run_cli(&["exact", "--memory", "16", &m3()]);
    assert_eq!(r.code, 4);
    assert!(r.stderr.contains("bucket of variable"), "{}", r.stderr);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.uai");
    fs::write(&bad, "MARKOV\n2\n2 x\n").unwrap();
    assert_eq!(run_cli(&["exact", bad.to_str().unwrap()]).code, 3);
    let missing = dir.path().join("missing.uai");
    assert_eq!(run_cli(&["exact", missing.to_str().unwrap()]).code, 1);
    assert_eq!(run_cli(&["bound", "-z", "0", &m3()]).code, 2);
    assert_eq!(run_cli(&["bound", "--time-limit", "0", &m3()]).code, 2);
    assert_eq!(run_cli(&["frobnicate"]).code, 2);
}

#[test]
fn compare_empty_directory_prints_the_header() {
    let dir = tempfile::tempdir().unwrap();
    let r = run_cli(&["compare", dir.path().to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout.lines().count(), 1);
    assert!(r
        .stdout
        .starts_with("instance,n,k,w,z,exact,mbe,mbe_seconds,"));
}

#[test]
fn compare_rows_bound_the_exact_column() {
    let fixtures = golden_dir().join("fixtures");
    let r = run_cli(&["compare", "--max-sweeps", "500", fixtures.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let mut rdr = csv::Reader::from_reader(r.stdout.as_bytes());
    let header = rdr.headers().unwrap().clone();
    let bound_cols: Vec<usize> = (6..header.len()).step_by(2).collect();
    assert_eq!(bound_cols.len(), 5);
    let mut rows = 0;
    let mut wide_rows = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        rows += 1;
        let exact: f64 = rec[5].parse().unwrap();
        let w: usize = rec[3].parse().unwrap();
        let z: usize = rec[4].parse().unwrap();
        let bounds: Vec<f64> = bound_cols
            .iter()
            .filter_map(|&k| rec[k].parse().ok())
            .collect();
        for b in &bounds {
            assert!(*b >= exact - 1e-6, "{rec:?}");
        }
        if z >= w {
            wide_rows += 1;
            let zdep: Vec<f64> = [6, 8, 12, 14]
                .iter()
                .map(|&k| rec[k].parse().unwrap())
                .collect();
            for b in zdep {
                assert!((b - exact).abs() < 1e-6, "{rec:?}");
            }
        }
    }
    assert_eq!(rows, 9);
    assert!(wide_rows > 0);
}
