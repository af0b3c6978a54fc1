use std::path::Path;

use serde_json::Value;
use specdecay_cli::run;

fn run_to(dir: &Path, name: &str, args: &[&str]) -> (i32, String) {
    let out = dir.join(name);
    let mut argv = vec!["specdecay"];
    argv.extend_from_slice(args);
    argv.extend_from_slice(&["--out", out.to_str().unwrap()]);
    let code = run(argv);
    (code, std::fs::read_to_string(&out).unwrap_or_default())
}

#[test]
fn spectrum_of_a_scaling_is_geometric() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run_to(
        dir.path(),
        "s.json",
        &["spectrum", "--symbol", "scale:0.5", "--space", "hardy", "--n", "16", "--bits", "128", "--format", "json"],
    );
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["metadata"]["symbol"], "scale:0.5");
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 17);
    for (k, row) in rows.iter().enumerate() {
        let a: f64 = row["a_n"].as_str().unwrap().parse().unwrap();
        assert!((a - 0.5f64.powi(k as i32)).abs() < 1e-15);
        assert_eq!(row["certified"], "certified");
    }
}

#[test]
fn csv_and_json_carry_the_same_values() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["taylor", "--symbol", "lens:0.5", "--n", "12", "--bits", "128"];
    let (c1, csv) = run_to(dir.path(), "t.csv", &args);
    let mut json_args = args.to_vec();
    json_args.extend_from_slice(&["--format", "json"]);
    let (c2, json) = run_to(dir.path(), "t.json", &json_args);
    assert_eq!((c1, c2), (0, 0));
    let v: Value = serde_json::from_str(&json).unwrap();
    let rows = v["rows"].as_array().unwrap();
    for (line, row) in csv.lines().skip(1).zip(rows) {
        let re = line.split(',').nth(1).unwrap();
        assert_eq!(row["re"].as_str().unwrap(), re);
    }
}

#[test]
fn identical_runs_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["compare", "--symbol", "lens:0.5", "--n", "24", "--bits", "128", "--seed", "7"];
    let (c1, a) = run_to(dir.path(), "a.csv", &args);
    let (c2, b) = run_to(dir.path(), "b.csv", &args);
    assert_eq!((c1, c2), (0, 0));
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(["specdecay", "spectrum", "--symbol", "nonsense"]), 2);
    assert_eq!(run(["specdecay", "spectrum", "--symbol", "cusp", "--bits", "32"]), 2);
    assert_eq!(run(["specdecay", "spectrum", "--symbol", "scale:1.5"]), 2);
    assert_eq!(run(["specdecay", "no-such-command"]), 2);
    assert_eq!(run(["specdecay", "--help"]), 0);
}

#[test]
fn config_file_supplies_missing_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# preset\nsymbol = scale:0.25\nspace = bergman:0\nn = 10\nbits = 96\nn = 12\n").unwrap();
    let (code, text) = run_to(dir.path(), "c.csv", &["spectrum", "--config", cfg.to_str().unwrap(), "--n", "9"]);
    assert_eq!(code, 0);
    // The command line wins over the file: 10 rows for N = 9.
    assert_eq!(text.lines().count(), 1 + 10);
}

#[test]
fn kernels_command_reports_tiny_errors() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run_to(
        dir.path(),
        "k.json",
        &["kernels", "--alpha", "0.5", "--points", "0.3+0.2i:-0.5i,0.8:0.85", "--bits", "256", "--format", "json"],
    );
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&text).unwrap();
    for row in v["rows"].as_array().unwrap() {
        let err: f64 = row["rel_err"].as_str().map(|s| s.parse().unwrap()).unwrap_or_else(|| row["rel_err"].as_f64().unwrap());
        assert!(err < 1e-30, "{row}");
    }
}

#[test]
fn two_routes_agree_at_small_order() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run_to(
        dir.path(),
        "r.csv",
        &["two-routes", "--symbol", "lens:0.5", "--n", "32", "--count", "10", "--bits", "160"],
    );
    assert_eq!(code, 0);
    assert_eq!(text.lines().count(), 11);
    assert!(text.lines().skip(1).all(|l| l.ends_with("true")));
}

#[test]
fn decay_fits_rank_every_model() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run_to(
        dir.path(),
        "d.csv",
        &["decay", "--symbol", "lens:0.5", "--space", "hardy", "--n", "48", "--bits", "192", "--fit-range", "4:40"],
    );
    assert_eq!(code, 0);
    assert_eq!(text.lines().count(), 4);
}
