//! End-to-end runs of the `mqu` binary: exit codes, output formats, and
//! byte-level determinism.

use std::io::Write as _;
use std::process::{Command, Output};

use mqu_core::circuits::{cat_prep_circuit, ErrorModel};

fn mqu(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mqu"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

#[test]
fn e_estimate_cat_reports_one() {
    let out = mqu(&["e-estimate", "--state", r#"{"kind":"cat","n":4}"#]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let e = report["e"].as_f64().unwrap();
    assert!((e - 1.0).abs() <= 1e-6, "e = {e}");
    assert_eq!(report["n"].as_u64(), Some(4));
}

#[test]
fn e_estimate_reads_spec_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.json");
    std::fs::write(&path, r#"{"kind":"maximally_mixed","n":3}"#).unwrap();
    let arg = format!("@{}", path.display());
    let out = mqu(&["e-estimate", "--state", &arg]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert!(report["e"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn malformed_state_names_the_field_and_exits_one() {
    let out = mqu(&["e-estimate", "--state", r#"{"kind":"cat","m":4}"#]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_of(&out);
    assert!(err.contains("unknown field `m`"), "stderr: {err}");
}

#[test]
fn out_of_range_n_exits_one() {
    let out = mqu(&["e-estimate", "--state", r#"{"kind":"cat","n":14}"#]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("14"));
}

#[test]
fn unknown_flag_exits_one_and_help_exits_zero() {
    let out = mqu(&["bounds-table", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("--bogus"));

    let out = mqu(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).contains("e-estimate"));
}

#[test]
fn bounds_table_csv_grid() {
    let out = mqu(&["bounds-table", "--n", "2..6", "--w", "0.1,0.3", "--alpha", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,w,r_wn,alpha,asymptotic,haupt_x"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 10);
    let mut prev_key = (0usize, f64::NEG_INFINITY);
    for row in rows {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells.len(), 6);
        let n: usize = cells[0].parse().unwrap();
        let w: f64 = cells[1].parse().unwrap();
        let r: f64 = cells[2].parse().unwrap();
        assert!((0.0..=1.0).contains(&r), "r_wn = {r}");
        assert!(prev_key < (n, w), "rows sorted by (n, w)");
        prev_key = (n, w);
        // '.' decimal with 12 significant digits
        assert!(cells[1].contains('.') && cells[1].contains('e'));
    }
}

#[test]
fn identical_argv_gives_identical_bytes() {
    let args = [
        "sweep",
        "--n",
        "2",
        "--w",
        "0.1,0.3",
        "--restarts",
        "2",
        "--max-evals",
        "150",
        "--seed",
        "3",
    ];
    let first = mqu(&args);
    let second = mqu(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    assert!(!first.stdout.is_empty());

    let args = ["e-estimate", "--state", r#"{"kind":"separable","n":3,"terms":2,"seed":9}"#];
    let first = mqu(&args);
    let second = mqu(&args);
    assert_eq!(first.status.code(), Some(0), "stderr: {}", stderr_of(&first));
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn sweep_rows_stay_below_the_ceiling() {
    let out = mqu(&[
        "sweep",
        "--n",
        "2..4",
        "--w",
        "0.1,0.6",
        "--restarts",
        "3",
        "--max-evals",
        "250",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,w,e_d_cat,r_wn"));
    let mut rows = 0;
    for row in lines {
        let cells: Vec<&str> = row.split(',').collect();
        let e: f64 = cells[2].parse().unwrap();
        let r: f64 = cells[3].parse().unwrap();
        assert!(e <= r + 1e-6, "row {row}");
        rows += 1;
    }
    assert_eq!(rows, 6);
}

#[test]
fn hypersurface_flags_cat_but_not_separable() {
    let out = mqu(&["hypersurface", "--state", r#"{"kind":"cat","n":5}"#]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(report["exceeds"].as_bool(), Some(true));
    assert!(report["value"].as_f64().unwrap() > report["threshold"].as_f64().unwrap());

    let out = mqu(&[
        "hypersurface",
        "--state",
        r#"{"kind":"separable","n":4,"terms":3,"seed":7}"#,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(report["exceeds"].as_bool(), Some(false));
}

#[test]
fn channel_apply_emits_the_mixed_state() {
    let out = mqu(&[
        "channel-apply",
        "--state",
        r#"{"kind":"basis","word":"01"}"#,
        "--channel",
        r#"{"channel":"d","w":0.5}"#,
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let result: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(result["n"].as_u64(), Some(2));
    assert_eq!(result["mode"].as_str(), Some("exact"));
    let mat = result["state"].as_array().unwrap();
    assert_eq!(mat.len(), 4);
    let trace: f64 = (0..4).map(|i| mat[i][i][0].as_f64().unwrap()).sum();
    assert!((trace - 1.0).abs() < 1e-12, "trace = {trace}");
}

#[test]
fn circuit_run_checks_the_ceiling() {
    let circuit = cat_prep_circuit(3, 0.3, ErrorModel::Dephasing);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("circuit.json");
    let mut file = std::fs::File::create(&path).unwrap();
    write!(file, "{}", serde_json::to_string(&circuit).unwrap()).unwrap();
    drop(file);

    let arg = format!("@{}", path.display());
    let out = mqu(&["circuit-run", "--circuit", &arg]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let result: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(result["verdict"]["passes"].as_bool(), Some(true));
    assert_eq!(result["verdict"]["touched"].as_u64(), Some(3));
    let e = result["report"]["e"].as_f64().unwrap();
    let bound = result["verdict"]["bound"].as_f64().unwrap();
    assert!(e <= bound + 1e-6);
    // no --emit-state, so the matrix stays out of the report
    assert!(result.get("state").is_none());
}

#[test]
fn verify_single_criterion_and_bad_id() {
    let out = mqu(&["verify", "--only", "11"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("criterion 11"));
    assert!(text.contains("passed 1 of 1"));
    // timings belong to stderr so stdout stays byte-stable
    assert!(!text.contains(" ms"));
    assert!(stderr_of(&out).contains(" ms"));

    let out = mqu(&["verify", "--only", "99"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_quick_passes_all_eleven() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = mqu(&["verify", "--level", "quick", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    assert!(stdout_of(&out).contains("passed 11 of 11"));

    let written: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let reports = written.as_array().unwrap();
    assert_eq!(reports.len(), 11);
    assert!(reports.iter().all(|r| r["passed"].as_bool() == Some(true)));
}

#[test]
fn output_flag_writes_the_file_instead_of_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.csv");
    let out = mqu(&[
        "bounds-table",
        "--n",
        "2,3",
        "--w",
        "0.2",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 3);
}
