use std::process::{Command, Output};

use ising_discrim::optimize::pair_error;
use ising_discrim::{Backend, Beta};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ising-discrim")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

/// Data rows of a CSV output as maps from header name to cell.
fn csv_rows(text: &str) -> Vec<Vec<(String, String)>> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    lines.map(|l| header.iter().cloned().zip(l.split(',').map(String::from)).collect()).collect()
}

fn cell(row: &[(String, String)], key: &str) -> f64 {
    row.iter().find(|(k, _)| k == key).unwrap().1.parse().unwrap()
}

#[test]
fn pe_point_matches_library() {
    let v = json(&["pe", "--J1", "1", "--J2", "2", "--h", "1.5", "--L", "3", "--beta", "2"]);
    let expect = pair_error(1.0, 2.0, 1.5, 3, Beta::Finite(2.0), Backend::Dense).unwrap();
    assert_eq!(v["p_error"].as_f64().unwrap(), expect);
    assert_eq!(v["backend"], "dense");
    assert_eq!(v["beta"], 2.0);
    let v = json(&["pe", "--J1", "1", "--J2", "2", "--h", "1.5", "--L", "3"]);
    assert_eq!(v["beta"], "inf");
}

#[test]
fn auto_backend_switches_to_fermions_for_long_chains() {
    let v = json(&["overlap", "--J1", "1", "--J2", "1.1", "--h", "1", "--L", "400"]);
    assert_eq!(v["backend"], "fermion");
    let f = v["overlap"].as_f64().unwrap();
    assert!(f > 0.0 && f < 1.0);
}

#[test]
fn metric_parts_add_up() {
    for extra in [&["--L", "4"][..], &["--L", "100", "--backend", "fermion"][..]] {
        let mut args = vec!["metric", "--J", "1", "--h", "0.9", "--beta", "3"];
        args.extend_from_slice(extra);
        let v = json(&args);
        let (c, n, t) = (v["classical"].as_f64().unwrap(), v["nonclassical"].as_f64().unwrap(), v["total"].as_f64().unwrap());
        assert!((c + n - t).abs() <= 1e-14 * t, "{v}");
    }
}

#[test]
fn geomean_sweep_is_log_symmetric() {
    for l in ["2", "3", "4"] {
        let text = stdout(&["scan", "--quantity", "pe", "--sweep", "J2:0.01:100:41:log", "--lock-h", "geomean", "--J1", "1", "--L", l]);
        let q: Vec<f64> = csv_rows(&text).iter().map(|r| cell(r, "p_error")).collect();
        assert_eq!(q.len(), 41);
        for i in 0..20 {
            assert!((q[i] - q[40 - i]).abs() < 1e-8, "L={l} i={i}: {} vs {}", q[i], q[40 - i]);
            assert!(q[i] < q[i + 1], "L={l}: not increasing towards the cusp at {i}");
        }
        assert!((q[20] - 0.5).abs() < 1e-8);
    }
}

#[test]
fn scans_are_deterministic_across_threads_and_sinks() {
    let args = ["scan", "--quantity", "metric", "--sweep", "J:0.2:3:9:log", "--h", "1", "--L", "3", "--beta", "2"];
    let one = stdout(&[&args[..], &["--threads", "1"]].concat());
    let four = stdout(&[&args[..], &["--threads", "4"]].concat());
    assert_eq!(one, four);
    assert!(one.starts_with("# ising-discrim"));
    let dir = std::env::temp_dir().join(format!("ising-discrim-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("scan.csv");
    let path_str = path.to_str().unwrap();
    assert!(stdout(&[&args[..], &["--out", path_str]].concat()).is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), one);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn json_scan_rows_follow_sweep_order() {
    let v = json(&["scan", "--quantity", "optimal-field", "--sweep", "J:0.5:2:4:lin", "--L", "16", "--format", "json"]);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    for (row, j) in rows.iter().zip([0.5, 1.0, 1.5, 2.0]) {
        assert_eq!(row["J"].as_f64().unwrap(), j);
        let h = row["h_opt"].as_f64().unwrap();
        assert!((h - j).abs() < 1e-6 * j, "{row}");
        assert!(row["evaluations"].as_u64().unwrap() > 0);
    }
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["pe", "--J1", "1", "--h", "1"][..],
        &["pe", "--J1", "1", "--J2", "2", "--h", "1", "--L", "13", "--backend", "dense"],
        &["pe", "--J1", "1", "--J2", "2", "--h", "1", "--L", "5", "--backend", "fermion"],
        &["pe", "--J1", "-1", "--J2", "2", "--h", "1"],
        &["metric", "--J", "1", "--h", "1", "--beta", "-3"],
        &["scan", "--quantity", "pe", "--sweep", "J2:1:0.1:5:lin", "--J1", "1", "--h", "1"],
        &["scan", "--quantity", "metric", "--sweep", "h:0:1:3:lin", "--J", "1", "--lock-h", "hstar"],
        &["scan", "--quantity", "metric", "--sweep", "J:1:2:3:lin", "--h", "1", "--lock-h", "geomean"],
        &["verify", "--suite", "nonsense"],
        &["frobnicate"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn verify_suites_report_tables() {
    for suite in ["scaling", "table", "asymptotics"] {
        let text = stdout(&["verify", "--suite", suite]);
        assert!(text.lines().next().unwrap().contains(": PASS"), "{text}");
        assert!(csv_rows(&text).iter().all(|r| r.last().unwrap().1 == "PASS"));
    }
}

#[test]
fn metrics_suite_checks_ground_states_and_sandwich() {
    let out = run(&["verify", "--suite", "metrics"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 7);
    for row in rows.iter().filter(|r| !r[0].1.starts_with("thermal")) {
        assert_eq!(row.last().unwrap().1, "PASS", "{row:?}");
    }
}
