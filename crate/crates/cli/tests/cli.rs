use std::path::Path;
use std::process::{Command, Output};

use percwalk_cli::ResultRecord;

fn percwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_percwalk")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Parses a CSV body (no comment lines) into header + numeric-or-text rows.
fn table(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (header, rows)
}

fn col(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn simulate_matches_golden_file() {
    let o = percwalk(&["simulate", "--lattice-side", "2", "--lambda", "1", "--steps", "3", "--no-timestamp"]);
    assert!(o.status.success());
    let golden = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/simulate_side2_lambda1.csv")).unwrap();
    let (gh, gr) = table(&golden);
    let (h, r) = table(&stdout(&o));
    assert_eq!(h, gh);
    assert_eq!(r.len(), gr.len());
    for (row, grow) in r.iter().zip(&gr) {
        for (x, g) in row.iter().zip(grow) {
            let (x, g): (f64, f64) = (x.parse().unwrap(), g.parse().unwrap());
            assert!((x - g).abs() < 1e-12, "{x} vs {g}");
        }
    }
}

#[test]
fn exit_codes() {
    assert_eq!(percwalk(&["simulate", "--lambda", "2"]).status.code(), Some(2));
    assert_eq!(percwalk(&["simulate", "--noise", "sideways"]).status.code(), Some(2));
    assert_eq!(percwalk(&["simulate", "--lattice-side", "40"]).status.code(), Some(3));
    let o = percwalk(&["simulate", "--lattice-side", "40", "--max-side", "20"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("20"));
    let o = percwalk(&["mixing-time", "--noise", "bitflip", "--gamma", "0.1", "--target", "0.1"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("0.25"));
    assert_eq!(percwalk(&["mixing-time", "--noise", "dephasing", "--gamma", "0.1", "--target", "5"]).status.code(), Some(4));
    assert_eq!(percwalk(&["table1", "--bogus", "1"]).status.code(), Some(2));
}

#[test]
fn config_file_values_are_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# demo\nlattice_side = 3\nlambda = 0\nsteps = 2\noutput-format = json\n").unwrap();
    let o = percwalk(&["simulate", "--config", cfg.to_str().unwrap(), "--steps", "4", "--no-timestamp"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rec = ResultRecord::from_json(&stdout(&o)).unwrap();
    assert_eq!(rec.config["lattice-side"], "3");
    assert_eq!(rec.config["steps"], "4");
    assert_eq!(rec.series("zones").unwrap().rows.len(), 5);
}

#[test]
fn empty_graph_keeps_walker_at_origin() {
    let o = percwalk(&["simulate", "--lattice-side", "5", "--lambda", "0", "--steps", "6", "--noise", "dephasing", "--gamma", "0.3", "--no-timestamp"]);
    assert!(o.status.success());
    let (h, r) = table(&stdout(&o));
    for p in col(&h, &r, "p0") {
        assert!((p - 1.0).abs() < 1e-12);
    }
}

#[test]
fn json_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curves.json");
    let o = percwalk(&[
        "curves", "--gamma", "0.05", "--points", "11", "--output-format", "json", "--output", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let rec = ResultRecord::from_json(&text).unwrap();
    assert_eq!(rec.to_json().unwrap() + "\n", text);
    assert!(rec.provenance.created.is_some());
    let bit = rec.series("bitflip").unwrap();
    assert_eq!(bit.rows.len(), 11);
}

#[test]
fn multi_series_csv_writes_one_file_per_series() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let o = percwalk(&["curves", "--gamma", "0.1", "--points", "5", "--t-max", "1000", "--output", out.to_str().unwrap()]);
    assert!(o.status.success());
    for name in ["dephasing", "bitflip", "bounds", "rate_functions", "tuning_dephasing", "tuning_bitflip", "theta_profile"] {
        let p = dir.path().join(format!("run_{name}.csv"));
        let text = std::fs::read_to_string(&p).unwrap_or_else(|_| panic!("missing {}", p.display()));
        assert!(text.starts_with("# generated "));
        assert!(!text.contains('\r'));
    }
    let (h, r) = table(&std::fs::read_to_string(dir.path().join("run_bitflip.csv")).unwrap());
    let d = col(&h, &r, "distance");
    assert!((d.last().unwrap() - 0.25).abs() < 1e-9);
    let (h, r) = table(&std::fs::read_to_string(dir.path().join("run_bounds.csv")).unwrap());
    assert!(h.iter().all(|c| c == "t" || c.starts_with("analytic_bound")));
    assert_eq!(r.len(), 5);
}

#[test]
fn no_timestamp_output_is_byte_identical() {
    let args = ["simulate", "--lattice-side", "4", "--lambda", "0.5", "--steps", "3", "--trajectories", "200", "--seed", "7", "--no-timestamp"];
    let a = percwalk(&args);
    let b = percwalk(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(!stdout(&a).contains("# generated"));
}

#[test]
fn gamma_tune_reports_no_solution_for_pure_coin() {
    let o = percwalk(&["gamma-tune", "--a", "1", "--no-timestamp"]);
    assert_eq!(o.status.code(), Some(0));
    let (h, r) = table(&stdout(&o));
    let i = h.iter().position(|c| c == "status").unwrap();
    assert_eq!(r[0][i], "no_solution");
    let o = percwalk(&["gamma-tune", "--a", "0.5", "--no-timestamp"]);
    let (h, r) = table(&stdout(&o));
    let i = h.iter().position(|c| c == "status").unwrap();
    assert_eq!(r[0][i], "root");
    assert!(col(&h, &r, "residual")[0].abs() <= 1e-10);
}

#[test]
fn table1_lists_six_coin_lengths() {
    let o = percwalk(&["table1", "--no-timestamp"]);
    let (h, r) = table(&stdout(&o));
    assert_eq!(col(&h, &r, "a"), vec![1.0, 0.9, 0.8, 0.7, 0.6, 0.5]);
    let d = col(&h, &r, "avg_distance");
    assert!(d.windows(2).all(|w| w[0] > w[1]));
}

#[test]
fn validate_passes_on_deterministic_lattice() {
    let o = percwalk(&["validate", "--lambda", "1", "--trajectories", "3", "--steps", "4", "--no-timestamp"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}
