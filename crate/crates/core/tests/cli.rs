use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_sde-spline");

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(BIN).args(args).current_dir(dir).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn write_data(dir: &Path) {
    let mut s = String::from("t,y\n");
    for i in 0..40 {
        let t = i as f64 / 39.0;
        s += &format!("{t},{}\n", (5.0 * t).sin() + 0.05 * ((97 * i) % 13) as f64);
    }
    // repeated locations
    s += "0.5,0.4\n0.5,0.7\n";
    fs::write(dir.join("d.csv"), s).unwrap();
}

#[test]
fn fit_writes_curve_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    write_data(dir.path());
    let out = run(
        &["fit", "--input", "d.csv", "--model", "bass1", "--errors", "cauchy", "--seed", "7", "--iterations", "600", "--burnin", "200", "--output", "out"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let curve = fs::read_to_string(dir.path().join("out/curve.csv")).unwrap();
    let mut lines = curve.lines();
    assert_eq!(lines.next(), Some("t,mean,lo95,hi95,lambda_mean"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 41);
    for r in &rows {
        assert!(r[2] <= r[1] && r[1] <= r[3]);
        assert!(r[4] > 0.0);
    }
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/summary.json")).unwrap()).unwrap();
    for key in ["model", "seed", "iterations", "burnin", "acceptance_gamma", "tau", "delta", "eta"] {
        assert!(summary.get(key).is_some(), "missing {key}");
    }
    assert_eq!(summary["model"], "bass1");
    assert_eq!(summary["seed"], 7);
    for key in ["mean", "lo95", "hi95"] {
        assert!(summary["tau"][key].is_f64());
    }
    let rate = summary["acceptance_gamma"].as_f64().unwrap();
    assert!(rate > 0.0 && rate <= 1.0);
}

#[test]
fn fit_is_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    write_data(dir.path());
    let args = |o: &'static str| ["fit", "--input", "d.csv", "--model", "bass2", "--iterations", "400", "--burnin", "100", "--output", o];
    assert_eq!(code(&run(&args("a"), dir.path())), 0);
    assert_eq!(code(&run(&args("b"), dir.path())), 0);
    let a = fs::read_to_string(dir.path().join("a/curve.csv")).unwrap();
    assert_eq!(a, fs::read_to_string(dir.path().join("b/curve.csv")).unwrap());
    for line in a.lines().skip(1) {
        for v in line.split(',') {
            let x: f64 = v.parse().unwrap();
            assert_eq!(format!("{x}"), v);
        }
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    write_data(dir.path());
    fs::write(dir.path().join("c.json"), r#"{"model": "bass2", "iterations": 300, "burnin": 100, "seed": 3, "knots": 12}"#).unwrap();
    let out = run(&["fit", "--input", "d.csv", "--config", "c.json", "--model", "oss", "--output", "o"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("o/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["model"], "oss");
    assert_eq!(summary["seed"], 3);
    assert_eq!(summary["knots"], 12);
    assert!(summary["eta"].is_null());
    fs::write(dir.path().join("bad.json"), r#"{"modle": "oss"}"#).unwrap();
    assert_eq!(code(&run(&["fit", "--input", "d.csv", "--config", "bad.json"], dir.path())), 2);
}

#[test]
fn fit_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    write_data(p);
    assert_eq!(code(&run(&["fit", "--input", "d.csv", "--model", "bass3"], p)), 1);
    assert_eq!(code(&run(&["fit", "--input", "d.csv", "--bogus"], p)), 1);
    assert_eq!(code(&run(&["fit", "--input", "missing.csv"], p)), 1);
    assert_eq!(code(&run(&["fit", "--input", "d.csv", "--iterations", "150", "--burnin", "100"], p)), 1);
    fs::write(p.join("bad.csv"), "t,y\n0,1\n1,oops\n").unwrap();
    let out = run(&["fit", "--input", "bad.csv"], p);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.csv:3"));
    fs::write(p.join("few.csv"), "t,y\n0,1\n1,2\n1,3\n2,2\n").unwrap();
    assert_eq!(code(&run(&["fit", "--input", "few.csv"], p)), 3);
    assert_eq!(code(&run(&["--help"], p)), 0);
}

#[test]
fn matrices_dump() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(p.join("g.txt"), (0..9).map(|i| format!("{i}\n")).collect::<String>()).unwrap();
    let out = run(&["matrices", "--which", "q", "--grid", "g.txt"], p);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 9);
    assert_eq!(rows[4], "0,0,1,-4,6,-4,1,0,0");

    fs::write(p.join("g2.txt"), "0\n0.5\n0.75\n1.0\n").unwrap();
    let out = run(&["matrices", "--which", "btilde", "--grid", "g2.txt", "--output", "bt.csv"], p);
    assert_eq!(code(&out), 0);
    let bt = fs::read_to_string(p.join("bt.csv")).unwrap();
    let diag: Vec<f64> = bt.lines().enumerate().map(|(i, l)| l.split(',').nth(i).unwrap().parse().unwrap()).collect();
    assert_eq!(diag, vec![0.25, 0.375, 0.25, 0.125]);

    assert_eq!(code(&run(&["matrices", "--which", "q1", "--grid", "g.txt"], p)), 1);
    fs::write(p.join("l.txt"), "1\n1\n1\n1\n1\n1\n1\n1\n1\n").unwrap();
    let q1 = run(&["matrices", "--which", "q1", "--grid", "g.txt", "--lambda", "l.txt"], p);
    assert_eq!(String::from_utf8(q1.stdout).unwrap(), text);
    fs::write(p.join("dup.txt"), "0\n1\n1\n2\n").unwrap();
    assert_eq!(code(&run(&["matrices", "--which", "h", "--grid", "dup.txt"], p)), 3);
    fs::write(p.join("junk.txt"), "0\n1\nx\n").unwrap();
    assert_eq!(code(&run(&["matrices", "--which", "h", "--grid", "junk.txt"], p)), 2);
}

#[test]
fn simulate_report_and_bad_example() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let out = run(
        &["simulate", "--example", "2", "--reps", "3", "--seed", "1", "--methods", "bass1,oss", "--iterations", "300", "--burnin", "100", "--output", "r"],
        p,
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(p.join("r/benchmark.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "example,method,reps,median_mse,q1_mse,q3_mse,failures,wall_seconds");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("2,bass1,3,"));
    assert!(lines[1].ends_with(",0,NA"));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(p.join("r/benchmark.json")).unwrap()).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 2);
    assert_eq!(code(&run(&["simulate", "--example", "9"], p)), 1);
}
