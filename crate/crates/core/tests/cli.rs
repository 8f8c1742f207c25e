use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use coincidence::interferometer::{enumerate_outputs, haar_unitary};
use coincidence::matfun::determinant;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_coincidence"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("coincidence-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const FERMION_5_3: &str = r#"{
    "m": 5, "n": 3,
    "unitary": {"kind": "haar", "seed": 11},
    "species": "fermion",
    "arrival": {"taus": [0.1, 0.35, 0.8], "delta_omega": 4.0, "window": 1.0, "bins": 4},
    "output": "01101"
}"#;

#[test]
fn rate_engines_agree() {
    let dir = scratch("rate");
    let cfg = write_config(&dir, FERMION_5_3);
    let cfg = cfg.to_str().unwrap();
    let mut rates = Vec::new();
    for engine in ["direct", "blocked"] {
        let out = run(&["rate", "--config", cfg, "--engine", engine]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert_eq!(v["engine"], engine);
        assert_eq!(v["results"][0]["s"], "01101");
        rates.push(v["results"][0]["rate"].as_f64().unwrap());
    }
    assert!((rates[0] - rates[1]).abs() <= 1e-9 * rates[0].abs());
}

#[test]
fn square_fermion_distribution_is_a_point_mass() {
    let dir = scratch("square");
    let cfg = write_config(
        &dir,
        r#"{"m": 4, "n": 4, "unitary": {"kind": "haar", "seed": 5}, "species": "fermion",
            "arrival": {"taus": [0.0, 0.2, 0.4, 0.9], "delta_omega": 1.0, "window": 1.0, "bins": 2}}"#,
    );
    let out = run(&["distribution", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<Value> = stdout(&out)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 1);
    assert_eq!(lines[0]["s"], "1111");
    assert!((lines[0]["prob"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn fermion_distribution_matches_determinants_when_indistinguishable() {
    let dir = scratch("det");
    let cfg = write_config(
        &dir,
        r#"{"m": 6, "n": 3, "unitary": {"kind": "haar", "seed": 21}, "species": "fermion",
            "arrival": {"taus": [0.5, 0.5, 0.5], "delta_omega": 1.0, "window": 1.0, "bins": 2}}"#,
    );
    let out = run(&["distribution", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let summary: Value = serde_json::from_slice(
        &out.stderr[..out.stderr.iter().rposition(|&b| b == b'}').unwrap() + 1],
    )
    .unwrap();
    assert!(summary["tv_from_indistinguishable"].as_f64().unwrap() < 1e-9);

    let u = haar_unitary(6, 21).unwrap();
    let strings = enumerate_outputs(6, 3).unwrap();
    let dets: Vec<f64> = strings
        .iter()
        .map(|s| determinant(&u.submatrix(s, 3).unwrap()).norm_sqr())
        .collect();
    let total: f64 = dets.iter().sum();
    let mut tv = 0.0;
    for (line, d) in stdout(&out).lines().zip(&dets) {
        let v: Value = serde_json::from_str(line).unwrap();
        tv += (v["prob"].as_f64().unwrap() - d / total).abs();
    }
    assert!(tv / 2.0 < 1e-9, "tv {tv}");
}

#[test]
fn analyze_reports_exact_probabilities() {
    let out = run(&["analyze", "--n", "5", "--bins", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["witness"], serde_json::json!([3, 2]));
    let row = v["partitions"]
        .as_array()
        .unwrap()
        .iter()
        .find(|row| row["partition"] == serde_json::json!([2, 2, 1]))
        .unwrap();
    assert_eq!(row["probability"], "315/2048");

    let out = run(&["analyze", "--n", "6", "--bins", "8"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let flagged = v["partitions"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|row| row["requires_witness"] == true)
        .count();
    assert_eq!(flagged, 7);
}

#[test]
fn gamas_table_prints_eleven_rows() {
    let out = run(&["gamas-table", "--n", "6"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 12);
    let out = run(&["gamas-table", "--n", "4", "--json"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["columns"].as_array().unwrap().len(), 5);
}

#[test]
fn landscape_writes_csv_to_file() {
    let dir = scratch("landscape");
    let cfg = write_config(
        &dir,
        r#"{"m": 2, "n": 2,
            "unitary": {"kind": "matrix", "rows": [[[0.7071067811865476, 0], [0.7071067811865476, 0]],
                                                   [[0.7071067811865476, 0], [-0.7071067811865476, 0]]]},
            "arrival": {"taus": [0.0, 0.0], "delta_omega": 1.0, "window": 1.0, "bins": 2},
            "output": "11"}"#,
    );
    let csv_path = dir.join("grid.csv");
    let out = run(&[
        "landscape",
        "--config",
        cfg.to_str().unwrap(),
        "--from",
        "-2",
        "--to",
        "2",
        "--steps",
        "5",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&csv_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# config_hash="));
    assert_eq!(lines[1], "delay_2,rate");
    assert_eq!(lines.len(), 7);
    let centre: Vec<f64> = lines[4].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(centre[0], 0.0);
    assert!(centre[1].abs() < 1e-12, "HOM dip at zero delay");
    let edge: f64 = lines[2].split(',').nth(1).unwrap().parse().unwrap();
    assert!(edge > 0.4);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = scratch("rerun");
    let cfg = write_config(&dir, FERMION_5_3);
    let cfg = cfg.to_str().unwrap();
    let a = run(&["sample", "--config", cfg, "--count", "50", "--seed", "9"]);
    let b = run(&["sample", "--config", cfg, "--count", "50", "--seed", "9"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["sample", "--config", cfg, "--count", "50", "--seed", "10"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn exit_codes() {
    let dir = scratch("exit");
    let bad = write_config(
        &dir,
        r#"{"m": 2, "n": 3, "unitary": {"kind": "haar"},
            "arrival": {"taus": [0, 0, 0], "delta_omega": 1, "window": 1, "bins": 2}}"#,
    );
    let out = run(&["rate", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n"));

    assert_eq!(run(&["rate"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(
        run(&["analyze", "--n", "40", "--bins", "8"]).status.code(),
        Some(3)
    );

    let big = dir.join("big.json");
    std::fs::write(
        &big,
        r#"{"m": 9, "n": 8, "unitary": {"kind": "haar"}, "engine": "blocked",
            "arrival": {"taus": [0,0,0,0,0,0,0,0], "delta_omega": 1, "window": 1, "bins": 2}}"#,
    )
    .unwrap();
    assert_eq!(
        run(&["rate", "--config", big.to_str().unwrap()])
            .status
            .code(),
        Some(3)
    );
}
