use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ssp-spectral"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn solve_prints_answer_and_multiplicity() {
    let dir = TempDir::new().unwrap();
    let no = write(&dir, "no.json", r#"{"values": [2, 4, 6], "target": 5}"#);
    let yes = write(&dir, "yes.json", r#"{"values": [1, 2, 3], "target": 3}"#);
    let out = run(&["solve", p(&no)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "NO 0\n");
    let out = run(&["solve", p(&yes)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "YES 2\n");
    assert_eq!(stdout(&run(&["solve", p(&yes), "--target", "6"])), "YES 1\n");
    assert_eq!(stdout(&run(&["solve", p(&yes), "--target", "7"])), "NO 0\n");
}

#[test]
fn malformed_input_exits_2() {
    let dir = TempDir::new().unwrap();
    for (name, text) in [
        ("trunc.json", r#"{"values": [1, 2"#),
        ("zero.json", r#"{"values": [1, 0], "target": 1}"#),
        ("neg.json", r#"{"values": [1, -3], "target": 1}"#),
        ("float.json", r#"{"values": [1.5], "target": 1}"#),
        ("missing.json", r#"{"values": [1]}"#),
    ] {
        let out = run(&["solve", p(&write(&dir, name, text))]);
        assert_eq!(out.status.code(), Some(2), "{name}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty(), "{name}");
    }
    assert_eq!(run(&["solve", "/nonexistent/instance.json"]).status.code(), Some(2));
    assert_eq!(run(&["solve"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn spectrum_examples() {
    let dir = TempDir::new().unwrap();
    let ones = write(&dir, "ones.json", r#"{"values": [1, 1], "target": 0}"#);
    assert_eq!(
        stdout(&run(&["spectrum", p(&ones)])),
        "sum,frequency_hz,multiplicity,amplitude\n0,0,1,0.25\n1,1,2,0.5\n2,2,1,0.25\n"
    );
    let out_path = dir.path().join("pow2.csv");
    let out = run(&["spectrum", "--family", "powers_of_two", "--n", "3", "--f0", "2", "--out", p(&out_path)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&out_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 9);
    assert_eq!(lines[8], "7,14,1,0.125");
}

#[test]
fn size_guard_exits_3() {
    let out = run(&["spectrum", "--family", "all_ones", "--n", "25"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("24"));
}

#[test]
fn simulate_examples() {
    let dir = TempDir::new().unwrap();
    let yes = write(&dir, "yes.json", r#"{"values": [3, 34, 4, 12, 5, 2], "target": 9}"#);
    let out = run(&["simulate", p(&yes), "--duration", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let line = stdout(&out);
    let fields: Vec<&str> = line.split_whitespace().collect();
    assert_eq!(fields.len(), 3);
    assert_eq!(fields[0], "YES");
    assert!((fields[1].parse::<f64>().unwrap() - 2.0 / 64.0).abs() < 1e-9);
    assert_eq!(fields[2].parse::<f64>().unwrap(), 1.0 / 128.0);

    let no = write(&dir, "no.json", r#"{"values": [2, 4, 6], "target": 5}"#);
    let line = stdout(&run(&["simulate", p(&no)]));
    assert!(line.starts_with("NO "));
    assert!(line.split_whitespace().nth(1).unwrap().parse::<f64>().unwrap() < 1e-9);
}

#[test]
fn sampling_violation_exits_4() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "i.json", r#"{"values": [3, 34, 4, 12, 5, 2], "target": 9}"#);
    let out = run(&["simulate", p(&inst), "--sample-rate", "100"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("required rate is at least 120"));
    // Above the bandwidth but below the default margin, unless the margin is relaxed.
    assert_eq!(run(&["simulate", p(&inst), "--sample-rate", "61"]).status.code(), Some(4));
    assert_eq!(
        run(&["simulate", p(&inst), "--sample-rate", "61", "--rate-margin", "1"]).status.code(),
        Some(0)
    );
    assert_eq!(run(&["simulate", p(&inst), "--adc-bits", "1"]).status.code(), Some(4));
    assert_eq!(run(&["simulate", p(&inst), "--noise-sigma=-1"]).status.code(), Some(4));
}

#[test]
fn noisy_simulation_is_reproducible_and_writes_csv() {
    let dir = TempDir::new().unwrap();
    let args = |csv: &Path| {
        vec![
            "simulate".to_string(),
            "--family".into(),
            "powers_of_two".into(),
            "--n".into(),
            "10".into(),
            "--noise-sigma".into(),
            "2".into(),
            "--num-samples".into(),
            "2046".into(),
            "--adc-bits".into(),
            "8".into(),
            "--seed".into(),
            "17".into(),
            "--csv".into(),
            csv.to_str().unwrap().into(),
        ]
    };
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let out_a = bin().args(args(&a)).output().unwrap();
    let out_b = bin().args(args(&b)).output().unwrap();
    assert_eq!(out_a.status.code(), Some(0));
    assert_eq!(out_a.stdout, out_b.stdout);
    let csv = fs::read_to_string(&a).unwrap();
    assert_eq!(csv, fs::read_to_string(&b).unwrap());
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,target,magnitude,threshold,decision,snr_estimate,seed"));
    assert!(lines.next().unwrap().starts_with("10,"));
}

fn sweep_json(dir: &TempDir, spec: &str) -> serde_json::Value {
    let spec_path = write(dir, "spec.json", spec);
    let out_path = dir.path().join("report.json");
    let out = run(&["sweep", p(&spec_path), "--format", "json", "--out", p(&out_path)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap()
}

#[test]
fn energy_sweep_fits_minus_one() {
    let dir = TempDir::new().unwrap();
    let report = sweep_json(
        &dir,
        r#"{"experiment": "energy", "families": [{"kind": "powers_of_two"}],
            "n_values": [4, 5, 6, 7, 8, 9, 10, 11, 12]}"#,
    );
    assert_eq!(report["fit"][0]["slope"].as_f64().unwrap(), -1.0);
    assert_eq!(report["rows"].as_array().unwrap().len(), 9);
}

#[test]
fn time_sweep_fits_one() {
    let dir = TempDir::new().unwrap();
    let report = sweep_json(
        &dir,
        r#"{"experiment": "time", "families": [{"kind": "powers_of_two"}],
            "n_values": [4, 6, 8, 10, 12], "fixed": {"max_frequency_hz": 1000000.0}}"#,
    );
    assert!((report["fit"][0]["slope"].as_f64().unwrap() - 1.0).abs() < 0.05);
}

#[test]
fn accuracy_sweep_trends_down() {
    let dir = TempDir::new().unwrap();
    let report = sweep_json(
        &dir,
        r#"{"experiment": "accuracy", "families": [{"kind": "powers_of_two"}],
            "n_values": [4, 6, 8, 10], "trials_per_point": 100,
            "fixed": {"noise_sigma": 0.25, "sample_budget": 4096}}"#,
    );
    let acc: Vec<f64> =
        report["rows"].as_array().unwrap().iter().map(|r| r["decision_accuracy"].as_f64().unwrap()).collect();
    assert!(acc[0] >= 0.95 && acc[3] <= 0.6, "{acc:?}");
    assert!(report["crossover"][0]["n"].as_u64().is_some());
}

#[test]
fn sweep_output_does_not_depend_on_jobs() {
    let dir = TempDir::new().unwrap();
    let spec = write(
        &dir,
        "spec.json",
        r#"{"experiment": "samples", "families": [{"kind": "powers_of_two"}, {"kind": "all_ones", "center_target": true}],
            "n_values": [3, 4, 5], "trials_per_point": 40, "fixed": {"noise_sigma": 0.3}, "seed": 9}"#,
    );
    let mut outputs = Vec::new();
    for (jobs, format) in [("1", "long"), ("3", "long"), ("1", "csv"), ("2", "csv")] {
        let out = dir.path().join(format!("{jobs}.{format}"));
        let status = run(&["sweep", p(&spec), "--jobs", jobs, "--format", format, "--out", p(&out)]).status;
        assert_eq!(status.code(), Some(0));
        outputs.push(fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[2], outputs[3]);
    let csv = String::from_utf8(outputs[2].clone()).unwrap();
    assert!(csv.starts_with("family,n,seed,energy_fraction,min_gap_hz,bandwidth_hz,required_samples,"));
    assert_eq!(csv.lines().count(), 7);
}

#[test]
fn invalid_sweep_spec_exits_2() {
    let dir = TempDir::new().unwrap();
    for (name, text) in [
        ("syntax.json", "{"),
        (
            "unknown.json",
            r#"{"experiment": "energy", "families": [{"kind": "powers_of_two"}], "n_values": [4], "bogus": 1}"#,
        ),
        (
            "order.json",
            r#"{"experiment": "energy", "families": [{"kind": "powers_of_two"}], "n_values": [5, 4]}"#,
        ),
        (
            "fixed.json",
            r#"{"experiment": "time", "families": [{"kind": "powers_of_two"}], "n_values": [4, 5]}"#,
        ),
    ] {
        let out = run(&["sweep", p(&write(&dir, name, text))]);
        assert_eq!(out.status.code(), Some(2), "{name}");
        assert!(!out.stderr.is_empty());
    }
    let spec = write(
        &dir,
        "ok.json",
        r#"{"experiment": "energy", "families": [{"kind": "powers_of_two"}], "n_values": [4]}"#,
    );
    assert_eq!(run(&["sweep", p(&spec), "--format", "xml"]).status.code(), Some(2));
}
