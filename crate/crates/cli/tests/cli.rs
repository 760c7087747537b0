use pfold::experiment::{from_json, to_json};
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn pfold(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pfold")).args(args).output().expect("binary runs")
}

fn out_dir(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

#[test]
fn rv_model_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let o = pfold(&["rv-model", "--char", "7", "--p", "3", "--n", "5", "--out", &out_dir(dir.path())]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(dir.path().join("report.json")).unwrap();
    let report = from_json(&text).unwrap();
    assert_eq!(to_json(&report).unwrap() + "\n", text);
    assert!(report.complete);
    assert_eq!(report.failures(), 0);
}

#[test]
fn csv_output_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = pfold(&["distribution", "--d", "2,2", "--affine", "--format", "csv", "--out", &out_dir(dir.path())]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let hist = fs::read_to_string(dir.path().join("histogram_d2_2_empirical.csv")).unwrap();
    assert!(hist.starts_with("c0,c1,mass_numerator,mass_denominator\n"));
    for f in ["checks.csv", "series.csv", "moments.csv", "histogram_model_n8.csv", "histogram_affine_d2_2_empirical.csv"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(pfold(&["verify-exact", "--char", "5", "--p", "2"]).status.code(), Some(0));
    // Cover degree 4 is not prime.
    assert_eq!(pfold(&["rv-model", "--p", "4"]).status.code(), Some(2));
    // The field of order 7 has no character of order 5.
    assert_eq!(pfold(&["distribution", "--p", "5"]).status.code(), Some(2));
    assert_ne!(pfold(&["no-such-mode"]).status.code(), Some(0));
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "characteristic = 13\nn = 4\nseed = 9\n").unwrap();
    let o = pfold(&["rv-model", "--config", cfg.to_str().unwrap(), "--n", "3", "--format", "json", "--out", &out_dir(dir.path())]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = from_json(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(r.config.q, 13);
    assert_eq!(r.config.n, Some(3));

    fs::write(&cfg, "no_such_key = 1\n").unwrap();
    assert_eq!(pfold(&["rv-model", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn budget_overrun_exits_cleanly() {
    let o = pfold(&["distribution", "--d", "2,2", "--budget", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("skipped d2_2"), "{stdout}");
}
