use std::process::{Command, Output};

fn spinorlz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinorlz")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_record(o: &Output) -> serde_json::Value {
    let text = String::from_utf8(o.stderr.clone()).unwrap();
    serde_json::from_str(text.lines().last().unwrap()).unwrap()
}

#[test]
fn scan_csv_is_byte_identical_across_runs() {
    let args = ["scan", "--eps", "2", "--mu", "5", "--sweep", "chi", "--from", "0", "--to", "3.14", "--points", "200"];
    let (a, b) = (spinorlz(&args), spinorlz(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# command=scan"));
    assert_eq!(lines.next().unwrap(), "sigma,chi,psi,P");
    assert_eq!(lines.count(), 200);
}

#[test]
fn map_fields_json() {
    let o = spinorlz(&["--format", "json", "map-fields", "--Bx", "0.060", "--Bz0", "0.300", "--Bdot", "5e4", "--gF", "0.5"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["command"], "map-fields");
    assert!((v["result"]["mu"].as_f64().unwrap() - 5.0).abs() < 1e-12);
    assert!((v["result"]["R"].as_f64().unwrap() - 0.78).abs() < 0.0078);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[parabolic]\neps = 2.0\nmu = 3.0\n").unwrap();
    let from_file = spinorlz(&["--config", cfg.to_str().unwrap(), "--format", "json", "parabolic"]);
    let overridden = spinorlz(&["--config", cfg.to_str().unwrap(), "--format", "json", "parabolic", "--mu", "5"]);
    let v1: serde_json::Value = serde_json::from_str(&stdout(&from_file)).unwrap();
    let v2: serde_json::Value = serde_json::from_str(&stdout(&overridden)).unwrap();
    assert_eq!(v1["config"]["mu"], 3.0);
    assert_eq!(v2["config"]["mu"], 5.0);
    assert_eq!(v2["config"]["eps"], 2.0);
}

#[test]
fn writes_to_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lz.csv");
    let o = spinorlz(&["--out", out.to_str().unwrap(), "lz", "--lambda", "2"]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(out).unwrap().starts_with("# command=lz"));
}

#[test]
fn missing_parameter_exits_2() {
    let o = spinorlz(&["parabolic", "--eps", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let e = error_record(&o);
    assert_eq!(e["error"], "invalid_parameters");
    assert_eq!(e["exit_code"], 2);
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[lz]\nlambda = 2.0\nlamda = 3.0\n").unwrap();
    let o = spinorlz(&["--config", cfg.to_str().unwrap(), "lz"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_3() {
    let o = spinorlz(&["gp", "--duration", "0.05", "--p1", "0.2", "--p0", "0.5", "--pm1", "0.3", "--phase0", "1"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(error_record(&o)["error"], "numerical");
}

#[test]
fn unwritable_output_exits_4() {
    let o = spinorlz(&["--out", "/nonexistent/dir/x.csv", "lz", "--lambda", "1"]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(error_record(&o)["error"], "io");
}
