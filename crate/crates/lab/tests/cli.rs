use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ledg-lab"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, json: &str) -> std::path::PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, json).unwrap();
    path
}

#[test]
fn simulate_writes_every_scheme_and_the_reference() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), r#"{"experiment":"simulate","p0_grid":[1.0],"n_steps":5}"#);
    let out = dir.path().join("sim.csv");
    let run = lab(&["simulate"], &config, &out);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let text = std::fs::read_to_string(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "step,t,x,p,energy,delta_n,scheme,x_ref,p_ref");
    assert_eq!(lines.len(), 1 + 4 * 5);
    assert!(lines[1].starts_with("1,0.02,"));
    assert!(lines.last().unwrap().contains(",ledg,"));
}

#[test]
fn zero_steps_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), r#"{"experiment":"simulate","n_steps":0}"#);
    let out = dir.path().join("sim.csv");
    assert!(lab(&["simulate"], &config, &out).status.success());
    assert_eq!(std::fs::read_to_string(out).unwrap(), "step,t,x,p,energy,delta_n,scheme,x_ref,p_ref\n");
}

#[test]
fn order_study_writes_slope_summary() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), r#"{"experiment":"order-study","schemes":["leapfrog","ledg"]}"#);
    let out = dir.path().join("order.csv");
    assert!(lab(&["run"], &config, &out).status.success());
    let summary: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("order.csv.summary.json")).unwrap()).unwrap();
    let lf = summary["leapfrog"].as_f64().unwrap();
    let ledg = summary["ledg"].as_f64().unwrap();
    assert!((lf - 2.0).abs() < 0.1, "{lf}");
    assert!(ledg > 2.7, "{ledg}");
    let csv = std::fs::read_to_string(out).unwrap();
    assert_eq!(csv.lines().next(), Some("scheme,eps,n_steps,error"));
    assert_eq!(csv.lines().count(), 1 + 2 * 9);
}

#[test]
fn subcommand_overrides_config_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), r#"{"experiment":"simulate","eps_grid":[0.1]}"#);
    let out = dir.path().join("profile.csv");
    assert!(lab(&["delta-profile"], &config, &out).status.success());
    let csv = std::fs::read_to_string(out).unwrap();
    assert_eq!(csv.lines().next(), Some("x,ratio,eps"));
    assert_eq!(csv.lines().count(), 1 + 1001);
}

#[test]
fn timing_adds_wall_time_column() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), r#"{"experiment":"sweep-eps","p0_grid":[1.0],"eps_grid":[0.1],"n_cycles":10}"#);
    let out = dir.path().join("sweep.csv");
    assert!(lab(&["sweep-eps", "--timing"], &config, &out).status.success());
    let csv = std::fs::read_to_string(out).unwrap();
    assert_eq!(csv.lines().next(), Some("scheme,p0,eps,rel_period_error,energy_drift,status,wall_time"));
}

#[test]
fn invalid_config_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    for json in [
        r#"{"experiment":"sweep-p0","schemes":[]}"#,
        r#"{"experiment":"sweep-p0","p0_grid":[1.0,0.5]}"#,
        r#"{"experiment":"simulate","bogus":1}"#,
        r#"{"experiment":"sweep-p0","p0_grid":[2.0]}"#,
    ] {
        let config = write_config(dir.path(), json);
        let run = lab(&["run"], &config, &out);
        assert_eq!(run.status.code(), Some(2), "{json}");
        assert!(String::from_utf8_lossy(&run.stderr).contains("config error"));
    }
    assert!(!out.exists());
}

#[test]
fn failing_step_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"experiment":"simulate","schemes":["ledg"],"potential":{"kind":"harmonic","omega":10.0},"eps_grid":[0.35],"n_steps":3}"#,
    );
    let run = lab(&["simulate"], &config, &dir.path().join("x.csv"));
    assert_eq!(run.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&run.stderr).contains("scheme ledg"));
}

#[test]
fn unwritable_output_exits_with_4() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), r#"{"experiment":"delta-profile"}"#);
    let run = lab(&["run"], &config, &dir.path().join("missing/dir/out.csv"));
    assert_eq!(run.status.code(), Some(4));
}

#[test]
fn failed_sweep_cells_are_reported_in_band() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"experiment":"sweep-eps","schemes":["ledg"],"potential":{"kind":"harmonic","omega":10.0},"p0_grid":[1.0],"eps_grid":[0.01,0.35],"n_cycles":10}"#,
    );
    let out = dir.path().join("sweep.csv");
    assert!(lab(&["sweep-eps"], &config, &out).status.success());
    let csv = std::fs::read_to_string(out).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert!(rows[0].ends_with(",ok"), "{}", rows[0]);
    assert!(rows[1].starts_with("ledg,1.0,0.35,,,failed:"), "{}", rows[1]);
}
