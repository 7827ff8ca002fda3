//! End-to-end checks of the `fast-harq` binary: exit codes, output
//! determinism, flag overrides and the figure bundles.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fast-harq"))
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fast-harq-e2e-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

const GOOD: &str = r#"
[fading]
model = "rician"
k = 0.01

[link]
n_r = 3

[harq]
m_max = 2
sub_len = 1000
info_nats = 500.0
feedback_delay = 40.0
decode_coeff = 0.5

[boundaries]
mode = "uniform"

[sweep]
axis = "snr_db"
values = [-6.0, 0.0]

[mc]
packets = 5000
"#;

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

#[test]
fn analyze_is_deterministic_and_csv() {
    let dir = tmp_dir("analyze");
    let cfg = write_config(&dir, "run.toml", GOOD);
    let a = run(&["analyze", "--config", cfg.to_str().unwrap()]);
    let b = run(&["analyze", "--config", cfg.to_str().unwrap()]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout, "same config must give identical bytes");
    let text = String::from_utf8(a.stdout).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("snr_db,"));
    assert!(header.contains("expected_delay_cu"));
    assert!(header.contains("throughput_npcu"));
    assert_eq!(text.lines().count(), 3); // header + 2 sweep points
}

#[test]
fn analyze_json_format_and_out_file() {
    let dir = tmp_dir("json");
    let cfg = write_config(&dir, "run.toml", GOOD);
    let out = dir.join("result.json");
    let r = run(&[
        "analyze",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(r.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn simulate_seed_override_changes_estimates() {
    let dir = tmp_dir("sim");
    let cfg = write_config(&dir, "run.toml", GOOD);
    let a = run(&["simulate", "--config", cfg.to_str().unwrap(), "--seed", "1"]);
    let b = run(&["simulate", "--config", cfg.to_str().unwrap(), "--seed", "2"]);
    assert!(a.status.success() && b.status.success());
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn boundaries_flag_override() {
    let dir = tmp_dir("bounds");
    let cfg = write_config(&dir, "run.toml", GOOD);
    let r = run(&[
        "analyze",
        "--config",
        cfg.to_str().unwrap(),
        "--boundaries",
        "0.75",
    ]);
    assert!(r.status.success());
    let text = String::from_utf8(r.stdout).unwrap();
    assert!(text.lines().nth(1).unwrap().ends_with(",0.75"));
    // Malformed list is a config error.
    let r = run(&[
        "analyze",
        "--config",
        cfg.to_str().unwrap(),
        "--boundaries",
        "abc",
    ]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn config_errors_exit_2() {
    let dir = tmp_dir("bad");
    let empty_sweep = GOOD.replace("values = [-6.0, 0.0]", "values = []");
    let cfg = write_config(&dir, "empty.toml", &empty_sweep);
    let r = run(&["analyze", "--config", cfg.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&r.stderr).is_empty());

    let cfg = write_config(&dir, "packets.toml", &GOOD.replace("packets = 5000", "packets = 0"));
    let r = run(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));

    let r = run(&["analyze", "--config", dir.join("missing.toml").to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn unknown_figure_exits_2_and_known_figure_writes_files() {
    let dir = tmp_dir("fig");
    let r = run(&["figure", "fig999", "--out", dir.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));

    let r = run(&["figure", "fig4b", "--out", dir.to_str().unwrap()]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let table = dir.join("fig4b.csv");
    assert!(table.exists());
    let text = std::fs::read_to_string(&table).unwrap();
    assert!(text.lines().next().unwrap().contains("delay_linearized_rayleigh_cu"));
    assert!(text.lines().count() > 6);
}

#[test]
fn infeasible_only_run_exits_3() {
    let dir = tmp_dir("infeasible");
    let toml = GOOD.replace(
        "axis = \"snr_db\"\nvalues = [-6.0, 0.0]",
        "axis = \"n_r\"\nvalues = [3]",
    ) + r#"
[pa]
epsilon = 1.0
theta = 0.0
p_max_db = -45.0

[optimize]
beta = 1e-6
grid_points = 9
"#;
    let cfg = write_config(&dir, "run.toml", &toml);
    let r = run(&["optimize", "--config", cfg.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(3));
    let text = String::from_utf8(r.stdout).unwrap();
    assert!(text.contains("infeasible"));
}

#[test]
fn optimize_emits_boundary_columns() {
    let dir = tmp_dir("opt");
    let toml = GOOD.to_string()
        + r#"
[optimize]
grid_points = 9
"#;
    let cfg = write_config(&dir, "run.toml", &toml);
    let r = run(&["optimize", "--config", cfg.to_str().unwrap()]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let text = String::from_utf8(r.stdout).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.contains("q1"));
    assert!(header.contains("evaluations"));
    assert!(text.contains("exhaustive"));
}
