use std::process::{Command, Output};

use vexlab::lab::{read_reports, ExportFormat};

fn vexlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vexlab"))
        .args(args)
        .env_remove("VEXLAB_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn field(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key))
        .unwrap_or_else(|| panic!("no {key} in\n{text}"))
        .trim()
        .parse()
        .unwrap()
}

#[test]
fn norm_is_finite_and_positive() {
    let out = vexlab(&["norm", "--p", "loginterp(3,2)", "--f", "powerpeak(0.5,0.5)"]);
    assert!(out.status.success());
    let norm = field(&stdout(&out), "norm ");
    assert!(norm.is_finite() && norm > 0.0);
}

#[test]
fn zero_function_has_zero_norm() {
    let out = vexlab(&["norm", "--p", "loginterp(3,2)", "--f", "zero"]);
    assert!(out.status.success());
    assert_eq!(field(&stdout(&out), "norm "), 0.0);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(vexlab(&["norm", "--f", "zero"]).status.code(), Some(2));
    assert_eq!(vexlab(&["norm", "--p", "const(0.5)", "--f", "zero"]).status.code(), Some(2));
    assert_eq!(vexlab(&["norm", "--p", "const(2)", "--f", "nonsense(1)"]).status.code(), Some(2));
    assert_eq!(vexlab(&["run", "--config", "/nonexistent/config.toml"]).status.code(), Some(2));
}

#[test]
fn constant_suite_in_unit_mode_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("constant.csv");
    let out = vexlab(&[
        "equiv", "--suite", "constant", "--mode", "unit", "--output", path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(field(&text, "worst_ratio") <= 1.02);
    let header = std::fs::read_to_string(&path).unwrap();
    assert!(header.starts_with("scenario_id,family,s,which,mode,grid,lhs,rhs,ratio_fwd,ratio_bwd,"));
    let reports = read_reports(&path, ExportFormat::Csv).unwrap();
    assert_eq!(reports.len(), 48);
}

#[test]
fn output_dir_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_vexlab"))
        .args(["equiv", "--p", "const(2)", "--mode", "unit", "--format", "json"])
        .env("VEXLAB_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let reports = read_reports(&dir.path().join("equiv.json"), ExportFormat::Json).unwrap();
    assert_eq!(reports.len(), 1);
}

#[test]
fn config_file_runs_like_flags() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("norm.toml");
    std::fs::write(&config, "[norm]\np = \"loginterp(3,2)\"\nf = \"powerpeak(0.5,0.5)\"\n").unwrap();
    let from_file = vexlab(&["run", "--config", config.to_str().unwrap()]);
    let from_flags = vexlab(&["norm", "--p", "loginterp(3,2)", "--f", "powerpeak(0.5,0.5)"]);
    assert!(from_file.status.success());
    assert_eq!(stdout(&from_file), stdout(&from_flags));
}

#[test]
fn lemma_suites_report_no_violations() {
    let out = vexlab(&["lemma", "--lemma", "discrete", "--draws", "50", "--seed", "3"]);
    assert!(out.status.success());
    assert!(field(&stdout(&out), "max_ratio") <= 1.0 + 1e-12);
    let out = vexlab(&["lemma", "--lemma", "pointwise", "--draws", "10", "--grid", "grid(-12,12,8)"]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert_eq!(stdout(&out).lines().count(), 3);
}

#[test]
fn seeded_runs_are_reproducible() {
    let args = ["search", "--budget", "12", "--seed", "5", "--grid", "grid(-16,16,8)"];
    let a = vexlab(&args);
    let b = vexlab(&args);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    let c = vexlab(&["search", "--budget", "12", "--seed", "6", "--grid", "grid(-16,16,8)"]);
    assert_ne!(stdout(&a), stdout(&c));
}

#[test]
fn search_with_budget_one() {
    let out = vexlab(&["search", "--budget", "1", "--families", "const"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("budget 1 evaluated 1 "));
    assert_eq!(vexlab(&["search", "--budget", "0"]).status.code(), Some(1));
}
