use std::fs;
use std::process::{Command, Output};

use dirac21::config::RunConfig;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dirac21")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn algebra_check_passes() {
    let o = run(&["algebra-check"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("s=+1") && text.contains("s=-1"));
}

#[test]
fn single_sign_runs_half_the_suite() {
    let both = stdout(&run(&["algebra-check"]));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.txt");
    fs::write(&cfg, "[run]\ns = 1\n").unwrap();
    let one = run(&["algebra-check", "--config", cfg.to_str().unwrap()]);
    assert_eq!(one.status.code(), Some(0));
    let one = stdout(&one);
    assert!(!one.contains("s=-1"));
    let count = |t: &str| t.lines().filter(|l| l.ends_with(" ok")).count();
    assert_eq!(2 * count(&one), count(&both));
}

#[test]
fn corrupted_gamma_fails_with_exit_1() {
    let o = run(&["algebra-check", "--corrupt-gamma"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn geometry_check_passes_and_reports_polar_christoffel() {
    let o = run(&["geometry-check"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("Gamma^r_(phi phi) = -1.7"));
    assert!(text.contains("note: set 7"));
}

#[test]
fn separate_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = run(&["separate", "--set", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    for f in ["trajectory.csv", "field.csv", "residuals.csv", "report.txt", "config.txt"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let report = fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(report.contains("dispersion"));
    assert!(fs::read_to_string(out.join("trajectory.csv")).unwrap().starts_with("t,re_psi1,im_psi1,re_psi2,im_psi2\n"));
}

#[test]
fn separate_coulomb_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("coulomb.txt");
    fs::write(&cfg, "[run]\nset = 3\ns = 1\n\n[potential]\nA0 = -1:0.5\n").unwrap();
    let out = dir.path().join("out");
    let o = run(&["separate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let report = fs::read_to_string(out.join("report.txt")).unwrap();
    let rel: f64 = report.lines().find_map(|l| l.strip_prefix("relative_max: ")).unwrap().parse().unwrap();
    assert!(rel < 1e-5);
}

#[test]
fn set6_without_a_is_a_config_error() {
    let o = run(&["separate", "--set", "6"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains('a'));
}

#[test]
fn bad_config_is_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.txt");
    fs::write(&cfg, "[run]\nbogus = 1\n").unwrap();
    assert_eq!(run(&["print-config", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["print-config", "--config", "/nonexistent/cfg"]).status.code(), Some(2));
}

#[test]
fn print_config_echo_reproduces_the_run() {
    let o = run(&["print-config", "--set", "4b", "--seed", "9"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let parsed = RunConfig::parse(&text, None).unwrap();
    assert_eq!(parsed.seed, 9);
    assert_eq!(parsed.to_text(), text);

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("echo.txt");
    fs::write(&cfg, &text).unwrap();
    let again = run(&["print-config", "--config", cfg.to_str().unwrap()]);
    assert_eq!(stdout(&again), text);
}

#[test]
fn reconcile_reports_every_entry() {
    let o = run(&["reconcile"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().filter(|l| l.contains("corrected")).count() >= 10);
}
