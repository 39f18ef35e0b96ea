use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cdapprox::{analytic_moment_matrix, save_matrix, BasisSpec, Benchmark};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cdapprox"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env("CDAPPROX_THREADS", "2").output().unwrap()
}

fn sign_matrix(dir: &Path, d: usize) -> String {
    let spec = BasisSpec::monomial(2, d).unwrap();
    let m = analytic_moment_matrix(&Benchmark::Sign.analytic().unwrap(), &spec).unwrap();
    let path = dir.join(format!("sign{d}.txt"));
    save_matrix(&m, &path).unwrap();
    path.to_str().unwrap().to_owned()
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_owned()
}

#[test]
fn approx_single_sign_change() {
    let dir = tempfile::tempdir().unwrap();
    let m = sign_matrix(dir.path(), 2);
    let pts: String = (0..1000).map(|j| format!("{}\n", -1.0 + (j as f64 + 0.5) / 500.0)).collect();
    fs::write(dir.path().join("pts.txt"), pts).unwrap();
    let out = run(&[
        "approx", "--matrix", &m, "--points", &p(dir.path(), "pts.txt"), "--out", &p(dir.path(), "y.txt"),
        "--sos-out", &p(dir.path(), "sos.txt"),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let ys: Vec<f64> = fs::read_to_string(dir.path().join("y.txt")).unwrap().lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(ys.len(), 1000);
    let changes = ys.windows(2).filter(|w| w[0].signum() != w[1].signum()).count();
    assert_eq!(changes, 1);
    let sos = fs::read_to_string(dir.path().join("sos.txt")).unwrap();
    assert!(sos.starts_with("cdapprox-sos 1\n"));
}

#[test]
fn approx_empty_points() {
    let dir = tempfile::tempdir().unwrap();
    let m = sign_matrix(dir.path(), 2);
    fs::write(dir.path().join("e.txt"), "").unwrap();
    let out = run(&["approx", "--matrix", &m, "--points", &p(dir.path(), "e.txt"), "--out", &p(dir.path(), "y.txt")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(fs::read_to_string(dir.path().join("y.txt")).unwrap(), "");
}

#[test]
fn approx_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let m = sign_matrix(dir.path(), 2);
    let text = fs::read_to_string(&m).unwrap();
    let short: String = text.lines().take(text.lines().count() - 1).map(|l| format!("{l}\n")).collect();
    fs::write(dir.path().join("short.txt"), short).unwrap();
    fs::write(dir.path().join("pts.txt"), "0.5\n").unwrap();
    fs::write(dir.path().join("bad.txt"), "0.5\n0.1 0.2\n").unwrap();
    let pts = p(dir.path(), "pts.txt");
    let y = p(dir.path(), "y.txt");

    let out = run(&["approx", "--matrix", &p(dir.path(), "short.txt"), "--points", &pts, "--out", &y]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("short.txt"));

    let out = run(&["approx", "--matrix", &m, "--points", &p(dir.path(), "bad.txt"), "--out", &y]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.txt:2"));

    let out = run(&["approx", "--matrix", &p(dir.path(), "nope.txt"), "--points", &pts, "--out", &y]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["approx", "--matrix", &m, "--points", &pts, "--out", &y, "--beta", "-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn approx_indefinite_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let m = sign_matrix(dir.path(), 1);
    let text = fs::read_to_string(&m).unwrap();
    let (head, data) = text.split_once("data\n").unwrap();
    let mut vals: Vec<f64> = data.split_whitespace().map(|t| t.parse().unwrap()).collect();
    vals[0] = -1.0;
    let body: String = vals.iter().map(|v| format!("{v:.16e}\n")).collect();
    fs::write(dir.path().join("neg.txt"), format!("{head}data\n{body}")).unwrap();
    fs::write(dir.path().join("pts.txt"), "0.5\n").unwrap();
    let out = run(&[
        "approx", "--matrix", &p(dir.path(), "neg.txt"), "--points", &p(dir.path(), "pts.txt"), "--out",
        &p(dir.path(), "y.txt"),
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn benchmark_report_and_unknown_id() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "benchmark", "--benchmark", "sign", "--degree", "4", "--grid", "1000", "--out", &p(dir.path(), "v.csv"),
        "--report", &p(dir.path(), "r.csv"),
    ]);
    assert!(out.status.success());
    let report = fs::read_to_string(dir.path().join("r.csv")).unwrap();
    let mut lines = report.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "max_error_away_from_jumps").unwrap();
    assert!(row[col].parse::<f64>().unwrap() <= 0.02);
    let values = fs::read_to_string(dir.path().join("v.csv")).unwrap();
    assert_eq!(values.lines().count(), 1001);

    let out = run(&["benchmark", "--benchmark", "square", "--out", &p(dir.path(), "x.csv")]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["benchmark", "--benchmark", "disk2", "--mode", "analytic", "--out", &p(dir.path(), "x.csv")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn benchmark_bivariate_grid_triples() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "benchmark", "--benchmark", "disk2", "--mode", "empirical", "--samples", "2500", "--degree", "4", "--grid",
        "10", "--out", &p(dir.path(), "v.csv"),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let values = fs::read_to_string(dir.path().join("v.csv")).unwrap();
    assert!(values.starts_with("x1,x2,y,f\n"));
    assert_eq!(values.lines().count(), 101);
}

#[test]
fn support_gamma_zero_is_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["support", "--degrees", "4", "--gamma", "0", "--mc-samples", "2000", "--probes", "2000", "--out", &p(dir.path(), "s.csv")]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("s.csv")).unwrap();
    let mut lines = text.lines();
    let echo = lines.next().unwrap();
    assert!(echo.starts_with('#') && echo.contains("r=2.5") && echo.contains("alpha=0"));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let get = |name: &str| row[header.iter().position(|h| *h == name).unwrap()];
    assert_eq!(get("outside_mass"), "2");
    assert_eq!(get("degenerate"), "true");
}

#[test]
fn rates_schedule_and_degree_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["rates", "--degrees", "2,4", "--grid", "200", "--out", &p(dir.path(), "r.csv")]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("r.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "d,beta_d,measured_l1,bound,ratio");
    for line in lines {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        let want = (3.0 - cols[0].sqrt()).exp2();
        assert!((cols[1] - want).abs() <= 1e-12 * want);
        assert!(cols[2] <= cols[3]);
    }
    let out = run(&["rates", "--degrees", "1,4", "--out", &p(dir.path(), "r.csv")]);
    assert_eq!(out.status.code(), Some(2));
}
