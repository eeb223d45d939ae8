use std::path::Path;
use std::process::{Command, Output};

fn delayrd(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_delayrd"));
    cmd.args(args).env_remove("DELAYRD_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const NICHOLSON: &str = "\
[model]
kind = nicholson
delta = 0.2
[kernel]
tau = 1
[grid]
cells = 20
[solver]
dt = 0.05
t_end = 120
";

#[test]
fn analyze_reports_the_regime() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "n.cfg", NICHOLSON);
    let csv = dir.path().join("a.csv");
    let out = delayrd(&["analyze", &cfg, "--csv", csv.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("bounded_by_A"));
    let table = std::fs::read_to_string(csv).unwrap();
    assert!(table.starts_with("name,value,status,witness\n"));
}

#[test]
fn outside_theory_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "n.cfg", &NICHOLSON.replace("delta = 0.2", "delta = 0.1"));
    let out = delayrd(&["analyze", &cfg], &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("outside_theory"));
}

#[test]
fn lag_mismatch_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.cfg", &NICHOLSON.replace("dt = 0.05", "dt = 0.3"));
    let out = delayrd(&["analyze", &cfg], &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(
        err.contains("bad.cfg:9:") && err.contains("tau = 1") && err.contains("0.3"),
        "{err}"
    );
}

#[test]
fn unknown_key_and_missing_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "k.cfg", &format!("{NICHOLSON}colour = blue\n"));
    let out = delayrd(&["simulate", &cfg], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("solver.colour"));
    let out = delayrd(&["analyze", "/nonexistent/x.cfg"], &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_writes_traces() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "n.cfg", &NICHOLSON.replace("t_end = 120", "t_end = 5"));
    let out_dir = dir.path().join("out");
    let out = delayrd(
        &["simulate", &cfg, "--out-dir", out_dir.to_str().unwrap(), "--snapshots"],
        &[],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let trace = std::fs::read_to_string(out_dir.join("trace.csv")).unwrap();
    assert!(trace.starts_with("t,u_min,u_max,u_mean\n"));
    assert_eq!(trace.lines().count(), 102);
    let snaps = std::fs::read_to_string(out_dir.join("snapshots.csv")).unwrap();
    assert_eq!(snaps.lines().count(), 1 + 101 * 21);
}

#[test]
fn rate_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "n.cfg", NICHOLSON);
    let out = delayrd(&["rate", &cfg], &[]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let gamma: f64 = row[4].parse().unwrap();
    assert!((gamma - 0.0605).abs() < 1e-3, "{gamma}");
    let gamma_emp: f64 = row[5].parse().unwrap();
    assert!(gamma_emp > gamma);

    let cfg = write_config(dir.path(), "m.cfg", &NICHOLSON.replace("delta = 0.2", "delta = 0.5"));
    let out = delayrd(&["rate", &cfg], &[]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        "{}[sweep]\nparam = delta\nmin = 0.1\nmax = 0.5\nsteps = 5\n",
        NICHOLSON.replace("t_end = 120", "t_end = 30")
    );
    let cfg = write_config(dir.path(), "s.cfg", &text);
    let mut tables = Vec::new();
    for threads in ["1", "4"] {
        let path = dir.path().join(format!("r{threads}.csv"));
        let out = delayrd(
            &["sweep", &cfg, "-o", path.to_str().unwrap()],
            &[("DELAYRD_THREADS", threads)],
        );
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        tables.push(std::fs::read_to_string(path).unwrap());
    }
    assert_eq!(tables[0], tables[1]);
    assert_eq!(tables[0].lines().count(), 6);
    assert!(tables[0].starts_with("param1,param2,theory,machinery,sim,gamma_th,gamma_emp\n"));

    let out = delayrd(&["sweep", &cfg, "-o", "/dev/null"], &[("DELAYRD_THREADS", "zero")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_filter_and_injection() {
    let out = delayrd(&["verify", "--filter", "rates"], &[]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 2);
    assert!(text.contains("PASS c4") && text.contains("PASS c7"));

    let out = delayrd(&["verify", "--filter", "c7", "--inject", "c7"], &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL c7"));
    assert!(stderr(&out).contains("c7"));

    let out = delayrd(&["verify", "--filter", "plots"], &[]);
    assert_eq!(out.status.code(), Some(2));
}
