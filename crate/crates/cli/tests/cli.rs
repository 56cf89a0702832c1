use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fig1b() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../nets/fig1b.rpn")
}

fn rpn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rpn")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr_line(out: &Output) -> String {
    let text = String::from_utf8(out.stderr.clone()).unwrap();
    assert_eq!(text.lines().count(), 1, "diagnostic is one line: {text}");
    text
}

const SMALL: &str = "\
TYPES
  u: unit
  r: real
TOKENS
  a: u = ()
  x: r = 1
PLACES
  P, Q
MARKING
  a @ P
  x @ P
TRANSITIONS
  t:
    in P: {a}
    out Q: {a}
";

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn validate_accepts_fig1b() {
    let out = rpn(&["validate", fig1b().to_str().unwrap()]);
    assert_eq!(code(&out), 0);
}

#[test]
fn simulate_fixed_step_gives_final_marking() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.csv");
    let out = rpn(&[
        "simulate",
        fig1b().to_str().unwrap(),
        "--policy",
        "fixed:t_ij:fwd",
        "--max-steps",
        "1",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "A_i: a_i\nA_j: p\nM_k: m_k,a_j;(a_j,m_k)\n");
    assert_eq!(
        std::fs::read_to_string(trace).unwrap(),
        "step_index,transition_id,direction,occurrence_key\n0,t_ij,forward,1\n"
    );
}

#[test]
fn zero_steps_give_an_empty_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.csv");
    let out = rpn(&[
        "simulate",
        fig1b().to_str().unwrap(),
        "--seed",
        "7",
        "--max-steps",
        "0",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(std::fs::read_to_string(trace).unwrap().lines().count(), 1);
    assert_eq!(stdout(&out), "A_i: p\nA_j: a_j\nM_k: m_k,a_i;(a_i,m_k)\n");
}

#[test]
fn validation_failures_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let cloning = write(
        &dir,
        "clone.rpn",
        &SMALL.replace("    out Q: {a}\n", "    out Q: {a}\n    out P: {a}\n"),
    );
    let out = rpn(&["validate", &cloning]);
    assert_eq!(code(&out), 1);
    assert!(stderr_line(&out).contains("V2"));
}

#[test]
fn parse_failures_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let no_places = write(&dir, "empty.rpn", &SMALL.replace("  P, Q\n", ""));
    let out = rpn(&["validate", &no_places]);
    assert_eq!(code(&out), 2);
    stderr_line(&out);

    let missing = dir.path().join("missing.rpn");
    assert_eq!(code(&rpn(&["validate", missing.to_str().unwrap()])), 2);

    let ok = write(&dir, "ok.rpn", SMALL);
    for policy in ["sideways", "fixed:t", "fixed:u:fwd", "fixed:t:up"] {
        let out = rpn(&["simulate", &ok, "--policy", policy]);
        assert_eq!(code(&out), 2, "{policy}");
        stderr_line(&out);
    }
}

#[test]
fn guard_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{SMALL}    guard: 1 / (val(x) - 1) > 0\n");
    let net = write(&dir, "div.rpn", &text);
    assert_eq!(code(&rpn(&["validate", &net])), 0);
    let out = rpn(&["simulate", &net]);
    assert_eq!(code(&out), 3);
    assert!(stderr_line(&out).contains("division by zero"));
}

#[test]
fn simulate_runs_until_stuck() {
    let dir = tempfile::tempdir().unwrap();
    let net = write(&dir, "ok.rpn", SMALL);
    let out = rpn(&["simulate", &net, "--policy", "forward-first", "--seed", "3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "P: x\nQ: a\n");
}

#[test]
fn experiment_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("e.csv");
    let out = rpn(&[
        "antenna-experiment",
        "--nt",
        "6",
        "--nr",
        "2",
        "--nts",
        "3",
        "--rho-db",
        "10",
        "--realizations",
        "2",
        "--runs",
        "3",
        "--channel-seed",
        "1",
        "--sched-seed",
        "2",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "realization,nts,run_index,run_capacity,best_capacity,greedy_capacity,exhaustive_capacity_or_blank,steps,converged"
    );
    assert_eq!(lines.len(), 1 + 2 * 3);
    for line in &lines[1..] {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 9);
        assert_eq!(cols[1], "3");
        let run: f64 = cols[3].parse().unwrap();
        let best: f64 = cols[4].parse().unwrap();
        let optimum: f64 = cols[6].parse().unwrap();
        assert!(run <= best && best <= optimum + 1e-9);
    }
}

#[test]
fn bad_experiment_config_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("e.csv");
    let out = rpn(&[
        "antenna-experiment",
        "--nt",
        "4",
        "--nts",
        "8",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    stderr_line(&out);
}
