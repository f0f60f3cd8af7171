//! End-to-end tests for the `mapnorm` binary: every subcommand is exercised
//! against closed-form families, error paths are pinned to their exit codes,
//! and output determinism is checked byte-for-byte.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

const TOL: f64 = 1e-6;

fn mapnorm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mapnorm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

/// Run expecting success and a JSON report on stdout.
fn run_json(args: &[&str]) -> Value {
    let out = mapnorm(args);
    assert_eq!(
        exit_code(&out),
        0,
        "command {args:?} failed: {}",
        stderr(&out)
    );
    serde_json::from_str(&stdout(&out)).expect("stdout is valid JSON")
}

fn tmp_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn assert_close(label: &str, got: f64, want: f64, tol: f64) {
    assert!(
        (got - want).abs() <= tol,
        "{label}: got {got}, want {want} (tol {tol})"
    );
}

/// A measure entry from a `compute` report, by canonical name.
fn result_for<'a>(report: &'a Value, measure: &str) -> &'a Value {
    report["results"]
        .as_array()
        .expect("results array")
        .iter()
        .find(|r| r["measure"] == measure)
        .unwrap_or_else(|| panic!("no result for measure {measure}"))
}

const EXTREME_CHOI: &str = r#"{
  "d_in": 2,
  "d_out": 2,
  "choi": [
    [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
    [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
    [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
    [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [-1.0, 0.0]]
  ]
}"#;

fn extreme_map_file() -> String {
    let path = tmp_path("extreme_map.json");
    std::fs::write(&path, EXTREME_CHOI).expect("write temp channel");
    path.to_str().expect("UTF-8 path").to_owned()
}

// ---------------------------------------------------------------------------
// compute

#[test]
fn compute_certifies_transpose_closed_forms() {
    let report = run_json(&[
        "compute",
        "diamond_norm",
        "R",
        "spa",
        "spa'",
        "--channel",
        "builtin:transpose?d=3",
    ]);
    assert_eq!(report["schema"], 1);
    assert_eq!(report["command"], "compute");
    assert_eq!(report["channel"]["d_in"], 3);
    assert_eq!(report["channel"]["classification"]["tp"], true);
    assert_eq!(report["channel"]["classification"]["cp"], false);

    let names: Vec<&str> = report["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["measure"].as_str().unwrap())
        .collect();
    let mut sorted = names.clone();
    sorted.sort_unstable();
    assert_eq!(names, sorted, "results are ordered by measure name");

    let dia = result_for(&report, "diamond_norm");
    assert_close("diamond", dia["value"].as_f64().unwrap(), 3.0, TOL);
    assert_eq!(dia["status"], "optimal");
    assert!(dia["gap"].as_f64().unwrap() <= 1e-7 * 3.0);
    assert_close(
        "R",
        result_for(&report, "R")["value"].as_f64().unwrap(),
        1.0,
        TOL,
    );
    let spa = result_for(&report, "spa");
    assert_eq!(spa["closed_form"], true);
    assert_close("spa", spa["value"].as_f64().unwrap(), 3.0, 1e-9);
    assert_close(
        "spa_prime",
        result_for(&report, "spa_prime")["value"].as_f64().unwrap(),
        1.0,
        1e-9,
    );
}

#[test]
fn compute_certifies_choi_map_robustness() {
    let report = run_json(&["compute", "R", "--channel", "builtin:choi_map"]);
    assert_close(
        "R(choi_map)",
        result_for(&report, "R")["value"].as_f64().unwrap(),
        1.0 / 6.0,
        TOL,
    );
}

#[test]
fn input_errors_exit_with_code_two() {
    let bad = tmp_path("not_a_channel.json");
    std::fs::write(&bad, "this is not json").unwrap();
    let out = mapnorm(&[
        "compute",
        "diamond_norm",
        "--channel",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2, "malformed channel file");
    assert!(stderr(&out).contains("error:"));

    let out = mapnorm(&["compute", "bogus", "--channel", "builtin:identity?d=2"]);
    assert_eq!(exit_code(&out), 2, "unknown measure");
    assert!(stderr(&out).contains("unknown measure"));

    let out = mapnorm(&["compute", "R"]);
    assert_eq!(exit_code(&out), 2, "missing channel source");

    let out = mapnorm(&[
        "compute",
        "R",
        "--channel",
        "builtin:transpose?d=2&bogus=1",
    ]);
    assert_eq!(exit_code(&out), 2, "unknown builtin parameter");

    let out = mapnorm(&["compute", "R", "--channel", "builtin:identity?d=2", "--jobs", "0"]);
    assert_eq!(exit_code(&out), 2, "zero jobs");
}

#[test]
fn reports_are_byte_identical_across_runs_and_jobs() {
    let args = ["compute", "R", "diamond_norm", "--channel", "builtin:choi_map"];
    let first = mapnorm(&args);
    let second = mapnorm(&args);
    assert_eq!(exit_code(&first), 0);
    assert_eq!(first.stdout, second.stdout, "repeat run differs");

    let seq = mapnorm(&[&args[..], &["--jobs", "1"]].concat());
    let par = mapnorm(&[&args[..], &["--jobs", "2"]].concat());
    assert_eq!(exit_code(&seq), 0);
    assert_eq!(seq.stdout, par.stdout, "--jobs 1 and --jobs 2 differ");
    assert_eq!(first.stdout, seq.stdout, "default and --jobs 1 differ");
}

// ---------------------------------------------------------------------------
// bounds

#[test]
fn bounds_bracket_collapses_for_depolarizing_inverse() {
    let report = run_json(&[
        "bounds",
        "--channel",
        "builtin:depolarizing_inverse?p=0.5&d=2",
    ]);
    assert_eq!(report["consistent"], true);
    let base = &report["best"]["base_norm_cptni"];
    assert_close("base lower", base["lower"].as_f64().unwrap(), 2.5, 1e-9);
    assert_close("base upper", base["upper"].as_f64().unwrap(), 2.5, 1e-9);
    assert_close(
        "diamond upper",
        report["best"]["diamond_norm"]["upper"].as_f64().unwrap(),
        2.5,
        1e-9,
    );
}

#[test]
fn bounds_pin_the_extreme_map() {
    let path = extreme_map_file();
    let report = run_json(&["bounds", "--channel", &path]);
    let dia = &report["best"]["diamond_norm"];
    assert_close("diamond lower", dia["lower"].as_f64().unwrap(), 1.0, 1e-9);
    assert_close("diamond upper", dia["upper"].as_f64().unwrap(), 1.0, 1e-9);
    let base = &report["best"]["base_norm_cptni"];
    assert_close("base lower", base["lower"].as_f64().unwrap(), 2.0, 1e-9);
    assert_close("base upper", base["upper"].as_f64().unwrap(), 2.0, 1e-9);
}

#[test]
fn bounds_on_a_channel_pin_diamond_at_one() {
    let report = run_json(&["bounds", "--channel", "builtin:random_channel?seed=3&d=2"]);
    let rows = report["bounds"].as_array().unwrap();
    let mut seen = 0;
    for row in rows {
        if row["measure"] == "diamond_norm" {
            seen += 1;
            assert_close(
                row["name"].as_str().unwrap(),
                row["value"].as_f64().unwrap(),
                1.0,
                1e-9,
            );
        }
    }
    assert!(seen >= 2, "expected several diamond bounds, saw {seen}");
}

#[test]
fn bounds_certify_solves_and_brackets_the_sdp_values() {
    let report = run_json(&[
        "bounds",
        "--certify",
        "--channel",
        "builtin:depolarizing_inverse?p=0.3&d=2",
    ]);
    let certified = &report["certified"];
    assert_close(
        "certified diamond",
        certified["diamond_norm"].as_f64().unwrap(),
        23.0 / 14.0,
        TOL,
    );
    assert_close(
        "certified R",
        certified["R"].as_f64().unwrap(),
        9.0 / 28.0,
        TOL,
    );
}

// ---------------------------------------------------------------------------
// simulate

#[test]
fn simulate_reaches_optimal_cost_and_replays() {
    let report = run_json(&["simulate", "--channel", "builtin:transpose?d=2"]);
    assert_close("cost(T)", report["cost"].as_f64().unwrap(), 2.0, TOL);
    assert_eq!(report["cost_matches_2r_plus_1"], true);
    assert_eq!(report["verification"]["passed"], true);
    assert!(report["verification"]["max_residual"].as_f64().unwrap() <= 1e-8);

    let report = run_json(&["simulate", "--channel", "builtin:identity?d=2"]);
    assert_close("cost(id)", report["cost"].as_f64().unwrap(), 1.0, TOL);
}

// ---------------------------------------------------------------------------
// game

#[test]
fn game_extraction_certifies_the_advantage() {
    let report = run_json(&["game", "--channel", "builtin:transpose?d=2"]);
    assert_close(
        "advantage",
        report["advantage"]["value"].as_f64().unwrap(),
        1.5,
        TOL,
    );
    assert_close("payoff", report["payoff"].as_f64().unwrap(), 1.5, 1e-5);
    assert_close(
        "best CPTP payoff",
        report["best_cptp_payoff"]["value"].as_f64().unwrap(),
        1.0,
        1e-5,
    );
    assert_eq!(report["checks"]["payoff_reproduces_witness_pairing"], true);
    assert_eq!(report["checks"]["payoff_is_advantage_times_best"], true);

    let report = run_json(&["game", "--channel", "builtin:identity?d=2"]);
    assert_close(
        "advantage(id)",
        report["advantage"]["value"].as_f64().unwrap(),
        1.0,
        TOL,
    );
}

// ---------------------------------------------------------------------------
// verify

#[test]
fn verify_passes_on_a_random_tp_map() {
    let report = run_json(&["verify", "--channel", "builtin:random_tp_map?seed=7&d=2"]);
    assert_eq!(report["passed"], true);
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["status"] != "fail"));
    assert!(checks
        .iter()
        .any(|c| c["name"] == "tp_collapse:R_from_diamond" && c["status"] == "pass"));
}

#[test]
fn verify_skips_gated_checks_for_the_extreme_map() {
    let path = extreme_map_file();
    let report = run_json(&["verify", "--channel", &path]);
    assert_eq!(report["passed"], true);
    let checks = report["checks"].as_array().unwrap();
    let skipped = checks.iter().filter(|c| c["status"] == "skipped").count();
    assert_eq!(skipped, 6, "four TP-gated plus two CP-gated checks");
}

#[test]
fn verify_reports_solver_failure_distinctly() {
    let out = mapnorm(&[
        "verify",
        "--channel",
        "builtin:random_tp_map?seed=7&d=2",
        "--gap-tol",
        "1e-12",
    ]);
    let code = exit_code(&out);
    assert!(
        code == 0 || code == 3,
        "tightened tolerance must either converge or fail as a solver error, got {code}"
    );
    if code == 3 {
        assert!(
            stderr(&out).contains("max_iterations"),
            "stderr names the solver status: {}",
            stderr(&out)
        );
    }
}

// ---------------------------------------------------------------------------
// nonmarkov

#[test]
fn nonmarkov_semigroup_scan_is_divisible() {
    let report = run_json(&[
        "nonmarkov",
        "--family",
        "depolarizing_semigroup?gamma=1",
        "--t-max",
        "1.0",
        "--steps",
        "6",
    ]);
    assert_eq!(report["cp_divisible"], true);
    assert!(report["report"]["integral"].as_f64().unwrap().abs() <= 1e-4);
}

#[test]
fn nonmarkov_oscillatory_window_detects_backflow() {
    let report = run_json(&[
        "nonmarkov",
        "--family",
        "oscillatory_dephasing?gamma=0.2&omega=2",
        "--t-min",
        "0.85",
        "--t-max",
        "1.5",
        "--steps",
        "8",
    ]);
    assert_eq!(report["cp_divisible"], false);
    assert!(report["report"]["integral"].as_f64().unwrap() > 0.1);
}

#[test]
fn nonmarkov_guard_rejects_singular_windows() {
    let out = mapnorm(&[
        "nonmarkov",
        "--family",
        "oscillatory_dephasing?gamma=0.2&omega=2",
        "--t-max",
        "3.0",
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(
        stderr(&out).contains("invertibility guard"),
        "guard is named: {}",
        stderr(&out)
    );
}

// ---------------------------------------------------------------------------
// files

#[test]
fn out_flag_redirects_the_report() {
    let path = tmp_path("report_out.json");
    let out = mapnorm(&[
        "compute",
        "spa",
        "--channel",
        "builtin:transpose?d=2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    assert!(stdout(&out).is_empty(), "report goes to the file only");
    let text = std::fs::read_to_string(&path).unwrap();
    let report: Value = serde_json::from_str(&text).expect("file holds valid JSON");
    assert_eq!(report["command"], "compute");
}

#[test]
fn dump_sdp_writes_wellformed_programs() {
    let path = tmp_path("programs.json");
    let report = run_json(&[
        "compute",
        "diamond_norm",
        "--channel",
        "builtin:identity?d=2",
        "--dump-sdp",
        path.to_str().unwrap(),
    ]);
    assert_close(
        "diamond(id)",
        result_for(&report, "diamond_norm")["value"].as_f64().unwrap(),
        1.0,
        TOL,
    );
    let text = std::fs::read_to_string(&path).unwrap();
    let dump: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(dump["schema"], 1);
    for side in ["primal", "dual"] {
        let prog = &dump["programs"]["diamond_norm"][side];
        let vars = prog["num_vars"].as_u64().unwrap() as usize;
        let rows = prog["num_rows"].as_u64().unwrap() as usize;
        assert!(vars > 0 && rows > 0);
        assert_eq!(prog["objective"].as_array().unwrap().len(), vars);
        assert_eq!(prog["rhs"].as_array().unwrap().len(), rows);
        let matrix = prog["constraint_matrix"].as_array().unwrap();
        assert_eq!(matrix.len(), rows);
        assert!(matrix.iter().all(|r| r.as_array().unwrap().len() == vars));
        assert!(!prog["blocks"].as_array().unwrap().is_empty());
    }
}
