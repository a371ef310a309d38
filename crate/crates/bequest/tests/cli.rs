//! End-to-end tests of the command-line binary: exit codes, output
//! formats, determinism, config-file layering, and atomic file output.

use std::path::PathBuf;
use std::process::{Command, Output};
use std::sync::atomic::{AtomicU64, Ordering};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bequest"));
    // Keep the ambient environment from leaking a config file into tests.
    cmd.env_remove("BEQUEST_CONFIG");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code present")
}

/// Unique scratch directory per call so parallel tests never collide.
fn scratch_dir(tag: &str) -> PathBuf {
    static COUNTER: AtomicU64 = AtomicU64::new(0);
    let n = COUNTER.fetch_add(1, Ordering::Relaxed);
    let dir = std::env::temp_dir().join(format!(
        "bequest-cli-{tag}-{}-{n}",
        std::process::id()
    ));
    std::fs::create_dir_all(&dir).expect("scratch dir");
    dir
}

// ---------------------------------------------------------------------------
// Basic plumbing
// ---------------------------------------------------------------------------

#[test]
fn help_and_version_exit_zero() {
    let help = run(&["--help"]);
    assert_eq!(code(&help), 0);
    let text = stdout(&help);
    for sub in ["price", "value", "strategy", "boundary", "sweep", "simulate", "verify"] {
        assert!(text.contains(sub), "help lists `{sub}`:\n{text}");
    }

    assert_eq!(code(&run(&["--version"])), 0);
    assert_eq!(code(&run(&["value", "--help"])), 0);
}

#[test]
fn argument_mistakes_exit_two() {
    // No subcommand.
    assert_eq!(code(&run(&[])), 2);
    // Unknown flag.
    assert_eq!(code(&run(&["value", "--w", "0.4", "--bogus", "1"])), 2);
    // Unparseable number.
    assert_eq!(code(&run(&["value", "--product", "term", "--w", "abc"])), 2);
}

// ---------------------------------------------------------------------------
// Exit-code contract
// ---------------------------------------------------------------------------

#[test]
fn validation_errors_exit_two() {
    // Missing state.
    let out = run(&["value", "--product", "term"]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));

    // Term coverage carries no pre-existing benefit.
    let out = run(&["value", "--product", "term", "--w", "0.4", "--d", "0.3"]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
    assert!(stderr(&out).starts_with("error:"), "{}", stderr(&out));

    // --rho only applies to the cash-value product.
    let out = run(&["value", "--product", "term", "--w", "0.4", "--rho", "0.5"]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));

    // Sweeps cover the flow-premium products only.
    let out = run(&["sweep", "--product", "sp"]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));

    // A degenerate simulation is rejected.
    let out = run(&[
        "simulate", "--product", "term", "--w", "0.4", "--n-paths", "0",
    ]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));

    // Single-premium pricing needs an actuarially fair market: the loaded
    // discount must stay below one.
    let out = run(&[
        "value", "--product", "sp", "--w", "0.4", "--theta", "9.0",
    ]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
}

#[test]
fn domain_errors_exit_one() {
    let out = run(&["value", "--product", "term", "--w=-0.1"]);
    assert_eq!(code(&out), 1, "{}", stderr(&out));
    assert!(stderr(&out).starts_with("error:"), "{}", stderr(&out));
}

#[test]
fn whole_life_above_safe_level_succeeds() {
    let out = run(&[
        "value", "--product", "whole", "--w", "5.0", "--d", "0.0", "--format", "json",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json");
    assert_eq!(doc["report"]["phi"].as_f64(), Some(1.0));
    assert_eq!(doc["report"]["region"].as_str(), Some("Safe"));
}

// ---------------------------------------------------------------------------
// Reference values through the CLI surface
// ---------------------------------------------------------------------------

#[test]
fn value_term_matches_closed_form() {
    // Defaults: b = 1, r = 0.03, lambda = 0.08, theta-bar = 0.25.
    let out = run(&["value", "--product", "term", "--w", "0.4"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("0.363438"), "six significant digits:\n{text}");

    // Higher precision changes the table rendering.
    let out = run(&[
        "value", "--product", "term", "--w", "0.4", "--precision", "9",
    ]);
    assert!(stdout(&out).contains("0.363437924"), "{}", stdout(&out));

    // JSON carries the full value and echoes the resolved configuration.
    let out = run(&[
        "value", "--product", "term", "--w", "0.4", "--format", "json",
    ]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json");
    assert_eq!(doc["config"]["product"].as_str(), Some("term"));
    assert_eq!(doc["config"]["w"].as_f64(), Some(0.4));
    let phi = doc["report"]["phi"].as_f64().expect("phi");
    assert!((phi - 0.36343792391857964).abs() < 1e-12, "phi = {phi}");
}

/// CSV cells must carry full (shortest round-trip) precision, not the
/// table rendering's significant-digit cut.
fn full_precision_cell(cell: &str, expected: f64, tol: f64) {
    let v: f64 = cell.parse().unwrap_or_else(|e| panic!("{cell}: {e}"));
    assert!((v - expected).abs() <= tol, "{cell} vs {expected}");
    let digits = cell.chars().filter(char::is_ascii_digit).count();
    assert!(digits >= 15, "`{cell}` looks truncated");
}

#[test]
fn boundary_term_reports_critical_wealth() {
    let out = run(&["boundary", "--product", "term", "--format", "csv"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("w_star,safe_level,regime"));
    let row: Vec<&str> = lines.next().expect("data row").split(',').collect();
    full_precision_cell(row[0], 0.6948942040116133, 1e-9);
    assert_eq!(row[1], "0.7692307692307693");
    assert_eq!(row[2], "lambda>r");
}

// ---------------------------------------------------------------------------
// Output formats
// ---------------------------------------------------------------------------

#[test]
fn sweep_csv_has_full_precision_and_lf_endings() {
    let out = run(&["sweep", "--product", "term", "--format", "csv"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(!text.contains('\r'), "LF line endings only");
    assert!(text.ends_with('\n'), "trailing newline");
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "lambda,w_star,safe_level,regime");
    // Default lambda axis has four entries.
    assert_eq!(lines.len(), 5, "{text}");
    let row: Vec<&str> = lines[4].split(',').collect();
    assert_eq!(row[0], "0.08");
    full_precision_cell(row[1], 0.6948942040116133, 1e-9);
    assert_eq!(row[2], "0.7692307692307693");
    assert_eq!(row[3], "lambda>r");
}

#[test]
fn boundary_whole_csv_grid_shape() {
    let out = run(&[
        "boundary", "--product", "whole", "--grid", "10", "--format", "csv",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "w,d_jump,d_buy");
    assert_eq!(lines.len(), 11, "header plus one row per grid point:\n{text}");
    // Fraction-first grid generation lands exactly on the safe level,
    // where the jump boundary meets the goal kink r b / (r + h).
    let last: Vec<&str> = lines[10].split(',').collect();
    assert_eq!(last[0], "0.7692307692307693");
    let kink: f64 = last[1].parse().expect("kink");
    assert!((kink - 3.0 / 13.0).abs() <= 1e-15, "{}", last[1]);
}

#[test]
fn json_output_is_valid_for_every_subcommand() {
    let runs: Vec<Vec<&str>> = vec![
        vec!["price", "--product", "sp-cash", "--rho", "0.3"],
        vec!["value", "--product", "sp", "--w", "0.4", "--d", "0.3"],
        vec!["strategy", "--product", "whole", "--w", "0.72", "--d", "0.01"],
        vec!["boundary", "--product", "whole", "--grid", "8"],
        vec!["sweep", "--product", "whole", "--axis", "b", "--values", "0.5,1.0"],
        vec![
            "simulate", "--product", "term", "--w", "0.5", "--n-paths", "5000",
            "--seed", "9",
        ],
        vec!["verify", "--product", "term", "--grid", "8"],
    ];
    for mut args in runs {
        args.extend_from_slice(&["--format", "json"]);
        let out = run(&args);
        assert_eq!(code(&out), 0, "{args:?}: {}", stderr(&out));
        let doc: serde_json::Value =
            serde_json::from_str(&stdout(&out)).unwrap_or_else(|e| panic!("{args:?}: {e}"));
        assert!(doc["config"].is_object(), "{args:?} echoes config");
        assert!(doc["report"].is_object() || doc["report"].is_array());
    }
}

// ---------------------------------------------------------------------------
// Determinism
// ---------------------------------------------------------------------------

#[test]
fn simulate_is_deterministic_and_echoes_seed() {
    let args = [
        "simulate", "--product", "whole", "--w", "0.72", "--d", "0.05",
        "--n-paths", "20000", "--seed", "7",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(code(&first), 0, "{}", stderr(&first));
    assert_eq!(first.stdout, second.stdout, "byte-identical reruns");
    let text = stdout(&first);
    assert!(text.contains("seed"), "{text}");
    assert!(text.contains('7'), "{text}");
    assert!(text.contains("pass"), "optimal run matches closed form:\n{text}");
}

#[test]
fn simulate_dominated_strategy_reports_pass() {
    let out = run(&[
        "simulate", "--product", "term", "--w", "0.5", "--strategy", "never-buy",
        "--n-paths", "20000", "--seed", "11", "--format", "json",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json");
    assert_eq!(doc["report"]["comparison"]["pass"].as_bool(), Some(true));
    assert_eq!(doc["report"]["comparison"]["phi_dominated"].as_bool(), Some(true));
    let sim = doc["report"]["sim"]["success_prob"].as_f64().expect("prob");
    let cf = doc["report"]["closed_form"]["phi"].as_f64().expect("phi");
    assert!(sim <= cf, "forgoing insurance cannot beat the optimum");
}

#[test]
fn verify_passes_on_defaults() {
    let out = run(&["verify", "--grid", "12", "--format", "json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json");
    assert_eq!(doc["report"]["pass"].as_bool(), Some(true));
    let checks = doc["report"]["checks"].as_array().expect("checks");
    assert!(checks.len() >= 20, "suites for all four products plus properties");
    for check in checks {
        assert_eq!(
            check["pass"].as_bool(),
            Some(true),
            "check {} failed",
            check["name"]
        );
    }
}

// ---------------------------------------------------------------------------
// Config file and environment layering
// ---------------------------------------------------------------------------

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = scratch_dir("config");
    let cfg = dir.join("base.json");
    std::fs::write(&cfg, r#"{ "product": "term", "w": 0.25, "precision": 9 }"#)
        .expect("write config");
    let cfg = cfg.to_str().expect("utf-8 path");

    // Config alone behaves like the equivalent flags.
    let from_file = run(&["value", "--config", cfg]);
    assert_eq!(code(&from_file), 0, "{}", stderr(&from_file));
    let from_flags = run(&[
        "value", "--product", "term", "--w", "0.25", "--precision", "9",
    ]);
    assert_eq!(from_file.stdout, from_flags.stdout);

    // A flag beats the same setting in the file.
    let overridden = run(&["value", "--config", cfg, "--w", "0.4"]);
    let direct = run(&[
        "value", "--product", "term", "--w", "0.4", "--precision", "9",
    ]);
    assert_eq!(overridden.stdout, direct.stdout);

    // The environment variable points at the same file.
    let via_env = bin()
        .args(["value"])
        .env("BEQUEST_CONFIG", cfg)
        .output()
        .expect("binary runs");
    assert_eq!(code(&via_env), 0, "{}", stderr(&via_env));
    assert_eq!(via_env.stdout, from_file.stdout);

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn bad_config_files_exit_two() {
    let dir = scratch_dir("badcfg");

    let unknown = dir.join("unknown.json");
    std::fs::write(&unknown, r#"{ "bogus": 1 }"#).expect("write");
    let out = run(&["value", "--config", unknown.to_str().unwrap()]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));

    let malformed = dir.join("malformed.json");
    std::fs::write(&malformed, "{ not json").expect("write");
    let out = run(&["value", "--config", malformed.to_str().unwrap()]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));

    let missing = dir.join("does-not-exist.json");
    let out = run(&["value", "--config", missing.to_str().unwrap()]);
    assert_ne!(code(&out), 0);

    std::fs::remove_dir_all(&dir).ok();
}

// ---------------------------------------------------------------------------
// File output
// ---------------------------------------------------------------------------

#[test]
fn out_flag_writes_file_and_keeps_stdout_quiet() {
    let dir = scratch_dir("out");
    let path = dir.join("boundary.csv");

    let to_stdout = run(&["boundary", "--product", "whole", "--grid", "6", "--format", "csv"]);
    let to_file = run(&[
        "boundary", "--product", "whole", "--grid", "6", "--format", "csv",
        "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(code(&to_file), 0, "{}", stderr(&to_file));
    assert!(to_file.stdout.is_empty(), "content goes to the file");

    let written = std::fs::read(&path).expect("output file exists");
    assert_eq!(written, to_stdout.stdout, "file matches stdout rendering");

    // The temporary sibling used for the atomic rename is gone.
    let leftovers: Vec<_> = std::fs::read_dir(&dir)
        .expect("dir")
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().ends_with(".tmp"))
        .collect();
    assert!(leftovers.is_empty(), "no temp files left behind");

    std::fs::remove_dir_all(&dir).ok();
}
