use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const TWO_COLOUR: &str = r#"
rows = [ [ { p = 1, v = [2, 1] } ], [ { p = 1, v = [0, 1] } ] ]
[[colours]]
initial = 1
[[colours]]
initial = 0
"#;

const BALANCED: &str = r#"
rows = [ [ { p = 1, v = [1, 1] } ], [ { p = 1, v = [0, 2] } ] ]
[[colours]]
initial = 1
[[colours]]
initial = 0
"#;

const CYCLIC: &str = r#"
rows = [ [ { p = 1, v = [1, 1] } ], [ { p = 1, v = [1, 1] } ] ]
[[colours]]
initial = 1
[[colours]]
initial = 1
"#;

const STRICT: &str = r#"
rows = [ [ { p = 1, v = [0, 1] } ], [ { p = 1, v = [0, 0] } ] ]
[[colours]]
initial = 1
[[colours]]
initial = 0
activity = 0
"#;

const OVER_SUBTRACTING: &str = r#"
rows = [ [ { p = 1, v = [-2, 1] } ], [ { p = 1, v = [0, 1] } ] ]
[[colours]]
initial = 3
[[colours]]
initial = 0
"#;

fn triurn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_triurn"))
        .args(args)
        .env_remove("TRIURN_SEED")
        .env_remove("TRIURN_FORMAT")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_reports_exact_normalization_and_value() {
    let dir = TempDir::new().unwrap();
    let spec = write(dir.path(), "two_colour.toml", TWO_COLOUR);
    let out = triurn(&["analyze", s(&spec)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    let c0 = &v["report"]["limits"]["colours"][0];
    assert_eq!(c0["normalization"]["discrete"]["n_pow"], "1");
    assert_eq!(c0["normalization"]["discrete"]["log_pow"], "0");
    assert_eq!(c0["value"], "1");
    assert_eq!(v["spec_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn analyze_output_is_byte_stable() {
    let dir = TempDir::new().unwrap();
    let spec = write(dir.path(), "two_colour.toml", TWO_COLOUR);
    assert_eq!(triurn(&["analyze", s(&spec)]).stdout, triurn(&["analyze", s(&spec)]).stdout);
}

#[test]
fn exit_codes_follow_the_contract() {
    let dir = TempDir::new().unwrap();
    let cyclic = triurn(&["analyze", s(&write(dir.path(), "cyc.toml", CYCLIC))]);
    assert_eq!(code(&cyclic), 3);
    assert!(stderr(&cyclic).contains("cycle 0 -> 1 -> 0"), "{}", stderr(&cyclic));

    let invalid = triurn(&["analyze", s(&write(dir.path(), "bad.toml", OVER_SUBTRACTING))]);
    assert_eq!(code(&invalid), 2);

    assert_eq!(code(&triurn(&["analyze", s(&dir.path().join("missing.toml"))])), 1);
    assert_eq!(code(&triurn(&["analyze", s(&write(dir.path(), "junk.json", "{"))])), 1);
    assert_eq!(code(&triurn(&["frobnicate"])), 1);
    assert_eq!(code(&triurn(&["--help"])), 0);
}

#[test]
fn classical_analysis_notes_the_dirichlet_limit() {
    let out = triurn(&["corpus", "show", "classical"]);
    let dir = TempDir::new().unwrap();
    let spec = write(dir.path(), "classical.json", &stdout(&out));
    let v = json(&triurn(&["analyze", s(&spec)]));
    let limits = &v["report"]["limits"];
    for c in limits["colours"].as_array().unwrap() {
        assert_eq!(c["verdict"]["kind"], "absolutely_continuous");
    }
    assert!(limits["notes"].to_string().contains("Dirichlet"));
}

#[test]
fn simulation_is_reproducible_and_headed() {
    let dir = TempDir::new().unwrap();
    let spec = write(dir.path(), "two_colour.toml", TWO_COLOUR);
    let args = ["simulate", s(&spec), "--mode", "discrete", "--steps", "2000", "--reps", "20", "--seed", "7"];
    let a = triurn(&args);
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    assert_eq!(a.stdout, triurn(&args).stdout);
    let text = stdout(&a);
    assert!(text.starts_with("# rng=ChaCha8 seed=7 spec_sha256="));
    let finals = text.lines().filter(|l| l.contains(",2000,")).count();
    assert_eq!(finals, 20);
}

#[test]
fn strict_urn_sink_grows_by_one_per_draw() {
    let dir = TempDir::new().unwrap();
    let spec = write(dir.path(), "strict.toml", STRICT);
    let out = triurn(&["simulate", s(&spec), "--steps", "300", "--checkpoints", "geometric:6", "--seed", "1"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let mut rows = 0;
    for line in text.lines().filter(|l| !l.starts_with('#') && !l.starts_with("replicate")) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[4], f[1], "{line}");
        rows += 1;
    }
    assert!(rows >= 5);
}

#[test]
fn continuous_simulation_writes_json_lines() {
    let dir = TempDir::new().unwrap();
    let spec = write(dir.path(), "two_colour.toml", TWO_COLOUR);
    let out_path = dir.path().join("traj.jsonl");
    let out = triurn(&[
        "simulate",
        s(&spec),
        "--mode",
        "continuous",
        "--t-max",
        "2",
        "--reps",
        "5",
        "--checkpoints",
        "final",
        "--format",
        "jsonl",
        "--seed",
        "2",
        "--out",
        s(&out_path),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = std::fs::read_to_string(out_path).unwrap();
    let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[0]["header"]["mode"], "continuous");
    assert_eq!(lines[5]["t"], 2.0);
}

#[test]
fn incompatible_simulation_options_are_rejected() {
    let dir = TempDir::new().unwrap();
    let spec = write(dir.path(), "two_colour.toml", TWO_COLOUR);
    let out = triurn(&["simulate", s(&spec), "--t-max", "3", "--seed", "1"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn missing_seed_is_generated_and_printed() {
    let dir = TempDir::new().unwrap();
    let spec = write(dir.path(), "two_colour.toml", TWO_COLOUR);
    let out = triurn(&["simulate", s(&spec), "--steps", "10"]);
    assert_eq!(code(&out), 0);
    let announced = stderr(&out);
    let seed = announced
        .lines()
        .find_map(|l| l.strip_prefix("seed: "))
        .expect("seed printed");
    assert!(stdout(&out).contains(&format!("seed={seed} ")));
}

#[test]
fn environment_overrides_flags() {
    let dir = TempDir::new().unwrap();
    let spec = write(dir.path(), "two_colour.toml", TWO_COLOUR);
    let out = Command::new(env!("CARGO_BIN_EXE_triurn"))
        .args(["simulate", s(&spec), "--steps", "10"])
        .env("TRIURN_SEED", "99")
        .env("TRIURN_FORMAT", "jsonl")
        .output()
        .unwrap();
    let first: Value = serde_json::from_str(stdout(&out).lines().next().unwrap()).unwrap();
    assert_eq!(first["header"]["seed"], 99);
}

#[test]
fn balanced_moments_pass() {
    let dir = TempDir::new().unwrap();
    let spec = write(dir.path(), "bal.toml", BALANCED);
    let out = triurn(&[
        "verify", s(&spec), "--suite", "moments", "--steps", "20000", "--reps", "400", "--seed", "11",
    ]);
    assert_eq!(code(&out), 0, "{}\n{}", stdout(&out), stderr(&out));
    let v = json(&out);
    let first = &v["results"][0];
    assert_eq!(first["check"], "moment_1");
    assert!((first["target_value"].as_f64().unwrap() - std::f64::consts::PI.sqrt()).abs() < 1e-12);
}

#[test]
fn unbalanced_moments_are_inapplicable() {
    let dir = TempDir::new().unwrap();
    let spec = dir.path().join("diag.json");
    assert_eq!(code(&triurn(&["corpus", "write", "diagonal", "--out", s(&spec)])), 0);
    let out = triurn(&["verify", s(&spec), "--suite", "moments", "--seed", "1"]);
    assert_eq!(code(&out), 4);
    assert!(stdout(&out).contains("infinite"));
}

#[test]
fn zero_tolerance_fails_a_check() {
    let dir = TempDir::new().unwrap();
    let spec = write(dir.path(), "two_colour.toml", TWO_COLOUR);
    let out = triurn(&[
        "verify", s(&spec), "--suite", "drawn-ratio", "--steps", "500", "--reps", "50", "--tol", "0,0", "--seed", "3",
    ]);
    assert_eq!(code(&out), 5, "{}", stdout(&out));
}

#[test]
fn directory_verification_aggregates() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "a.toml", TWO_COLOUR);
    write(dir.path(), "b.toml", BALANCED);
    let out = triurn(&[
        "verify",
        s(dir.path()),
        "--suite",
        "total-activity",
        "--steps",
        "2000",
        "--reps",
        "100",
        "--format",
        "csv",
        "--seed",
        "5",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("spec,check,colour,target,estimate,se,verdict"));
    assert!(text.lines().any(|l| l.starts_with("a.toml,total_activity")));
    assert!(text.lines().any(|l| l.starts_with("b.toml,total_activity")));
}

#[test]
fn corpus_lists_at_least_twelve_templates() {
    let out = triurn(&["corpus", "list"]);
    assert_eq!(code(&out), 0);
    let names = stdout(&out).lines().filter(|l| !l.starts_with(' ')).count();
    assert!(names >= 12, "{names}");
}

#[test]
fn corpus_writes_every_default() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("corpus");
    assert_eq!(code(&triurn(&["corpus", "write", "--out", s(&target)])), 0);
    let files = std::fs::read_dir(&target).unwrap().count();
    assert!(files >= 12);
    let three = target.join("three-colour.json");
    assert_eq!(code(&triurn(&["analyze", s(&three)])), 0);
}

#[test]
fn corpus_run_two_colour_bundle_passes() {
    let out = triurn(&[
        "corpus", "run", "E2", "--delta", "2", "--alpha", "1", "--gamma", "1", "--reps", "200", "--seed", "3",
    ]);
    assert_eq!(code(&out), 0, "{}\n{}", stdout(&out), stderr(&out));
    let v = json(&out);
    assert_eq!(v["template"], "two-colour");
    assert_eq!(v["verification"]["outcome"], "pass");
    assert!(v["verification"]["results"].as_array().unwrap().len() >= 5);
}

#[test]
fn corpus_run_plus_minus_routes_to_distribution_only() {
    let out = triurn(&["corpus", "run", "Eplusminus", "--reps", "2000", "--seed", "4"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    let violations = v["analysis"]["report"]["validation"]["violations"].to_string();
    assert!(violations.contains("A7"), "{violations}");
    let results = v["verification"]["results"].as_array().unwrap();
    assert!(!results.is_empty());
    assert!(results.iter().all(|r| r["check"].as_str().unwrap().starts_with("distribution")));
}

#[test]
fn corpus_constraints_exit_with_validation_code() {
    assert_eq!(code(&triurn(&["corpus", "show", "three-colour", "--alpha", "1"])), 2);
    assert_eq!(code(&triurn(&["corpus", "show", "two-colour", "--zeta", "1"])), 1);
    assert_eq!(code(&triurn(&["corpus", "show", "no-such-template"])), 1);
}
