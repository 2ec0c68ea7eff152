use std::process::{Command, Output};

use rumin_cli::{run, EXIT_FAILED, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

fn rumin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rumin"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn exterior_derivative_of_a_function() {
    let out = rumin(&["d", "--n", "1", "f"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert_eq!(stdout(&out), "X1(f)*dx1 + Y1(f)*dy1 + T(f)*theta\n");
}

#[test]
fn inverse_lefschetz_of_the_area_form() {
    let out = rumin(&["Linv", "--n", "1", "dx1^dy1"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    assert_eq!(stdout(&out), "-1\n");
}

#[test]
fn lefschetz_round_trip_through_the_library() {
    let l = run(["rumin", "L", "--n", "2", "dx1 - 3*dy2"]);
    assert_eq!(l.code, EXIT_OK);
    let back = run(["rumin", "Linv", "--n", "2", l.stdout.trim()]);
    assert_eq!(back.stdout, "dx1 - 3*dy2\n");
}

#[test]
fn verified_identity_exits_zero_with_a_structured_report() {
    let out = rumin(&["verify", "lemma-3.14", "--n", "2", "--format", "structured"]);
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["identity"], "lemma-3.14");
    assert_eq!(doc["status"], "verified");
}

#[test]
fn failed_identity_exits_one() {
    let out = rumin(&["verify", "final-rewrite-3.5", "--n", "2"]);
    assert_eq!(out.status.code(), Some(EXIT_FAILED));
    assert!(stdout(&out).contains("0/1 checks passed"));
}

#[test]
fn malformed_input_exits_two_with_a_caret() {
    let out = rumin(&["d", "--n", "1", "dx1 +"]);
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains('^'), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["rumin"],
        vec!["rumin", "frobnicate"],
        vec!["rumin", "d", "--n", "1", "dx3"],
        vec!["rumin", "d", "--n", "0", "f"],
        vec!["rumin", "Linv", "--n", "1", "dx1"],
        vec!["rumin", "verify", "lemma-9.9"],
        vec!["rumin", "verify", "h1-explicit", "--n", "2"],
        vec!["rumin", "d", "--convention", "0", "f"],
        vec!["rumin", "ramp", "--t", "0", "--h", "1", "--eps", "0.6"],
        vec!["rumin", "eval", "f", "--at", "1,2,3"],
        vec!["rumin", "eval", "x1", "--at", "1,2"],
    ] {
        assert_eq!(run(args.clone()).code, EXIT_USAGE, "{args:?}");
    }
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(["rumin", "--help"]).code, EXIT_OK);
    assert_eq!(run(["rumin", "--version"]).code, EXIT_OK);
}

#[test]
fn membership_predicates_print_booleans() {
    assert_eq!(
        run(["rumin", "inJ", "--n", "1", "theta^dx1^dy1"]).stdout,
        "true\n"
    );
    assert_eq!(
        run(["rumin", "inJ", "--n", "1", "dx1^dy1"]).stdout,
        "false\n"
    );
    assert_eq!(
        run(["rumin", "inI", "--n", "1", "f*dx1^theta"]).stdout,
        "true\n"
    );
    assert_eq!(run(["rumin", "inI", "--n", "1", "dx1"]).stdout, "false\n");
}

#[test]
fn projections_and_the_plus_convention() {
    let beta = run([
        "rumin",
        "project",
        "--part",
        "beta",
        "--n",
        "1",
        "g*dx1^theta + dx1^dy1",
    ]);
    assert_eq!(beta.stdout, "g*dx1\n");
    let horizontal = run([
        "rumin",
        "project",
        "--part",
        "horizontal",
        "--n",
        "1",
        "g*dx1^theta + dx1^dy1",
    ]);
    assert_eq!(horizontal.stdout, "dx1^dy1\n");
    let minus = run(["rumin", "d", "--n", "1", "theta"]);
    let plus = run(["rumin", "d", "--n", "1", "--convention", "+", "theta"]);
    assert_eq!(minus.stdout, "-dx1^dy1\n");
    assert_eq!(plus.stdout, "dx1^dy1\n");
}

#[test]
fn eval_is_exact_and_checks_finite_differences() {
    let out = run([
        "rumin",
        "eval",
        "X1(f)",
        "--bind",
        "f=x1*x1*y1 + t",
        "--at",
        "1,2,3",
    ]);
    assert_eq!(out.code, EXIT_OK);
    assert_eq!(out.stdout, "3\n");
    let structured = run([
        "rumin",
        "eval",
        "f",
        "--bind",
        "f=x1*x1*x1",
        "--at",
        "1/2,0,0",
        "--step",
        "1e-5",
        "--format",
        "structured",
    ]);
    assert_eq!(structured.code, EXIT_OK, "{}", structured.stderr);
    let doc: Value = serde_json::from_str(&structured.stdout).unwrap();
    assert_eq!(doc["result"], "1/8");
    assert!(doc["finite_difference_deviation"].as_f64().unwrap() < 1e-6);
}

#[test]
fn verify_with_random_trials_and_mutation() {
    let clean = run([
        "rumin",
        "verify",
        "eq-3.4.1",
        "--n",
        "1",
        "--trials",
        "10",
        "--format",
        "structured",
    ]);
    assert_eq!(clean.code, EXIT_OK);
    let doc: Value = serde_json::from_str(&clean.stdout).unwrap();
    assert_eq!(doc["random_check"]["violations"], 0);

    let mutated = run([
        "rumin", "verify", "eq-3.4.1", "--n", "1", "--trials", "10", "--mutate",
    ]);
    assert_eq!(mutated.code, EXIT_FAILED);
    assert!(
        mutated.stdout.contains("10 of 10 trials violated"),
        "{}",
        mutated.stdout
    );
}

#[test]
fn verify_several_targets_in_order() {
    let out = run([
        "rumin",
        "verify",
        "lemma-3.14",
        "h1-explicit",
        "--format",
        "structured",
    ]);
    assert_eq!(out.code, EXIT_OK);
    let doc: Value = serde_json::from_str(&out.stdout).unwrap();
    let reports = doc["reports"].as_array().unwrap();
    let keys: Vec<(String, u64)> = reports
        .iter()
        .map(|r| {
            (
                r["identity"].as_str().unwrap().to_string(),
                r["n"].as_u64().unwrap(),
            )
        })
        .collect();
    assert_eq!(
        keys,
        [
            ("lemma-3.14".into(), 1),
            ("lemma-3.14".into(), 2),
            ("lemma-3.14".into(), 3),
            ("h1-explicit".into(), 1)
        ]
    );
}

#[test]
fn ramp_reports_lipschitz_estimates() {
    let out = run([
        "rumin",
        "ramp",
        "--t",
        "0",
        "--h",
        "1",
        "--eps",
        "0.125",
        "--at",
        "-1,0.5,2",
        "--format",
        "structured",
    ]);
    assert_eq!(out.code, EXIT_OK);
    let doc: Value = serde_json::from_str(&out.stdout).unwrap();
    let samples = doc["result"]["samples"].as_array().unwrap();
    assert_eq!(samples[0]["ramp"], 0.0);
    assert_eq!(samples[1]["gamma"], 0.5);
    assert_eq!(samples[2]["ramp_derivative"], 0.0);
    let lip = doc["result"]["lipschitz"]["gamma"].as_f64().unwrap();
    assert!(lip <= 1.0 + 1e-12);
}

#[test]
fn structured_operator_output_has_the_envelope() {
    let out = run([
        "rumin",
        "reduceI",
        "--n",
        "1",
        "--format",
        "structured",
        "f*theta + dx1",
    ]);
    assert_eq!(out.code, EXIT_OK);
    let doc: Value = serde_json::from_str(&out.stdout).unwrap();
    for key in [
        "verb",
        "n",
        "convention",
        "status",
        "result",
        "seed",
        "wall_time",
    ] {
        assert!(doc.get(key).is_some(), "missing {key}");
    }
    assert_eq!(doc["verb"], "reduceI");
}
