use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypertower"))
        .args(args)
        .env_remove("HYPERTOWER_SEED")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn expand_minus_one() {
    let out = run(&[
        "expand", "--field", "rational", "--p", "5", "--x", "-1", "--digits", "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["shift"], 0);
    assert_eq!(v["digits"], serde_json::json!([4, 4, 4, 4]));
}

#[test]
fn hyperadd_one_one() {
    let out = run(&[
        "hyperadd", "--p", "5", "--gamma", "1", "--x", "1", "--y", "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["center"]["rep"], "2");
    assert_eq!(v["radius"], serde_json::json!([1]));
    assert_eq!(v["zero"], false);
}

#[test]
fn lee_suite_passes() {
    let out = run(&["laws", "--suite", "lee", "--seed", "7", "--samples", "200"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["pass"], true);
}

#[test]
fn every_suite_is_reachable() {
    for suite in [
        "lee",
        "tropical",
        "hom",
        "cone",
        "singlevalued",
        "universal",
        "oracle-roundtrip",
    ] {
        let out = run(&[
            "laws",
            "--suite",
            suite,
            "--samples",
            "20",
            "--precision",
            "8",
        ]);
        assert_eq!(out.status.code(), Some(0), "{suite}");
    }
}

#[test]
fn output_is_deterministic_and_config_is_echoed() {
    let args = ["laws", "--suite", "cone", "--seed", "3", "--samples", "30"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.stdout, b.stdout);
    let echo: Value = serde_json::from_slice(&a.stderr).unwrap();
    assert_eq!(echo["seed"], 3);
    assert_eq!(echo["suite"], "cone");
}

#[test]
fn seed_falls_back_to_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_hypertower"))
        .args(["laws", "--suite", "tropical", "--samples", "10"])
        .env("HYPERTOWER_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["config"]["seed"], 99);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(
        run(&["coset", "--gamma", "1", "--x", "{bad"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["coset", "--gamma", "-1", "--x", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["laws", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        run(&["project", "--x", "1", "--from", "1", "--to", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&[
            "expand",
            "--field",
            "quadratic",
            "--p",
            "3",
            "--x",
            "1",
            "--digits",
            "2"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn embed_alpha() {
    let out = run(&["embed", "--ext", "quadratic", "--p", "5", "--digits", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout_json(&out)["approximation"]["digits"],
        serde_json::json!([1, 3, 0])
    );
}

#[test]
fn limit_arith_cancellation() {
    let out = run(&[
        "limit-arith",
        "--op",
        "add",
        "--lhs",
        "1",
        "--rhs",
        "624",
        "--digits",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["approximation"]["shift"], 4);
    assert_eq!(v["ledger"]["losses"][0]["loss"], 4);
    assert_eq!(v["ledger"]["requested"], 8);
    assert_eq!(v["ledger"]["delivered"], 4);

    let third = run(&["limit-arith", "--op", "inv", "--lhs", "3", "--digits", "4"]);
    assert_eq!(
        stdout_json(&third)["approximation"]["digits"],
        serde_json::json!([2, 3, 1, 3])
    );
    assert_eq!(
        run(&["limit-arith", "--op", "inv", "--lhs", "0", "--digits", "4"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn function_field_and_tagged_elements() {
    let out = run(&[
        "coset",
        "--field",
        "function",
        "--p",
        "5",
        "--gamma",
        "2",
        "--x",
        r#"{"num":[0,1],"den":[1,1]}"#,
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["value"], serde_json::json!([1]));
    let tagged = r#"{"field":"function","p":5,"value":[1]}"#;
    assert_eq!(
        run(&["coset", "--gamma", "0", "--x", tagged]).status.code(),
        Some(2)
    );
}
