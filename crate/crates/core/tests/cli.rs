use std::io::Write;
use std::process::{Command, Output, Stdio};

use mahonia::IntPolynomial;

fn mahonia(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mahonia"))
        .args(args)
        .env_remove("MAHONIA_BUDGET")
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn poly(out: &Output) -> IntPolynomial {
    serde_json::from_str(stdout(out).trim()).unwrap()
}

#[test]
fn dist_signed_snk() {
    let out = mahonia(&["dist", "--family", "snk", "--n", "3", "--k", "2", "--signed"]);
    assert_eq!(out.status.code(), Some(0));
    let qz = ["q", "z"];
    let expected = &(&IntPolynomial::monomial(&qz, &[0, 1], 1) - &IntPolynomial::monomial(&qz, &[1, 1], 1))
        + &IntPolynomial::monomial(&qz, &[2, 0], 1);
    assert_eq!(poly(&out), expected);
}

#[test]
fn dist_fmaj_ck() {
    let out = mahonia(&["dist", "--family", "fmaj-ck", "--r", "2", "--p", "1", "--n", "2", "--k", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(poly(&out), IntPolynomial::bracket(4, mahonia::Sign::Plus));
}

#[test]
fn dist_csv_names_variables() {
    let out = mahonia(&[
        "dist", "--family", "snk", "--n", "3", "--k", "2", "--signed", "--format", "csv", "--vars", "x,y",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,coefficient"));
    let mut rows: Vec<&str> = lines.collect();
    rows.sort_unstable();
    assert_eq!(rows, ["0,1,1", "1,1,-1", "2,0,1"]);
}

#[test]
fn dist_forest_from_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_mahonia"))
        .args(["dist", "--family", "forest", "--forest", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(br#"{"n":3,"parent":{"1":3,"2":3}}"#).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let forest = mahonia::forest::ForestPoset::from_json_str(r#"{"n":3,"parent":{"1":3,"2":3}}"#).unwrap();
    assert_eq!(poly(&out), mahonia::forest::maj_distribution(&forest));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(mahonia(&["dist", "--family", "snk", "--n", "3", "--k", "9"]).status.code(), Some(2));
    assert_eq!(mahonia(&["verify", "--identity", "bogus"]).status.code(), Some(2));
    assert_eq!(mahonia(&["scan", "--conjecture", "problem3"]).status.code(), Some(2));
    assert_eq!(mahonia(&["dist", "--family", "snk", "--n", "3", "--budget", "0"]).status.code(), Some(2));
    assert_eq!(mahonia(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn verify_passes() {
    let out = mahonia(&["verify", "--identity", "cormain", "--n-max", "6"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 21);
    let out = mahonia(&["verify", "--identity", "grpn", "--r", "2,3,4", "--n-max", "4"]);
    assert_eq!(out.status.code(), Some(0));
    for line in stdout(&out).lines() {
        let row: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(row["equal"], true);
    }
}

#[test]
fn budget_exceeded_exits_3() {
    let out = mahonia(&["dist", "--family", "snk", "--n", "9", "--k", "1", "--budget", "100"]);
    assert_eq!(out.status.code(), Some(3));
    let out = Command::new(env!("CARGO_BIN_EXE_mahonia"))
        .args(["verify", "--identity", "main", "--n-max", "8"])
        .env("MAHONIA_BUDGET", "50")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn scan_reports_observations() {
    let out = mahonia(&["scan", "--conjecture", "problem1", "--n-max", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1);
    let row: serde_json::Value = serde_json::from_str(text.trim()).unwrap();
    assert_eq!(row["equal"], true);

    let out = mahonia(&["scan", "--conjecture", "problem2", "--r", "2", "--n-max", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).lines().count() > 0);
}

#[test]
fn output_is_independent_of_thread_count() {
    for args in [
        &["verify", "--identity", "bw2", "--n-max", "6", "--seed", "3"][..],
        &["scan", "--conjecture", "problem1", "--n-max", "7", "--format", "csv"][..],
        &["verify", "--identity", "colori", "--r", "2,4", "--n-max", "3"][..],
    ] {
        let one = mahonia(&[args, &["--jobs", "1"]].concat());
        let four = mahonia(&[args, &["--jobs", "4"]].concat());
        assert_eq!(one.status.code(), Some(0));
        assert_eq!(one.stdout, four.stdout, "{args:?}");
    }
}
