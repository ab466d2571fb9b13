use std::process::{Command, Output};

use serde_json::Value;

fn spart(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spart"))
        .args(args)
        .env_remove("SPART_THREADS")
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

const REPORT: [&str; 10] = ["report", "-f", "x", "-S", "2,3", "--eps", "1/3", "--ladder", "1e3,1e4,1e5", "--format"];

#[test]
fn documented_examples() {
    let out = spart(&["count", "-f", "x", "-S", "2", "--eps", "1/3", "-B", "64"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "38");

    let out = spart(&["powersum", "--sigma", "2,3", "--alpha", "1", "-L", "6"]);
    assert_eq!(stdout(&out).trim(), "16");

    let out = spart(&["zeta", "-f", "x^2-1", "-p", "2", "--format", "json"]);
    let z: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let poles = z["pole_terms"].as_array().unwrap();
    assert_eq!(poles.len(), 2);
    for t in poles {
        assert_eq!(t["k"], 3);
        assert_eq!(t["r"], 1);
        assert_eq!(t["scale"], "1/8");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(spart(&["--help"]).status.code(), Some(0));
    assert_eq!(spart(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(spart(&["count", "-f", "x", "-S", "4", "--eps", "1/3", "-B", "9"]).status.code(), Some(2));
    assert_eq!(spart(&["count", "-f", "x^^2", "-S", "2", "--eps", "1/3", "-B", "9"]).status.code(), Some(2));
    assert_eq!(spart(&["count", "-f", "x", "-S", "2", "--eps", "0", "-B", "9"]).status.code(), Some(2));
    let out = spart(&["measure", "-f", "x^2-1", "-p", "2", "-k", "8", "--oracle", "--budget", "10"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
}

#[test]
fn csv_shape() {
    let mut args = REPORT.to_vec();
    args.push("csv");
    args[8] = "1e3";
    let text = stdout(&spart(&args));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, ["B,count,predicted,ratio", lines[1]]);
    assert!(lines[1].starts_with("1000,484,"));
}

#[test]
fn json_matches_golden() {
    let mut args = REPORT.to_vec();
    args.push("json");
    let text = stdout(&spart(&args));
    assert_eq!(text.trim_end(), include_str!("golden/report_x_2_3.json").trim_end());

    let v: Value = serde_json::from_str(&text).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    for k in ["f", "S", "S_prime", "eps", "mode", "ladder", "fitted_exponent", "fitted_log_power"] {
        assert!(keys.contains(&k), "missing {k}");
    }
    for row in v["ladder"].as_array().unwrap() {
        for k in ["B", "count", "predicted", "ratio"] {
            assert!(row.get(k).is_some());
        }
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let mut base = REPORT.to_vec();
    base.push("json");
    let mut one = base.clone();
    one.extend(["--threads", "1"]);
    let mut four = base.clone();
    four.extend(["--threads", "4"]);
    let a = spart(&one).stdout;
    assert_eq!(a, spart(&four).stdout);

    let env = Command::new(env!("CARGO_BIN_EXE_spart"))
        .args(&base)
        .env("SPART_THREADS", "3")
        .output()
        .unwrap();
    assert!(env.status.success());
    assert_eq!(env.stdout, a);

    let bad = Command::new(env!("CARGO_BIN_EXE_spart"))
        .args(&one)
        .env("SPART_THREADS", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(bad.stdout, a);
}

#[test]
fn rationals_are_reduced() {
    let out = spart(&["measure", "-f", "x^2-1", "-p", "2", "-k", "3"]);
    assert_eq!(stdout(&out).trim(), "1/4");
    let out = spart(&["count", "-f", "x", "-S", "2", "--eps", "2/6", "-B", "64"]);
    assert_eq!(stdout(&out).trim(), "38");
}
