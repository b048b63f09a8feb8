//! Process-level contract tests for the `qlayers` binary: exit codes,
//! configuration echo, round gating, and format handling.

use std::process::{Command, Output};

fn qlayers(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qlayers"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(args: &[&str]) -> serde_json::Value {
    let out = qlayers(args);
    assert!(
        out.status.success(),
        "args {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn unknown_subcommand_exits_2() {
    let out = qlayers(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flag_exits_2() {
    let out = qlayers(&["threshold", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_values_exit_2() {
    for args in [
        vec!["threshold", "--tol", "0"],
        vec!["lkd-bb84", "--n", "100", "--eve", "intercept", "--f", "1.5"],
        vec!["lkd-bb84", "--n", "100", "--eve", "active"],
        vec!["lkd-kcbs", "--n", "100", "--eve", "intercept"],
        vec!["lkd-bb84", "--n", "0"],
        vec!["assignment-search", "--cycle", "2"],
        vec!["assignment-search", "--cycle", "30"],
        vec!["chsh"],
        vec!["chsh", "--box", "nonsense"],
        vec!["local-check", "--box", "pr", "--behavior", "[]"],
        vec!["toy-teleport", "--state", "123"],
        vec!["boson-dist", "--input", "1,1"],
        vec!["boson-dist", "--beamsplitter", "--random-unitary", "3"],
        vec!["boson-dist", "--beamsplitter", "--input", "1,1,1"],
        vec!["permanent", "--matrix", "notjson"],
        vec!["permanent", "--matrix", "[[[1,0],[0,0]]]", "--algorithm", "naive"],
        vec!["bench-permanent", "--min-n", "5", "--max-n", "4"],
        vec!["threshold", "--format", "csv"],
    ] {
        let out = qlayers(&args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "expected exit 2 for {args:?}, stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn valid_invocations_exit_0() {
    for args in [
        vec!["threshold"],
        vec!["kcbs-value", "--samples", "100"],
        vec!["assignment-search", "--cycle", "6"],
        vec!["chsh", "--box", "det:5"],
        vec!["local-check", "--box", "uniform"],
        vec!["toy-teleport", "--state", "2,4"],
        vec!["boson-dist", "--random-unitary", "3", "--input", "1,1,0"],
        vec!["boson-sample", "--beamsplitter", "--input", "1,1", "--k", "3"],
        vec!["permanent", "--matrix", "[[[1,0],[2,0]],[[3,0],[4,0]]]", "--algorithm", "both"],
        vec!["lkd-bb84", "--n", "500", "--format", "csv"],
        vec!["lkd-kcbs", "--n", "500", "--eve", "active", "--format", "text"],
    ] {
        let out = qlayers(&args);
        assert_eq!(
            out.status.code(),
            Some(0),
            "expected success for {args:?}, stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn reports_echo_the_resolved_configuration() {
    let v = stdout_json(&[
        "lkd-bb84", "--n", "400", "--eve", "intercept", "--f", "0.25", "--seed", "9",
    ]);
    assert_eq!(v["command"], "lkd-bb84");
    assert_eq!(v["seed"], 9);
    assert_eq!(v["params"]["n"], 400);
    assert_eq!(v["params"]["eve"], "intercept");
    assert_eq!(v["params"]["f"], 0.25);
    assert_eq!(v["params"]["check_fraction"], 0.5);
    assert_eq!(v["params"]["error_threshold"], 0.17);
    assert_eq!(v["result"]["params"]["strategy"]["kind"], "intercept-resend");

    let v = stdout_json(&["kcbs-value", "--cycle", "7", "--samples", "50", "--seed", "3"]);
    assert_eq!(v["params"]["cycle"], 7);
    assert_eq!(v["params"]["samples"], 50);
    assert_eq!(v["seed"], 3);
}

#[test]
fn rounds_are_gated_by_the_flag() {
    let without = stdout_json(&["lkd-bb84", "--n", "50", "--seed", "1"]);
    assert!(without["result"]["rounds"].is_null());
    let with = stdout_json(&["lkd-bb84", "--n", "50", "--seed", "1", "--emit-rounds"]);
    let rounds = with["result"]["rounds"].as_array().expect("rounds array");
    assert_eq!(rounds.len(), 50);
    assert!(rounds[0]["alice_basis"].is_string());
}

#[test]
fn transcript_wire_format_keys() {
    let v = stdout_json(&["lkd-bb84", "--n", "50", "--seed", "1", "--emit-rounds"]);
    let result = v["result"].as_object().unwrap();
    let keys: Vec<&str> = result.keys().map(|s| s.as_str()).collect();
    assert_eq!(keys, ["params", "rounds", "seed", "summary"]);
    let summary: Vec<&str> = result["summary"]
        .as_object()
        .unwrap()
        .keys()
        .map(|s| s.as_str())
        .collect();
    assert_eq!(
        summary,
        ["aborted", "eve_info_bits", "final_key_length", "qber", "sift_rate"]
    );
    let round = result["rounds"][0].as_object().unwrap();
    let round_keys: Vec<&str> = round.keys().map(|s| s.as_str()).collect();
    assert_eq!(
        round_keys,
        [
            "alice_basis",
            "alice_bit",
            "bob_basis",
            "bob_bit",
            "eve_attacked",
            "eve_basis",
            "sifted",
            "used_for_check"
        ]
    );
}

#[test]
fn permanent_of_identity_is_one() {
    let v = stdout_json(&["permanent", "--matrix", "[[[1,0],[0,0]],[[0,0],[1,0]]]"]);
    assert_eq!(v["result"]["permanent"][0], 1.0);
    assert_eq!(v["result"]["permanent"][1], 0.0);
}

#[test]
fn threshold_json_carries_both_readings() {
    let v = stdout_json(&["threshold", "--tol", "1e-6"]);
    let f_star = v["result"]["f_star"].as_f64().unwrap();
    let e_max = v["result"]["e_max"].as_f64().unwrap();
    assert!((f_star - 0.68).abs() < 0.005);
    assert!((e_max - 0.17).abs() < 0.002);
    assert_eq!(v["result"]["e_max_alternate_reading"], 0.12);
    assert_eq!(v["result"]["grid"].as_array().unwrap().len(), 101);
}

#[test]
fn csv_summary_row_has_the_documented_header() {
    let out = qlayers(&["lkd-kcbs", "--n", "300", "--eve", "passive", "--seed", "4", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "protocol,n,eve,f,check_fraction,error_threshold,seed,sift_rate,qber,eve_info_bits,aborted,final_key_length"
    );
    let row = lines.next().unwrap();
    assert!(row.starts_with("lkd-kcbs,300,passive,"));
}

#[test]
fn bench_permanent_emits_csv_rows() {
    let out = qlayers(&["bench-permanent", "--min-n", "2", "--max-n", "4", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,seconds");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("2,"));
}
