use std::fs;
use std::path::{Path, PathBuf};

use efg_deceive::cli::run;
use serde_json::Value;

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}.json", env!("CARGO_MANIFEST_DIR"))
}

fn call(args: &[&str]) -> (i32, Value) {
    let (code, out) = run(std::iter::once("efg-deceive").chain(args.iter().copied()));
    let doc = if out.is_empty() {
        Value::Null
    } else {
        serde_json::from_str(&out).expect("json stdout")
    };
    (code, doc)
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn cheat_optimal_pure() {
    let (code, doc) = call(&[
        "induce",
        "--mode",
        "optimal",
        "--commit",
        "pure",
        "--game",
        &fixture("fig-cheat"),
    ]);
    assert_eq!(code, 0);
    assert_eq!(doc["leaf"], "z3");
    assert_eq!(doc["follower_true_utility"], "4");
}

#[test]
fn behav_solve() {
    let (code, doc) = call(&[
        "solve",
        "--commit",
        "behavioral",
        "--game",
        &fixture("fig-behav"),
    ]);
    assert_eq!(code, 0);
    assert_eq!(doc["leader_value"], "14/5");
}

#[test]
fn strong_a_epsilon() {
    let (code, doc) = call(&[
        "strong",
        "--game",
        &fixture("fig-strong-a"),
        "--epsilon",
        "1/100",
    ]);
    assert_eq!(code, 0);
    assert_eq!(doc["sup"], "3/2");
    assert_eq!(doc["attained"], false);
    assert_eq!(doc["witness_utility"], "149/100");
}

#[test]
fn use_check_exit_codes() {
    assert_eq!(
        call(&["use-check", "--game", &fixture("fig-strong-a")]).0,
        0
    );
    assert_eq!(
        call(&["use-check", "--game", &fixture("fig-strong-b")]).0,
        1
    );
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(call(&["solve", "--game", "/nonexistent.json"]).0, 2);
    assert_eq!(call(&["solve"]).0, 2);
    assert_eq!(
        call(&[
            "strong",
            "--game",
            &fixture("fig-strong-a"),
            "--epsilon",
            "0.01"
        ])
        .0,
        2
    );
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"root": {"leaf": "z", "uL": 1.5, "uF": 0}}"#).unwrap();
    assert_eq!(call(&["solve", "--game", path_str(&bad)]).0, 2);
}

#[test]
fn verify_cheat_report() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("t.json");
    fs::write(&target, r#"{"z3": "1"}"#).unwrap();
    let report = fixture("fig-cheat-report");
    let game = fixture("fig-cheat");
    let args = [
        "verify",
        "--game",
        &game,
        "--report",
        &report,
        "--target",
        path_str(&target),
        "--commit",
        "pure",
    ];
    assert_eq!(call(&args).0, 0);
    let truthful = dir.path().join("u.json");
    fs::write(&truthful, r#"{"z1": "1", "z2": "3", "z3": "4", "z4": "2"}"#).unwrap();
    let args = [
        "verify",
        "--game",
        &game,
        "--report",
        path_str(&truthful),
        "--target",
        path_str(&target),
    ];
    assert_eq!(call(&args).0, 1);
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["solve", "--commit", "behavioral", "--game"],
        vec!["strong", "--epsilon", "1/7", "--game"],
        vec!["use-check", "--game"],
        vec!["maximin", "--game"],
        vec!["export-dot", "--game"],
    ] {
        for name in ["fig-cheat", "fig-yshape", "fig-strong-b"] {
            let f = fixture(name);
            let mut a = args.clone();
            a.push(&f);
            let argv = || std::iter::once("efg-deceive").chain(a.iter().copied());
            assert_eq!(run(argv()), run(argv()));
        }
    }
    assert_eq!(
        run(["efg-deceive", "gen", "--seed", "9"]),
        run(["efg-deceive", "gen", "--seed", "9"])
    );
}

fn round_trip(commit: &str, seed: u64, dir: &Path) {
    let game: PathBuf = dir.join(format!("g{seed}.json"));
    let report = dir.join(format!("u{seed}.json"));
    let target = dir.join(format!("p{seed}.json"));
    let seed_s = seed.to_string();
    assert_eq!(
        call(&["gen", "--seed", &seed_s, "--out", path_str(&game)]).0,
        0
    );
    let (code, _) = call(&[
        "induce",
        "--mode",
        "optimal",
        "--commit",
        commit,
        "--game",
        path_str(&game),
        "--out",
        path_str(&report),
        "--target-out",
        path_str(&target),
    ]);
    assert_eq!(code, 0);
    let args = [
        "verify",
        "--game",
        path_str(&game),
        "--report",
        path_str(&report),
        "--target",
        path_str(&target),
        "--commit",
        commit,
    ];
    assert_eq!(call(&args).0, 0, "seed {seed}, {commit}");
}

#[test]
fn induce_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..200 {
        round_trip("pure", seed, dir.path());
        round_trip("behavioral", seed, dir.path());
    }
}

#[test]
fn text_format_keeps_rationals() {
    let (code, out) = run([
        "efg-deceive",
        "--format",
        "text",
        "solve",
        "--commit",
        "behavioral",
        "--game",
        &fixture("fig-behav"),
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("leader_value: 14/5"));
}
