use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_girthwright"))
        .args(args)
        .env_remove("GIRTHWRIGHT_SEED")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn classify_exceptional_corpus() {
    for (file, kind) in [
        ("exceptional_type_i.json", "TypeI"),
        ("exceptional_type_ii.json", "TypeII"),
        ("exceptional_type_iii.json", "TypeIII"),
    ] {
        let out = run(&["classify", corpus(file).to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        let v = json(&out);
        assert_eq!(v["exceptional"], true);
        assert_eq!(v["certificate"]["kind"], kind, "{file}");
    }
}

#[test]
fn girths_of_c5() {
    let out = run(&["girths", corpus("c5.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["girths"], serde_json::json!([5, 5, 5, 5, 5]));
}

#[test]
fn colour_c5() {
    let out = run(&["--strict", "colour", corpus("c5.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let c = v["colouring"].as_object().unwrap();
    assert_eq!(c.len(), 5);
    for i in 0..5 {
        assert_ne!(c[&i.to_string()], c[&((i + 1) % 5).to_string()]);
    }
    assert_eq!(v["fallbacks"], 0);
}

#[test]
fn extend_exceptional_returns_certificate() {
    let out = run(&[
        "extend",
        corpus("exceptional_type_i.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["certificate"]["kind"], "TypeI");
}

#[test]
fn oracle_check_lists_the_blocked_precolouring() {
    let out = run(&[
        "oracle-check",
        corpus("exceptional_type_iii.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["blocked"], serde_json::json!([[1, 2, 3]]));
    assert_eq!(v["phi_extends"], false);
}

#[test]
fn invalid_input_exits_two() {
    let dir = scratch("bad_input");
    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"n": 1, "rotations": [[]], "extra": 0}"#).unwrap();
    assert_eq!(
        run(&["girths", bad.to_str().unwrap()]).status.code(),
        Some(2)
    );
    std::fs::write(&bad, "not json").unwrap();
    assert_eq!(
        run(&["colour", bad.to_str().unwrap()]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["colour", dir.join("missing.json").to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    // 3-lists on a triangle are below the local girth threshold
    std::fs::write(
        &bad,
        r#"{"n": 3, "rotations": [[1, 2], [2, 0], [0, 1]], "lists": {"0": [1,2,3], "1": [1,2,3], "2": [1,2,3]}}"#,
    )
    .unwrap();
    assert_eq!(
        run(&["colour", bad.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn strict_stress_is_clean() {
    let out = run(&["--strict", "stress", "--n-max", "5", "--seeds", "10"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    assert_eq!(v["failures"], 0);
    assert_eq!(v["fallbacks"], 0);
    assert_eq!(v["strict"], true);
    // 1 + 1 + 2 + 6 + 20 connected planar graphs
    assert_eq!(v["instances"], 30 * 10);
}

#[test]
fn generated_files_are_stable_and_loadable() {
    let dir = scratch("gen");
    let (a, b) = (dir.join("a"), dir.join("b"));
    for d in [&a, &b] {
        let out = run(&[
            "gen",
            "--n",
            "6",
            "--kind",
            "canvas",
            "--seed",
            "7",
            "--count",
            "5",
            "--out",
            d.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(json(&out)["written"], 5);
    }
    for i in 0..5 {
        let name = format!("instance_{i:04}.json");
        let (x, y) = (
            std::fs::read(a.join(&name)).unwrap(),
            std::fs::read(b.join(&name)).unwrap(),
        );
        assert_eq!(x, y, "{name} differs between runs");
        let out = run(&["girths", a.join(&name).to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
}

#[test]
fn seed_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_girthwright"))
        .args([
            "gen",
            "--kind",
            "random",
            "--out",
            scratch("env_seed").to_str().unwrap(),
        ])
        .env("GIRTHWRIGHT_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(json(&out)["seed"], 99);
}

#[test]
fn dot_export() {
    let out = run(&["dot", corpus("exceptional_type_i.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("graph"));
    assert!(text.contains("diamond"));
    assert!(text.contains("v0 g=5"));
}
