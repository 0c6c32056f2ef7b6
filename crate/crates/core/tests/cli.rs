use std::process::Command;

fn modvis() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_modvis"));
    c.env_remove("MODVIS_CACHE_DIR");
    c
}

#[test]
fn version_names_engine_and_schema() {
    let out = modvis().arg("--version").output().unwrap();
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success());
    assert!(s.contains("engine 0.1.0") && s.contains("report schema 1"), "{s}");
}

#[test]
fn inspect_eleven_and_one() {
    let out = modvis().args(["inspect", "11", "--eigenvalues", "7"]).output().unwrap();
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("winding denominator 5"));
    assert!(s.lines().any(|l| l.split_whitespace().collect::<Vec<_>>() == ["11a", "-2", "-1", "1", "-2", "-", "1/5", "5"]));
    let out = modvis().args(["inspect", "1"]).output().unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "level 1: genus 0, nothing to show");
}

#[test]
fn unknown_flag_prints_usage() {
    let out = modvis().args(["inspect", "11", "--frobnicate"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8(out.stderr).unwrap().contains("Usage"));
}

#[test]
fn invalid_range_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out_file = dir.path().join("r.jsonl");
    let out = modvis().args(["scan", "--from", "20", "--to", "11", "--out"]).arg(&out_file).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8(out.stderr).unwrap().contains("invalid configuration"));
}

#[test]
fn scan_writes_report_and_uses_env_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let out_file = dir.path().join("r.jsonl");
    let out = modvis()
        .env("MODVIS_CACHE_DIR", &cache)
        .args(["scan", "--from", "11", "--to", "11", "--p-max", "7", "--safety", "2", "--out"])
        .arg(&out_file)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&out_file).unwrap();
    let last: serde_json::Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    assert_eq!(last["kind"], "summary");
    assert_eq!(last["pairs"], 0);
    assert!(cache.join("level-11.v1.json").exists());
}
