use std::io::Write;

use modvis::harness::{run_scan, ReportLine, ScanConfig};

fn curve_file() -> std::path::PathBuf {
    std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/curves.jsonl")
}

fn exact_fields(v: &serde_json::Value) {
    match v {
        serde_json::Value::Number(n) => assert!(n.is_u64() || n.is_i64(), "non-integer number {n}"),
        serde_json::Value::Array(a) => a.iter().for_each(exact_fields),
        serde_json::Value::Object(o) => o.values().for_each(exact_fields),
        _ => {}
    }
}

#[test]
fn pair_lines_at_99_and_142() {
    let mut cfg = ScanConfig::new(99, 142, "unused");
    cfg.p_max = 5;
    let r = run_scan(&cfg).unwrap();
    let pairs: Vec<_> = r.pairs().collect();
    assert!(pairs.iter().any(|p| p.verdict.level == 99));
    assert!(pairs.iter().any(|p| p.verdict.level == 142));
    assert!(pairs.iter().all(|p| p.unconditional_ok && p.verdict.p <= 5));
    assert_eq!(r.summary.pairs as usize, pairs.len());
    assert_eq!(r.summary.exit_code, 0);
    let jsonl = r.to_jsonl().unwrap();
    for line in jsonl.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        exact_fields(&v);
        assert_eq!(v["schema_version"], 1);
    }
    let mut sorted: Vec<_> = pairs.iter().map(|p| (p.verdict.level, p.verdict.f.clone(), p.verdict.g.clone(), p.verdict.p)).collect();
    sorted.sort();
    assert_eq!(sorted, pairs.iter().map(|p| (p.verdict.level, p.verdict.f.clone(), p.verdict.g.clone(), p.verdict.p)).collect::<Vec<_>>());
}

#[test]
fn curves_in_range_are_matched() {
    let mut cfg = ScanConfig::new(11, 50, "unused");
    cfg.curve_file = Some(curve_file());
    let r = run_scan(&cfg).unwrap();
    let labels: Vec<&str> = r.curves().map(|c| c.label.as_str()).collect();
    assert_eq!(labels.len(), 16);
    assert_eq!(r.summary.curves_out_of_range, 4);
    assert!(r.curves().all(|c| c.error.is_none() && c.form.is_some()));
    let c37 = r.curves().find(|c| c.label == "37a1").unwrap();
    assert!(c37.lratio.is_none() && c37.image_order_divides_torsion.is_none());
}

#[test]
fn bad_curve_lines_do_not_abort() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, r#"{{"label":"11a1","N":11,"ainvs":[0,-1,1,-10,-20]}}"#).unwrap();
    writeln!(f, r#"{{"label":"11x","N":11,"ainvs":[0,-1,1,-10]}}"#).unwrap();
    writeln!(f, r#"{{"label":"wrong","N":13,"ainvs":[0,-1,1,-10,-20]}}"#).unwrap();
    let mut cfg = ScanConfig::new(11, 13, "unused");
    cfg.curve_file = Some(f.path().to_path_buf());
    let r = run_scan(&cfg).unwrap();
    assert_eq!(r.summary.curve_parse_errors, 1);
    assert_eq!(r.summary.curves_matched, 1);
    assert_eq!(r.summary.curve_errors, 1);
    let wrong = r.curves().find(|c| c.label == "wrong").unwrap();
    assert!(wrong.error.as_ref().unwrap().contains("conductor"));
}

#[test]
fn cache_does_not_change_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ScanConfig::new(95, 100, "unused");
    let plain = run_scan(&cfg).unwrap().to_jsonl().unwrap();
    cfg.cache_dir = Some(dir.path().to_path_buf());
    let cold = run_scan(&cfg).unwrap().to_jsonl().unwrap();
    let warm = run_scan(&cfg).unwrap().to_jsonl().unwrap();
    assert_eq!(plain, cold);
    assert_eq!(plain, warm);
    let truncated = dir.path().join("level-99.v1.json");
    let bytes = std::fs::read(&truncated).unwrap();
    std::fs::write(&truncated, &bytes[..bytes.len() / 3]).unwrap();
    let recovered = run_scan(&cfg).unwrap();
    assert_eq!(recovered.to_jsonl().unwrap(), plain);
    assert!(matches!(recovered.lines.last(), Some(ReportLine::Summary(_))));
}
