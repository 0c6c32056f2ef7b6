//! Scans a range of levels with the bundled curve file and prints the summary.
//!
//! cargo run --release --example scan -- 11 150

use modvis::harness::{run_scan, ReportLine, ScanConfig};

fn main() -> modvis::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let (from, to) = match args[..] {
        [a, b, ..] => (a, b),
        _ => (11, 150),
    };
    let mut cfg = ScanConfig::new(from, to, "scan.jsonl");
    cfg.curve_file = Some(concat!(env!("CARGO_MANIFEST_DIR"), "/data/curves.jsonl").into());
    let report = run_scan(&cfg)?;
    for p in report.pairs() {
        let v = &p.verdict;
        println!(
            "{:>4} {:<6} {:<6} p={:<3} factor1={} lratio={} unconditional={} hypotheses proved={}",
            v.level, v.f, v.g, v.p, v.factor1, v.lratio, p.unconditional_ok, p.conditional_checks_apply
        );
    }
    if let Some(ReportLine::Summary(s)) = report.lines.last() {
        println!("{}", serde_json::to_string_pretty(s)?);
    }
    Ok(())
}
