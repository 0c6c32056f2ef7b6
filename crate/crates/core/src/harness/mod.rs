//! Scans over ranges of levels, the JSONL report, the space cache and the `inspect` dump.

pub mod cache;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{genus_x0, primes_up_to, sturm_bound};
use crate::congruence::find_visible_pairs;
use crate::curves::{analyze_curve, bsd_report, match_curve_to_newform, parse_curve_file, CurveData, CurveRecord};
use crate::error::{Error, Result};
use crate::exact::rational_to_string;
use crate::modsym::{build_space, ModSymSpace};
use crate::newform::{rational_newforms, RationalNewform};
use crate::visibility::{verify_main_theorem, CurveFacts, Outcome, VisibilityVerdict};
use crate::winding::{lratio_and_image_order, winding_data, WindingData};

pub use cache::{cache_roundtrip, CacheStatus, SpaceCache, CACHE_FORMAT_VERSION};

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const SCHEMA_VERSION: u32 = 1;
pub const CACHE_DIR_ENV: &str = "MODVIS_CACHE_DIR";

pub fn version_string() -> String {
    format!("modvis {ENGINE_VERSION} (engine {ENGINE_VERSION}, report schema {SCHEMA_VERSION}, cache format {CACHE_FORMAT_VERSION})")
}

/// The cache directory: the environment variable wins over the command line.
pub fn resolve_cache_dir(cli: Option<PathBuf>) -> Option<PathBuf> {
    match std::env::var_os(CACHE_DIR_ENV) {
        Some(v) if !v.is_empty() => Some(PathBuf::from(v)),
        _ => cli,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanConfig {
    pub n_from: u64,
    pub n_to: u64,
    pub p_max: u64,
    pub safety: u64,
    pub curve_file: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub threads: usize,
    pub out: PathBuf,
}

impl ScanConfig {
    pub fn new(n_from: u64, n_to: u64, out: impl Into<PathBuf>) -> Self {
        Self {
            n_from,
            n_to,
            p_max: 97,
            safety: crate::congruence::DEFAULT_SAFETY,
            curve_file: None,
            cache_dir: None,
            threads: 1,
            out: out.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_from < 1 || self.n_from > self.n_to {
            return Err(Error::Config(format!("need 1 <= from <= to, got {}..{}", self.n_from, self.n_to)));
        }
        if self.p_max < 3 {
            return Err(Error::Config(format!("p-max must be at least 3, got {}", self.p_max)));
        }
        if self.safety < 1 {
            return Err(Error::Config("safety must be at least 1".into()));
        }
        if self.threads < 1 {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        Ok(())
    }
}

/// Bounds that determine the reported numbers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub p_max: u64,
    pub safety: u64,
    pub sturm_bound: u64,
    /// Primes up to this bound certify the congruence modulo r.
    pub index_bound: u64,
    pub winding_generation_bound: u64,
    pub winding_stabilized: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairLine {
    pub schema_version: u32,
    pub engine_version: String,
    #[serde(flatten)]
    pub verdict: VisibilityVerdict,
    pub unconditional_ok: bool,
    pub conditional_checks_apply: bool,
    pub conditional_failure: bool,
    pub bounds: Bounds,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveLine {
    pub schema_version: u32,
    pub engine_version: String,
    pub level: u64,
    pub label: String,
    pub form: Option<String>,
    /// a_ℓ compared with point counts for good ℓ up to this bound.
    pub eigenvalues_checked_to: u64,
    pub torsion: Option<u64>,
    pub tamagawa_product: Option<u64>,
    pub c_infinity: Option<u8>,
    #[serde(with = "crate::exact::rational_opt")]
    pub lratio: Option<BigRational>,
    #[serde(with = "crate::exact::big_opt")]
    pub cuspidal_image_order: Option<BigInt>,
    #[serde(with = "crate::exact::rational_opt")]
    pub sha_analytic: Option<BigRational>,
    pub image_order_divides_torsion: Option<bool>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: u32,
    pub engine_version: String,
    pub n_from: u64,
    pub n_to: u64,
    pub p_max: u64,
    pub safety: u64,
    pub levels_scanned: u64,
    pub levels_genus_zero: u64,
    pub level_errors: u64,
    pub pairs: u64,
    pub checks_passed: u64,
    pub checks_failed: u64,
    pub checks_unknown: u64,
    pub unconditional_failures: u64,
    pub pairs_with_hypotheses_proved: u64,
    pub conditional_failures: u64,
    /// Conditional checks that fail while some hypothesis is unproved.
    pub warnings: u64,
    pub curves_matched: u64,
    pub curve_errors: u64,
    pub curves_out_of_range: u64,
    pub curve_parse_errors: u64,
    pub divisibility_failures: u64,
    pub exit_code: i32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReportLine {
    Pair(Box<PairLine>),
    Curve(CurveLine),
    LevelError { level: u64, error: String },
    Summary(Summary),
}

/// The lines of a report in output order, the summary last.
#[derive(Clone, Debug)]
pub struct ScanReport {
    pub lines: Vec<ReportLine>,
    pub summary: Summary,
}

impl ScanReport {
    pub fn to_jsonl(&self) -> Result<String> {
        let mut s = String::new();
        for line in &self.lines {
            s.push_str(&serde_json::to_string(line)?);
            s.push('\n');
        }
        Ok(s)
    }

    pub fn pairs(&self) -> impl Iterator<Item = &PairLine> {
        self.lines.iter().filter_map(|l| match l {
            ReportLine::Pair(p) => Some(p.as_ref()),
            _ => None,
        })
    }

    pub fn curves(&self) -> impl Iterator<Item = &CurveLine> {
        self.lines.iter().filter_map(|l| match l {
            ReportLine::Curve(c) => Some(c),
            _ => None,
        })
    }
}

struct LevelOutput {
    lines: Vec<ReportLine>,
    cache_note: Option<String>,
}

fn load_space(level: u64, cache: Option<&SpaceCache>) -> Result<(ModSymSpace, Option<String>)> {
    match cache {
        None => Ok((build_space(level)?, None)),
        Some(c) => {
            let (space, status) = c.load_or_build(level)?;
            let note = match status {
                CacheStatus::Corrupt(m) => Some(format!("warning: {m}; recomputed level {level}")),
                CacheStatus::Stale => Some(format!("note: stale cache entry for level {level} ignored")),
                _ => None,
            };
            Ok((space, note))
        }
    }
}

fn curve_line(level: u64, label: &str) -> CurveLine {
    CurveLine {
        schema_version: SCHEMA_VERSION,
        engine_version: ENGINE_VERSION.into(),
        level,
        label: label.into(),
        form: None,
        eigenvalues_checked_to: sturm_bound(level),
        torsion: None,
        tamagawa_product: None,
        c_infinity: None,
        lratio: None,
        cuspidal_image_order: None,
        sha_analytic: None,
        image_order_divides_torsion: None,
        error: None,
    }
}

fn process_level(level: u64, cfg: &ScanConfig, curves: &[CurveRecord], cache: Option<&SpaceCache>) -> Result<LevelOutput> {
    let mut lines = Vec::new();
    if genus_x0(level) == 0 {
        for rec in curves {
            let mut cl = curve_line(level, &rec.label);
            let err = analyze_curve(rec).err().unwrap_or_else(|| Error::NoMatchingNewform(rec.label.clone()));
            cl.error = Some(err.to_string());
            lines.push(ReportLine::Curve(cl));
        }
        return Ok(LevelOutput { lines, cache_note: None });
    }
    let (space, cache_note) = load_space(level, cache)?;
    let space = Arc::new(space);
    let cached_before = space.cached_hecke_indices();
    let forms = rational_newforms(&space)?;

    let mut matched: Vec<(CurveLine, Option<(CurveData, usize)>)> = Vec::new();
    for rec in curves {
        let mut cl = curve_line(level, &rec.label);
        let outcome = analyze_curve(rec).and_then(|cd| Ok((match_curve_to_newform(&cd, &forms)?, cd)));
        match outcome {
            Ok((Some(i), cd)) => {
                cl.form = Some(forms[i].label());
                cl.torsion = Some(cd.torsion);
                cl.tamagawa_product = Some(cd.tamagawa_product());
                cl.c_infinity = Some(cd.real_components);
                matched.push((cl, Some((cd, i))));
            }
            Ok((None, _)) => {
                cl.error = Some(Error::NoMatchingNewform(rec.label.clone()).to_string());
                matched.push((cl, None));
            }
            Err(e) => {
                cl.error = Some(e.to_string());
                matched.push((cl, None));
            }
        }
    }

    let pairs = find_visible_pairs(&forms, cfg.p_max, cfg.safety)?;
    let needs_winding =
        !pairs.is_empty() || matched.iter().any(|(_, m)| m.as_ref().is_some_and(|(_, i)| forms[*i].analytic_rank_is_zero()));
    let wd: Option<WindingData> = if needs_winding { Some(winding_data(&space)?) } else { None };

    for (cl, m) in matched.iter_mut() {
        let (Some((cd, i)), Some(wd)) = (m.as_ref(), wd.as_ref()) else { continue };
        let f = &forms[*i];
        if !f.analytic_rank_is_zero() {
            continue;
        }
        let b = bsd_report(cd, f, wd)?;
        let (_, cio) = lratio_and_image_order(f, wd)?;
        cl.lratio = b.lratio;
        cl.sha_analytic = b.sha_analytic;
        cl.image_order_divides_torsion = cio.as_ref().map(|c| BigInt::from(cd.torsion).is_multiple_of(c));
        cl.cuspidal_image_order = cio;
    }

    let mut pair_lines = Vec::new();
    for pair in &pairs {
        let wd = wd.as_ref().expect("winding data computed for pairs");
        let facts: Option<CurveFacts> = matched
            .iter()
            .find_map(|(_, m)| m.as_ref().filter(|(_, i)| *i == pair.f.index()).map(|(cd, _)| cd.facts()));
        let v = verify_main_theorem(pair, wd, facts.as_ref())?;
        pair_lines.push(PairLine {
            schema_version: SCHEMA_VERSION,
            engine_version: ENGINE_VERSION.into(),
            unconditional_ok: v.unconditional_ok(),
            conditional_checks_apply: v.conditional_checks_apply(),
            conditional_failure: v.conditional_failure(),
            bounds: Bounds {
                p_max: cfg.p_max,
                safety: pair.safety,
                sturm_bound: sturm_bound(level),
                index_bound: pair.index_bound,
                winding_generation_bound: wd.generation_bound,
                winding_stabilized: wd.stabilized,
            },
            verdict: v,
        });
    }
    pair_lines.sort_by(|a, b| (&a.verdict.f, &a.verdict.g, a.verdict.p).cmp(&(&b.verdict.f, &b.verdict.g, b.verdict.p)));
    lines.extend(pair_lines.into_iter().map(|p| ReportLine::Pair(Box::new(p))));
    lines.extend(matched.into_iter().map(|(cl, _)| ReportLine::Curve(cl)));

    if let Some(c) = cache {
        if space.cached_hecke_indices() != cached_before {
            c.store(&space)?;
        }
    }
    Ok(LevelOutput { lines, cache_note })
}

fn summarize(cfg: &ScanConfig, lines: &[ReportLine], genus_zero: u64, out_of_range: u64) -> Summary {
    let mut s = Summary {
        schema_version: SCHEMA_VERSION,
        engine_version: ENGINE_VERSION.into(),
        n_from: cfg.n_from,
        n_to: cfg.n_to,
        p_max: cfg.p_max,
        safety: cfg.safety,
        levels_scanned: cfg.n_to - cfg.n_from + 1,
        levels_genus_zero: genus_zero,
        curves_out_of_range: out_of_range,
        ..Default::default()
    };
    for line in lines {
        match line {
            ReportLine::Pair(p) => {
                let v = &p.verdict;
                s.pairs += 1;
                for ok in [v.winding_in_e, v.odd_part_identity, v.kernel_claim, v.factor1_matches_intersection] {
                    if ok {
                        s.checks_passed += 1;
                    } else {
                        s.checks_failed += 1;
                    }
                }
                if !p.unconditional_ok {
                    s.unconditional_failures += 1;
                }
                let conditional = std::iter::once(if v.torsion_equal_at_r { Outcome::Pass } else { Outcome::Fail })
                    .chain(v.ordp_checks.iter().map(|c| c.outcome));
                let mut any_fail = false;
                for o in conditional {
                    any_fail |= o == Outcome::Fail;
                    match (p.conditional_checks_apply, o) {
                        (true, Outcome::Pass) => s.checks_passed += 1,
                        (true, Outcome::Fail) => s.checks_failed += 1,
                        _ => s.checks_unknown += 1,
                    }
                }
                if p.conditional_checks_apply {
                    s.pairs_with_hypotheses_proved += 1;
                }
                if p.conditional_failure {
                    s.conditional_failures += 1;
                } else if any_fail {
                    s.warnings += 1;
                }
            }
            ReportLine::Curve(c) => {
                if c.error.is_some() {
                    s.curve_errors += 1;
                } else {
                    s.curves_matched += 1;
                }
                if c.image_order_divides_torsion == Some(false) {
                    s.divisibility_failures += 1;
                }
            }
            ReportLine::LevelError { .. } => s.level_errors += 1,
            ReportLine::Summary(_) => {}
        }
    }
    s.exit_code = if s.unconditional_failures > 0 {
        1
    } else if s.level_errors > 0 {
        4
    } else {
        0
    };
    s
}

/// Runs a scan and returns the report without writing it.
pub fn run_scan(cfg: &ScanConfig) -> Result<ScanReport> {
    cfg.validate()?;
    let mut by_level: BTreeMap<u64, Vec<CurveRecord>> = BTreeMap::new();
    let mut out_of_range = 0;
    let mut parse_errors = Vec::new();
    if let Some(path) = &cfg.curve_file {
        let cf = parse_curve_file(path)?;
        for rec in cf.records {
            if (cfg.n_from..=cfg.n_to).contains(&rec.conductor) {
                by_level.entry(rec.conductor).or_default().push(rec);
            } else {
                out_of_range += 1;
            }
        }
        parse_errors = cf.errors;
    }
    let cache = cfg.cache_dir.as_ref().map(SpaceCache::new).transpose()?;
    let levels: Vec<u64> = (cfg.n_from..=cfg.n_to).collect();
    let genus_zero = levels.iter().filter(|&&n| genus_x0(n) == 0).count() as u64;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let outputs: Vec<(u64, Result<LevelOutput>)> = pool.install(|| {
        levels
            .par_iter()
            .map(|&n| {
                let curves = by_level.get(&n).map(Vec::as_slice).unwrap_or(&[]);
                (n, process_level(n, cfg, curves, cache.as_ref()))
            })
            .collect()
    });
    let mut lines = Vec::new();
    let parse_errors_count = parse_errors.len() as u64;
    for e in parse_errors {
        eprintln!("warning: curve file: {e}");
    }
    for (n, out) in outputs {
        match out {
            Ok(o) => {
                if let Some(note) = o.cache_note {
                    eprintln!("{note}");
                }
                lines.extend(o.lines);
            }
            Err(e) => lines.push(ReportLine::LevelError { level: n, error: e.to_string() }),
        }
    }
    let mut summary = summarize(cfg, &lines, genus_zero, out_of_range);
    summary.curve_parse_errors = parse_errors_count;
    lines.push(ReportLine::Summary(summary.clone()));
    Ok(ScanReport { lines, summary })
}

/// Runs a scan, writes the JSONL report to `cfg.out` and returns the exit code.
pub fn cmd_scan(cfg: &ScanConfig) -> Result<i32> {
    let report = run_scan(cfg)?;
    let mut f = std::io::BufWriter::new(std::fs::File::create(&cfg.out)?);
    f.write_all(report.to_jsonl()?.as_bytes())?;
    f.flush()?;
    let s = &report.summary;
    if s.warnings > 0 {
        eprintln!("warning: {} conditional check(s) failed for pairs with unproved hypotheses", s.warnings);
    }
    if s.conditional_failures > 0 {
        eprintln!("warning: {} pair(s) with proved hypotheses failed a conditional check", s.conditional_failures);
    }
    Ok(s.exit_code)
}

/// Human-readable dump of a level: dimension, eigenvalue table, winding data and L-ratios.
pub fn cmd_inspect(level: u64, eigen_bound: u64, cache: Option<&SpaceCache>) -> Result<String> {
    if level == 0 {
        return Err(Error::InvalidLevel(0));
    }
    let mut out = String::new();
    if genus_x0(level) == 0 {
        writeln!(out, "level {level}: genus 0, nothing to show").unwrap();
        return Ok(out);
    }
    let (space, note) = load_space(level, cache)?;
    if let Some(n) = note {
        eprintln!("{n}");
    }
    let space = Arc::new(space);
    let forms = rational_newforms(&space)?;
    let wd = winding_data(&space)?;
    writeln!(
        out,
        "level {level}: genus {}, dimension {}, {} rational newform(s)",
        space.genus(),
        space.dimension(),
        forms.len()
    )
    .unwrap();
    writeln!(out, "winding denominator {}", wd.cuspidal_order).unwrap();
    let primes = primes_up_to(eigen_bound.max(2));
    let mut header = format!("{:<8}", "form");
    for l in &primes {
        header.push_str(&format!("{:>6}", format!("a{l}")));
    }
    header.push_str(&format!("{:>4}  {:<10}{:>8}", "w", "lratio", "image"));
    writeln!(out, "{header}").unwrap();
    for f in &forms {
        out.push_str(&form_row(f, &primes, &wd)?);
    }
    Ok(out)
}

fn form_row(f: &RationalNewform, primes: &[u64], wd: &WindingData) -> Result<String> {
    let mut row = format!("{:<8}", f.label());
    for &l in primes {
        row.push_str(&format!("{:>6}", f.eigenvalue(l)?));
    }
    let w = f.atkin_lehner_sign().map(|s| if s > 0 { "+" } else { "-" }).unwrap_or("?");
    let (lr, cio) = lratio_and_image_order(f, wd)?;
    let lr = lr.map(|x| rational_to_string(&x)).unwrap_or_else(|| "0".into());
    let cio = cio.map(|x| x.to_string()).unwrap_or_else(|| "-".into());
    row.push_str(&format!("{w:>4}  {lr:<10}{cio:>8}\n"));
    Ok(row)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        let ok = ScanConfig::new(11, 20, "x");
        assert!(ok.validate().is_ok());
        for bad in [
            ScanConfig { n_from: 0, ..ok.clone() },
            ScanConfig { n_from: 30, ..ok.clone() },
            ScanConfig { p_max: 2, ..ok.clone() },
            ScanConfig { safety: 0, ..ok.clone() },
            ScanConfig { threads: 0, ..ok.clone() },
        ] {
            assert!(matches!(bad.validate(), Err(Error::Config(_))));
        }
    }

    #[test]
    fn trivial_ranges() {
        let r = run_scan(&ScanConfig::new(11, 11, "x")).unwrap();
        assert_eq!(r.summary.pairs, 0);
        assert_eq!(r.summary.exit_code, 0);
        let r = run_scan(&ScanConfig::new(1, 10, "x")).unwrap();
        assert_eq!(r.summary.levels_genus_zero, 10);
        assert_eq!(r.lines.len(), 1);
    }

    #[test]
    fn inspect_level_11() {
        let s = cmd_inspect(11, 7, None).unwrap();
        assert!(s.contains("winding denominator 5"));
        let row = s.lines().find(|l| l.starts_with("11a")).unwrap();
        let cols: Vec<&str> = row.split_whitespace().collect();
        assert_eq!(cols, ["11a", "-2", "-1", "1", "-2", "-", "1/5", "5"]);
        assert_eq!(cmd_inspect(1, 7, None).unwrap(), "level 1: genus 0, nothing to show\n");
    }

    #[test]
    fn report_lines_roundtrip() {
        let r = run_scan(&ScanConfig::new(99, 99, "x")).unwrap();
        assert!(r.summary.pairs > 0);
        for line in r.to_jsonl().unwrap().lines() {
            let back: ReportLine = serde_json::from_str(line).unwrap();
            assert_eq!(serde_json::to_string(&back).unwrap(), line);
        }
    }
}
