use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use modvis::harness::{cmd_inspect, cmd_scan, resolve_cache_dir, version_string, ScanConfig, SpaceCache};

#[derive(Parser)]
#[command(name = "modvis", about = "Modular symbols and visibility checks for congruent newforms", disable_version_flag = true)]
struct Cli {
    /// Print engine and schema versions
    #[arg(long)]
    version: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Scan a range of levels and write a JSONL report
    Scan {
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
        #[arg(long = "p-max", default_value_t = 97)]
        p_max: u64,
        /// Multiplier on the Sturm bound when certifying congruences
        #[arg(long, default_value_t = modvis::congruence::DEFAULT_SAFETY)]
        safety: u64,
        /// JSONL file of curves {"label", "N", "ainvs"}
        #[arg(long)]
        curves: Option<PathBuf>,
        /// Space cache directory (MODVIS_CACHE_DIR takes precedence)
        #[arg(long)]
        cache: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the newforms, eigenvalues and L-ratios at one level
    Inspect {
        level: u64,
        /// Show a_l for primes l up to this bound
        #[arg(long, default_value_t = 13)]
        eigenvalues: u64,
        #[arg(long)]
        cache: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> modvis::Result<u8> {
    match cli.command {
        None => {
            println!("{}", version_string());
            Ok(0)
        }
        Some(Command::Scan { from, to, p_max, safety, curves, cache, threads, out }) => {
            let cfg = ScanConfig {
                n_from: from,
                n_to: to,
                p_max,
                safety,
                curve_file: curves,
                cache_dir: resolve_cache_dir(cache),
                threads,
                out,
            };
            let code = cmd_scan(&cfg)?;
            Ok(code as u8)
        }
        Some(Command::Inspect { level, eigenvalues, cache }) => {
            let cache = resolve_cache_dir(cache).map(SpaceCache::new).transpose()?;
            print!("{}", cmd_inspect(level, eigenvalues, cache.as_ref())?);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.version {
        println!("{}", version_string());
        return ExitCode::SUCCESS;
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
