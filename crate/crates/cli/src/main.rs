use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use pgroup_core::corpus::{self, parse_checks, CorpusConfig};
use pgroup_core::verifier::CheckId;

const DEFAULT_OUTPUT: &str = "report.jsonl";

/// Build a corpus of finite p-groups and run the power-structure checks on it.
///
/// Writes one JSON record per check instance to the output path and a
/// summary next to it (`<output>.summary.txt`); the summary is also printed.
/// Exit status: 0 when everything passes or is skipped, 1 on a check
/// failure, 2 on a configuration error.
#[derive(Parser, Debug)]
#[command(name = "pgroup-verify", version)]
struct Args {
    /// Corpus file (one group per line, `set key=value` lines allowed).
    /// Defaults to the built-in corpus.
    #[arg(long, value_name = "PATH")]
    corpus: Option<PathBuf>,

    /// Comma-separated check ids to run (default: all).
    #[arg(long, value_name = "IDS")]
    checks: Option<String>,

    /// Seed for every sampled sweep.
    #[arg(long)]
    seed: Option<u64>,

    /// Worker threads.
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,

    /// JSON Lines report destination [default: report.jsonl].
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Largest group order to build.
    #[arg(long, value_name = "N")]
    max_order: Option<usize>,

    /// Groups of at most this order are swept exhaustively.
    #[arg(long, value_name = "N")]
    exhaustive_threshold: Option<usize>,

    /// Samples per check instance above the threshold.
    #[arg(long, value_name = "N")]
    sample_count: Option<usize>,

    /// Print the check ids with descriptions and exit.
    #[arg(long)]
    list_checks: bool,
}

fn configure(args: &Args) -> Result<CorpusConfig, String> {
    let mut config = match &args.corpus {
        Some(path) => CorpusConfig::load(path).map_err(|e| e.to_string())?,
        None => CorpusConfig::shipped(),
    };
    if let Some(list) = &args.checks {
        config.checks = parse_checks(list).map_err(|e| format!("--checks: {e}"))?;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(jobs) = args.jobs {
        config.jobs = jobs.max(1);
    }
    if let Some(cap) = args.max_order {
        config.order_cap = cap;
    }
    if let Some(t) = args.exhaustive_threshold {
        config.exhaustive_threshold = t;
    }
    if let Some(n) = args.sample_count {
        config.sample_count = n;
    }
    if let Some(out) = &args.output {
        config.output_path = Some(out.clone());
    }
    Ok(config)
}

fn main() -> ExitCode {
    let args = Args::parse();
    if args.list_checks {
        let mut out = std::io::stdout().lock();
        for id in CheckId::ALL {
            if writeln!(out, "{:<8} {}", id.as_str(), id.description()).is_err() {
                break;
            }
        }
        return ExitCode::SUCCESS;
    }

    let config = match configure(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("pgroup-verify: {e}");
            return ExitCode::from(2);
        }
    };
    let start = Instant::now();
    let outcome = match corpus::run(&config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("pgroup-verify: {e}");
            return ExitCode::from(2);
        }
    };
    let output = config.output_path.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT));
    let summary_path = match corpus::emit_report(&outcome, &output) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("pgroup-verify: {e}");
            return ExitCode::from(2);
        }
    };
    print!("{}", outcome.summary());
    eprintln!(
        "pgroup-verify: {} records in {:.1?} on {} jobs; wrote {} and {}",
        outcome.reports.len(),
        start.elapsed(),
        config.jobs,
        output.display(),
        summary_path.display()
    );
    ExitCode::from(outcome.exit_code() as u8)
}
