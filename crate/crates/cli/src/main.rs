//! `sigma-fact`: search, verify and tabulate primes `1 + n! * n(n+1)/2`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use sigma_fact_core::{
    prime_table, render_table, verify_certificate, PrimalityCertificate, Search, SearchConfig, SearchError,
    Verdict, DEFAULT_WITNESS_CAP,
};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_PERSISTENCE: u8 = 3;
const EXIT_CERTIFICATE: u8 = 4;
const EXIT_INTERRUPTED: u8 = 130;

#[derive(Debug, Parser)]
#[command(name = "sigma-fact", version, about = "Primes of the form 1 + n! * n(n+1)/2")]
struct Cli {
    /// Emit JSON lines instead of human-readable text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Search a range of n, proving every prime found.
    Search(SearchArgs),
    /// Check certificate files.
    Verify(VerifyArgs),
    /// Print the list of primes with index up to --max-n.
    Table(TableArgs),
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    from: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    to: u64,
    #[arg(long, env = "SIGMA_FACT_WORKERS", default_value_t = default_workers(),
          value_parser = clap::value_parser!(u64).range(1..1024))]
    workers: u64,
    /// Checkpoint file; an existing one is resumed.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Save a checkpoint every this many candidates.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    checkpoint_every: u64,
    /// JSONL results stream.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for certificate files.
    #[arg(long)]
    certs: Option<PathBuf>,
    /// Fixed trial-division bound (default: max(10^5, n^2) per candidate).
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    trial_bound: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_WITNESS_CAP, value_parser = clap::value_parser!(u64).range(2..))]
    witness_cap: u64,
    /// Record per-candidate elapsed milliseconds in the results stream.
    #[arg(long)]
    timing: bool,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct VerifyArgs {
    /// A single certificate file (.json, or .jsonl with one per line).
    #[arg(long)]
    cert: Option<PathBuf>,
    /// A directory of certificate files.
    #[arg(long)]
    certs: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TableArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    max_n: u64,
    #[arg(long, env = "SIGMA_FACT_WORKERS", default_value_t = default_workers(),
          value_parser = clap::value_parser!(u64).range(1..1024))]
    workers: u64,
}

fn default_workers() -> u64 {
    std::thread::available_parallelism().map_or(1, |n| n.get() as u64)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Search(args) => cmd_search(args, cli.json),
        Command::Verify(args) => cmd_verify(args, cli.json),
        Command::Table(args) => cmd_table(args, cli.json),
    };
    ExitCode::from(code)
}

fn cmd_search(args: SearchArgs, json: bool) -> u8 {
    if args.from > args.to {
        eprintln!("error: --from {} is greater than --to {}", args.from, args.to);
        return EXIT_USAGE;
    }
    let config = SearchConfig {
        workers: args.workers as usize,
        checkpoint_every: args.checkpoint_every,
        trial_bound: args.trial_bound,
        witness_cap: args.witness_cap,
        checkpoint_path: args.checkpoint,
        results_path: args.out,
        certs_dir: args.certs,
        record_timing: args.timing,
    };

    let stop = Arc::new(AtomicBool::new(false));
    let handler_flag = stop.clone();
    if let Err(e) = ctrlc::set_handler(move || handler_flag.store(true, Ordering::SeqCst)) {
        eprintln!("warning: cannot install signal handler: {e}");
    }

    let timing = args.timing;
    let report = Search::new(config)
        .with_stop_flag(stop)
        .on_record(|r| {
            if json {
                println!("{}", r.to_json_line(timing));
            } else {
                match &r.verdict {
                    Verdict::PrimeCertified => println!(
                        "n={:<6} prime, {} digits{}",
                        r.n,
                        r.digits,
                        r.certificate_path
                            .as_deref()
                            .map(|p| format!(", certificate {p}"))
                            .unwrap_or_default()
                    ),
                    Verdict::Unproven { reason } => {
                        println!("n={:<6} probable prime, NOT certified: {reason}", r.n)
                    }
                    Verdict::Composite => {}
                }
            }
        })
        .run(args.from, args.to);

    let report = match report {
        Ok(report) => report,
        Err(e) => {
            eprintln!("error: {e}");
            return match e {
                SearchError::InvalidRange { .. } | SearchError::InvalidConfig(_) => EXIT_USAGE,
                _ => EXIT_PERSISTENCE,
            };
        }
    };

    let unproven: Vec<u64> = report
        .records
        .iter()
        .filter(|r| matches!(r.verdict, Verdict::Unproven { .. }))
        .map(|r| r.n)
        .collect();
    if !json {
        if let Some(n) = report.resumed_from {
            println!("resumed at n={n}");
        }
        let list: Vec<String> = report.found.iter().map(u64::to_string).collect();
        println!(
            "{} {} primes for n in [{}, {}]: {}",
            if report.interrupted { "interrupted;" } else { "done;" },
            report.found.len(),
            args.from,
            args.to,
            list.join(", ")
        );
    }
    if report.interrupted {
        eprintln!("interrupted; checkpoint saved");
        EXIT_INTERRUPTED
    } else if !unproven.is_empty() {
        eprintln!("error: probable primes without certificate at n = {unproven:?}");
        EXIT_CERTIFICATE
    } else {
        0
    }
}

enum Outcome {
    Pass { n: u64 },
    Fail(String),
    ParseError(String),
}

fn certificate_files(dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("cannot read {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && matches!(p.extension().and_then(|e| e.to_str()), Some("json" | "jsonl"))
        })
        .collect();
    files.sort();
    Ok(files)
}

fn check(text: &str) -> Outcome {
    match PrimalityCertificate::from_json(text) {
        Ok(cert) => match verify_certificate(&cert) {
            Ok(()) => Outcome::Pass { n: cert.n },
            Err(reason) => Outcome::Fail(reason.to_string()),
        },
        Err(e) => Outcome::ParseError(e.to_string()),
    }
}

fn cmd_verify(args: VerifyArgs, json: bool) -> u8 {
    let files = match (&args.cert, &args.certs) {
        (Some(file), _) => vec![file.clone()],
        (None, Some(dir)) => match certificate_files(dir) {
            Ok(files) => files,
            Err(e) => {
                eprintln!("error: {e:#}");
                return EXIT_USAGE;
            }
        },
        (None, None) => unreachable!("clap requires one of --cert / --certs"),
    };
    if files.is_empty() {
        eprintln!("error: no certificate files to verify");
        return EXIT_USAGE;
    }

    let mut results = Vec::new();
    for file in &files {
        let text = match fs::read_to_string(file) {
            Ok(t) => t,
            Err(e) => {
                results.push((file.display().to_string(), Outcome::ParseError(e.to_string())));
                continue;
            }
        };
        let jsonl = file.extension().is_some_and(|e| e == "jsonl");
        if jsonl {
            for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
                results.push((format!("{}:{}", file.display(), i + 1), check(line)));
            }
        } else {
            results.push((file.display().to_string(), check(text.trim_end())));
        }
    }

    let (mut failed, mut unparsable) = (false, false);
    for (label, outcome) in &results {
        let (status, detail) = match outcome {
            Outcome::Pass { n } => ("PASS", format!("n={n}")),
            Outcome::Fail(reason) => {
                failed = true;
                ("FAIL", reason.clone())
            }
            Outcome::ParseError(msg) => {
                unparsable = true;
                ("ERROR", msg.clone())
            }
        };
        if json {
            println!(
                "{}",
                serde_json::json!({ "file": label, "status": status, "detail": detail })
            );
        } else {
            println!("{status} {label}: {detail}");
        }
    }
    if results.is_empty() {
        eprintln!("error: no certificates found");
        return EXIT_USAGE;
    }
    if unparsable {
        EXIT_USAGE
    } else if failed {
        EXIT_VERIFY_FAILED
    } else {
        0
    }
}

fn cmd_table(args: TableArgs, json: bool) -> u8 {
    let config = SearchConfig {
        workers: args.workers as usize,
        ..SearchConfig::default()
    };
    let rows = match prime_table(args.max_n, &config) {
        Ok(rows) => rows,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    if json {
        for row in &rows {
            println!("{}", row.to_json());
        }
    } else {
        print!("{}", render_table(&rows));
    }
    0
}
