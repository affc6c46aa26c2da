//! csq: verification suites for coherent-state quantization models.
//!
//! Exit status: 0 all selected suites pass, 1 suite failure, 2 usage or
//! configuration error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use commands::CmdError;
use config::{FileOpts, Opts, Resolved};

#[derive(Parser)]
#[command(name = "csq", version, about = "Coherent-state quantization lab: propagator axioms, Toeplitz operators, star products, Chern numbers and sliced path integrals")]
struct Cli {
    /// Config file with the same keys as the flags (TOML key = value)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker-thread cap (or env CSQ_LAB_THREADS)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Calibrate a model and verify the propagator axioms
    Verify(Opts),
    /// Gram matrix, resolution of identity, round trip, Schur and Berezin checks
    Quantize(Opts),
    /// Star-product identities, Pauli correspondence, semiclassical table
    Star(Opts),
    /// Mesh Chern numbers over icosphere levels
    Chern(Opts),
    /// Sliced-product holonomy convergence and cylinder consistency
    Slice(Opts),
    /// Podles-sphere coefficients and leaf checks
    Podles(Opts),
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let (name, mut opts) = match cli.command {
        Cmd::Verify(o) => ("verify", o),
        Cmd::Quantize(o) => ("quantize", o),
        Cmd::Star(o) => ("star", o),
        Cmd::Chern(o) => ("chern", o),
        Cmd::Slice(o) => ("slice", o),
        Cmd::Podles(o) => ("podles", o),
    };

    let mut file_threads = None;
    if let Some(path) = &cli.config {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read config {}: {e}", path.display());
                return ExitCode::from(2);
            }
        };
        let file: FileOpts = match toml::from_str(&text) {
            Ok(f) => f,
            Err(e) => {
                eprintln!("error: bad config {}: {e}", path.display());
                return ExitCode::from(2);
            }
        };
        file_threads = file.threads;
        opts.merge_file(&file);
    }

    let threads = cli
        .threads
        .or(file_threads)
        .or_else(|| std::env::var("CSQ_LAB_THREADS").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(0);
    if threads > 0 {
        // ignore failure when a pool already exists (tests)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }

    let cfg = Resolved::from(name, &opts, threads);
    let started = Instant::now();
    let result = match name {
        "verify" => commands::cmd_verify(&cfg),
        "quantize" => commands::cmd_quantize(&cfg),
        "star" => commands::cmd_star(&cfg),
        "chern" => commands::cmd_chern(&cfg),
        "slice" => commands::cmd_slice(&cfg),
        "podles" => commands::cmd_podles(&cfg),
        _ => unreachable!(),
    };

    match result {
        Ok((report, tables)) => {
            let json = report.to_json();
            if let Some(out) = &opts.out {
                let json_path = out.with_extension("json");
                if let Err(e) = std::fs::write(&json_path, &json) {
                    eprintln!("error: cannot write {}: {e}", json_path.display());
                    return ExitCode::from(2);
                }
                for (tname, csv) in &tables {
                    let path = out.with_file_name(format!(
                        "{}_{tname}.csv",
                        out.file_stem().and_then(|s| s.to_str()).unwrap_or("report")
                    ));
                    if let Err(e) = std::fs::write(&path, csv) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
            }
            println!("{json}");
            for s in &report.suites {
                eprintln!("suite {:<16} {}", s.name, s.status);
            }
            eprintln!("wall clock: {:.3}s", started.elapsed().as_secs_f64());
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(CmdError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CmdError::Internal(e)) => {
            eprintln!("suite error: {e}");
            ExitCode::from(1)
        }
    }
}
