//! `rawblur`: synthesize motion-blurred/sharp training pairs by averaging
//! frames in the RAW sensor domain, and score paired image directories.

mod config;
mod evaluate;
mod ingest;
mod inspect;
mod manifest;
mod pngio;
mod synth;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use config::{JobConfig, Overrides};
use evaluate::EvalOptions;

const EXIT_OK: u8 = 0;
const EXIT_VALIDATION: u8 = 1;
const EXIT_PARTIAL: u8 = 2;

#[derive(Parser)]
#[command(
    name = "rawblur",
    version,
    about = "RAW-domain motion blur dataset generator and evaluator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate blurry/sharp pairs from directories of frame sequences.
    Synthesize {
        /// TOML job description (input, output, seed, window policy, ...).
        #[arg(long)]
        config: PathBuf,
        /// Master seed; overrides the config value.
        #[arg(long)]
        seed: Option<u64>,
        /// Also emit the RGB-domain baseline pair for every window.
        #[arg(long)]
        baseline_rgb: bool,
        /// Frame-rate upsampling factor (power of two; 1 disables).
        #[arg(long)]
        factor: Option<usize>,
        /// Output root; overrides the config value.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: all cores). Output bytes do not
        /// depend on this.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Score predictions against ground truth by PSNR/SSIM.
    Evaluate {
        /// Directory of predicted images.
        #[arg(long)]
        pred: PathBuf,
        /// Directory of ground-truth images with matching relative paths.
        #[arg(long)]
        gt: PathBuf,
        /// Comma-separated relative-path prefixes for sub-reports.
        #[arg(long, value_delimiter = ',')]
        partitions: Vec<String>,
        /// Write per-image rows and summaries to this CSV file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Summarize a synthesis manifest.
    Inspect {
        /// Path to a manifest.jsonl produced by `synthesize`.
        #[arg(long)]
        manifest: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(error) => {
            let code = match error.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_VALIDATION,
            };
            let _ = error.print();
            return ExitCode::from(code);
        }
    };

    match cli.command {
        Command::Synthesize {
            config,
            seed,
            baseline_rgb,
            factor,
            out,
            threads,
        } => {
            let overrides = Overrides {
                seed,
                factor,
                baseline_rgb,
                out,
            };
            let job = match JobConfig::load(&config, &overrides) {
                Ok(job) => job,
                Err(error) => return fail(error),
            };
            if let Some(threads) = threads {
                if let Err(error) = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global()
                {
                    return fail(error.into());
                }
            }
            match synth::run(&job) {
                Ok(summary) => {
                    println!(
                        "synthesized {} pairs from {} sequences ({} failed)",
                        summary.pairs, summary.sequences, summary.failures
                    );
                    if summary.failures > 0 {
                        ExitCode::from(EXIT_PARTIAL)
                    } else {
                        ExitCode::from(EXIT_OK)
                    }
                }
                Err(error) => fail(error),
            }
        }
        Command::Evaluate {
            pred,
            gt,
            partitions,
            csv,
        } => {
            let options = EvalOptions {
                pred,
                gt,
                partitions,
                csv,
            };
            match evaluate::run(&options) {
                Ok(true) => ExitCode::from(EXIT_OK),
                Ok(false) => ExitCode::from(EXIT_VALIDATION),
                Err(error) => fail(error),
            }
        }
        Command::Inspect { manifest } => match inspect::run(&manifest) {
            Ok(()) => ExitCode::from(EXIT_OK),
            Err(error) => fail(error),
        },
    }
}

fn fail(error: anyhow::Error) -> ExitCode {
    eprintln!("error: {error:#}");
    ExitCode::from(EXIT_VALIDATION)
}
