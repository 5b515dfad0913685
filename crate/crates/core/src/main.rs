use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use graphprobe::harness::{
    build_test_set, encode_corpus, read_records, run_matrix, score_records, write_report, ExtractRule, RunConfig,
};
use graphprobe::serialize::EncodingSpec;
use graphprobe::tasks::CheckConfig;

#[derive(Parser)]
#[command(name = "graphprobe", version, about = "Probe graph reasoners for serialization robustness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render every prompt of a run to files, without calling any model.
    Encode {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the test set with ground-truth answers as JSON lines.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate all models; resumes from existing records.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Score a record file and print per-cell metrics as JSON lines.
    Score {
        #[arg(long)]
        records: PathBuf,
        /// Encoding id that deltas are taken against.
        #[arg(long)]
        baseline: Option<String>,
        /// Re-extract answers from the stored completions first.
        #[arg(long)]
        reextract: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write report files (cells, summary, accuracy and error tables).
    Report {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        baseline: Option<String>,
        #[arg(long, default_value = "report")]
        stem: String,
    },
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => std::io::stdout().lock().write_all(text.as_bytes()).context("writing stdout"),
    }
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let baseline = |b: Option<String>| b.unwrap_or_else(|| EncodingSpec::erdos().id());
    match Cli::parse().command {
        Command::Encode { config, out } => {
            let cfg = RunConfig::load(&config)?;
            let n = encode_corpus(&cfg, &out)?;
            log::info!("wrote {n} prompts to {}", out.display());
        }
        Command::Solve { config, out } => {
            let cfg = RunConfig::load(&config)?;
            let mut text = String::new();
            for inst in build_test_set(&cfg)? {
                text.push_str(&serde_json::to_string(&inst)?);
                text.push('\n');
            }
            emit(out.as_ref(), &text)?;
        }
        Command::Run { config } => {
            let cfg = RunConfig::load(&config)?;
            let outcome = run_matrix(&cfg)?;
            log::info!(
                "{} new records, {} already present, in {}",
                outcome.written,
                outcome.skipped,
                outcome.records_path.display()
            );
            print!("{}", outcome.report.accuracy_table().to_text());
        }
        Command::Score { records, baseline: b, reextract, out } => {
            let recs = read_records(&records)?;
            let check = CheckConfig::default();
            let rescore = reextract.then_some((&ExtractRule::DEFAULT[..], &check));
            let report = score_records(&recs, &baseline(b), rescore);
            emit(out.as_ref(), &report.to_jsonl())?;
        }
        Command::Report { records, out_dir, baseline: b, stem } => {
            let recs = read_records(&records)?;
            let report = score_records(&recs, &baseline(b), None);
            for path in write_report(&report, &out_dir, &stem)? {
                log::info!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}
