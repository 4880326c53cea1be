//! Command-line front end and HTTP scoring server for `readgrade-core`.

pub mod commands;
pub mod config;
pub mod parser;
pub mod serve;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "readgrade", version, about = "Reading-difficulty estimation for L2 readers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the feature table for a corpus.
    Featurize(config::CommonArgs),
    /// Forward selection with BIC; writes the trace and the chosen model.
    Select(commands::SelectArgs),
    /// Category, single-feature, selection and estimator reports.
    Evaluate(config::CommonArgs),
    /// Score one document with a trained model.
    Score(commands::ScoreArgs),
    /// Compare the proposed model with the classic readability formulas.
    Compare(config::CommonArgs),
    /// Serve POST /score, GET /model and GET /health.
    Serve(serve::ServeArgs),
    /// Write a synthetic graded corpus with its manifest.
    Generate(commands::GenerateArgs),
}

fn init_jobs(jobs: Option<usize>) -> anyhow::Result<()> {
    if let Some(n) = jobs {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Featurize(a) => init_jobs(a.jobs).and_then(|_| commands::featurize(a)),
        Command::Select(a) => init_jobs(a.common.jobs).and_then(|_| commands::select(a)),
        Command::Evaluate(a) => init_jobs(a.jobs).and_then(|_| commands::evaluate_cmd(a)),
        Command::Compare(a) => init_jobs(a.jobs).and_then(|_| commands::compare(a)),
        Command::Score(a) => commands::score(a),
        Command::Serve(a) => serve::run(a),
        Command::Generate(a) => commands::generate(a),
    }
}
