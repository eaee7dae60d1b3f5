mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;

/// Sentiment labeling, classifier training and flaming detection for
/// social-media comment streams.
#[derive(Parser, Debug)]
#[command(name = "flamescope", version, about)]
struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Seed for every randomized step.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normalize and tokenize a raw comment file.
    Preprocess(commands::PreprocessArgs),
    /// Assign lexicon sentiment labels to a preprocessed corpus.
    Label(commands::LabelArgs),
    /// Train word embeddings on a preprocessed corpus.
    TrainEmbed(commands::EmbedArgs),
    /// Train the CNN+BiLSTM classifier on labeled comments.
    TrainClf(commands::ClfArgs),
    /// Classify comments with a trained model.
    Predict(commands::PredictArgs),
    /// Macro precision/recall/F1 of a confusion matrix or a model.
    Evaluate(commands::EvaluateArgs),
    /// Find posts with outlying counts of hostile comments.
    Detect(commands::DetectArgs),
}

#[derive(Args, Debug)]
pub struct Io {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cfg.apply_seed(cli.seed);
    if let Some(n) = cli.threads.or(cfg.threads) {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match cli.command {
        Command::Preprocess(a) => commands::preprocess(a),
        Command::Label(a) => commands::label(a, &cfg),
        Command::TrainEmbed(a) => commands::train_embed(a, cfg),
        Command::TrainClf(a) => commands::train_clf(a, cfg),
        Command::Predict(a) => commands::predict(a),
        Command::Evaluate(a) => commands::evaluate(a, &cfg),
        Command::Detect(a) => commands::detect(a, &cfg),
    }
}

/// 2 for bad input (files, formats, configuration), 1 for anything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<flamescope::Error>() {
            return if e.is_input_error() { 2 } else { 1 };
        }
        if cause.is::<std::io::Error>() || cause.is::<toml::de::Error>() || cause.is::<commands::InputError>() {
            return 2;
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
