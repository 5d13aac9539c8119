//! `schn` command-line interface.
//!
//! Exit codes: 0 success, 2 configuration error, 3 runtime/numerical error.

mod commands;
mod errors;
mod manifest;
mod upscaler;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};


#[derive(Parser)]
#[command(name = "schn", version, about = "Blind super-resolution toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a degraded y/x patch corpus from HR images.
    Degrade(DegradeArgs),
    /// Train a model on dynamically degraded patches.
    Train(TrainArgs),
    /// Evaluate a checkpoint or the bicubic baseline over a condition grid.
    Eval(EvalArgs),
    /// Upscale one image; optionally dump hallucination-map renderings.
    Infer(InferArgs),
    /// Print the exact parameter count of a configuration.
    Params(ParamsArgs),
    /// Train and evaluate a (maps x modules) ablation grid.
    Ablate(AblateArgs),
}

#[derive(Args)]
pub(crate) struct DegradeArgs {
    /// Directory of HR PNG images.
    #[arg(long)]
    input: PathBuf,
    /// Degradation spec JSON.
    #[arg(long, required_unless_present = "replay")]
    spec: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Overrides the seed in the spec file.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 256)]
    patch: usize,
    #[arg(long, default_value_t = 240)]
    stride: usize,
    /// Regenerate a previous corpus bit-exactly from its manifest.
    #[arg(long)]
    replay: Option<PathBuf>,
}

#[derive(Args)]
pub(crate) struct TrainArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Continue from a training checkpoint.
    #[arg(long)]
    resume: Option<PathBuf>,
}

#[derive(Args)]
pub(crate) struct EvalArgs {
    /// Model checkpoint to evaluate.
    #[arg(long, conflicts_with = "baseline")]
    ckpt: Option<PathBuf>,
    /// Trained-model-free baseline; `bicubic` is the only one.
    #[arg(long)]
    baseline: Option<String>,
    /// Directory of HR PNG images.
    #[arg(long)]
    data: PathBuf,
    /// Evaluation grid JSON ({"conditions": [...]}).
    #[arg(long)]
    grid: PathBuf,
    /// Output base path; writes <out>.csv and <out>.json.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
pub(crate) struct InferArgs {
    #[arg(long)]
    ckpt: PathBuf,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Directory for per-(module, map) flow renderings.
    #[arg(long)]
    dump_maps: Option<PathBuf>,
    /// Magnitude gain for map rendering.
    #[arg(long, default_value_t = 4.0)]
    gain: f64,
    /// Zero selected hallucination outputs, e.g. `all:1`, `all:1,2`, `3:2`;
    /// `none` keeps everything.
    #[arg(long, default_value = "none")]
    mask: String,
}

#[derive(Args)]
pub(crate) struct ParamsArgs {
    /// Model config JSON (either a bare architecture config or a full
    /// training config).
    #[arg(long)]
    config: PathBuf,
    /// Count with intermediate HR heads bypassed.
    #[arg(long)]
    test_bypass: bool,
}

#[derive(Args)]
pub(crate) struct AblateArgs {
    /// Grid spec, e.g. `maps=0..3,modules=0,1,4,8,12`.
    #[arg(long)]
    grid: String,
    /// Ablation config JSON (training base + eval data + per-cell budget).
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Degrade(args) => commands::degrade::run(args),
        Command::Train(args) => commands::train::run(args),
        Command::Eval(args) => commands::eval::run(args),
        Command::Infer(args) => commands::infer::run(args),
        Command::Params(args) => commands::params::run(args),
        Command::Ablate(args) => commands::ablate::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

