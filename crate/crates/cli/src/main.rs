//! `dfma`: frequency-matching analysis for leaky integrate-and-fire networks.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dfma::spectrum::{Preprocess, Reduce, Window};
use dfma::{Error, ErrorCategory};

use crate::output::Sink;

#[derive(Parser)]
#[command(name = "dfma", version, about = "Dataset/neuron frequency-matching analysis")]
struct Cli {
    /// Output path for the subcommand's artifact (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for synthetic-data generation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Suppress human-readable summaries.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Discriminative-index spectrum of a dataset's training split.
    Di(DiArgs),
    /// Sampled DC-normalized LIF power template as CSV.
    Template {
        #[arg(long)]
        beta: f64,
        /// DFT length L.
        #[arg(long = "len", short = 'L')]
        len: usize,
    },
    /// FMS curve over a β sweep.
    Fms {
        /// DI spectrum JSON.
        #[arg(long)]
        di: PathBuf,
        /// Candidates as start:stop:step (inclusive).
        #[arg(long, default_value = "0.05:0.95:0.05")]
        betas: String,
    },
    /// Reference boundary β† from an FMS curve.
    SelectBeta {
        /// FMS curve CSV.
        #[arg(long)]
        fms: PathBuf,
        /// Upper β of the under-filter regime.
        #[arg(long, default_value_t = dfma::matching::DEFAULT_UNDER_THRESHOLD)]
        under_threshold: f64,
    },
    /// Half-power cutoff of a leak, optionally quantized to a grid.
    Bandwidth {
        #[arg(long)]
        beta: f64,
        #[arg(long = "len", short = 'L')]
        len: Option<usize>,
    },
    /// Drives a single LIF neuron with an input sequence.
    Simulate {
        /// Neuron configuration JSON.
        #[arg(long)]
        config: PathBuf,
        /// Input CSV: one value per row, optional header.
        #[arg(long)]
        input: PathBuf,
        /// Number of timesteps T.
        #[arg(long, short = 'T')]
        steps: usize,
        #[arg(long, default_value_t = 0.0)]
        u0: f64,
    },
    /// Spike-rate validity flag for a β sweep.
    Validity(ValidityArgs),
    /// Theoretical energy of an architecture description.
    Energy {
        #[arg(long)]
        arch: PathBuf,
        /// Energy per multiply-accumulate, pJ.
        #[arg(long, default_value_t = 4.6)]
        e_mac: f64,
        /// Energy per accumulate, pJ.
        #[arg(long, default_value_t = 0.9)]
        e_ac: f64,
    },
    /// Converts raw point-cloud recordings into fixed-size tensors.
    Preprocess(PreprocessArgs),
    /// Radial hard low-pass filter over every 2D map of a tensor.
    Lowpass {
        #[arg(long)]
        input: PathBuf,
        /// Cutoff radius in cycles per sample.
        #[arg(long)]
        nu: f64,
    },
    /// Writes a seeded two-or-more-class tone dataset.
    Synth(SynthArgs),
}

#[derive(Args)]
struct DiArgs {
    /// Dataset manifest.json.
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long, default_value = "train")]
    split: String,
    #[arg(long, default_value_t = Reduce::Mean)]
    reduce: Reduce,
    #[arg(long, default_value_t = Preprocess::Demean)]
    preproc: Preprocess,
    #[arg(long, default_value_t = Window::Rect)]
    window: Window,
    #[arg(long, default_value_t = dfma::di::DEFAULT_EPSILON)]
    epsilon: f64,
    /// Report rank agreement across mean/rms/l1 reductions.
    #[arg(long)]
    robustness: bool,
}

#[derive(Args)]
struct ValidityArgs {
    /// Rate report JSON `{"layer": {"β": rate}}`.
    #[arg(long)]
    rates: PathBuf,
    #[arg(long, default_value_t = 0.01)]
    gamma_min: f64,
    #[arg(long, default_value_t = 0.99)]
    gamma_max: f64,
    #[arg(long, default_value_t = 20.0)]
    kappa: f64,
    #[arg(long, default_value_t = 1e-9)]
    eps: f64,
}

#[derive(Args)]
struct PreprocessArgs {
    /// Directory with manifest.json listing recording CSVs.
    #[arg(long)]
    raw: PathBuf,
    #[arg(long, default_value_t = 4)]
    fmax: usize,
    #[arg(long, default_value_t = 64)]
    pmax: usize,
    /// Standardize channels with train-split statistics.
    #[arg(long)]
    normalize: bool,
    /// `map` (f_max × 64 × 64) or `points` (f_max × p_max × 4).
    #[arg(long, default_value = "map")]
    layout: String,
    #[arg(long, default_value = "rowmajor")]
    shape: String,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long = "len", short = 'L', default_value_t = 16)]
    len: usize,
    /// Comma-separated tone bin per class.
    #[arg(long, default_value = "1,3", value_delimiter = ',')]
    bins: Vec<usize>,
    #[arg(long, default_value_t = 24)]
    per_class: usize,
    #[arg(long, default_value_t = 0.3)]
    noise: f64,
    /// Every n-th sample round goes to the test split (0 = none).
    #[arg(long, default_value_t = 0)]
    test_every: usize,
}

fn configure_threads() -> dfma::Result<()> {
    let Ok(raw) = std::env::var("DFMA_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Error::Parameter(format!("DFMA_THREADS must be a count, got '{raw}'")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Parameter(e.to_string()))?;
    }
    Ok(())
}

fn dispatch(cli: Cli) -> dfma::Result<()> {
    configure_threads()?;
    let sink = Sink {
        out: cli.out,
        quiet: cli.quiet,
    };
    match cli.command {
        Command::Di(a) => commands::di(&sink, a),
        Command::Template { beta, len } => commands::template(&sink, beta, len),
        Command::Fms { di, betas } => commands::fms(&sink, &di, &betas),
        Command::SelectBeta {
            fms,
            under_threshold,
        } => commands::select_beta(&sink, &fms, under_threshold),
        Command::Bandwidth { beta, len } => commands::bandwidth(&sink, beta, len),
        Command::Simulate {
            config,
            input,
            steps,
            u0,
        } => commands::simulate(&sink, &config, &input, steps, u0),
        Command::Validity(a) => commands::validity(&sink, a),
        Command::Energy { arch, e_mac, e_ac } => commands::energy(&sink, &arch, e_mac, e_ac),
        Command::Preprocess(a) => commands::preprocess(&sink, a),
        Command::Lowpass { input, nu } => commands::lowpass(&sink, &input, nu),
        Command::Synth(a) => commands::synth(&sink, cli.seed, a),
    }
}

fn exit_code(err: &Error) -> u8 {
    match err.category() {
        ErrorCategory::Usage => 2,
        ErrorCategory::Data => 3,
        ErrorCategory::Domain => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dfma: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
