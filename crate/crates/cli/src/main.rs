//! `hapax`: word-frequency statistics, urn expectations and hapax-rate model
//! fits from the command line.
//!
//! Exit codes: 0 success, 2 usage or argument error (including missing
//! files), 3 malformed input data, 4 numeric failure.

mod commands;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};
use hapax::Error;

use input::{Encoding, InputKind};
use output::Format;

#[derive(Parser, Debug)]
#[command(name = "hapax", version, about = "Word-frequency statistics and hapax-rate models")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Significant digits of numeric output.
    #[arg(long, global = true, default_value_t = 6, value_parser = clap::value_parser!(u8).range(1..=17))]
    precision: u8,

    /// Output format (defaults to tsv for `fit`, csv elsewhere).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// Raw text, frequency list (word<TAB>count) or spectrum CSV (k,v_k).
    #[arg(long)]
    pub input: PathBuf,

    #[arg(long, value_enum, default_value = "auto")]
    pub input_kind: InputKind,

    /// Character encoding of raw text.
    #[arg(long, value_enum, default_value = "utf8")]
    pub encoding: Encoding,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Frequency spectrum of a text or frequency list.
    Spectrum {
        #[command(flatten)]
        input: InputArgs,
        /// Write `<name>.spectrum.*` (and `<name>.freq.tsv` for texts) here
        /// instead of printing the spectrum.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Fit hapax-rate models to the smoothed vocabulary curve.
    Fit(FitArgs),
    /// Urn-model expectations E[V], E[V_k], E[R_f] at sample size n.
    Urn {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 10)]
        kmax: u64,
        #[arg(long, default_value_t = 10)]
        fmax: u64,
    },
    /// Monte Carlo samples of V and V_1 from an urn or a memoryless source.
    Simulate(SimulateArgs),
    /// Smoothed vocabulary and hapax curves of a spectrum.
    Smooth {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 50)]
        grid_per_decade: usize,
    },
    /// Hapax rate of a Davis model mixed with the maximal model.
    MixtureDemo {
        #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, default_value_t = 1e-3)]
        lambda: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        u_min: f64,
        #[arg(long, default_value_t = 30.0, allow_negative_numbers = true)]
        u_max: f64,
        #[arg(long, default_value_t = 301)]
        steps: usize,
    },
    /// Ideal Zipf-law summary from the number of types or the peak share.
    #[command(group(ArgGroup::new("source").required(true).args(["types", "peak_share"])))]
    Ideal {
        #[arg(long)]
        types: Option<f64>,
        /// Relative frequency f_1/n of the most frequent type.
        #[arg(long)]
        peak_share: Option<f64>,
    },
}

#[derive(Args, Debug)]
pub struct FitArgs {
    /// One or more inputs; each is fitted separately.
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,

    #[arg(long, value_enum, default_value = "auto")]
    pub input_kind: InputKind,

    #[arg(long, value_enum, default_value = "utf8")]
    pub encoding: Encoding,

    /// Comma-separated families among constant, davis, linear, logistic.
    #[arg(long, value_delimiter = ',', default_value = "constant,davis,linear,logistic")]
    pub families: Vec<String>,

    #[arg(long, default_value_t = 50)]
    pub grid_per_decade: usize,

    #[arg(long, default_value_t = 1.0)]
    pub n_min: f64,

    #[arg(long, default_value_t = 200)]
    pub max_iterations: usize,

    /// Write hapax, vocabulary and rank plot data per input here.
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("source").required(true).args(["input", "dist"])))]
pub struct SimulateArgs {
    /// Spectrum source (text, frequency list or spectrum CSV).
    #[arg(long)]
    pub input: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "auto")]
    pub input_kind: InputKind,

    #[arg(long, value_enum, default_value = "utf8")]
    pub encoding: Encoding,

    /// Comma-separated type probabilities of a memoryless source.
    #[arg(long, value_delimiter = ',')]
    pub dist: Option<Vec<f64>>,

    /// Sample i.i.d. from the relative frequencies of the input instead of
    /// drawing without replacement.
    #[arg(long)]
    pub memoryless: bool,

    #[arg(long)]
    pub n: u64,

    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub replicas: u64,

    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Argument(_) | Error::Io(_) => 2,
        Error::InputEncoding { .. } | Error::Malformed { .. } => 3,
        Error::ModelViolation(_) | Error::NumericPrecision(_) | Error::DegenerateFit(_) => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let precision = cli.precision as usize;
    let result = match cli.command {
        Command::Spectrum { input, output_dir } => {
            commands::spectrum(&input, output_dir.as_deref(), cli.format.unwrap_or(Format::Csv))
        }
        Command::Fit(args) => commands::fit(&args, cli.format.unwrap_or(Format::Tsv), precision),
        Command::Urn { input, n, kmax, fmax } => {
            commands::urn(&input, n, kmax, fmax, cli.format.unwrap_or(Format::Csv), precision)
        }
        Command::Simulate(args) => commands::simulate(&args, cli.format.unwrap_or(Format::Csv), precision),
        Command::Smooth { input, grid_per_decade } => {
            commands::smooth(&input, grid_per_decade, cli.format.unwrap_or(Format::Csv), precision)
        }
        Command::MixtureDemo { alpha, lambda, u_min, u_max, steps } => {
            commands::mixture_demo(alpha, lambda, (u_min, u_max), steps, cli.format.unwrap_or(Format::Csv), precision)
        }
        Command::Ideal { types, peak_share } => {
            commands::ideal(types, peak_share, cli.format.unwrap_or(Format::Csv), precision)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hapax: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
