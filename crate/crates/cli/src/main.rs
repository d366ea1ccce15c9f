//! `teamform`: analyse team formation models from the command line.
//!
//! Exit status: 0 on success, 1 when `verify` finds a failing check, 2 for
//! usage, schema and model errors, 3 when a capacity guard is exceeded.

mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use teamform_core::{builtin_example, load_model, Error, Model};

#[derive(Parser, Debug)]
#[command(
    name = "teamform",
    version,
    about = "Stability analysis of team formation models"
)]
struct Cli {
    #[command(flatten)]
    source: Source,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    output: Format,

    /// Also report activity-relabeling classes.
    #[arg(long, global = true)]
    classes: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Source {
    /// Model file (JSON).
    #[arg(long, global = true, conflicts_with = "example")]
    model: Option<PathBuf>,

    /// Built-in example (see `teamform examples`).
    #[arg(long, global = true)]
    example: Option<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Notion {
    Mts,
    Cs,
    Farsighted,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Scheme {
    Uniform,
    UniformDestructive,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exhaustive,
    Greedy,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Count feasible, maximal and maximum-project states.
    Enumerate,
    /// Static stability: myopic team-wise, coalitional or farsighted.
    Stability {
        #[arg(long, value_enum)]
        notion: Notion,
        /// Switching cost per abandoned project (e.g. 1/2, 0.25, 1).
        #[arg(long)]
        cost: Option<String>,
        /// Farsighted search mode; exhaustive when the state space is small.
        #[arg(long, value_enum)]
        mode: Option<Mode>,
    },
    /// Stochastically stable states via minimum-resistance trees.
    Stochastic {
        /// Use coalition-wise dynamics with this switching cost.
        #[arg(long)]
        cost: Option<String>,
    },
    /// Exact stationary distribution of the perturbed chain.
    Stationary {
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, value_enum)]
        scheme: Option<Scheme>,
    },
    /// Monte Carlo simulation of the perturbed dynamics.
    Simulate {
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        steps: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum)]
        scheme: Option<Scheme>,
        /// Ticks discarded before counting (default: 1% of steps).
        #[arg(long)]
        burn_in: Option<u64>,
        #[arg(long, default_value_t = 1)]
        replicas: usize,
        /// Report the total-variation distance to the exact distribution.
        #[arg(long)]
        compare: bool,
    },
    /// Check the structural theorems on the model.
    Verify,
    /// List built-in examples, or print one as a model file.
    Examples { name: Option<String> },
}

pub struct Outcome {
    pub text: String,
    pub json: serde_json::Value,
    pub status: u8,
}

fn exit_code(e: &Error) -> u8 {
    if e.is_capacity() {
        3
    } else {
        2
    }
}

fn load(source: &Source) -> Result<Model, Error> {
    match (&source.model, &source.example) {
        (Some(path), _) => load_model(path),
        (None, Some(name)) => builtin_example(name),
        (None, None) => Err(Error::Schema(
            "one of --model or --example is required".into(),
        )),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Examples { name } => commands::examples(name.as_deref()),
        command => load(&cli.source).and_then(|model| commands::run(&model, command, cli.classes)),
    };
    match result {
        Ok(out) => {
            match cli.output {
                Format::Text => print!("{}", out.text),
                Format::Json => println!("{}", out.json),
            }
            ExitCode::from(out.status)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
