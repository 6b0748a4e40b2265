//! Command-line driver: parse, encode, explore and check terms.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use csp2ccs::Coordinator;

use crate::output::Failure;

#[derive(Parser, Debug)]
#[command(name = "csp2ccs", version, about = "Encode CSP terms into asynchronous name-passing CCS and check the encodings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub shared: Shared,
}

#[derive(Args, Debug)]
pub struct Shared {
    /// Coordinator of the encoding. Defaults to central, or to both for `corpus`.
    #[arg(long, value_enum, global = true)]
    pub coordinator: Option<CoordinatorArg>,
    /// Maximum number of states explored per graph.
    #[arg(long, global = true, default_value_t = 50_000)]
    pub budget: usize,
    /// Write the explored graph in Graphviz format.
    #[arg(long, global = true, value_name = "PATH")]
    pub dot: Option<PathBuf>,
    /// Write a JSON report.
    #[arg(long, global = true, value_name = "PATH")]
    pub report: Option<PathBuf>,
    /// JSON list of `{"id", "term"}` objects replacing the built-in corpus.
    #[arg(long, global = true, value_name = "PATH")]
    pub seed_corpus: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CoordinatorArg {
    Central,
    Decentral,
}

impl From<CoordinatorArg> for Coordinator {
    fn from(c: CoordinatorArg) -> Self {
        match c {
            CoordinatorArg::Central => Coordinator::Central,
            CoordinatorArg::Decentral => Coordinator::Decentral,
        }
    }
}

#[derive(Args, Debug)]
pub struct Input {
    /// Term text; `-` reads standard input.
    #[arg(required_unless_present = "file", conflicts_with = "file")]
    pub term: Option<String>,
    /// Read the term from a file.
    #[arg(long, short, value_name = "PATH")]
    pub file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse a term and print it back in normal form.
    Parse {
        #[command(flatten)]
        input: Input,
        /// Read a target term instead of a source term.
        #[arg(long)]
        target: bool,
    },
    /// Print the encoding of a source term.
    Encode {
        #[command(flatten)]
        input: Input,
    },
    /// Explore the reduction graph of an encoding and print its statistics.
    Explore {
        #[command(flatten)]
        input: Input,
        /// Explore the source term's own transition graph instead.
        #[arg(long)]
        source: bool,
    },
    /// Check criteria and equivalences for one term.
    Check {
        #[command(flatten)]
        input: Input,
        /// Checks to run: `bisim`, `coupled`, a criterion key, `claimed` or
        /// `all`. Defaults to the criteria the coordinator claims.
        #[arg(long = "check", short, value_delimiter = ',', value_name = "NAME")]
        checks: Vec<String>,
    },
    /// Check every term of the corpus.
    Corpus {
        /// Same as for `check`.
        #[arg(long = "check", short, value_delimiter = ',', value_name = "NAME")]
        checks: Vec<String>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(output::EXIT_INPUT) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => output::EXIT_INPUT,
            Failure::Io { .. } => output::EXIT_IO,
        }
    }
}
