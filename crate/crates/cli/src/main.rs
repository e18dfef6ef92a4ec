//! `monoid`: command-line front end for the special-monoids library.
//!
//! Artifacts go to stdout or `--out`; diagnostics go to stderr as one JSON
//! object per line. Exit codes: 0 success, 1 verification failure, 2 input
//! error, 3 budget exhaustion (partial artifacts are still written).

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Failure;

#[derive(Parser, Debug)]
#[command(name = "monoid", version, about = "Rewriting, units and Bass–Serre constructions for monoid presentations")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Step budget for searches and completion.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub budget: u64,
    /// Ball radius for graph constructions.
    #[arg(long, global = true)]
    pub radius: Option<usize>,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Alphabet order override, letters separated by spaces.
    #[arg(long, global = true)]
    pub order: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Dot,
    Text,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    FreeProduct,
    Amalgam,
    OttoPride,
    Hnn,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Emit {
    Dot,
    Json,
    Matrix,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpecialEmit {
    Units,
    RightUnits,
    Delta,
    All,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    Shortest,
    Longest,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse a presentation and print it back.
    Parse {
        #[arg(long)]
        presentation: PathBuf,
    },
    /// Knuth–Bendix completion under shortlex.
    Complete {
        #[arg(long, alias = "system")]
        presentation: PathBuf,
    },
    /// Normal form of a word under the oriented relations.
    Rewrite {
        #[arg(long, alias = "presentation")]
        system: PathBuf,
        #[arg(long)]
        word: String,
        /// Complete the system first.
        #[arg(long)]
        complete: bool,
    },
    /// Decide whether two words are equal.
    Equal {
        #[arg(long)]
        presentation: PathBuf,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
    },
    /// Units group, right units and delta of a special presentation.
    AnalyzeSpecial {
        #[arg(long)]
        presentation: PathBuf,
        #[arg(long, value_enum, default_value_t = SpecialEmit::All)]
        emit: SpecialEmit,
        #[arg(long, value_enum, default_value_t = Bound::Shortest)]
        bound: Bound,
    },
    /// Ball in the right Cayley digraph.
    Cayley(BallArgs),
    /// Strongly connected components of a Cayley ball.
    Condense(BallArgs),
    /// Check that the interior condensation is a rooted tree with unique entrances.
    CheckTree(BallArgs),
    /// Build a free product, amalgam, Otto-Pride or HNN presentation.
    Construct {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        spec: PathBuf,
    },
    /// Truncated Bass–Serre tree or forest with acyclicity certificates.
    BassSerre(GraphArgs),
    /// Cellular chains of a Cayley ball.
    Chain {
        #[command(flatten)]
        ball: BallArgs,
        /// Restrict to interior vertices before exporting.
        #[arg(long)]
        interior: bool,
    },
    /// Homology of a chain complex given by boundary matrices.
    Homology {
        /// Triplet files for `d_1, d_2, ...`; `d_k` maps `C_k` to `C_{k-1}`.
        #[arg(long = "boundary", required = true)]
        boundaries: Vec<PathBuf>,
        /// Also check exactness of the augmented complex.
        #[arg(long)]
        augmented: bool,
    },
    /// Check the derivation rule and the left inverse of the boundary map.
    VerifyDerivations {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
}

#[derive(Args, Debug, Clone)]
pub struct BallArgs {
    #[arg(long)]
    pub presentation: PathBuf,
    /// Interior margin; defaults to the longest relation side.
    #[arg(long)]
    pub margin: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct GraphArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long)]
    pub spec: PathBuf,
    /// Pairs of elements instead of elements (the forest construction).
    #[arg(long)]
    pub two_sided: bool,
    /// Extra radius of the element ball beyond the interior.
    #[arg(long)]
    pub slack: Option<usize>,
    #[arg(long, value_enum, default_value_t = Emit::Json)]
    pub emit: Emit,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(artifact) => match output::write(&cli.global, &artifact.text) {
            Ok(()) => {
                for d in &artifact.notes {
                    output::diagnostic("note", d);
                }
                ExitCode::from(artifact.status)
            }
            Err(f) => f.report(),
        },
        Err(f) => f.report(),
    }
}

impl Failure {
    fn report(self) -> ExitCode {
        output::diagnostic("error", &self.to_json());
        ExitCode::from(self.code)
    }
}
