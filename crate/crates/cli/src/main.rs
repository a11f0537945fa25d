//! `dsemi`: batch front end for the D-semianalytic engine.
//!
//! Exit codes: 0 success, 1 counterexample, 2 precision exhausted,
//! 3 input error, 4 unsupported fragment or budget exceeded.

mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "dsemi", version, about = "Symbolic engine for D-semianalytic formulas over Q((w))")]
pub struct Cli {
    #[command(flatten)]
    pub opts: Opts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Opts {
    /// Starting precision for evaluation.
    #[arg(long, global = true, default_value_t = 16)]
    pub precision: i64,
    /// Precision at which doubling stops.
    #[arg(long, global = true, default_value_t = 256)]
    pub max_precision: i64,
    /// Oracle sample count.
    #[arg(long, global = true, default_value_t = 500)]
    pub samples: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Series registry file; `exptau` is always available.
    #[arg(long, global = true)]
    pub series: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a formula at a point, doubling precision as needed.
    Eval {
        formula: String,
        /// Point literal, e.g. "(1, w^2)".
        #[arg(long)]
        point: String,
        /// Coordinate order; defaults to the sorted free variables.
        #[arg(long, num_args = 1..)]
        vars: Vec<String>,
        /// Witness terms tried first for an outer `exists`, one per bound variable.
        #[arg(long, num_args = 1..)]
        hint: Vec<String>,
        /// Random candidates tried for an outer `exists`.
        #[arg(long, default_value_t = 64)]
        witness_budget: usize,
    },
    /// Sample-based equivalence of two formulas.
    CheckEquiv { left: String, right: String },
    /// Push negations into the atoms.
    Positivize { formula: String },
    /// Disjunction of basic conjunctions.
    BasicUnion {
        formula: String,
        #[arg(long, default_value_t = 4096)]
        size_cap: usize,
    },
    /// Chart maps of a blow-up file.
    BlowupCharts { blowup: String },
    /// Pull an ambient formula back to chart `j`.
    Pullback {
        formula: String,
        #[arg(long)]
        blowup: String,
        #[arg(long)]
        chart: usize,
    },
    /// Image off the centre of one formula per chart.
    ImageOffCenter {
        #[arg(long)]
        blowup: String,
        #[arg(required = true)]
        charts: Vec<String>,
    },
    /// Special-set encoding of a basic conjunction on a graph.
    GraphEncode { basic: String },
    /// Image of a special set through a flattening datum.
    QePipeline {
        datum: String,
        /// Formula the image is checked against.
        #[arg(long)]
        compare: Option<String>,
    },
    /// Remove the occurrence `D(p, q)` filling the hole of `psi`.
    DElim {
        psi: String,
        #[arg(long, value_enum)]
        case: DivCase,
        #[arg(long, default_value = "v")]
        hole: String,
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
        #[arg(long)]
        h: String,
    },
    /// Image of the special set of a flat admissible map.
    FlatImage {
        map: String,
        #[arg(long)]
        compare: Option<String>,
    },
    /// Reduction of an integral polynomial modulo the maximal ideal.
    Reduce {
        poly: String,
        #[arg(long, num_args = 1..)]
        vars: Vec<String>,
    },
    /// Residue-level image of the special set of a map file.
    Chevalley { map: String },
    /// Reduced Gröbner basis of rational polynomials.
    Gb {
        #[arg(required = true)]
        polys: Vec<String>,
        #[arg(long, num_args = 1.., required = true)]
        vars: Vec<String>,
        #[arg(long, value_enum, default_value_t = Order::Grevlex)]
        order: Order,
        /// Eliminate the first `k` variables.
        #[arg(long)]
        eliminate: Option<usize>,
        /// Saturate by this polynomial.
        #[arg(long)]
        saturate: Option<String>,
    },
    /// Checks on the surface (s, st, s exptau(t)).
    Osgood {
        #[arg(long, value_enum)]
        facts: Facts,
        #[arg(long, default_value_t = 200)]
        count: usize,
        /// Working precision of the points.
        #[arg(long, default_value_t = 64)]
        n: i64,
        /// Degree for the Zariski check.
        #[arg(long, default_value_t = 3)]
        degree: u32,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivCase {
    /// `p = q h`
    Phq,
    /// `q = h p`
    Qhp,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Grevlex,
    Lex,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Facts {
    Membership,
    Zariski,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
