//! Command-line front end for `groupoid-lab`.

pub mod commands;
pub mod error;
pub mod input;
pub mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use groupoid_lab::moments::DEFAULT_MAX_WORDS;
use groupoid_lab::operators::DEFAULT_MAX_BASIS;
use groupoid_lab::Error as LibError;

pub use error::CliError;
pub use report::Report;

use input::LabelingChoice;

#[derive(Debug, Parser)]
#[command(name = "groupoid-lab", version, about = "Exact computations on labeled graph groupoids")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Emit the report as JSON.
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,

    /// Emit vertex,coefficient rows (diagonal results only).
    #[arg(long, global = true)]
    pub csv: bool,

    /// Cap on enumerated words.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_WORDS, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_words: u64,

    /// Cap on the truncated basis size.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_BASIS as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_basis: u64,
}

#[derive(Debug, Clone, Args)]
pub struct GraphArgs {
    /// Graph file (JSON).
    #[arg(long)]
    pub graph: String,

    #[arg(long, value_enum, default_value_t = LabelingChoice::Auto)]
    pub labeling: LabelingChoice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Reduction,
    Balance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormulaArg {
    Direct,
    Wc,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WordSetArg {
    /// Words reducing to a vertex.
    Moment,
    /// Balanced loop words.
    Balance,
    /// Vertex-reducing words in a single base edge.
    Cumulant,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Diagonal moment E(T_G^n).
    Moments {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Reduction)]
        mode: ModeArg,
        /// Also run the operator oracle and fail on mismatch.
        #[arg(long)]
        verify: bool,
    },
    /// E(T_G^n) read off the truncated operator matrix.
    Oracle {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        n: usize,
        /// Truncation length (defaults to n).
        #[arg(long)]
        max_len: Option<usize>,
    },
    /// Free cumulant k_n(T_G, ..., T_G).
    Cumulants {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = FormulaArg::Direct)]
        formula: FormulaArg,
    },
    /// Joint moment E(T_i1 ... T_in), or the joint cumulant.
    Joint {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        indices: Vec<i32>,
        #[arg(long)]
        cumulant: bool,
        #[arg(long)]
        verify: bool,
    },
    /// Mixed joint cumulants of two label families.
    Freeness {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        families: Vec<i32>,
        #[arg(long, default_value_t = 4)]
        max_n: usize,
    },
    /// Bounded-depth fractaloid test.
    Fractaloid {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// Automaton tree as GraphViz DOT.
    Tree {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Root vertex (defaults to the first vertex).
        #[arg(long)]
        root: Option<String>,
    },
    /// Number of balanced label words of a given length.
    Lattice {
        #[arg(long)]
        max_label: u32,
        #[arg(long)]
        length: u32,
    },
    /// Noncrossing partitions of {1..n} with their Moebius values.
    Nc {
        #[arg(long)]
        n: usize,
    },
    /// Export a word set as signed edge ids.
    Words {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = WordSetArg::Moment)]
        set: WordSetArg,
    },
}

/// Runs one command. Budget exhaustion returns the partial report inside the
/// error.
pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let mut report = Report::new(commands::name(&cli.command));
    match commands::dispatch(cli, &mut report) {
        Ok(()) => Ok(report),
        Err(CliError::Lib(e @ LibError::BudgetExceeded { .. })) => {
            report.truncated = true;
            report.result = serde_json::Value::Null;
            report.text.clear();
            report.rows = None;
            report.note(e.to_string());
            Err(CliError::Budget { message: e.to_string(), report: Box::new(report) })
        }
        Err(e) => Err(e),
    }
}

/// Renders a report in the format selected on the command line.
pub fn render(cli: &Cli, report: &Report) -> Result<String, CliError> {
    if cli.json {
        Ok(report.to_json())
    } else if cli.csv {
        report
            .to_csv()
            .ok_or_else(|| CliError::Invalid(format!("`{}` has no vertex,coefficient output", report.command)))
    } else {
        Ok(report.to_text())
    }
}

/// Caps worker threads from `GROUPOID_LAB_THREADS`.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("GROUPOID_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Invalid(format!("GROUPOID_LAB_THREADS must be a positive integer, got `{v}`")))?;
    // a pool that is already set up keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}
