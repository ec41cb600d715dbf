//! The `intsys` command line.
//!
//! Exit status is 0 when the operation succeeds or the property holds, 1
//! when a property fails (the counterexample goes to stdout) and 2 on usage
//! or input errors.

mod commands;
pub mod files;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand};

pub use files::{relation_from_file, relation_to_file, RelationFile, StrategyFile, SystemFile};

#[derive(Debug, Parser)]
#[command(
    name = "intsys",
    version,
    about = "Interaction systems, simulations and a relational model of the differential λ-calculus"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: Global,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Width bound for `!`.
    #[arg(long, global = true, default_value_t = 2)]
    pub bound: usize,
    /// Largest number of actions a `⊸` or `!` state may have.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub cap: u128,
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for random runs.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Index `!` actions by every thread order instead of the sorted one.
    #[arg(long, global = true)]
    pub faithful: bool,
}

/// Systems, given as JSON files or built-in fixtures, in command-line order.
#[derive(Debug, Clone, Args)]
pub struct Systems {
    /// System files.
    #[arg(value_name = "SYSTEM")]
    pub files: Vec<PathBuf>,
    /// Built-in system: skip, abort, magic, stack, stack2 or four.
    #[arg(long = "fixture", value_name = "NAME")]
    pub fixtures: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct RelationChoice {
    /// Use the identity relation.
    #[arg(long, conflicts_with = "relation")]
    pub identity: bool,
    /// JSON list of `[left, right]` pairs.
    #[arg(long, value_name = "FILE")]
    pub relation: Vec<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TermInput {
    /// Typing context, e.g. `x : X -> X, y : X`.
    #[arg(long, default_value = "")]
    pub context: String,
    /// Base type interpretation `NAME=SYSTEM`, where SYSTEM is a fixture name
    /// or a file. Unlisted names get the first `--fixture`, else `stack`.
    #[arg(long = "valuation", value_name = "NAME=SYSTEM")]
    pub valuation: Vec<String>,
    /// Interpretation for base names not given by `--valuation`.
    #[arg(long = "fixture", value_name = "NAME")]
    pub fixtures: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Is the relation a simulation from the first system to the second?
    Check {
        #[command(flatten)]
        systems: Systems,
        #[command(flatten)]
        relation: RelationChoice,
    },
    /// Build the translation tables of a simulation.
    Synth {
        #[command(flatten)]
        systems: Systems,
        #[command(flatten)]
        relation: RelationChoice,
    },
    /// The largest simulation between two systems.
    Greatest {
        #[command(flatten)]
        systems: Systems,
    },
    /// Compose simulations `w1 → w2` and `w2 → w3` given as two relations.
    Compose {
        #[command(flatten)]
        systems: Systems,
        #[command(flatten)]
        relation: RelationChoice,
    },
    /// `w1 ⊗ w2`.
    Tensor {
        #[command(flatten)]
        systems: Systems,
    },
    /// `w1 ⊸ w2`.
    Lollipop {
        #[command(flatten)]
        systems: Systems,
    },
    /// `!w` at width `--bound`.
    Bang {
        #[command(flatten)]
        systems: Systems,
    },
    /// Turn a simulation `w1 ⊗ w2 → w3` into one `w1 → (w2 ⊸ w3)`.
    Curry {
        #[command(flatten)]
        systems: Systems,
        #[command(flatten)]
        relation: RelationChoice,
    },
    /// Turn a simulation `w1 → (w2 ⊸ w3)` into one `w1 ⊗ w2 → w3`.
    Uncurry {
        #[command(flatten)]
        systems: Systems,
        #[command(flatten)]
        relation: RelationChoice,
    },
    /// Check the comonad structure of `!` on a system.
    Laws {
        #[command(flatten)]
        systems: Systems,
        /// Cap intermediate widths instead of widening them.
        #[arg(long)]
        width: Option<usize>,
    },
    /// Print the type of a term.
    Typecheck {
        term: PathBuf,
        #[arg(long, default_value = "")]
        context: String,
    },
    /// Reduce a term to normal form, leftmost-outermost.
    Normalize {
        term: PathBuf,
        #[arg(long, default_value = "")]
        context: String,
        #[arg(long, default_value_t = crate::lambda::DEFAULT_MAX_STEPS)]
        max_steps: usize,
    },
    /// List the bounded denotation of a term.
    Denote {
        term: PathBuf,
        #[command(flatten)]
        input: TermInput,
    },
    /// Check that the denotation of a term is a simulation.
    VerifyCorrectness {
        term: PathBuf,
        #[command(flatten)]
        input: TermInput,
    },
    /// Compare the denotations of two terms.
    VerifyInvariance {
        redex: PathBuf,
        reduct: PathBuf,
        #[command(flatten)]
        input: TermInput,
    },
    /// Worked examples plus a seeded run over random systems.
    Examples {
        /// Number of random systems.
        #[arg(long, default_value_t = 50)]
        count: usize,
    },
}

/// Where a system comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    File(PathBuf),
    Fixture(String),
}

/// Outcome of a command, before it becomes an exit status.
#[derive(Debug)]
pub enum Status {
    Ok,
    Fails,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Input { path: String, message: String },
}

impl CliError {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

/// Runs the command line and returns the exit status.
pub fn cli_main<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match Cli::command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return 2;
        }
    };
    let order = matches
        .subcommand()
        .map(|(_, m)| source_order(m))
        .unwrap_or_default();
    match commands::run(&cli, order, out) {
        Ok(Status::Ok) => 0,
        Ok(Status::Fails) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

/// Files and fixtures interleaved as they appeared on the command line.
fn source_order(m: &ArgMatches) -> Vec<Source> {
    let mut tagged: Vec<(usize, Source)> = Vec::new();
    let present = |id: &str| m.ids().any(|i| i.as_str() == id);
    if !present("files") && !present("fixtures") {
        return Vec::new();
    }
    if present("files") {
        if let (Some(idx), Some(vals)) = (m.indices_of("files"), m.get_many::<PathBuf>("files")) {
            tagged.extend(idx.zip(vals).map(|(i, p)| (i, Source::File(p.clone()))));
        }
    }
    if present("fixtures") {
        if let (Some(idx), Some(vals)) =
            (m.indices_of("fixtures"), m.get_many::<String>("fixtures"))
        {
            tagged.extend(idx.zip(vals).map(|(i, f)| (i, Source::Fixture(f.clone()))));
        }
    }
    tagged.sort_by_key(|(i, _)| *i);
    tagged.into_iter().map(|(_, s)| s).collect()
}
