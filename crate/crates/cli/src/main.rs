//! `mlf`: arity inference, typechecking, reduction and the property suite
//! from the command line.
//!
//! Exit codes: 0 success, 1 judgement failure, 2 parse or usage error,
//! 3 fuel or search-bound exhaustion.

mod commands;
mod input;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mlf_kernel::{RuleSet, Strategy};

#[derive(Parser, Debug)]
#[command(name = "mlf", version, about = "Martin-Löf logical framework kernel")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Args, Debug, Clone)]
pub struct Flags {
    /// Signature to load: sig:sigma, sig:bool, sig:universe, sig:all or a
    /// file path. Repeatable; the signatures are merged.
    #[arg(long = "sig", global = true, value_name = "SIG")]
    pub sig: Vec<String>,
    /// Enabled rules, comma-separated: beta, eta, beta2, sig, sig:<name>, all.
    #[arg(long, global = true, default_value = "all")]
    pub rules: RuleSet,
    /// Step budget (normalize, trace) or node budget (sn).
    #[arg(long, global = true)]
    pub fuel: Option<usize>,
    /// Emit one JSON document on stdout.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Args, Debug, Clone)]
pub struct Subject {
    /// File holding the subject; `-` reads stdin.
    #[arg(value_name = "FILE")]
    pub file: Option<PathBuf>,
    /// The subject given inline instead of a file.
    #[arg(short = 'e', long = "expr", conflicts_with = "file")]
    pub expr: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Infer the arity of a term or kind under an arity context.
    Arity {
        /// Arity context (`x:0, f:(0,0)`) or a typed context (`assume x : K;`).
        context: PathBuf,
        #[command(flatten)]
        subject: Subject,
    },
    /// Infer the kind of a term, or check that a kind is well formed.
    Check {
        /// Typed context: `assume x : K;` lines.
        context: PathBuf,
        #[command(flatten)]
        subject: Subject,
    },
    /// Reduce to normal form.
    Normalize {
        #[command(flatten)]
        subject: Subject,
        #[command(flatten)]
        reduction: Reduction,
    },
    /// Reduce to normal form, printing every step.
    Trace {
        #[command(flatten)]
        subject: Subject,
        #[command(flatten)]
        reduction: Reduction,
    },
    /// Explore the whole reduction graph.
    Sn {
        #[command(flatten)]
        subject: Subject,
    },
    /// Run the lemma checkers on generated cases.
    Props {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Cases per lemma.
        #[arg(long, default_value_t = 1000)]
        cases: usize,
        /// Worker threads.
        #[arg(long)]
        jobs: Option<usize>,
        /// Only lemmas whose name starts with this prefix. Repeatable.
        #[arg(long = "only", value_name = "PREFIX")]
        only: Vec<String>,
        /// Also sweep every correct-arity subject up to this size.
        #[arg(long, value_name = "SIZE")]
        exhaustive: Option<usize>,
        /// Report wall-clock time (the output is then no longer reproducible).
        #[arg(long)]
        timing: bool,
        /// Print the inputs and outcome of one case instead.
        #[arg(long, value_names = ["LEMMA", "CASE"], num_args = 2)]
        replay: Option<Vec<String>>,
    },
    /// Translate a kind, or a typed context, to arities.
    Translate {
        #[command(flatten)]
        subject: Subject,
    },
}

#[derive(Args, Debug, Clone)]
pub struct Reduction {
    /// Arity context to check the subject against before reducing.
    #[arg(long = "ctx", value_name = "FILE")]
    pub context: Option<PathBuf>,
    #[arg(long, default_value = "outermost")]
    pub strategy: Strategy,
}

/// What a command prints and how it exits.
pub struct Report {
    pub code: u8,
    pub json: serde_json::Value,
    /// Human output for stdout.
    pub text: String,
    /// Human diagnostics for stderr.
    pub diag: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.flags.json;
    let report = commands::run(cli);
    let written = if json {
        writeln!(
            std::io::stdout(),
            "{}",
            serde_json::to_string_pretty(&report.json).expect("report serialises")
        )
    } else {
        write!(std::io::stdout(), "{}", report.text)
            .and_then(|_| std::io::stdout().flush())
            .and_then(|_| write!(std::io::stderr(), "{}", report.diag))
    };
    if written.is_err() {
        return ExitCode::from(2);
    }
    ExitCode::from(report.code)
}
