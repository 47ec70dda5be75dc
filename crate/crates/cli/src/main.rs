mod repl;
mod run;

use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;

/// Prolog interpreter: batch queries or an interactive top level.
#[derive(Parser, Debug)]
#[command(name = "pebble", version)]
pub struct Args {
    /// Program file to load before querying (repeatable)
    #[arg(long = "consult", value_name = "FILE")]
    consult: Vec<String>,

    /// Run this goal and exit instead of starting the REPL
    #[arg(long, value_name = "TEXT")]
    goal: Option<String>,

    /// Stop after this many answers (default: all)
    #[arg(long, value_name = "N")]
    answers: Option<usize>,

    /// Inference budget per answer request
    #[arg(long, value_name = "N")]
    limit: Option<u64>,

    /// Seed for random/1 and friends
    #[arg(long, value_name = "N")]
    seed: Option<u64>,

    /// Record the derivation tree of --goal to this file (.dot for DOT, otherwise JSON)
    #[arg(long, value_name = "OUT", requires = "goal")]
    tree: Option<PathBuf>,

    /// Answer cap for --tree
    #[arg(long, value_name = "N", default_value_t = 10)]
    tree_answers: usize,

    /// Quote atoms in answers where needed
    #[arg(long)]
    quoted: bool,

    /// JSON image of a virtual file system for the os predicates and --consult
    #[arg(long, value_name = "FIXTURE")]
    vfs: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    ExitCode::from(run::main(args))
}
