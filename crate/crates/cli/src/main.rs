//! `pvw`: evaluate, check, audit and transform computations.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::Failure;

#[derive(Parser, Debug)]
#[command(name = "pvw", version, about = "Approximate computations and proof transformation")]
struct Cli {
    /// Definitions file of `(def NAME DEF)` forms, added to the library names.
    #[arg(long, global = true)]
    defs: Option<PathBuf>,

    /// Write the JSON report here instead of standard error.
    #[arg(long, global = true)]
    json: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Build a computation for a term.
    Eval {
        #[arg(long)]
        term: String,
        #[arg(long, default_value = "(env)")]
        env: String,
        /// `exact` or `demand:N`.
        #[arg(long, default_value = "exact")]
        mode: String,
        /// Write the computation here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a computation or a proof.
    Check {
        #[arg(long, conflicts_with = "proof", required_unless_present = "proof")]
        comp: Option<PathBuf>,
        #[arg(long)]
        proof: Option<PathBuf>,
        #[arg(long = "const-C", default_value_t = 8)]
        const_c: u64,
    },
    /// Structural audits and the size bound of a computation.
    Audit {
        #[arg(long)]
        comp: PathBuf,
        #[arg(long = "const-C", default_value_t = 8)]
        const_c: u64,
    },
    /// Carry a conclusion across a proof.
    Transform {
        #[arg(long)]
        proof: PathBuf,
        #[arg(long)]
        comp: PathBuf,
        #[arg(long, value_enum, default_value_t = Dir::Fwd)]
        direction: Dir,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Fail with exit code 4 when a budget precondition does not hold.
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The counterexample fixtures and growth table.
    Beckmann {
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Comma-separated numeral lengths.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8")]
        lens: Vec<usize>,
        /// Directory for the generated computations and proofs.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Dir {
    Fwd,
    Bwd,
}

#[derive(Args, Debug, Clone, Copy)]
struct BudgetArgs {
    #[arg(long = "budget-U")]
    budget_u: Option<usize>,
    #[arg(long = "budget-B")]
    budget_b: Option<usize>,
    #[arg(long = "budget-V")]
    budget_v: Option<usize>,
    #[arg(long = "const-C")]
    const_c: Option<u64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(commands::EXIT_PARSE) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, message }) => {
            eprintln!("pvw: {message}");
            ExitCode::from(code)
        }
    }
}
