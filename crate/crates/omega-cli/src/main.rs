//! `omega` binary: stress-based graph layout with low-rank resistance
//! distances. Exit codes: 0 success, 1 input error, 2 numerical failure,
//! 3 cap/limit violation.

use clap::Parser;

use omega::Error;
use omega_cli::{bench, run};

#[derive(Debug, Parser)]
#[command(
    name = "omega",
    version,
    about = "Stress-based graph layout with low-rank resistance distances"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Subcommand)]
enum Command {
    /// Compute a layout and write coordinates, SVG, metrics, and metadata.
    Run(run::RunArgs),
    /// Experiment harness over the built-in corpora.
    Bench(bench::BenchArgs),
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Usage errors are input errors (exit 1); --help/--version exit 0.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let result = match cli.command {
        Command::Run(args) => run::execute(&args),
        Command::Bench(args) => bench::execute(&args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        let code = match e {
            Error::InvalidInput(_) => 1,
            Error::Numerical(_) => 2,
            Error::LimitExceeded(_) => 3,
        };
        std::process::exit(code);
    }
}
