use std::process::ExitCode;

use clap::Parser;
use funeq_cli::commands::{self, ApproxArgs, BenchArgs, CheckArgs, OracleArgs, SolveArgs};

/// Fixed points of two-term linear functional-composition equations on [0, 1].
#[derive(Parser)]
#[command(name = "funeq", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Subcommand)]
enum Command {
    /// Print the contraction certificate of a spec file
    Check(CheckArgs),
    /// Picard-iterate to the fixed point
    Solve(SolveArgs),
    /// Quadratic approximation for the linear-coefficient family
    Approx(ApproxArgs),
    /// Monte-Carlo absorption estimates cross-checked against the solver
    Oracle(OracleArgs),
    /// Naive-recursion cost growth vs grid iteration
    Bench(BenchArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // usage errors are invalid input (1); --help and --version are not
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let result = match &cli.command {
        Command::Check(args) => commands::cmd_check(args),
        Command::Solve(args) => commands::cmd_solve(args),
        Command::Approx(args) => commands::cmd_approx(args),
        Command::Oracle(args) => commands::cmd_oracle(args),
        Command::Bench(args) => commands::cmd_bench(args),
    };

    match result {
        Ok((report, exit)) => {
            println!("{}", report.to_json());
            ExitCode::from(exit)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit)
        }
    }
}
