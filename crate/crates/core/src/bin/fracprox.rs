use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fracprox::cli;

/// Fractional-program solvers with a trace-level verification harness.
#[derive(Parser)]
#[command(name = "fracprox", version, about)]
struct Cli {
    /// Print the (resolved) config with all defaults explicit and exit.
    #[arg(long, global = true)]
    print_config: bool,

    /// Config used by --print-config when no subcommand is given.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured solver; write the CSV trace and JSON summary.
    Solve {
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
        /// Trace CSV output path.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Summary JSON output path (stdout when omitted).
        #[arg(long, value_name = "FILE")]
        summary: Option<PathBuf>,
        /// Run per-iteration inequality checks inline and fail fast.
        #[arg(long)]
        assert_mode: bool,
    },
    /// Re-check a recorded trace against every applicable inequality.
    Verify {
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
        /// Trace CSV produced by `solve` with the same config.
        #[arg(long, value_name = "FILE")]
        trace: PathBuf,
        /// Report JSON output path (stdout when omitted).
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
    },
    /// Direct concave iteration vs the parametric baseline, side by side.
    Compare {
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
    },
    /// Grid-search ground truth for the configured problem.
    Oracle {
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
    },
    /// Solve a batch of configs concurrently, keyed by config hash.
    Sweep {
        /// Output directory for `<hash>.trace.csv` / `<hash>.summary.json`.
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
        /// Config files to run.
        #[arg(required = true, value_name = "FILE")]
        configs: Vec<PathBuf>,
    },
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let code = if args.print_config {
        cli::cmd_print_config(args.config.as_deref())
    } else {
        match args.command {
            Some(Command::Solve {
                config,
                out,
                summary,
                assert_mode,
            }) => cli::cmd_solve(&config, out.as_deref(), summary.as_deref(), assert_mode),
            Some(Command::Verify {
                config,
                trace,
                report,
            }) => cli::cmd_verify(&config, &trace, report.as_deref()),
            Some(Command::Compare { config }) => cli::cmd_compare(&config),
            Some(Command::Oracle { config }) => cli::cmd_oracle(&config),
            Some(Command::Sweep { out_dir, configs }) => cli::cmd_sweep(&configs, &out_dir),
            None => {
                eprintln!("error: a subcommand or --print-config is required (see --help)");
                cli::EXIT_CONFIG
            }
        }
    };
    ExitCode::from(code as u8)
}
