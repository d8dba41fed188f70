use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mgcd::harness::{
    demo_config, read_config, run_to_report, write_report, Backend, CheckKind, DemoCase, ReportFormat, RunConfig,
    RunReport,
};

#[derive(Parser)]
#[command(
    name = "mgcd",
    version,
    about = "Verify Christoffel–Darboux identities for multigraded-Hankel weight families"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks described by a JSON config
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Override the config's backend: exact | float
        #[arg(long)]
        backend: Option<Backend>,
        #[command(flatten)]
        out: Output,
        /// Comma-separated subset of checks to run
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<CheckKind>>,
        /// Comma-separated levels for the per-level checks
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<usize>>,
    },
    /// Run a built-in configuration
    Demo {
        /// hermite | legendre | multigraded-12 | multigraded-n2 | singular
        #[arg(long)]
        case: DemoCase,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(clap::Args)]
struct Output {
    /// Write the report here instead of stdout
    #[arg(long)]
    report: Option<PathBuf>,
    /// json | text
    #[arg(long, default_value = "json")]
    format: ReportFormat,
}

fn emit(report: &RunReport, out: &Output) -> ExitCode {
    match &out.report {
        Some(path) => {
            if let Err(e) = write_report(report, path, out.format) {
                eprintln!("mgcd: {e}");
                return ExitCode::from(2);
            }
        }
        None => println!("{}", out.format.render(report).trim_end()),
    }
    if let Some(e) = &report.error {
        eprintln!("mgcd: {e}");
    }
    ExitCode::from(report.exit_code() as u8)
}

fn execute(cfg: RunConfig, out: &Output) -> ExitCode {
    if let Err(e) = cfg.validate() {
        eprintln!("mgcd: {e}");
        return ExitCode::from(2);
    }
    emit(&run_to_report(&cfg), out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify {
            config,
            backend,
            out,
            checks,
            levels,
        } => {
            let mut cfg = match read_config(&config) {
                Ok(cfg) => cfg,
                Err(e) => {
                    eprintln!("mgcd: {e}");
                    return ExitCode::from(2);
                }
            };
            if let Some(b) = backend {
                cfg.backend = b;
            }
            if let Some(c) = checks {
                cfg.checks = c;
            }
            if let Some(l) = levels {
                cfg.levels = l;
            }
            execute(cfg, &out)
        }
        Command::Demo { case, out } => execute(demo_config(case), &out),
    }
}
