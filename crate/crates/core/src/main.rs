use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fracap::report::emit_report;
use fracap::scenario::{parse_scenario, run_scenario};
use fracap::Error;

#[derive(Parser)]
#[command(
    name = "fracap",
    about = "Variable-exponent fractional capacities on grids"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write its report.
    Run {
        scenario: PathBuf,
        /// Report path; overrides the scenario's `output`. Without either the
        /// report goes to stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Check a scenario file without running it.
    Validate { scenario: PathBuf },
    /// Print the tool version.
    Version,
}

const EXIT_INVALID: u8 = 1;
const EXIT_FAILED: u8 = 2;

fn load(path: &Path) -> Result<fracap::scenario::Scenario, ExitCode> {
    parse_scenario(path).map_err(|e| {
        match &e {
            Error::Io { .. } => eprintln!("{e}"),
            _ => eprintln!("{}: {e}", path.display()),
        }
        match e {
            Error::Validation(_) | Error::Io { .. } => ExitCode::from(EXIT_INVALID),
            _ => ExitCode::from(EXIT_FAILED),
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Version => {
            println!("fracap {}", env!("CARGO_PKG_VERSION"));
            ExitCode::SUCCESS
        }
        Command::Validate { scenario } => match load(&scenario) {
            Ok(sc) => {
                println!("{}: valid {} scenario", scenario.display(), sc.task.name());
                ExitCode::SUCCESS
            }
            Err(code) => code,
        },
        Command::Run { scenario, output } => {
            let sc = match load(&scenario) {
                Ok(sc) => sc,
                Err(code) => return code,
            };
            let report = run_scenario(&sc);
            for r in &report.deterministic.results {
                if let Some(msg) = &r.message {
                    eprintln!("{}: {msg}", r.task);
                }
            }
            match output.or(sc.output.clone()) {
                Some(path) => match emit_report(&report, &path) {
                    Ok(written) => {
                        for p in written {
                            eprintln!("wrote {}", p.display());
                        }
                    }
                    Err(e) => {
                        eprintln!("{e}");
                        return ExitCode::from(EXIT_FAILED);
                    }
                },
                None => print!("{}", report.to_json()),
            }
            if report.succeeded() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAILED)
            }
        }
    }
}
