use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use holocontact::scenario::{builtin, list_builtins, parse_scenario, run_scenario, Format, Scenario, EXIT_CONFIG};

#[derive(Parser)]
#[command(name = "holocontact", version, about = "Verify holomorphic contact structures and their lifts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file.
    Verify {
        file: PathBuf,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run a built-in scenario.
    Builtin {
        name: String,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// List built-in scenarios.
    List,
}

#[derive(Args)]
struct RunOpts {
    /// Tolerance for every check without its own.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of samples.
    #[arg(long)]
    samples: Option<usize>,
    /// Report format; defaults to the scenario's output format.
    #[arg(long)]
    format: Option<Format>,
    /// Write the report here instead of the scenario's output path or stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn config_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_CONFIG as u8)
}

fn run(scenario: holocontact::Result<Scenario>, opts: RunOpts) -> ExitCode {
    let scenario = match scenario.and_then(|s| s.with_overrides(opts.tol, opts.seed, opts.samples)) {
        Ok(s) => s,
        Err(e) => return config_error(e),
    };
    let report = run_scenario(&scenario);
    let format = opts.format.unwrap_or(scenario.spec.output.format);
    let text = report.render(format);
    let out = opts.out.or_else(|| scenario.spec.output.path.as_ref().map(PathBuf::from));
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, text) {
                return config_error(format!("cannot write {}: {e}", path.display()));
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(report.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify { file, opts } => match std::fs::read_to_string(&file) {
            Ok(text) => run(parse_scenario(&text), opts),
            Err(e) => config_error(format!("cannot read {}: {e}", file.display())),
        },
        Command::Builtin { name, opts } => run(builtin(&name), opts),
        Command::List => {
            for b in list_builtins() {
                println!("{:<22} {}", b.name, b.description);
            }
            ExitCode::SUCCESS
        }
    }
}
