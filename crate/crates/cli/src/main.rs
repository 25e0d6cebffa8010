use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use gcstar_cli::output::{render, Format};
use gcstar_cli::{run, CliError, Command, Flags};

#[derive(Parser, Debug)]
#[command(name = "gcstar", version, about = "Finite groupoid C*-algebra verification pipelines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Rank and clustering tolerance; assertions use ten times this.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Include wall-clock time in the report.
    #[arg(long, global = true)]
    timing: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let flags = Flags { tol: cli.tol, seed: cli.seed, timing: cli.timing };
    let result = run(&cli.command, &flags).and_then(|out| {
        let text = render(&out, cli.format)?;
        match &cli.out {
            Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
            None => print!("{text}"),
        }
        Ok(out.dot.is_some() || out.report.passed())
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            e.as_exit()
        }
    }
}
