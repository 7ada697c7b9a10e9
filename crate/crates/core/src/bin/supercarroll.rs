use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use supercarroll::workbench::{run, Command, Flags, Mode, Report, Seed};

/// Exact checks on super-Carrollian spec files.
#[derive(Parser, Debug)]
#[command(name = "supercarroll", version)]
struct Cli {
    /// check | kernel | reduce | killing | scarr | connect | verify-connection | contract
    command: Command,
    /// Spec file.
    spec: PathBuf,
    /// Polynomial degree of the Killing ansatz.
    #[arg(long, default_value_t = 1)]
    degree: u32,
    /// Print the JSON report instead of text.
    #[arg(long)]
    json: bool,
    /// susy | metric | compatible
    #[arg(long, default_value = "compatible")]
    mode: Mode,
    /// `trivial` or a file holding a CONNECTION block.
    #[arg(long)]
    seed: Option<String>,
    /// Restrict Killing fields to those commuting with this vector field.
    #[arg(long)]
    commute_with: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match execute(&cli) {
        Ok(r) => r,
        Err(message) => Report::new(cli.command.name()).fail_input(message),
    };
    if cli.json {
        println!("{}", report.machine_text());
    } else {
        print!("{}", report.human());
    }
    ExitCode::from(report.exit_code() as u8)
}

fn execute(cli: &Cli) -> Result<Report, String> {
    let read = |p: &PathBuf| std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()));
    let text = read(&cli.spec)?;
    let seed = match cli.seed.as_deref() {
        None => Seed::Spec,
        Some("trivial") => Seed::Trivial,
        Some(path) => Seed::Text(read(&PathBuf::from(path))?),
    };
    let flags = Flags { degree: cli.degree, mode: cli.mode, seed, commute_with: cli.commute_with.clone() };
    Ok(run(cli.command, &text, &flags))
}
