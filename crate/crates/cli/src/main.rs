use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ainf_cli::commands::{
    cmd_fixture, cmd_formality, cmd_massey, cmd_transfer, cmd_verify, CommandError, Outcome, Overrides, EXIT_INPUT,
};
use ainf_cli::document::{parse, parse_ring_flag};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Machine,
}

/// Homotopy transfer, Massey products and formality certificates for
/// dg algebras given as JSON documents.
///
/// Exit codes: 0 success or formal, 1 internal error, 2 obstruction found,
/// 3 precondition rejected (twisting, non-free homology, failed verify,
/// nonvanishing products), 4 input error.
#[derive(Debug, Parser)]
#[command(name = "ainf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Override the coefficient ring: Q, Fp:<p> or Zloc:<p>.
    #[arg(long, global = true)]
    ring: Option<String>,
    /// Override the twisting scalar; the endomorphism becomes diagonal.
    #[arg(long, global = true, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Override the grading divisor of the twist.
    #[arg(long, global = true)]
    c: Option<u32>,
    /// Number of key-lemma rounds to aim for.
    #[arg(long, global = true)]
    target_n: Option<usize>,
    /// Truncation arity K.
    #[arg(long, global = true)]
    max_arity: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Transferred structure on homology with verification summary.
    Transfer { input: PathBuf },
    /// Full formality pipeline; needs a twist.
    Formality { input: PathBuf },
    /// Triple Massey product of three homology classes.
    Massey { input: PathBuf, x: String, y: String, z: String },
    /// Structural checks only.
    Verify { input: PathBuf },
    /// Print a built-in example document (acyclic2, truncpoly, massey5, cpn_fp).
    Fixture { name: String },
}

fn read_input(path: &PathBuf) -> Result<String, CommandError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CommandError::Input(format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| CommandError::Input(format!("{}: {e}", path.display())))
}

fn run(cli: &Cli) -> Result<Outcome, CommandError> {
    let overrides = Overrides {
        ring: cli
            .ring
            .as_deref()
            .map(parse_ring_flag)
            .transpose()
            .map_err(|e| CommandError::Input(e.to_string()))?,
        alpha: cli.alpha.clone(),
        c: cli.c,
        target_n: cli.target_n,
        max_arity: cli.max_arity,
    };
    if overrides.max_arity == Some(0) {
        return Err(CommandError::Input("--max-arity must be at least 1".into()));
    }
    let load = |path: &PathBuf| {
        let doc = parse(&read_input(path)?).map_err(|e| CommandError::Input(e.to_string()))?;
        overrides
            .apply(&doc)
            .build()
            .map_err(|e| CommandError::Input(e.to_string()))
    };
    match &cli.command {
        Command::Transfer { input } => cmd_transfer(&load(input)?, &overrides),
        Command::Formality { input } => cmd_formality(&load(input)?, &overrides),
        Command::Massey { input, x, y, z } => cmd_massey(&load(input)?, x, y, z),
        Command::Verify { input } => cmd_verify(&load(input)?),
        Command::Fixture { name } => cmd_fixture(name).map(|(_, o)| o),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("ainf: {e}");
            return ExitCode::from(e.code());
        }
    };
    let rendered = match (cli.format, &cli.command) {
        (Format::Text, _) | (_, Command::Fixture { .. }) => outcome.text,
        (Format::Machine, _) => {
            let mut s = serde_json::to_string_pretty(&outcome.machine).expect("report serializes");
            s.push('\n');
            s
        }
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, rendered) {
                eprintln!("ainf: {}: {e}", path.display());
                return ExitCode::from(EXIT_INPUT);
            }
        }
        None => print!("{rendered}"),
    }
    ExitCode::from(outcome.code)
}
