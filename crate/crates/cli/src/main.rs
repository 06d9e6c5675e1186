//! `band-vortex` command-line front end.

mod commands;
mod config;
mod report;

use std::fmt;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Overrides, Settings};

/// Errors mapped to exit codes: 1 for configuration, 2 for numerical failures.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Numerical(anyhow::Error),
    Io(anyhow::Error),
}

impl Failure {
    pub fn config(msg: impl Into<String>) -> Self {
        Failure::Config(msg.into())
    }

    pub fn numerical<E: std::error::Error + Send + Sync + 'static>(e: E) -> Self {
        Failure::Numerical(e.into())
    }

    fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) | Failure::Io(_) => 1,
            Failure::Numerical(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Numerical(e) => write!(f, "numerical failure: {e:#}"),
            Failure::Io(e) => write!(f, "{e:#}"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "band-vortex",
    version,
    about = "Topology of two-band crossings: vorticity, pseudospin winding, Wannier decay"
)]
struct Cli {
    /// Flat key=value configuration file; flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<String>,
    /// Worker threads, 0 for all cores (falls back to BAND_VORTEX_THREADS).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Extra KEY=VALUE override, repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Eigenspace vorticity from plaquette Chern numbers on a cube.
    Vorticity,
    /// Pseudospin winding number and its comparison with the vorticity.
    Pwn,
    /// Canonical Wannier profile and its power-law decay.
    Wannier,
    /// Delta limit of the smoothed Berry curvature.
    Delta,
    /// Hamiltonian and eigen-data on a loop.
    DumpModel,
    /// List configuration keys.
    Keys,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Vorticity => "vorticity",
            Command::Pwn => "pwn",
            Command::Wannier => "wannier",
            Command::Delta => "delta",
            Command::DumpModel => "dump-model",
            Command::Keys => "keys",
        }
    }
}

fn thread_count(cli: &Cli) -> Result<usize, Failure> {
    if let Some(n) = cli.threads {
        return Ok(n);
    }
    match std::env::var("BAND_VORTEX_THREADS") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|e| Failure::config(format!("BAND_VORTEX_THREADS = `{v}`: {e}"))),
        Err(_) => Ok(0),
    }
}

fn settings(cli: &Cli) -> Result<Settings, Failure> {
    let mut s = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::config(format!("{path}: {e}")))?;
            Settings::parse_file(path, &text)?
        }
        None => Settings::default(),
    };
    for item in &cli.set {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Failure::config(format!("--set expects KEY=VALUE, got `{item}`")))?;
        s.set_flag(k.trim(), v)?;
    }
    for (k, v) in cli.overrides.pairs() {
        s.set_flag(k, v)?;
    }
    Ok(s)
}

fn run(cli: &Cli) -> Result<String, Failure> {
    if let Command::Keys = cli.command {
        return Ok(config::KEYS
            .iter()
            .map(|(k, h)| format!("{k:<16} {h}\n"))
            .collect());
    }
    let threads = thread_count(cli)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::config(format!("thread pool: {e}")))?;
    let s = settings(cli)?;
    let result = match cli.command {
        Command::Vorticity => commands::vorticity(&s)?,
        Command::Pwn => commands::pwn(&s)?,
        Command::Wannier => commands::wannier(&s)?,
        Command::Delta => commands::delta(&s)?,
        Command::DumpModel => commands::dump_model(&s)?,
        Command::Keys => unreachable!(),
    };
    let unused = s.unused();
    if !unused.is_empty() {
        return Err(Failure::config(format!(
            "keys not used by `{}`: {}",
            cli.command.name(),
            unused.join(", ")
        )));
    }
    Ok(report::render(cli.command.name(), s.resolved(), result))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("band-vortex: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
