mod commands;
mod error;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::CliError;
use crate::run::{ArithmeticName, EngineName, Format, MechanismName, RunConfig, Suite};

/// Growth models and sandpile algebra on the Sierpinski gasket.
#[derive(Debug, Parser)]
#[command(name = "sierpile", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Build G_n and export its edges.
    Build,
    /// Abelian sandpile growth from m chips at o.
    Sandpile,
    /// Rotor-router aggregation of m particles.
    Rotor,
    /// Divisible sandpile of mass m.
    Divisible,
    /// Internal DLA: one cluster of m particles, or an ensemble at --radius.
    Idla,
    /// Jump table of the sandpile radius.
    Table,
    /// Samples of the log-periodic function over one period.
    Gfunc,
    /// Volume bounds on the sandpile radius.
    Bounds,
    /// Exact check suites.
    Verify,
    /// Image of a tile or of a sandpile cluster.
    Render,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Build => "build",
            Command::Sandpile => "sandpile",
            Command::Rotor => "rotor",
            Command::Divisible => "divisible",
            Command::Idla => "idla",
            Command::Table => "table",
            Command::Gfunc => "gfunc",
            Command::Bounds => "bounds",
            Command::Verify => "verify",
            Command::Render => "render",
        }
    }
}

#[derive(Debug, Args)]
struct Flags {
    /// Flat key = value file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    level: Option<u32>,
    #[arg(long, global = true)]
    m: Option<u64>,
    #[arg(long, global = true)]
    mmax: Option<u64>,
    #[arg(long, global = true)]
    nmax: Option<u32>,
    /// Target radius of an IDLA ensemble.
    #[arg(long, global = true)]
    radius: Option<u32>,
    #[arg(long, global = true, value_enum)]
    mechanism: Option<MechanismName>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    runs: Option<u64>,
    #[arg(long, global = true, value_enum)]
    engine: Option<EngineName>,
    #[arg(long, global = true, value_enum)]
    arithmetic: Option<ArithmeticName>,
    #[arg(long, global = true, value_enum)]
    suite: Option<Suite>,
    /// Tile id such as e_5, e_o_3, M_4 or zeta_2.
    #[arg(long, global = true)]
    tile: Option<String>,
    #[arg(long, global = true)]
    points: Option<usize>,
    #[arg(long, global = true)]
    depth: Option<u32>,
    /// Pixels per unit edge length.
    #[arg(long, global = true)]
    scale: Option<u32>,
    /// Output root; each run writes to <out>/<command>-<hash>.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, value_delimiter = ',')]
    format: Vec<Format>,
    /// Shorthand for --format csv.
    #[arg(long, global = true)]
    csv: bool,
    /// Adds an image format.
    #[arg(long, global = true, value_enum)]
    render: Option<Format>,
}

fn config(cli: Cli) -> Result<RunConfig, CliError> {
    let f = cli.flags;
    let base = match &f.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    let mut formats = f.format;
    if f.csv {
        formats.push(Format::Csv);
    }
    formats.extend(f.render);
    let flags = RunConfig {
        command: cli.command.name().to_string(),
        level: f.level,
        m: f.m,
        mmax: f.mmax,
        nmax: f.nmax,
        radius: f.radius,
        mechanism: f.mechanism,
        seed: f.seed,
        runs: f.runs,
        engine: f.engine,
        arithmetic: f.arithmetic,
        suite: f.suite,
        tile: f.tile,
        points: f.points,
        depth: f.depth,
        scale: f.scale,
        formats,
        out: f.out,
    };
    let mut cfg = base.overridden_by(flags);
    commands::default_formats(&mut cfg);
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<Option<String>, CliError> {
    let cfg = config(cli)?;
    let mut report = commands::run(&cfg)?;
    println!("{}", report.finish(&cfg)?);
    Ok(report.failure)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(failure)) => {
            eprintln!("verification failed: {failure}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
