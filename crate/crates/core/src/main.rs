use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lattice_hecke::coxeter::{CoxeterType, Family};
use lattice_hecke::lattice::DEFAULT_MAX_ORBITS;
use lattice_hecke::report::{self, Report, ReportError, RunConfig, Selector, CACHE_ENV};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "lattice-hecke", version, about = "Lattice extensions of Hecke algebras of finite Coxeter groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Order, reflections and reflection classes of a Coxeter group.
    Group(Common),
    /// Enumerate a subgroup lattice and its orbits.
    Lattice(Common),
    /// Admissible lattices between the parabolic lattice and all reflection subgroups.
    Admissible(Common),
    /// Run the algebra checks.
    Verify(Common),
}

#[derive(Args)]
struct Common {
    /// Family: A, B, D or I2.
    #[arg(long = "type")]
    family: Family,
    /// Rank (fixed to 2 for I2).
    #[arg(long)]
    rank: Option<usize>,
    /// Dihedral parameter, I2 only.
    #[arg(long)]
    m: Option<u32>,
    /// infinity, parabolic, closed, L2 or Ln.
    #[arg(long, default_value = "infinity")]
    which: String,
    /// Rank bound for `--which Ln`.
    #[arg(long)]
    n: Option<usize>,
    /// Comma separated: relations, blocks, trace, gram, specialization, all.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    checks: Vec<String>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for the lattice cache.
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_ORBITS)]
    max_orbits: usize,
    /// Include wall-clock timings (reports are then no longer reproducible).
    #[arg(long)]
    timings: bool,
}

fn selector(which: &str, n: Option<usize>) -> Result<Selector, String> {
    let s = match which {
        "infinity" => Selector::Infinity,
        "parabolic" => Selector::Parabolic,
        "closed" => Selector::Closed,
        "L2" => Selector::L2,
        "Ln" => Selector::Ln(n.ok_or("--which Ln requires --n")?),
        other => return Err(format!("unknown lattice selector {other:?}")),
    };
    if n.is_some() && !matches!(s, Selector::Ln(_)) {
        return Err("--n is only used with --which Ln".into());
    }
    Ok(s)
}

fn config(args: &Common) -> Result<RunConfig, String> {
    let rank = match (args.family, args.rank) {
        (Family::I2, None) => 2,
        (_, Some(r)) => r,
        (_, None) => return Err("--rank is required".into()),
    };
    let ctype = CoxeterType::new(args.family, rank, args.m).map_err(|e| e.to_string())?;
    let cache_dir = std::env::var_os(CACHE_ENV).map(PathBuf::from).or_else(|| args.cache.clone());
    let cfg = RunConfig {
        ctype,
        selector: selector(&args.which, args.n)?,
        checks: report::parse_checks(&args.checks)?,
        seed: args.seed,
        max_orbits: args.max_orbits,
        timings: args.timings,
        cache_dir,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn emit(report: &Report, out: Option<&PathBuf>) -> std::io::Result<()> {
    let text = report.render();
    match out {
        Some(path) => report::write_atomic(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (Command::Group(args) | Command::Lattice(args) | Command::Admissible(args) | Command::Verify(args)) =
        &cli.command;
    let cfg = match config(args) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let result: Result<Report, ReportError> = match cli.command {
        Command::Group(_) => Ok(report::cmd_group(&cfg)),
        Command::Lattice(_) => report::cmd_lattice(&cfg),
        Command::Admissible(_) => report::cmd_admissible(&cfg),
        Command::Verify(_) => report::cmd_verify(&cfg),
    };
    let report = match result {
        Ok(r) => r,
        Err(ReportError::Lattice(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    if let Err(e) = emit(&report, args.out.as_ref()) {
        eprintln!("error: writing report: {e}");
        return ExitCode::FAILURE;
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    }
}
