mod commands;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use berglab::suites;
use clap::{Args, Parser, Subcommand};

use commands::{Failure, Report};
use spec::Mode;

#[derive(Parser, Debug)]
#[command(name = "berglab", version, about = "Bergman kernels, minimal L2 extensions and strong openness bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// Problem file (JSON).
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Directory for JSON and CSV results.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Relative tolerance for float cross-checks.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Jet levels, `A..B` inclusive.
    #[arg(long, value_parser = parse_k_range)]
    pub k: Option<(u32, u32)>,
    /// Sublevel parameters, `A:B:STEP`.
    #[arg(long, value_parser = parse_t_grid)]
    pub t: Option<TGrid>,
}

#[derive(Debug, Clone)]
pub struct TGrid(pub Vec<f64>);

#[derive(Subcommand, Debug)]
enum Command {
    /// C_{F,I}(D) against B°(F,I,D) at one jet level.
    Equiv(Common),
    /// The Krull ladder k ↦ C_{F,I+m^k}(D).
    Ladder(Common),
    /// C along a nested exhaustion.
    Exhaust(Common),
    /// K_ξ(o) and the representative Tξ.
    Kernel(Common),
    /// Triangular basis and its structure checks.
    Basis(Common),
    /// Strong openness effectiveness report.
    Sop(Common),
    /// ξ-complex singularity exponent by both routes.
    Cse(Common),
    /// Density of normalized representatives.
    Density(Common),
    /// Randomized and golden cross-checks.
    Suite {
        name: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_k_range(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected A..B, got '{s}'"))?;
    let a: u32 = a.trim().parse().map_err(|e| format!("bad start '{a}': {e}"))?;
    let b: u32 = b.trim().parse().map_err(|e| format!("bad end '{b}': {e}"))?;
    if a == 0 || a > b {
        return Err(format!("need 1 <= A <= B, got {a}..{b}"));
    }
    Ok((a, b))
}

fn parse_t_grid(s: &str) -> Result<TGrid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, step] = parts.as_slice() else {
        return Err(format!("expected A:B:STEP, got '{s}'"));
    };
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("bad number '{x}': {e}"));
    let (a, b, step) = (num(a)?, num(b)?, num(step)?);
    if !(step > 0.0) || !(b >= a) || !a.is_finite() || !b.is_finite() {
        return Err(format!("need A <= B and STEP > 0, got {s}"));
    }
    let count = ((b - a) / step + 1e-9).floor() as usize;
    Ok(TGrid((0..=count).map(|i| a + i as f64 * step).collect()))
}

fn emit(report: Report, out: Option<&PathBuf>) -> Result<bool, Failure> {
    print!("{}", report.text);
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
        for (name, body) in &report.files {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        }
    }
    Ok(report.ok)
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let (name, common) = match cli.command {
        Command::Suite { name, seed, count, out } => {
            let report = commands::suite(&name, seed, count)?;
            return emit(report, out.as_ref());
        }
        Command::Equiv(c) => ("equiv", c),
        Command::Ladder(c) => ("ladder", c),
        Command::Exhaust(c) => ("exhaust", c),
        Command::Kernel(c) => ("kernel", c),
        Command::Basis(c) => ("basis", c),
        Command::Sop(c) => ("sop", c),
        Command::Cse(c) => ("cse", c),
        Command::Density(c) => ("density", c),
    };
    let path = common.spec.as_ref().ok_or_else(|| Failure::Schema(spec::SchemaError::new("$", "--spec is required")))?;
    let problem = spec::load(path).map_err(Failure::Schema)?;
    if let Some(c) = &problem.command {
        if c != name {
            return Err(Failure::Schema(spec::SchemaError::new(
                "$.command",
                format!("file is for '{c}' but '{name}' was requested"),
            )));
        }
    }
    let report = commands::dispatch(name, &problem, &common)?;
    emit(report, common.out.as_ref())
}

fn main() -> ExitCode {
    suites::init_thread_pool();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("cross-check failed");
            ExitCode::from(1)
        }
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
