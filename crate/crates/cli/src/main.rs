use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

mod commands;
mod report;

#[derive(Parser, Debug)]
#[command(name = "painleve", version, about = "Singularity analysis of plane Hamiltonian systems")]
pub struct Cli {
    /// Emit the report as canonical JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Exit with status 1 when any verdict in the report fails.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Extra catalog definitions, added to the built-in catalog.
    #[arg(long, global = true, value_name = "FILE")]
    pub catalog: Option<PathBuf>,
    /// Built-in atlas name or a file in the atlas format.
    #[arg(long, global = true, value_name = "NAME|FILE")]
    pub atlas: Option<String>,
    /// Worker threads for independent points, branches and maps.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Report wall-clock time.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List or show catalog entries.
    Catalog(CatalogArgs),
    /// Formal Laurent-series test of scalar equations.
    PainleveTest(PainleveArgs),
    /// Accessible singular points of a system on an atlas.
    Singularities(SystemArgs),
    /// Linear approximation at accessible points.
    LocalIndex(LocalIndexArgs),
    /// Scaling-limit reduction and its closed-form solution.
    AlphaTest(PointArgs),
    /// Push a system, or the branches of an equation, through maps.
    Transform(TransformArgs),
    /// Check that maps preserve a system.
    VerifySymmetry(SymmetryArgs),
    /// Holomorphy condition for a map and a Hamiltonian shift.
    Holomorphy(HolomorphyArgs),
    /// Pole order of a system along the divisors of an atlas.
    PoleOrder(PoleOrderArgs),
    /// Integrate a system numerically along a complex path.
    Integrate(IntegrateArgs),
    /// Compare series branches with numerical solutions near their pole.
    VerifyBranch(VerifyBranchArgs),
}

#[derive(Args, Debug)]
pub struct CatalogArgs {
    /// Show one system, map or equation; list everything otherwise.
    pub name: Option<String>,
}

#[derive(Args, Debug)]
pub struct PainleveArgs {
    /// Equation names, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub ode: Vec<String>,
    /// Number of coefficients per branch.
    #[arg(long, default_value_t = 9)]
    pub depth: usize,
}

#[derive(Args, Debug)]
pub struct SystemArgs {
    #[arg(long)]
    pub system: String,
}

#[derive(Args, Debug)]
pub struct LocalIndexArgs {
    #[arg(long)]
    pub system: String,
    /// Point name (P1) or base coordinate (x=0, x=inf); all points otherwise.
    #[arg(long)]
    pub point: Option<String>,
    /// Also print the expansion matrices up to this order.
    #[arg(long)]
    pub expansion: Option<usize>,
}

#[derive(Args, Debug)]
pub struct PointArgs {
    #[arg(long)]
    pub system: String,
    /// Point name (P1) or base coordinate (x=0, x=inf); all points otherwise.
    #[arg(long)]
    pub point: Option<String>,
}

#[derive(Args, Debug)]
pub struct TransformArgs {
    /// System to push forward.
    #[arg(long, conflicts_with = "ode", required_unless_present = "ode")]
    pub system: Option<String>,
    /// Equation whose branches, as pairs (q, q'), are carried through the maps.
    #[arg(long)]
    pub ode: Option<String>,
    /// Maps applied in order; `ATLAS:CHART` names a chart of an atlas.
    #[arg(long = "map", required = true)]
    pub maps: Vec<String>,
    /// Compare the result with this catalog system.
    #[arg(long)]
    pub expect: Option<String>,
    /// Series depth for `--ode`.
    #[arg(long, default_value_t = 16)]
    pub depth: usize,
    /// Sign of the series square roots taken for radicals in the maps.
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub radical_sign: i32,
}

#[derive(Args, Debug)]
pub struct SymmetryArgs {
    #[arg(long)]
    pub system: String,
    /// Maps, comma separated.
    #[arg(long = "map", value_delimiter = ',', required = true)]
    pub maps: Vec<String>,
    /// Check every map at all five roots of a^5 = -1.
    #[arg(long)]
    pub fifth_roots: bool,
    /// Also require each map to be an involution.
    #[arg(long)]
    pub involution: bool,
}

#[derive(Args, Debug)]
pub struct HolomorphyArgs {
    #[arg(long)]
    pub system: String,
    #[arg(long)]
    pub map: String,
    /// Added to the Hamiltonian before transforming.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub shift: String,
}

#[derive(Args, Debug)]
pub struct PoleOrderArgs {
    #[arg(long)]
    pub system: String,
    /// One divisor; all divisors of the atlas otherwise.
    #[arg(long)]
    pub divisor: Option<String>,
}

#[derive(Args, Debug)]
pub struct Tolerances {
    #[arg(long, default_value_t = 1e-10)]
    pub rtol: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub atol: f64,
    #[arg(long, default_value_t = 1e-14)]
    pub min_step: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_steps: usize,
    /// Numeric values, `name=value`; complex values as `1+2i`.
    #[arg(long = "param", allow_hyphen_values = true)]
    pub params: Vec<String>,
}

#[derive(Args, Debug)]
pub struct IntegrateArgs {
    #[arg(long)]
    pub system: String,
    /// Initial state, two comma-separated (complex) numbers.
    #[arg(long, allow_hyphen_values = true)]
    pub init: String,
    /// Waypoints of the time path, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub path: String,
    /// Checkpoints per path segment.
    #[arg(long, default_value_t = 1)]
    pub pieces: usize,
    /// Write every accepted step as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Check that this map carries the flow of `--system` to that of `--target`.
    #[arg(long, requires = "target")]
    pub map: Option<String>,
    #[arg(long)]
    pub target: Option<String>,
    /// Largest accepted deviation for `--map`.
    #[arg(long, default_value_t = 1e-7)]
    pub tolerance: f64,
    #[command(flatten)]
    pub tol: Tolerances,
}

#[derive(Args, Debug)]
pub struct VerifyBranchArgs {
    #[arg(long)]
    pub ode: String,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub t0: String,
    #[arg(long, default_value_t = 0.02)]
    pub near: f64,
    #[arg(long, default_value_t = 0.1)]
    pub far: f64,
    #[arg(long, default_value_t = 8)]
    pub checkpoints: usize,
    #[arg(long, default_value_t = 14)]
    pub depth: usize,
    /// Largest accepted deviation.
    #[arg(long, default_value_t = 1e-6)]
    pub tolerance: f64,
    #[command(flatten)]
    pub tol: Tolerances,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = cli.timing.then(Instant::now);
    match commands::run(&cli) {
        Ok(report) => {
            let status = if cli.strict && !report.passed { 1 } else { 0 };
            if cli.json {
                print!("{}", report.to_json(started, status));
            } else {
                print!("{}", report.text);
                if let Some(s) = started {
                    println!("elapsed: {:.3} ms", s.elapsed().as_secs_f64() * 1e3);
                }
            }
            ExitCode::from(status as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
