//! `polytower`: checks and certificates for finite simplicial complexes, quasi-simplicial
//! maps and inverse-limit towers of polyhedra.
//!
//! Exit codes: 0 holds (or plain output), 1 refuted, 2 undecided within budgets, 3 bad input.

mod commands;
mod config;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand, ValueEnum};
use polytower_core::stars::CoverKind;

use commands::{Generate, Outcome};
use render::Format;

#[derive(Parser)]
#[command(name = "polytower", version, about = "Finite polyhedra, quasi-simplicial maps and tower certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Connectivity degree: checks ask for k-connectedness for k < n.
    #[arg(long, global = true, default_value_t = 1)]
    n: usize,
    #[arg(long, global = true)]
    budget_pi1: Option<u64>,
    #[arg(long, global = true)]
    budget_filler: Option<u64>,
    #[arg(long, global = true)]
    budget_nerve: Option<u64>,
    /// Replace tower scales by b^-1, b^-2, ...
    #[arg(long, global = true)]
    scale_base: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Closed,
    Open,
}

#[derive(Subcommand)]
enum Command {
    /// Parse any input file and summarise it.
    Validate { file: PathBuf },
    /// Barycentric subdivision of a complex.
    Subdivide {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        times: usize,
    },
    /// Star cover of a complex: barycentric stars (closed) or open vertex stars.
    Stars {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Kind::Closed)]
        kind: Kind,
    },
    /// Nerve of a cover.
    Nerve { file: PathBuf },
    /// Integral homology of a complex.
    Homology {
        file: PathBuf,
        #[arg(long)]
        reduced: bool,
    },
    /// Is the complex simply connected?
    Pi1 { file: PathBuf },
    /// Quasi-simplicial check, surjectivity, Lipschitz constant and n-regularity of a map.
    CheckMap {
        file: PathBuf,
        #[arg(long, default_value = "1")]
        kappa: String,
        #[arg(long, default_value = "1")]
        lambda: String,
    },
    /// Certificate for a tower.
    VerifyTower { file: PathBuf },
    /// Restrict a tower to a subcomplex of one level and certify the result.
    Restrict {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        level: usize,
        /// Generating simplices as JSON, e.g. '[["a","b"]]'.
        #[arg(long)]
        a: String,
    },
    /// Lift a map through a tower.
    Lift { file: PathBuf },
    /// Mesh and element diameters of a cover.
    Mesh {
        file: PathBuf,
        #[arg(long, default_value = "1")]
        scale: String,
    },
    /// Generate example inputs.
    Gen {
        #[command(subcommand)]
        what: GenCommand,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    SubdivisionTower {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Base complex file; overrides --dim.
        #[arg(long)]
        base: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        levels: usize,
    },
    /// The stacked cylinder mapped onto an edge.
    Cylinder,
    /// Two-level tower with the cylinder map as its bond.
    CylinderTower,
    Circle,
    Sphere { d: usize },
    Simplex { d: usize },
    Rp2,
    RandomTower {
        #[arg(long, default_value_t = 3)]
        levels: usize,
    },
    /// Lifting problem: the edge `[a, b]` of the triangle through its subdivision tower,
    /// with the endpoint `a` fixed.
    EdgeLift {
        #[arg(long, default_value_t = 3)]
        levels: usize,
    },
}

fn run(cli: &Cli) -> Result<Outcome> {
    if cli.n == 0 {
        bail!("--n must be at least 1");
    }
    let env = std::env::var(config::BUDGETS_VAR).ok();
    let budgets = config::budgets(env.as_deref(), cli.budget_pi1, cli.budget_filler, cli.budget_nerve)?;
    let scale_base = cli.scale_base.as_deref().map(|s| config::positive_rational(s, "--scale-base")).transpose()?;
    let sb = scale_base.as_ref();
    let n = cli.n;
    match &cli.command {
        Command::Validate { file } => commands::validate(file),
        Command::Subdivide { file, times } => commands::subdivide(file, *times),
        Command::Stars { file, kind } => commands::stars(
            file,
            match kind {
                Kind::Closed => CoverKind::Closed,
                Kind::Open => CoverKind::Open,
            },
        ),
        Command::Nerve { file } => commands::nerve(file, &budgets),
        Command::Homology { file, reduced } => commands::homology(file, *reduced),
        Command::Pi1 { file } => commands::pi1(file, &budgets),
        Command::CheckMap { file, kappa, lambda } => {
            let kappa = config::positive_rational(kappa, "--kappa")?;
            let lambda = config::positive_rational(lambda, "--lambda")?;
            commands::check_map(file, n, &kappa, &lambda, &budgets)
        }
        Command::VerifyTower { file } => commands::verify(file, n, sb, &budgets),
        Command::Restrict { file, level, a } => commands::restrict(file, *level, a, n, sb, &budgets),
        Command::Lift { file } => commands::lift(file, n, sb, &budgets),
        Command::Mesh { file, scale } => commands::mesh(file, &config::positive_rational(scale, "--scale")?),
        Command::Gen { what } => {
            let what = match what {
                GenCommand::SubdivisionTower { dim, base, levels } => {
                    Generate::SubdivisionTower { dim: *dim, base: base.clone(), levels: *levels }
                }
                GenCommand::Cylinder => Generate::Cylinder,
                GenCommand::CylinderTower => Generate::CylinderTower,
                GenCommand::Circle => Generate::Circle,
                GenCommand::Sphere { d } => Generate::Sphere(*d),
                GenCommand::Simplex { d } => Generate::Simplex(*d),
                GenCommand::Rp2 => Generate::Rp2,
                GenCommand::RandomTower { levels } => Generate::RandomTower { levels: *levels },
                GenCommand::EdgeLift { levels } => Generate::EdgeLift { levels: *levels },
            };
            commands::generate(&what, cli.seed, sb)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(3);
        }
    };
    let text = render::render(&outcome.report, cli.format);
    match &cli.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(3);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(outcome.exit_code() as u8)
}
