#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{cmd_bowtie, cmd_orbit, cmd_scan, cmd_sweep, Outcome, RunConfig, VERSION};
use poncelet::invariants::InvariantCode;
use poncelet::tol::Tolerances;
use poncelet::{Focus, InversionContext, Tag};

/// Periodic billiard trajectories in an ellipse and their invariants.
#[derive(Parser)]
#[command(name = "poncelet", version = VERSION)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Aspect ratio a/b, with b = 1.
    #[arg(long)]
    ab: f64,
    /// Inversion radius for focus-inversive polygons.
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    /// Inversion center: f1 = (−c, 0) or f2 = (c, 0).
    #[arg(long, default_value = "f1", value_parser = parse_focus)]
    focus: Focus,
    /// Multiplier on every numeric tolerance; overrides PONCELET_TOL_SCALE.
    #[arg(long)]
    tol_scale: Option<f64>,
    /// Output directory; without it the JSON report goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG pixels per billiard unit.
    #[arg(long, default_value_t = 100.0)]
    scale: f64,
}

#[derive(Args, Clone)]
struct Family {
    /// Number of bounces, 3 to 8.
    #[arg(long)]
    n: usize,
    /// simple, type1, type2 or type3.
    #[arg(long, default_value = "simple", value_parser = parse_tag)]
    topology: Tag,
}

#[derive(Subcommand)]
enum Command {
    /// Construct one orbit; writes orbit.json and orbit.svg.
    Orbit {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        family: Family,
        /// Family parameter: boundary angle, or abscissa u of the first vertex when the caustic is a hyperbola.
        /// Defaults to 0 on angle families, the vertical-sided bowtie for N=4 type1, and half the window otherwise.
        #[arg(long, visible_alias = "u", allow_hyphen_values = true)]
        t: Option<f64>,
    },
    /// Sweep invariants over a family; writes sweep.csv and sweep.json.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        family: Family,
        /// Comma-separated codes, e.g. k101,k804; default is every applicable code.
        #[arg(long, value_delimiter = ',', value_parser = parse_code)]
        codes: Option<Vec<InvariantCode>>,
        #[arg(long, default_value_t = 16)]
        samples: usize,
    },
    /// Self-intersected 4-periodic circle identities; writes bowtie.json and bowtie.svg.
    Bowtie {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// One invariant across a range of aspect ratios; writes scan.csv and scan.json.
    Scan {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        family: Family,
        #[arg(long, value_parser = parse_code)]
        code: InvariantCode,
        /// Last aspect ratio of the grid; the first is --ab.
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long, default_value_t = 16)]
        samples: usize,
    },
}

fn parse_tag(s: &str) -> Result<Tag, String> {
    Tag::parse(s).map_err(|e| e.to_string())
}

fn parse_code(s: &str) -> Result<InvariantCode, String> {
    InvariantCode::parse(s).map_err(|e| e.to_string())
}

fn parse_focus(s: &str) -> Result<Focus, String> {
    match s.to_ascii_lowercase().as_str() {
        "f1" | "1" => Ok(Focus::F1),
        "f2" | "2" => Ok(Focus::F2),
        _ => Err(format!("unknown focus '{s}', expected f1 or f2")),
    }
}

fn config(c: &Common) -> anyhow::Result<RunConfig> {
    let tol = match c.tol_scale {
        Some(s) if s.is_finite() && s > 0.0 => Tolerances::scaled(s),
        Some(s) => return Err(poncelet::Error::Invalid(format!("tolerance scale must be positive, got {s}")).into()),
        None => Tolerances::from_env(),
    };
    let ctx = InversionContext::new(c.focus, c.rho)?;
    RunConfig::new(c.ab, ctx, tol, c.out.clone(), c.scale)
}

fn grid(from: f64, to: f64, steps: usize) -> anyhow::Result<Vec<f64>> {
    if steps < 2 || !(to > from) {
        return Err(poncelet::Error::Invalid(format!(
            "scan needs --to > --ab and at least 2 steps, got {from}..{to} in {steps}"
        ))
        .into());
    }
    Ok((0..steps).map(|i| from + (to - from) * i as f64 / (steps - 1) as f64).collect())
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    match cli.command {
        Command::Orbit { common, family, t } => cmd_orbit(&config(&common)?.with_family(family.n, family.topology)?, t),
        Command::Sweep { common, family, codes, samples } => {
            cmd_sweep(&config(&common)?.with_family(family.n, family.topology)?, codes, samples)
        }
        Command::Bowtie { common, samples } => cmd_bowtie(&config(&common)?, samples),
        Command::Scan { common, family, code, to, steps, samples } => {
            let g = grid(common.ab, to, steps)?;
            cmd_scan(&config(&common)?.with_topology(family.n, family.topology)?, code, &g, samples)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(o) if o.reproduced => ExitCode::SUCCESS,
        Ok(_) => {
            eprintln!("error: a checked claim was not reproduced");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<poncelet::Error>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
