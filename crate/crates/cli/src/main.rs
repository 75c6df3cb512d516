//! `brownlab` command-line tool.

mod commands;
mod config;
mod exit;
mod record;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use brownlab::brownfield::LogDetPath;
use brownlab::rdiagonal::OperatorTag;
use brownlab::verify::VerifyOptions;
use brownlab::c64;
use clap::{Args, Parser, Subcommand};

use crate::commands::{FieldRequest, FieldSource};
use crate::config::Config;
use crate::exit::CliError;
use crate::record::Outputs;

#[derive(Debug, Parser)]
#[command(name = "brownlab", version, about = "Brown measures of R-diagonal and matrix-model operators")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Master seed for every random stream of the run.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for grid evaluation.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory receiving the output files and run.json.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// TOML file with defaults; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Brown measure of an R-diagonal operator from the law of its modulus.
    Rdiag {
        /// Measure JSON: {"atoms": [[x, mass], ...], "density": [[x, f], ...]}.
        measure: PathBuf,
        /// Radius spacing of the CDF table.
        #[arg(long)]
        step: Option<f64>,
    },
    /// Spectra of a catalogued operator in the random matrix model.
    Simulate {
        #[arg(long)]
        tag: Option<String>,
        /// Matrix dimension (even).
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        seeds: Option<u64>,
        /// Word whose normalized trace is reported per seed.
        #[arg(long)]
        word: Option<String>,
    },
    /// Log-determinant field and Brown cell masses on a square grid.
    Field {
        /// Matrix file (.json or .csv).
        #[arg(long, conflicts_with = "tag")]
        matrix: Option<PathBuf>,
        /// Catalogued operator realized in the matrix model.
        #[arg(long, required_unless_present = "matrix")]
        tag: Option<String>,
        /// Matrix dimension for --tag (even).
        #[arg(long)]
        dim: Option<usize>,
        /// Nodes per side.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        path: Option<LogDetPath>,
        #[arg(long)]
        half_width: Option<f64>,
        /// Grid center as RE,IM.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_center)]
        center: Option<[f64; 2]>,
    },
    /// Closure, invariant subspaces and k-fold transitivity of generators.
    Algebra {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        kfold: Option<usize>,
    },
    /// Runs the acceptance criteria.
    Verify {
        /// Comma-separated criterion numbers; all when omitted.
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u8>,
        /// Small matrices and fewer seeds.
        #[arg(long)]
        quick: bool,
    },
}

fn parse_center(s: &str) -> Result<[f64; 2], String> {
    let (re, im) = s.split_once(',').ok_or("expected RE,IM")?;
    let p = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t}: {e}"));
    Ok([p(re)?, p(im)?])
}

fn require_seed(config: &Config, command: &'static str) -> Result<u64, CliError> {
    config.seed.ok_or(CliError::MissingSeed(command))
}

fn run(cli: Cli, argv: Vec<String>) -> Result<(), CliError> {
    let start = Instant::now();
    let mut config = match &cli.global.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if cli.global.seed.is_some() {
        config.seed = cli.global.seed;
    }
    if cli.global.threads.is_some() {
        config.threads = cli.global.threads;
    }
    if let Some(d) = cli.global.out_dir {
        config.out_dir = d;
    }

    // Resolve the effective settings before any work so the snapshot in
    // run.json reflects what actually ran.
    let mut deferred = None;
    let mut out;
    match cli.command {
        Command::Rdiag { measure, step } => {
            if let Some(s) = step {
                config.rdiag.step = s;
            }
            out = Outputs::create(&config.out_dir)?;
            commands::rdiag(&measure, config.rdiag.step, &mut out)?;
        }
        Command::Simulate { tag, dim, seeds, word } => {
            let c = &mut config.simulate;
            c.tag = tag.or(c.tag.take());
            c.dim = dim.unwrap_or(c.dim);
            c.seeds = seeds.unwrap_or(c.seeds);
            c.word = word.or(c.word.take());
            let tag: OperatorTag = c
                .tag
                .as_deref()
                .ok_or_else(|| CliError::Config("simulate needs --tag".into()))?
                .parse()?;
            let master = require_seed(&config, "simulate")?;
            let c = &config.simulate;
            out = Outputs::create(&config.out_dir)?;
            let s = commands::simulate(tag, c.dim, c.seeds, c.word.as_deref(), master, &mut out)?;
            println!(
                "{}: {} eigenvalues, KS {:.4}, atom fraction {:.4}, support violations {}",
                s.tag, s.eigenvalues, s.ks, s.atom_fraction, s.support_violations
            );
        }
        Command::Field { matrix, tag, dim, grid, epsilon, path, half_width, center } => {
            let c = &mut config.field;
            c.grid = grid.unwrap_or(c.grid);
            c.epsilon = epsilon.or(c.epsilon);
            c.path = path.or(c.path);
            c.half_width = half_width.or(c.half_width);
            c.center = center.unwrap_or(c.center);
            c.dim = dim.unwrap_or(c.dim);
            let source = match (&matrix, tag) {
                (Some(m), _) => FieldSource::Matrix(m),
                (None, Some(t)) => {
                    FieldSource::Tag { tag: t.parse()?, dim: config.field.dim, seed: require_seed(&config, "field --tag")? }
                }
                (None, None) => return Err(CliError::Config("field needs --matrix or --tag".into())),
            };
            let c = &config.field;
            let req = FieldRequest {
                grid: c.grid,
                epsilon: c.epsilon,
                path: c.path,
                half_width: c.half_width,
                center: c64::new(c.center[0], c.center[1]),
                threads: config.threads,
            };
            out = Outputs::create(&config.out_dir)?;
            let s = commands::field(source, &req, &mut out)?;
            println!(
                "{}: {}x{} grid, eps {:e}, path {:?}, total mass {:.6}",
                s.source, s.grid.nx, s.grid.ny, s.grid.epsilon, s.path, s.total_mass
            );
        }
        Command::Algebra { files, kfold } => {
            let kfold = match kfold {
                Some(k) => Some((k, require_seed(&config, "algebra --kfold")?)),
                None => None,
            };
            out = Outputs::create(&config.out_dir)?;
            let r = commands::algebra(&files, kfold, &mut out)?;
            println!(
                "closure dim {} of {}, transitive {}{}",
                r.closure_dim,
                r.ambient_dim * r.ambient_dim,
                r.transitive,
                r.kfold.as_ref().map(|k| format!(", {}-fold transitive {}", k.k, k.transitive())).unwrap_or_default()
            );
        }
        Command::Verify { criteria, quick } => {
            if !criteria.is_empty() {
                config.verify.criteria = criteria;
            }
            config.verify.quick |= quick;
            let opts = VerifyOptions { seed: require_seed(&config, "verify")?, threads: config.threads, quick: config.verify.quick };
            out = Outputs::create(&config.out_dir)?;
            let reports = commands::verify(&config.verify.criteria, opts, &mut out)?;
            let failed = reports.iter().filter(|r| !r.passed).count();
            if failed > 0 {
                deferred = Some(CliError::VerifyFailed { failed, total: reports.len() });
            }
        }
    }
    out.finish(argv, config, start.elapsed().as_secs_f64())?;
    match deferred {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    match run(cli, argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn center_parser() {
        assert_eq!(parse_center("-1,0.5").unwrap(), [-1.0, 0.5]);
        assert!(parse_center("1").is_err());
    }
}
