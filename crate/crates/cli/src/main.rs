//! Command-line front end: simulation, assimilation, interpolation studies,
//! and the verification suite, with reproducible manifests.

mod commands;
mod config;
mod manifest;

use anyhow::Result;
use clap::{Parser, Subcommand};
use config::Config;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "nudgelab", version, about = "Mesh-free interpolant observables and nudging for 2D Navier-Stokes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the momentum equation and monitor the absorbing balls.
    Simulate(CommonArgs),
    /// Run a coupled truth/observer experiment with nudging feedback.
    Assimilate(CommonArgs),
    /// Convergence-order tables for an interpolant family across an h ladder.
    InterpStudy(CommonArgs),
    /// Partition-of-unity, unisolvence, projection, and counting checks.
    Verify(CommonArgs),
}

#[derive(clap::Args)]
struct CommonArgs {
    /// key = value config file
    #[arg(long)]
    config: Option<PathBuf>,
    /// RNG seed (overrides the config's `seed`)
    #[arg(long)]
    seed: Option<u64>,
    /// output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// sweep grid, e.g. `mu=1,2;cells=8,16`: forks one job per combination
    #[arg(long)]
    sweep: Option<String>,
}

/// Exit codes: 0 success (including informational "outside regime"),
/// 1 config error, 2 numerical abort.
fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<nudgelab::solver::SolverError>().is_some()
                || e.downcast_ref::<nudgelab::assim::AssimError>().is_some()
            {
                2
            } else {
                1
            }
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<()> {
    let (name, args): (&str, &CommonArgs) = match &cli.command {
        Command::Simulate(a) => ("simulate", a),
        Command::Assimilate(a) => ("assimilate", a),
        Command::InterpStudy(a) => ("interp-study", a),
        Command::Verify(a) => ("verify", a),
    };
    let mut base = match &args.config {
        Some(path) => Config::load(path)?,
        None => {
            let mut c = Config::default();
            c.apply_env_overrides();
            c
        }
    };
    if let Some(seed) = args.seed {
        base.set("seed", &seed.to_string());
    }

    let jobs: Vec<(PathBuf, Config)> = match &args.sweep {
        None => vec![(args.out.clone(), base)],
        Some(spec) => {
            let combos = config::parse_sweep(spec)?;
            combos
                .into_iter()
                .enumerate()
                .map(|(idx, overrides)| {
                    let mut cfg = base.clone();
                    let mut label = format!("job-{idx:03}");
                    for (k, v) in &overrides {
                        cfg.set(k, v);
                        label.push_str(&format!("-{k}={v}"));
                    }
                    (args.out.join(label), cfg)
                })
                .collect()
        }
    };

    // one solver job per invocation; sweeps fork independent jobs with
    // isolated output directories
    if jobs.len() == 1 {
        let (dir, cfg) = jobs.into_iter().next().unwrap();
        dispatch(name, &dir, cfg)
    } else {
        let name = name.to_string();
        let handles: Vec<_> = jobs
            .into_iter()
            .map(|(dir, cfg)| {
                let name = name.clone();
                std::thread::spawn(move || dispatch(&name, &dir, cfg))
            })
            .collect();
        let mut first_err = None;
        for h in handles {
            match h.join() {
                Ok(Ok(())) => {}
                Ok(Err(e)) => first_err = first_err.or(Some(e)),
                Err(_) => {
                    first_err =
                        first_err.or(Some(anyhow::anyhow!("sweep job panicked")));
                }
            }
        }
        first_err.map_or(Ok(()), Err)
    }
}

fn dispatch(name: &str, dir: &PathBuf, cfg: Config) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    match name {
        "simulate" => commands::simulate::run(dir, cfg),
        "assimilate" => commands::assimilate::run(dir, cfg),
        "interp-study" => commands::interp_study::run(dir, cfg),
        "verify" => commands::verify::run(dir, cfg),
        _ => unreachable!(),
    }
}
