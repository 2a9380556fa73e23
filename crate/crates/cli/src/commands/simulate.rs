use crate::config::Config;
use crate::manifest::ManifestBuilder;
use anyhow::Result;
use nudgelab::io::write_trajectory_csv;
use nudgelab::solver::{spin_up, DtPolicy, ForcingSpec, NseSolver, SolverState, SpinUpOptions};
use nudgelab::spectral::snapshot::{write_snapshot_file, SnapshotHeader};
use nudgelab::spectral::{DissipationSymbol, Grid};
use std::path::Path;

pub fn run(dir: &Path, cfg: Config) -> Result<()> {
    let seed = cfg.u64_or("seed", 0)?;
    let mut manifest = ManifestBuilder::new("simulate", cfg.echo().clone(), seed, dir);

    let n = cfg.usize_or("n", 128)?;
    let grid = Grid::new(n)?;
    let nu = cfg.f64_or("nu", 1.0)?;
    let gamma = cfg.f64_or("gamma", 0.0)?;
    let p = cfg.f64_or("p", 0.0)?;
    let sym = DissipationSymbol::new(nu, gamma, p)?;
    let g = cfg.f64_or("grashof", 0.0)?;
    let kx = cfg.i64_or("force_kx", 0)?;
    let ky = cfg.i64_or("force_ky", 1)?;
    let forcing = if g > 0.0 {
        ForcingSpec::for_grashof(grid, kx, ky, g, nu)?
    } else {
        ForcingSpec::zero(grid)
    };
    let solver = NseSolver::new(grid, sym, forcing);

    let opts = SpinUpOptions {
        horizon: cfg.f64_or("horizon", 20.0)?,
        k_max: cfg.usize_or("k_max", 2)?,
        save_every: cfg.usize_or("save_every", 20)?,
        window: cfg.usize_or("window", 20)?,
    };
    let policy = DtPolicy {
        cfl: cfg.f64_or("cfl", 0.4)?,
        dt_max: cfg.f64_or("dt_max", 0.01)?,
        mu: 0.0,
    };
    let (final_state, report, series) = spin_up(&solver, SolverState::rest(grid), policy, opts)?;

    let traj = dir.join("trajectory.csv");
    write_trajectory_csv(&traj, opts.k_max, &series)?;
    manifest.record(&traj);

    let ball = dir.join("absorbing_ball.json");
    std::fs::write(&ball, serde_json::to_string_pretty(&report)?)?;
    manifest.record(&ball);

    for (name, field) in [("ux", &final_state.u.x), ("uy", &final_state.u.y)] {
        let path = dir.join(format!("final_{name}.snap"));
        write_snapshot_file(
            &path,
            &SnapshotHeader {
                n,
                kind: name.to_string(),
                time: final_state.t,
                nu,
                gamma,
                p,
            },
            field,
        )?;
        manifest.record(&path);
    }
    manifest.finish()?;
    println!(
        "simulate: t = {:.3}, absorbed = {}, t0 = {:?}",
        final_state.t, report.absorbed, report.t0
    );
    Ok(())
}
