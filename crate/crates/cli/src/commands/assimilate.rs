use crate::config::{parse_kind, parse_mode, Config};
use crate::manifest::ManifestBuilder;
use anyhow::Result;
use nudgelab::assim::{run_experiment, RunConfig};
use nudgelab::io::write_error_series_csv;
use nudgelab::spectral::snapshot::{write_snapshot_file, SnapshotHeader};
use std::path::Path;

pub fn run(dir: &Path, cfg: Config) -> Result<()> {
    let seed = cfg.u64_or("seed", 0)?;
    let mut manifest = ManifestBuilder::new("assimilate", cfg.echo().clone(), seed, dir);

    let run_config = RunConfig {
        n: cfg.usize_or("n", 128)?,
        nu: cfg.f64_or("nu", 1.0)?,
        gamma: cfg.f64_or("gamma", 0.0)?,
        p: cfg.f64_or("p", 0.0)?,
        force_kx: cfg.i64_or("force_kx", 0)?,
        force_ky: cfg.i64_or("force_ky", 1)?,
        grashof: cfg.f64_or("grashof", 50.0)?,
        mu: cfg.f64_or("mu", 0.0)?,
        cells_per_axis: cfg.usize_or("cells", 16)?,
        collar_fraction: cfg.f64_or("collar", 0.2)?,
        kind: parse_kind(&cfg.str_or("kind", "volavg0"))?,
        mode: parse_mode(&cfg.str_or("mode", "h1"))?,
        spin_up_horizon: cfg.f64_or("spin_up", 10.0)?,
        horizon: cfg.f64_or("horizon", 2.0)?,
        save_every: cfg.usize_or("save_every", 10)?,
        seed,
        dt_max: cfg.f64_or("dt_max", 0.01)?,
        stop_floor_rel: cfg.f64_or("stop_floor", 1e-12)?,
        log_observations_every: cfg.usize_or("obs_log_every", 0)?,
    };
    let result = run_experiment(&run_config)?;

    let series = dir.join("error_series.csv");
    write_error_series_csv(&series, &result.tracked_orders, &result.series)?;
    manifest.record(&series);

    let conditions = dir.join("conditions.json");
    std::fs::write(&conditions, serde_json::to_string_pretty(&result.conditions)?)?;
    manifest.record(&conditions);

    let fits = dir.join("decay_fits.json");
    std::fs::write(&fits, serde_json::to_string_pretty(&result.fits)?)?;
    manifest.record(&fits);

    for (idx, (t, obs)) in result.observations.iter().enumerate() {
        for (name, field) in [("jx", &obs.x), ("jy", &obs.y)] {
            let path = dir.join(format!("obs_{idx:05}_{name}.snap"));
            write_snapshot_file(
                &path,
                &SnapshotHeader {
                    n: run_config.n,
                    kind: format!("observation_{name}"),
                    time: *t,
                    nu: run_config.nu,
                    gamma: run_config.gamma,
                    p: run_config.p,
                },
                field,
            )?;
            manifest.record(&path);
        }
    }
    manifest.finish()?;

    let status = if result.outside_regime {
        "outside sufficient regime"
    } else {
        "conditions pass"
    };
    let rate = result.fits[1.min(result.fits.len() - 1)]
        .1
        .as_ref()
        .map(|f| f.lambda);
    println!(
        "assimilate: {status}; fitted lambda_1 = {rate:?}; mu/2 = {}",
        run_config.mu / 2.0
    );
    Ok(())
}
