//! Plain-text artifacts: CSV series/tables and the JSON cover description.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a rerun
//! with the same seed and config reproduces byte-identical files.

use crate::assim::ErrorPoint;
use crate::cover::{Cover, CoverError, Subdomain};
use crate::global::GlobalErrorRow;
use crate::interp::ConstantRow;
use crate::solver::TrajectoryPoint;
use crate::util::TorusRect;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

pub fn write_csv(
    path: impl AsRef<Path>,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> std::io::Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "{}", header.join(","))?;
    for row in rows {
        writeln!(f, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn write_error_series_csv(
    path: impl AsRef<Path>,
    tracked: &[usize],
    series: &[ErrorPoint],
) -> std::io::Result<()> {
    let mut header: Vec<String> = vec!["t".into()];
    header.extend(tracked.iter().map(|l| format!("e{l}")));
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    write_csv(
        path,
        &header_refs,
        series.iter().map(|p| {
            let mut row = vec![format!("{}", p.t)];
            row.extend(p.errors.iter().map(|e| format!("{e}")));
            row
        }),
    )
}

pub fn write_trajectory_csv(
    path: impl AsRef<Path>,
    k_max: usize,
    series: &[TrajectoryPoint],
) -> std::io::Result<()> {
    let mut header: Vec<String> = vec!["t".into()];
    header.extend((0..=k_max).map(|k| format!("h{k}_norm")));
    header.extend(["energy", "dissipation", "work"].map(String::from));
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    write_csv(
        path,
        &header_refs,
        series.iter().map(|p| {
            let mut row = vec![format!("{}", p.t)];
            row.extend(p.norms.iter().map(|v| format!("{v}")));
            row.push(format!("{}", p.energy.e));
            row.push(format!("{}", p.energy.d));
            row.push(format!("{}", p.energy.w));
            row
        }),
    )
}

pub fn write_constant_table_csv(
    path: impl AsRef<Path>,
    rows: &[ConstantRow],
) -> std::io::Result<()> {
    write_csv(
        path,
        &["kind", "m", "k", "l", "j", "h", "eps"],
        rows.iter().map(|r| {
            vec![
                r.kind.clone(),
                r.m.to_string(),
                r.k.to_string(),
                r.l.to_string(),
                r.j.to_string(),
                format!("{}", r.h),
                format!("{}", r.eps),
            ]
        }),
    )
}

pub fn write_global_error_csv(
    path: impl AsRef<Path>,
    rows: &[GlobalErrorRow],
) -> std::io::Result<()> {
    write_csv(
        path,
        &["l", "j", "h", "lhs", "rhs", "ratio"],
        rows.iter().map(|r| {
            vec![
                r.l.to_string(),
                r.j.to_string(),
                format!("{}", r.h),
                format!("{}", r.lhs),
                format!("{}", r.rhs),
                format!("{}", r.ratio),
            ]
        }),
    )
}

/// One cell of the JSON cover description.
#[derive(Debug, Serialize, Deserialize)]
pub struct CoverCellDesc {
    pub anchor: [f64; 2],
    pub sides: [f64; 2],
    pub collar: f64,
}

pub fn cover_to_json(cover: &Cover) -> String {
    let cells: Vec<CoverCellDesc> = cover
        .cells()
        .iter()
        .map(|c| CoverCellDesc {
            anchor: [c.rect().x0, c.rect().y0],
            sides: [c.rect().wx, c.rect().wy],
            collar: c.collar(),
        })
        .collect();
    serde_json::to_string_pretty(&cells).expect("serializable")
}

pub fn cover_from_json(text: &str, delta: f64) -> Result<Cover, CoverError> {
    let cells: Vec<CoverCellDesc> = serde_json::from_str(text)
        .map_err(|e| CoverError::BadParams(format!("cover json: {e}")))?;
    let cells = cells
        .into_iter()
        .map(|c| {
            Subdomain::new(
                TorusRect::new(c.anchor[0], c.anchor[1], c.sides[0], c.sides[1]),
                c.collar,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    Cover::from_cells(cells, delta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cover_json_roundtrip() {
        let cover = Cover::uniform(4, 0.2).unwrap();
        let text = cover_to_json(&cover);
        let back = cover_from_json(&text, cover.delta()).unwrap();
        assert_eq!(back.len(), cover.len());
        for (a, b) in cover.cells().iter().zip(back.cells()) {
            assert!((a.rect().x0 - b.rect().x0).abs() < 1e-15);
            assert!((a.collar() - b.collar()).abs() < 1e-15);
        }
    }

    #[test]
    fn csv_bytes_are_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let rows = || {
            (0..5).map(|i| {
                vec![
                    format!("{}", i as f64 * 0.1),
                    format!("{}", (i as f64 * 0.017).exp()),
                ]
            })
        };
        let p1 = dir.path().join("a.csv");
        let p2 = dir.path().join("b.csv");
        write_csv(&p1, &["t", "v"], rows()).unwrap();
        write_csv(&p2, &["t", "v"], rows()).unwrap();
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    }
}
