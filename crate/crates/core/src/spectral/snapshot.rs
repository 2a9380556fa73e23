//! Binary field snapshots: a UTF-8 JSON header line followed by row-major
//! little-endian 64-bit floats of the physical-space samples.

use super::{Grid, SpectralError, SpectralField};
use ndarray::Array2;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SnapshotHeader {
    pub n: usize,
    pub kind: String,
    pub time: f64,
    pub nu: f64,
    pub gamma: f64,
    pub p: f64,
}

pub fn write_snapshot(
    mut w: impl Write,
    header: &SnapshotHeader,
    field: &SpectralField,
) -> Result<(), SpectralError> {
    if field.grid().n() != header.n {
        return Err(SpectralError::SizeMismatch(field.grid().n(), header.n));
    }
    let head = serde_json::to_string(header).map_err(|e| SpectralError::Snapshot(e.to_string()))?;
    writeln!(w, "{head}").map_err(|e| SpectralError::Snapshot(e.to_string()))?;
    let phys = field.to_physical();
    for v in phys.iter() {
        w.write_all(&v.to_le_bytes())
            .map_err(|e| SpectralError::Snapshot(e.to_string()))?;
    }
    Ok(())
}

pub fn read_snapshot(r: impl Read) -> Result<(SnapshotHeader, SpectralField), SpectralError> {
    let mut reader = BufReader::new(r);
    let mut line = String::new();
    reader
        .read_line(&mut line)
        .map_err(|e| SpectralError::Snapshot(e.to_string()))?;
    let header: SnapshotHeader =
        serde_json::from_str(line.trim_end()).map_err(|e| SpectralError::Snapshot(e.to_string()))?;
    let n = header.n;
    let mut buf = vec![0u8; n * n * 8];
    reader
        .read_exact(&mut buf)
        .map_err(|e| SpectralError::Snapshot(e.to_string()))?;
    let mut phys = Array2::<f64>::zeros((n, n));
    for (idx, chunk) in buf.chunks_exact(8).enumerate() {
        phys[[idx / n, idx % n]] = f64::from_le_bytes(chunk.try_into().unwrap());
    }
    let grid = Grid::new(n)?;
    let field = SpectralField::from_physical(grid, &phys)?;
    Ok((header, field))
}

pub fn write_snapshot_file(
    path: impl AsRef<Path>,
    header: &SnapshotHeader,
    field: &SpectralField,
) -> Result<(), SpectralError> {
    let f = std::fs::File::create(path).map_err(|e| SpectralError::Snapshot(e.to_string()))?;
    write_snapshot(std::io::BufWriter::new(f), header, field)
}

pub fn read_snapshot_file(
    path: impl AsRef<Path>,
) -> Result<(SnapshotHeader, SpectralField), SpectralError> {
    let f = std::fs::File::open(path).map_err(|e| SpectralError::Snapshot(e.to_string()))?;
    read_snapshot(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapshot_roundtrip() {
        let grid = Grid::new(16).unwrap();
        let f = SpectralField::from_fn(grid, |x, y| (2.0 * x).sin() + (y - x).cos());
        let header = SnapshotHeader {
            n: 16,
            kind: "ux".into(),
            time: 1.5,
            nu: 0.1,
            gamma: 0.0,
            p: 0.0,
        };
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &header, &f).unwrap();
        let (h2, f2) = read_snapshot(&buf[..]).unwrap();
        assert_eq!(header, h2);
        assert!(f.sub(&f2).max_coeff_magnitude() < 1e-13);
    }
}
