//! Precompiled fast application of uniform-cover global interpolants on a
//! fixed grid.
//!
//! Observation functionals are evaluated exactly in spectral space: nodal
//! values and cell/patch averages of a band-limited field live on shifted
//! uniform lattices, obtained by (sinc-filtered) spectrum folding and one
//! small inverse FFT. Blending accumulates `psi_q`-weighted local
//! reconstructions over precomputed support tables.

use super::GlobalInterpolant;
use crate::interp::poly::lagrange_basis_coeffs;
use crate::interp::{InterpError, LocalKind};
use crate::spectral::{fold_to_lattice, Fft2, SpectralField};
use crate::util::TWO_PI;
use ndarray::Array2;
use rustfft::num_complex::Complex;
use std::collections::BTreeMap;

type C64 = Complex<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum LatticeSpec {
    /// Point values on the `m x m` half-offset lattice.
    Values { m: usize },
    /// Box averages (side `2pi/m`) centered on the half-offset lattice.
    BoxAvg { m: usize },
    /// First derivatives at lattice points.
    DerivX { m: usize },
    DerivY { m: usize },
}

enum CellOp {
    Constant {
        lattice: LatticeSpec,
    },
    Taylor {
        centers: LatticeSpec,
        dx: LatticeSpec,
        dy: LatticeSpec,
    },
    /// Tensor reconstruction from `(k+1)^2` lattice samples with
    /// basis-value tables over the support.
    Tensor {
        k: usize,
        lattice: LatticeSpec,
        bx: Vec<Vec<f64>>,
        by: Vec<Vec<f64>>,
    },
    /// Global spectral truncation (single full-torus cell).
    Truncation {
        radius: f64,
    },
}

struct CellPlan {
    cx: usize,
    cy: usize,
    x_start: usize,
    x_psi: Vec<f64>,
    y_start: usize,
    y_psi: Vec<f64>,
    op: CellOp,
}

pub struct UniformPlan {
    n: usize,
    cells_per_axis: usize,
    cells: Vec<CellPlan>,
    lattices: Vec<LatticeSpec>,
}

impl UniformPlan {
    /// Build the plan if the interpolant is a uniform lattice cover with
    /// plan-supported operator kinds; `Ok(None)` means the generic path must
    /// be used.
    pub fn build(interp: &GlobalInterpolant, n: usize) -> Result<Option<UniformPlan>, InterpError> {
        let cover = interp.cover();
        let c = (cover.len() as f64).sqrt().round() as usize;
        if c * c != cover.len() {
            return Ok(None);
        }
        let side = TWO_PI / c as f64;
        // verify the cells sit on the standard uniform lattice in row-major order
        for (q, cell) in cover.cells().iter().enumerate() {
            let (ix, iy) = (q % c, q / c);
            let r = cell.rect();
            let ok = (r.wx - side).abs() < 1e-12
                && (r.wy - side).abs() < 1e-12
                && (r.x0 - ix as f64 * side).abs() < 1e-9
                && (r.y0 - iy as f64 * side).abs() < 1e-9;
            if !ok {
                return Ok(None);
            }
        }
        let supported = interp.locals().iter().all(|op| {
            matches!(
                op.kind,
                LocalKind::Nodal0
                    | LocalKind::VolAvg0
                    | LocalKind::Taylor1
                    | LocalKind::Lagrange { .. }
                    | LocalKind::VolPoly { .. }
            ) || (cover.len() == 1 && matches!(op.kind, LocalKind::SpectralLocal { .. }))
        });
        if !supported {
            return Ok(None);
        }

        let dx = TWO_PI / n as f64;
        let ramp = interp.pou().ramp();
        let mut lattices = Vec::new();
        let register = |spec: LatticeSpec, set: &mut Vec<LatticeSpec>| {
            if !set.contains(&spec) {
                set.push(spec);
            }
        };
        let mut cells = Vec::with_capacity(cover.len());
        for (q, (cell, op)) in cover.cells().iter().zip(interp.locals()).enumerate() {
            let (cx, cy) = (q % c, q / c);
            let r = cell.rect();
            // support index range along each axis (weight tables include
            // zero-weight endpoints harmlessly)
            let x_start = ((r.x0 - ramp) / dx).ceil() as i64;
            let x_end = ((r.x0 + r.wx + ramp) / dx).floor() as i64;
            let y_start = ((r.y0 - ramp) / dx).ceil() as i64;
            let y_end = ((r.y0 + r.wy + ramp) / dx).floor() as i64;
            let x_idx: Vec<usize> = (x_start..=x_end.min(x_start + n as i64 - 1))
                .map(|g| g.rem_euclid(n as i64) as usize)
                .collect();
            let y_idx: Vec<usize> = (y_start..=y_end.min(y_start + n as i64 - 1))
                .map(|g| g.rem_euclid(n as i64) as usize)
                .collect();
            let x_psi: Vec<f64> = (0..x_idx.len())
                .map(|t| interp.pou().eval_x(q, (x_start + t as i64) as f64 * dx))
                .collect();
            let y_psi: Vec<f64> = (0..y_idx.len())
                .map(|t| interp.pou().eval_y(q, (y_start + t as i64) as f64 * dx))
                .collect();

            let op = match op.kind {
                LocalKind::Nodal0 => {
                    let l = LatticeSpec::Values { m: c };
                    register(l, &mut lattices);
                    CellOp::Constant { lattice: l }
                }
                LocalKind::VolAvg0 => {
                    let l = LatticeSpec::BoxAvg { m: c };
                    register(l, &mut lattices);
                    CellOp::Constant { lattice: l }
                }
                LocalKind::Taylor1 => {
                    let v = LatticeSpec::Values { m: c };
                    let dxs = LatticeSpec::DerivX { m: c };
                    let dys = LatticeSpec::DerivY { m: c };
                    register(v, &mut lattices);
                    register(dxs, &mut lattices);
                    register(dys, &mut lattices);
                    CellOp::Taylor {
                        centers: v,
                        dx: dxs,
                        dy: dys,
                    }
                }
                LocalKind::Lagrange { k } => {
                    let m = c * (k + 1);
                    let l = LatticeSpec::Values { m };
                    register(l, &mut lattices);
                    // cardinal basis values at the support grid coordinates,
                    // in coordinates relative to the cell anchor
                    let sp = side / (k + 1) as f64;
                    let nodes: Vec<f64> = (0..=k).map(|i| (i as f64 + 0.5) * sp).collect();
                    let coeffs: Vec<Vec<f64>> =
                        (0..=k).map(|i| lagrange_basis_coeffs(&nodes, i)).collect();
                    let eval = |co: &[f64], t: f64| {
                        co.iter().rev().fold(0.0, |acc, &cc| acc * t + cc)
                    };
                    let bx: Vec<Vec<f64>> = (0..x_idx.len())
                        .map(|t| {
                            let xg = (x_start + t as i64) as f64 * dx - r.x0;
                            coeffs.iter().map(|co| eval(co, xg)).collect()
                        })
                        .collect();
                    let by: Vec<Vec<f64>> = (0..y_idx.len())
                        .map(|t| {
                            let yg = (y_start + t as i64) as f64 * dx - r.y0;
                            coeffs.iter().map(|co| eval(co, yg)).collect()
                        })
                        .collect();
                    CellOp::Tensor { k, lattice: l, bx, by }
                }
                LocalKind::VolPoly { k } => {
                    let m = c * (k + 1);
                    let l = LatticeSpec::BoxAvg { m };
                    register(l, &mut lattices);
                    let duals = dual_values(side, k)?;
                    let eval = |co: &[f64], t: f64| {
                        co.iter().rev().fold(0.0, |acc, &cc| acc * t + cc)
                    };
                    let bx: Vec<Vec<f64>> = (0..x_idx.len())
                        .map(|t| {
                            let xg = (x_start + t as i64) as f64 * dx - r.x0;
                            duals.iter().map(|co| eval(co, xg)).collect()
                        })
                        .collect();
                    let by: Vec<Vec<f64>> = (0..y_idx.len())
                        .map(|t| {
                            let yg = (y_start + t as i64) as f64 * dx - r.y0;
                            duals.iter().map(|co| eval(co, yg)).collect()
                        })
                        .collect();
                    CellOp::Tensor { k, lattice: l, bx, by }
                }
                LocalKind::SpectralLocal { n_modes } => CellOp::Truncation { radius: n_modes },
                LocalKind::SobolevPoly { .. } => unreachable!("filtered out above"),
            };
            cells.push(CellPlan {
                cx,
                cy,
                x_start: x_start.rem_euclid(n as i64) as usize,
                x_psi,
                y_start: y_start.rem_euclid(n as i64) as usize,
                y_psi,
                op,
            });
        }
        Ok(Some(UniformPlan {
            n,
            cells_per_axis: c,
            cells,
            lattices,
        }))
    }

    /// Blended interpolant samples on the grid.
    pub fn apply(&self, phi: &SpectralField) -> Array2<f64> {
        let n = self.n;
        debug_assert_eq!(phi.grid().n(), n);
        // extract all observation lattices
        let mut latvals: BTreeMap<LatticeSpec, Array2<f64>> = BTreeMap::new();
        for &spec in &self.lattices {
            latvals.insert(spec, extract_lattice(phi, spec));
        }
        let mut out = Array2::<f64>::zeros((n, n));
        let c = self.cells_per_axis;
        let side = TWO_PI / c as f64;
        let dxg = TWO_PI / n as f64;
        for cell in &self.cells {
            match &cell.op {
                CellOp::Truncation { radius } => {
                    // single-cell spectral: truncate and synthesize globally
                    let grid = phi.grid();
                    let mut masked = phi.coeffs().clone();
                    for i in 0..n {
                        let ky = grid.wavenumber(i) as f64;
                        for j in 0..n {
                            let kx = grid.wavenumber(j) as f64;
                            if kx.hypot(ky) > *radius {
                                masked[[i, j]] = C64::new(0.0, 0.0);
                            }
                        }
                    }
                    let vals = Fft2::get(n).inverse(&masked);
                    for i in 0..n {
                        for j in 0..n {
                            out[[i, j]] += vals[[i, j]];
                        }
                    }
                }
                CellOp::Constant { lattice } => {
                    let v = latvals[lattice][[cell.cy, cell.cx]];
                    accumulate(&mut out, cell, |_, _| v);
                }
                CellOp::Taylor { centers, dx, dy } => {
                    let v = latvals[centers][[cell.cy, cell.cx]];
                    let gx = latvals[dx][[cell.cy, cell.cx]];
                    let gy = latvals[dy][[cell.cy, cell.cx]];
                    let cx0 = (cell.cx as f64 + 0.5) * side;
                    let cy0 = (cell.cy as f64 + 0.5) * side;
                    let xs = cell.x_start as f64;
                    let ys = cell.y_start as f64;
                    accumulate(&mut out, cell, |tx, ty| {
                        // support coordinates relative to the center; the
                        // support range never wraps more than once
                        let x = (xs + tx as f64) * dxg;
                        let y = (ys + ty as f64) * dxg;
                        let ddx = wrap_pm(x - cx0);
                        let ddy = wrap_pm(y - cy0);
                        v + gx * ddx + gy * ddy
                    });
                }
                CellOp::Tensor { k, lattice, bx, by } => {
                    let lat = &latvals[lattice];
                    let k1 = k + 1;
                    let base_x = cell.cx * k1;
                    let base_y = cell.cy * k1;
                    accumulate(&mut out, cell, |tx, ty| {
                        let bxr = &bx[tx];
                        let byr = &by[ty];
                        let mut acc = 0.0;
                        for (b, byv) in byr.iter().enumerate() {
                            if *byv == 0.0 {
                                continue;
                            }
                            let mut row = 0.0;
                            for (a, bxv) in bxr.iter().enumerate() {
                                row += lat[[base_y + b, base_x + a]] * bxv;
                            }
                            acc += byv * row;
                        }
                        acc
                    });
                }
            }
        }
        out
    }
}

#[inline]
fn wrap_pm(d: f64) -> f64 {
    d - TWO_PI * (d / TWO_PI).round()
}

fn accumulate(out: &mut Array2<f64>, cell: &CellPlan, f: impl Fn(usize, usize) -> f64) {
    let n = out.nrows();
    for (ty, wy) in cell.y_psi.iter().enumerate() {
        if *wy == 0.0 {
            continue;
        }
        let gi = (cell.y_start + ty) % n;
        for (tx, wx) in cell.x_psi.iter().enumerate() {
            let w = wx * wy;
            if w == 0.0 {
                continue;
            }
            let gj = (cell.x_start + tx) % n;
            out[[gi, gj]] += w * f(tx, ty);
        }
    }
}

/// Exact lattice extraction for a band-limited field.
fn extract_lattice(phi: &SpectralField, spec: LatticeSpec) -> Array2<f64> {
    let grid = phi.grid();
    match spec {
        LatticeSpec::Values { m } => phi.eval_lattice(m, 0.5, 0.5),
        LatticeSpec::DerivX { m } => phi.derivative(1, 0).eval_lattice(m, 0.5, 0.5),
        LatticeSpec::DerivY { m } => phi.derivative(0, 1).eval_lattice(m, 0.5, 0.5),
        LatticeSpec::BoxAvg { m } => {
            // multiply by the box-average transfer sinc(k w/2) per axis, then
            // evaluate at box centers
            let w = TWO_PI / m as f64;
            let n = grid.n();
            let mut filtered = phi.coeffs().clone();
            let sinc = |t: f64| if t == 0.0 { 1.0 } else { t.sin() / t };
            for i in 0..n {
                let ky = grid.wavenumber(i) as f64;
                let fy = sinc(ky * w / 2.0);
                for j in 0..n {
                    let kx = grid.wavenumber(j) as f64;
                    filtered[[i, j]] *= fy * sinc(kx * w / 2.0);
                }
            }
            fold_to_lattice(&filtered, move |i| grid.wavenumber(i), m, 0.5, 0.5)
        }
    }
}

/// Ascending-power coefficients of the 1D dual polynomials of normalized
/// patch averages on `[0, side]` split into `k+1` patches, in cell-local
/// coordinates.
fn dual_values(side: f64, k: usize) -> Result<Vec<Vec<f64>>, InterpError> {
    let n = k + 1;
    let sp = side / n as f64;
    let mut mm = Array2::zeros((n, n));
    for i in 0..n {
        let a = i as f64 * sp;
        let b = a + sp;
        for l in 0..n {
            mm[[i, l]] = (b.powi(l as i32 + 1) - a.powi(l as i32 + 1)) / ((l + 1) as f64 * sp);
        }
    }
    let mut duals = Vec::with_capacity(n);
    for j in 0..n {
        let mut rhs = vec![0.0; n];
        rhs[j] = 1.0;
        let c = crate::interp::poly::solve_dense(&mm, &rhs).ok_or(InterpError::IllConditioned(k))?;
        duals.push(c);
    }
    Ok(duals)
}
