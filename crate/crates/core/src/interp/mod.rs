//! Local interpolant observable operators.
//!
//! Each operator is a linear, finite-rank map from observed data on one
//! collared subdomain into either a tensor polynomial or a truncated local
//! Fourier sum. An operator of declared order `m` at level `k >= m+1`
//! controls `H^l` errors for `l <= m` from smoothness up to `H^k`; the
//! `optimal` flag marks operators that are simultaneously of order `k'-1` at
//! level `k'` for every `k' <= k`.

pub mod constants;
pub mod dual_basis;
pub mod poly;
pub mod sampler;

pub use constants::{
    band_limited_ensemble, check_inverse_inequality, convergence_order, estimate_constant,
    local_error_seminorm, local_field_seminorm, ConstantRow,
};
pub use dual_basis::{build_volpoly_dual_basis, DualBasisVolPoly};
pub use poly::TensorPoly;
pub use sampler::{FnSampler, Sampler, SpectralSampler};

use crate::cover::Subdomain;
use crate::util::{TorusRect, TWO_PI};
use ndarray::Array2;
use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

type C64 = Complex<f64>;

#[derive(Debug, Error)]
pub enum InterpError {
    #[error("too few samples: need at least {need} quadrature points per axis, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("polynomial degree {0} out of supported range 1..=8")]
    DegreeOutOfRange(usize),
    #[error("dual basis is ill-conditioned beyond m = 8 (got {0})")]
    IllConditioned(usize),
    #[error("zero-norm denominator in every ensemble member")]
    DegenerateEnsemble,
    #[error("operator of order {order} cannot be tested at l = {l}")]
    OrderViolation { order: usize, l: usize },
}

/// The operator families of the framework.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LocalKind {
    /// Truncated local Fourier sum over wavevectors within radius `n_modes`.
    SpectralLocal { n_modes: f64 },
    /// Constant equal to the nodal value at the cell center.
    Nodal0,
    /// Constant equal to the cell average.
    VolAvg0,
    /// First-order Taylor polynomial about the cell center.
    Taylor1,
    /// Mollifier-averaged Taylor polynomial of degree `k`.
    SobolevPoly { k: usize },
    /// Tensor Lagrange interpolation on `(k+1)^2` interior nodes.
    Lagrange { k: usize },
    /// Tensor volume-element polynomial from `(k+1)^2` patch averages.
    VolPoly { k: usize },
}

impl LocalKind {
    pub fn name(&self) -> String {
        match self {
            LocalKind::SpectralLocal { n_modes } => format!("spectral({n_modes})"),
            LocalKind::Nodal0 => "nodal0".into(),
            LocalKind::VolAvg0 => "volavg0".into(),
            LocalKind::Taylor1 => "taylor1".into(),
            LocalKind::SobolevPoly { k } => format!("sobolev{k}"),
            LocalKind::Lagrange { k } => format!("lagrange{k}"),
            LocalKind::VolPoly { k } => format!("volpoly{k}"),
        }
    }
}

/// A local interpolant observable operator with its declared order and level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalInterpolant {
    pub kind: LocalKind,
    pub order: usize,
    pub level: usize,
    pub optimal: bool,
}

impl LocalInterpolant {
    pub fn spectral_local(n_modes: f64) -> Self {
        LocalInterpolant {
            kind: LocalKind::SpectralLocal { n_modes },
            order: 1,
            level: 2,
            optimal: true,
        }
    }

    pub fn nodal0() -> Self {
        LocalInterpolant {
            kind: LocalKind::Nodal0,
            order: 0,
            level: 2,
            optimal: false,
        }
    }

    pub fn vol_avg0() -> Self {
        LocalInterpolant {
            kind: LocalKind::VolAvg0,
            order: 0,
            level: 1,
            optimal: true,
        }
    }

    pub fn taylor1() -> Self {
        LocalInterpolant {
            kind: LocalKind::Taylor1,
            order: 1,
            level: 3,
            optimal: false,
        }
    }

    pub fn sobolev_poly(k: usize) -> Result<Self, InterpError> {
        if !(1..=8).contains(&k) {
            return Err(InterpError::DegreeOutOfRange(k));
        }
        Ok(LocalInterpolant {
            kind: LocalKind::SobolevPoly { k },
            order: k,
            level: k + 1,
            optimal: false,
        })
    }

    pub fn lagrange(k: usize) -> Result<Self, InterpError> {
        if !(1..=8).contains(&k) {
            return Err(InterpError::DegreeOutOfRange(k));
        }
        Ok(LocalInterpolant {
            kind: LocalKind::Lagrange { k },
            order: k,
            level: k + 1,
            optimal: true,
        })
    }

    pub fn vol_poly(k: usize) -> Result<Self, InterpError> {
        if !(1..=8).contains(&k) {
            return Err(InterpError::DegreeOutOfRange(k));
        }
        Ok(LocalInterpolant {
            kind: LocalKind::VolPoly { k },
            order: k,
            level: k + 1,
            optimal: true,
        })
    }

    /// Minimum quadrature points per axis demanded by the operator.
    fn min_quad(&self) -> usize {
        match self.kind {
            LocalKind::SobolevPoly { k } | LocalKind::Lagrange { k } | LocalKind::VolPoly { k } => {
                k + 2
            }
            _ => 2,
        }
    }
}

/// Finite-rank output of a local operator.
#[derive(Debug, Clone)]
pub enum LocalOutput {
    Poly(TensorPoly),
    Fourier(LocalFourier),
}

/// Truncated Fourier sum with cell-commensurate fundamental frequencies.
#[derive(Debug, Clone)]
pub struct LocalFourier {
    pub base: (f64, f64),
    pub kappa: (f64, f64),
    /// `(px, py, coeff)` with wavevector `(px*kappa.0, py*kappa.1)`.
    pub modes: Vec<(i64, i64, C64)>,
}

impl LocalFourier {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        // unwrap the evaluation point near the cell so that non-integer
        // frequencies are evaluated on the correct branch
        let dx = wrap_pm(x - self.base.0);
        let dy = wrap_pm(y - self.base.1);
        let (x, y) = (self.base.0 + dx, self.base.1 + dy);
        let mut acc = C64::new(0.0, 0.0);
        for &(px, py, c) in &self.modes {
            let phase = self.kappa.0 * px as f64 * x + self.kappa.1 * py as f64 * y;
            acc += c * C64::from_polar(1.0, phase);
        }
        acc.re
    }

    pub fn derivative_eval(&self, ax: usize, ay: usize, x: f64, y: f64) -> f64 {
        let dx = wrap_pm(x - self.base.0);
        let dy = wrap_pm(y - self.base.1);
        let (x, y) = (self.base.0 + dx, self.base.1 + dy);
        let mut acc = C64::new(0.0, 0.0);
        for &(px, py, c) in &self.modes {
            let (kx, ky) = (self.kappa.0 * px as f64, self.kappa.1 * py as f64);
            let sym = C64::new(0.0, kx).powu(ax as u32) * C64::new(0.0, ky).powu(ay as u32);
            acc += c * sym * C64::from_polar(1.0, kx * x + ky * y);
        }
        acc.re
    }
}

impl LocalOutput {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            LocalOutput::Poly(p) => p.eval(x, y),
            LocalOutput::Fourier(f) => f.eval(x, y),
        }
    }

    pub fn derivative_eval(&self, ax: usize, ay: usize, x: f64, y: f64) -> f64 {
        match self {
            LocalOutput::Poly(p) => p.derivative(ax, ay).eval(x, y),
            LocalOutput::Fourier(f) => f.derivative_eval(ax, ay, x, y),
        }
    }

    /// Homogeneous local seminorm over a rectangle by midpoint quadrature.
    pub fn local_seminorm(&self, rect: &TorusRect, l: usize, quad_per_axis: usize) -> f64 {
        match self {
            LocalOutput::Poly(p) => p.local_seminorm(rect, l, quad_per_axis),
            LocalOutput::Fourier(_) => {
                let m = quad_per_axis;
                let (hx, hy) = (rect.wx / m as f64, rect.wy / m as f64);
                let mut acc = 0.0;
                for i in 0..m {
                    for j in 0..m {
                        let x = rect.x0 + (j as f64 + 0.5) * hx;
                        let y = rect.y0 + (i as f64 + 0.5) * hy;
                        for a in 0..=l {
                            let v = self.derivative_eval(a, l - a, x, y);
                            acc += v * v;
                        }
                    }
                }
                (acc * hx * hy).sqrt()
            }
        }
    }
}

#[inline]
fn wrap_pm(d: f64) -> f64 {
    d - TWO_PI * (d / TWO_PI).round()
}

/// Composite-Gauss average of `f` over a rectangle: `m` nodes per axis
/// arranged as 3-point Gauss panels. Exact on the polynomial degrees the
/// operators reconstruct.
fn panel_avg(rect: &TorusRect, m: usize, f: impl Fn(f64, f64) -> f64) -> f64 {
    const GX: [f64; 3] = [-0.7745966692414834, 0.0, 0.7745966692414834];
    const GW: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
    let panels = m.div_ceil(3).max(1);
    let (px, py) = (rect.wx / panels as f64, rect.wy / panels as f64);
    let mut acc = 0.0;
    for i in 0..panels {
        let yc = rect.y0 + (i as f64 + 0.5) * py;
        for j in 0..panels {
            let xc = rect.x0 + (j as f64 + 0.5) * px;
            for (gy, wy) in GX.iter().zip(GW) {
                for (gx, wx) in GX.iter().zip(GW) {
                    let x = (xc + 0.5 * px * gx).rem_euclid(TWO_PI);
                    let y = (yc + 0.5 * py * gy).rem_euclid(TWO_PI);
                    acc += wx * wy * f(x, y);
                }
            }
        }
    }
    acc / (4.0 * (panels * panels) as f64)
}

/// Quadrature resolution for [`apply_local`]; the default is the production
/// setting, oracle checks refine by 4.
#[derive(Debug, Clone, Copy)]
pub struct ApplyOptions {
    pub quad_per_axis: usize,
}

impl Default for ApplyOptions {
    fn default() -> Self {
        ApplyOptions { quad_per_axis: 16 }
    }
}

/// Cell-center anchor used by the nodal operators.
pub fn cell_center(cell: &Subdomain) -> (f64, f64) {
    let r = cell.rect();
    (
        (r.x0 + 0.5 * r.wx).rem_euclid(TWO_PI),
        (r.y0 + 0.5 * r.wy).rem_euclid(TWO_PI),
    )
}

/// Apply a local operator to observed data over one cell.
pub fn apply_local(
    op: &LocalInterpolant,
    cell: &Subdomain,
    sampler: &dyn Sampler,
    opts: ApplyOptions,
) -> Result<LocalOutput, InterpError> {
    let m = opts.quad_per_axis;
    if m < op.min_quad() {
        return Err(InterpError::TooFewSamples {
            need: op.min_quad(),
            got: m,
        });
    }
    let rect = *cell.rect();
    let anchor = cell_center(cell);
    match op.kind {
        LocalKind::Nodal0 => Ok(LocalOutput::Poly(TensorPoly::constant(
            anchor,
            sampler.value(anchor.0, anchor.1),
        ))),
        LocalKind::VolAvg0 => Ok(LocalOutput::Poly(TensorPoly::constant(
            anchor,
            panel_avg(&rect, m, |x, y| sampler.value(x, y)),
        ))),
        LocalKind::Taylor1 => {
            let v = sampler.value(anchor.0, anchor.1);
            let gx = sampler.derivative(1, 0, anchor.0, anchor.1);
            let gy = sampler.derivative(0, 1, anchor.0, anchor.1);
            let mut coeffs = Array2::zeros((2, 2));
            coeffs[[0, 0]] = v;
            coeffs[[0, 1]] = gx;
            coeffs[[1, 0]] = gy;
            Ok(LocalOutput::Poly(TensorPoly { anchor, coeffs }))
        }
        LocalKind::SobolevPoly { k } => sobolev_poly(k, cell, sampler, m),
        LocalKind::Lagrange { k } => {
            let nodes_x = interior_nodes(rect.x0, rect.wx, k);
            let nodes_y = interior_nodes(rect.y0, rect.wy, k);
            let mut vals = Array2::zeros((k + 1, k + 1));
            for (i, &y) in nodes_y.iter().enumerate() {
                for (j, &x) in nodes_x.iter().enumerate() {
                    vals[[i, j]] = sampler.value(x.rem_euclid(TWO_PI), y.rem_euclid(TWO_PI));
                }
            }
            Ok(LocalOutput::Poly(nodal_to_poly(
                anchor, &nodes_x, &nodes_y, &vals,
            )))
        }
        LocalKind::VolPoly { k } => {
            let mut vals = Array2::zeros((k + 1, k + 1));
            let sp_x = rect.wx / (k + 1) as f64;
            let sp_y = rect.wy / (k + 1) as f64;
            let mq = m.div_ceil(k + 1).max(2);
            for i in 0..=k {
                for j in 0..=k {
                    let patch = TorusRect::new(
                        rect.x0 + j as f64 * sp_x,
                        rect.y0 + i as f64 * sp_y,
                        sp_x,
                        sp_y,
                    );
                    vals[[i, j]] = panel_avg(&patch, mq, |x, y| sampler.value(x, y));
                }
            }
            Ok(LocalOutput::Poly(volpoly_from_averages(
                anchor, &rect, k, &vals,
            )?))
        }
        LocalKind::SpectralLocal { n_modes } => {
            let kappa = (TWO_PI / rect.wx, TWO_PI / rect.wy);
            let px_max = (n_modes / kappa.0).floor() as i64;
            let py_max = (n_modes / kappa.1).floor() as i64;
            // the midpoint rule on the cell aliases local modes with period
            // equal to the point count, so resolve well past the mode radius
            let mq = m.max(4 * px_max.max(py_max).max(1) as usize + 8);
            let (hx, hy) = (rect.wx / mq as f64, rect.wy / mq as f64);
            let mut vals = Array2::<f64>::zeros((mq, mq));
            for i in 0..mq {
                for j in 0..mq {
                    let xraw = rect.x0 + (j as f64 + 0.5) * hx;
                    let yraw = rect.y0 + (i as f64 + 0.5) * hy;
                    vals[[i, j]] = sampler.value(xraw.rem_euclid(TWO_PI), yraw.rem_euclid(TWO_PI));
                }
            }
            let mut modes = Vec::new();
            for py in -py_max..=py_max {
                for px in -px_max..=px_max {
                    let kx = kappa.0 * px as f64;
                    let ky = kappa.1 * py as f64;
                    if kx.hypot(ky) > n_modes {
                        continue;
                    }
                    // local Fourier coefficient by quadrature over Q; phases
                    // use unwrapped coordinates consistent with eval
                    let mut acc = C64::new(0.0, 0.0);
                    for i in 0..mq {
                        let yraw = rect.y0 + (i as f64 + 0.5) * hy;
                        let phy = C64::from_polar(1.0, -ky * yraw);
                        for j in 0..mq {
                            let xraw = rect.x0 + (j as f64 + 0.5) * hx;
                            acc += vals[[i, j]] * phy * C64::from_polar(1.0, -kx * xraw);
                        }
                    }
                    modes.push((px, py, acc / (mq * mq) as f64));
                }
            }
            Ok(LocalOutput::Fourier(LocalFourier {
                base: (rect.x0, rect.y0),
                kappa,
                modes,
            }))
        }
    }
}

/// `(k+1)` equally spaced nodes strictly inside the side, offset half a node
/// spacing from the edges.
fn interior_nodes(start: f64, len: f64, k: usize) -> Vec<f64> {
    let sp = len / (k + 1) as f64;
    (0..=k).map(|i| start + (i as f64 + 0.5) * sp).collect()
}

/// Tensor Lagrange reconstruction from nodal values.
fn nodal_to_poly(
    anchor: (f64, f64),
    nodes_x: &[f64],
    nodes_y: &[f64],
    vals: &Array2<f64>,
) -> TensorPoly {
    let k = nodes_x.len() - 1;
    // local coordinates relative to the anchor, unwrapped
    let lx: Vec<f64> = nodes_x.iter().map(|&x| wrap_pm(x - anchor.0)).collect();
    let ly: Vec<f64> = nodes_y.iter().map(|&y| wrap_pm(y - anchor.1)).collect();
    let bx: Vec<Vec<f64>> = (0..=k).map(|i| poly::lagrange_basis_coeffs(&lx, i)).collect();
    let by: Vec<Vec<f64>> = (0..=k).map(|i| poly::lagrange_basis_coeffs(&ly, i)).collect();
    let mut coeffs = Array2::zeros((k + 1, k + 1));
    for i in 0..=k {
        for j in 0..=k {
            let v = vals[[i, j]];
            if v == 0.0 {
                continue;
            }
            for (pi, &cy) in by[i].iter().enumerate() {
                for (pj, &cx) in bx[j].iter().enumerate() {
                    coeffs[[pi, pj]] += v * cy * cx;
                }
            }
        }
    }
    TensorPoly { anchor, coeffs }
}

/// Volume-element polynomial from normalized patch averages via the tensor
/// dual basis (unisolvence of the patch functionals).
fn volpoly_from_averages(
    anchor: (f64, f64),
    rect: &TorusRect,
    k: usize,
    avgs: &Array2<f64>,
) -> Result<TensorPoly, InterpError> {
    let dual_x = dual_basis_1d(wrap_pm(rect.x0 - anchor.0), rect.wx, k)?;
    let dual_y = dual_basis_1d(wrap_pm(rect.y0 - anchor.1), rect.wy, k)?;
    let mut coeffs = Array2::zeros((k + 1, k + 1));
    for i in 0..=k {
        for j in 0..=k {
            let v = avgs[[i, j]];
            if v == 0.0 {
                continue;
            }
            for (pi, &cy) in dual_y[i].iter().enumerate() {
                for (pj, &cx) in dual_x[j].iter().enumerate() {
                    coeffs[[pi, pj]] += v * cy * cx;
                }
            }
        }
    }
    Ok(TensorPoly { anchor, coeffs })
}

/// 1D dual polynomials of the normalized patch-average functionals on
/// `[start, start+len]` (local coordinates), split into `k+1` equal patches:
/// `xi_j` with `avg_{patch_i}(xi_j) = delta_ij`. Ascending-power coefficients.
fn dual_basis_1d(start: f64, len: f64, k: usize) -> Result<Vec<Vec<f64>>, InterpError> {
    let n = k + 1;
    let sp = len / n as f64;
    // moment matrix M[i][l] = normalized integral of t^l over patch i
    let mut mm = Array2::zeros((n, n));
    for i in 0..n {
        let a = start + i as f64 * sp;
        let b = a + sp;
        for l in 0..n {
            mm[[i, l]] = (b.powi(l as i32 + 1) - a.powi(l as i32 + 1)) / ((l + 1) as f64 * sp);
        }
    }
    let mut duals = Vec::with_capacity(n);
    for j in 0..n {
        let mut rhs = vec![0.0; n];
        rhs[j] = 1.0;
        let c = poly::solve_dense(&mm, &rhs).ok_or(InterpError::IllConditioned(k))?;
        duals.push(c);
    }
    Ok(duals)
}

/// Mollifier-averaged Taylor polynomial of degree `k` about the cell center,
/// with mollifier radius equal to half the smaller cell side.
fn sobolev_poly(
    k: usize,
    cell: &Subdomain,
    sampler: &dyn Sampler,
    m: usize,
) -> Result<LocalOutput, InterpError> {
    let anchor = cell_center(cell);
    let radius = 0.5 * cell.min_side();
    let quad = 2 * m; // the mollified integrands carry more structure
    let hq = 2.0 * radius / quad as f64;
    // quadrature nodes inside the mollifier support, in centered coordinates;
    // weights are normalized to unit discrete mass so constants are
    // reproduced exactly
    let mut nodes: Vec<(f64, f64, f64)> = Vec::new();
    let mut total = 0.0;
    for i in 0..quad {
        for j in 0..quad {
            let yx = -radius + (j as f64 + 0.5) * hq;
            let yy = -radius + (i as f64 + 0.5) * hq;
            let r2 = (yx * yx + yy * yy) / (radius * radius);
            if r2 >= 1.0 {
                continue;
            }
            let w = (-1.0 / (1.0 - r2)).exp() * hq * hq;
            total += w;
            nodes.push((yx, yy, w));
        }
    }
    for node in &mut nodes {
        node.2 /= total;
    }
    let factorial = |p: usize| -> f64 { (1..=p).map(|v| v as f64).product::<f64>().max(1.0) };
    let binom =
        |n: usize, r: usize| -> f64 { factorial(n) / (factorial(r) * factorial(n - r)) };
    let mut coeffs = Array2::zeros((k + 1, k + 1));
    // sum over |alpha| <= k of (1/alpha!) int d^alpha phi(y) (x-y)^alpha psi~(y) dy,
    // expanded into monomials (x - x_Q)^beta
    for ax in 0..=k {
        for ay in 0..=(k - ax) {
            let dvals: Vec<f64> = nodes
                .iter()
                .map(|&(yx, yy, _)| {
                    sampler.derivative(
                        ax,
                        ay,
                        (anchor.0 + yx).rem_euclid(TWO_PI),
                        (anchor.1 + yy).rem_euclid(TWO_PI),
                    )
                })
                .collect();
            let inv_fact = 1.0 / (factorial(ax) * factorial(ay));
            for bx in 0..=ax {
                for by in 0..=ay {
                    let (px, py) = (ax - bx, ay - by);
                    let mut moment = 0.0;
                    for (idx, &(yx, yy, w)) in nodes.iter().enumerate() {
                        moment += dvals[idx] * (-yx).powi(px as i32) * (-yy).powi(py as i32) * w;
                    }
                    coeffs[[by, bx]] += inv_fact * binom(ax, bx) * binom(ay, by) * moment;
                }
            }
        }
    }
    Ok(LocalOutput::Poly(TensorPoly { anchor, coeffs }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Grid, SpectralField};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn unit_cell(x0: f64, y0: f64, w: f64) -> Subdomain {
        Subdomain::new(TorusRect::new(x0, y0, w, w), 0.15 * w).unwrap()
    }

    #[test]
    fn nodal0_reproduces_constants() {
        let cell = unit_cell(1.0, 2.0, 1.0);
        let s = FnSampler::new(|_, _| 5.0);
        let out = apply_local(&LocalInterpolant::nodal0(), &cell, &s, Default::default()).unwrap();
        assert_eq!(out.eval(1.2, 2.3), 5.0);
        assert_eq!(out.eval(1.9, 2.9), 5.0);
    }

    #[test]
    fn volavg_of_sin_over_quarter_box() {
        // (1/|Q|) int_[0,pi]^2 sin x = 2/pi
        let cell = Subdomain::new(TorusRect::new(0.0, 0.0, PI, PI), 0.3).unwrap();
        let s = FnSampler::new(|x, _| x.sin());
        let opts = ApplyOptions { quad_per_axis: 600 };
        let out = apply_local(&LocalInterpolant::vol_avg0(), &cell, &s, opts).unwrap();
        let expect = 2.0 / PI;
        assert!(
            (out.eval(1.0, 1.0) - expect).abs() < 1e-6,
            "{} vs {expect}",
            out.eval(1.0, 1.0)
        );
    }

    #[test]
    fn lagrange_reproduces_polynomials() {
        let cell = unit_cell(2.0, 3.0, 1.2);
        for k in 1..=3usize {
            let op = LocalInterpolant::lagrange(k).unwrap();
            let kf = k as i32;
            let f = move |x: f64, y: f64| {
                (x - 2.5).powi(kf) + (y - 3.4).powi(kf) * (x - 2.2) .powi(kf.min(1)) + 1.5
            };
            let s = FnSampler::new(f);
            let out = apply_local(&op, &cell, &s, Default::default()).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            for _ in 0..30 {
                let x = rng.gen_range(2.0..3.2);
                let y = rng.gen_range(3.0..4.2);
                assert!(
                    (out.eval(x, y) - f(x, y)).abs() <= 1e-10,
                    "k={k} at ({x},{y}): {} vs {}",
                    out.eval(x, y),
                    f(x, y)
                );
            }
        }
    }

    #[test]
    fn volpoly_reproduces_polynomials() {
        let cell = unit_cell(0.5, 4.0, 1.0);
        for k in 1..=3usize {
            let op = LocalInterpolant::vol_poly(k).unwrap();
            let kf = k as i32;
            let f = move |x: f64, y: f64| (x - 1.0).powi(kf) * (y - 4.3).powi(kf) - 2.0 * (y - 4.0);
            let s = FnSampler::new(f);
            let opts = ApplyOptions { quad_per_axis: 64 };
            let out = apply_local(&op, &cell, &s, opts).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(13);
            for _ in 0..30 {
                let x = rng.gen_range(0.5..1.5);
                let y = rng.gen_range(4.0..5.0);
                let tol = 1e-6; // midpoint quadrature of the patch averages limits exactness
                assert!(
                    (out.eval(x, y) - f(x, y)).abs() <= tol,
                    "k={k}: {} vs {}",
                    out.eval(x, y),
                    f(x, y)
                );
            }
        }
    }

    #[test]
    fn taylor1_matches_first_order_expansion() {
        let cell = unit_cell(1.0, 1.0, 0.8);
        let (cx, cy) = cell_center(&cell);
        let f = |x: f64, y: f64| (2.0 * x).sin() * y.cos();
        let s = FnSampler::new(f)
            .with_derivative(1, 0, |x, y| 2.0 * (2.0 * x).cos() * y.cos())
            .with_derivative(0, 1, |x, y| -(2.0 * x).sin() * y.sin());
        let out = apply_local(&LocalInterpolant::taylor1(), &cell, &s, Default::default()).unwrap();
        let expect = f(cx, cy) + 2.0 * (2.0 * cx).cos() * cy.cos() * 0.1
            - (2.0 * cx).sin() * cy.sin() * (-0.05);
        let got = out.eval(cx + 0.1, cy - 0.05);
        assert!((got - expect).abs() < 1e-12, "{got} vs {expect}");
    }

    #[test]
    fn spectral_local_full_cell_is_truncation() {
        // on the full-torus cell with integer kappa the operator reproduces
        // band-limited fields exactly
        let grid = Grid::new(32).unwrap();
        let field = SpectralField::from_fn(grid, |x, y| (2.0 * x).sin() + (x + y).cos());
        let cell = Subdomain::new(TorusRect::new(0.0, 0.0, TWO_PI, TWO_PI), 1.0).unwrap();
        let s = SpectralSampler::new(&field);
        let opts = ApplyOptions { quad_per_axis: 32 };
        let out = apply_local(&LocalInterpolant::spectral_local(4.0), &cell, &s, opts).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let x = rng.gen_range(0.0..TWO_PI);
            let y = rng.gen_range(0.0..TWO_PI);
            assert!(
                (out.eval(x, y) - field.eval(x, y)).abs() < 1e-10,
                "mismatch at ({x},{y})"
            );
        }
    }

    #[test]
    fn sobolev_poly_reproduces_constants_and_converges() {
        let cell = unit_cell(3.0, 3.0, 1.0);
        let s = FnSampler::new(|_, _| 3.25)
            .with_derivative(1, 0, |_, _| 0.0)
            .with_derivative(0, 1, |_, _| 0.0);
        let op = LocalInterpolant::sobolev_poly(1).unwrap();
        let out = apply_local(&op, &cell, &s, Default::default()).unwrap();
        assert!((out.eval(3.3, 3.3) - 3.25).abs() < 1e-12);
    }

    #[test]
    fn linearity_of_apply() {
        let cell = unit_cell(0.0, 0.0, 1.5);
        let f = |x: f64, y: f64| (x + 0.3).powi(2) + y;
        let g = |x: f64, y: f64| x * y;
        let (a, b) = (1.7, -0.6);
        for op in [
            LocalInterpolant::vol_avg0(),
            LocalInterpolant::lagrange(2).unwrap(),
            LocalInterpolant::vol_poly(2).unwrap(),
        ] {
            let sf = FnSampler::new(f);
            let sg = FnSampler::new(g);
            let sc = FnSampler::new(move |x, y| a * f(x, y) + b * g(x, y));
            let of = apply_local(&op, &cell, &sf, Default::default()).unwrap();
            let og = apply_local(&op, &cell, &sg, Default::default()).unwrap();
            let oc = apply_local(&op, &cell, &sc, Default::default()).unwrap();
            for (x, y) in [(0.2, 0.3), (1.0, 1.2), (1.4, 0.1)] {
                let lin = a * of.eval(x, y) + b * og.eval(x, y);
                assert!(
                    (oc.eval(x, y) - lin).abs() < 1e-12 * lin.abs().max(1.0),
                    "{} vs {lin}",
                    oc.eval(x, y)
                );
            }
        }
    }

    #[test]
    fn too_few_samples_rejected() {
        let cell = unit_cell(0.0, 0.0, 1.0);
        let s = FnSampler::new(|_, _| 1.0);
        let op = LocalInterpolant::lagrange(3).unwrap();
        let err = apply_local(&op, &cell, &s, ApplyOptions { quad_per_axis: 3 });
        assert!(matches!(err, Err(InterpError::TooFewSamples { .. })));
    }
}
