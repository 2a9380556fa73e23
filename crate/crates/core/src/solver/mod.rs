//! Pseudo-spectral time integration of the (hyper)viscous 2D Navier-Stokes
//! equations with an exponential integrating factor for the diagonal
//! dissipation and explicit Heun (RK2) stages for everything else.

mod diag;
mod forcing;

pub use diag::{
    energy_balance_residuals, energy_sample, spin_up, AbsorbingBallReport, EnergySample,
    SpinUpOptions, TrajectoryPoint,
};
pub use forcing::ForcingSpec;

use crate::spectral::{
    leray_project, DissipationSymbol, Fft2, Grid, SpectralError, SpectralField, VectorField,
};
use ndarray::Array2;
use rustfft::num_complex::Complex;
use thiserror::Error;

type C64 = Complex<f64>;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("instability detected at t = {t}: norm grew by {factor:.1}x in one step")]
    Instability { t: f64, factor: f64 },
}

/// Time-step policy: `dt = min(cfl dx / max|u|, 1/(2 mu), dt_max)`.
#[derive(Debug, Clone, Copy)]
pub struct DtPolicy {
    pub cfl: f64,
    pub dt_max: f64,
    pub mu: f64,
}

impl Default for DtPolicy {
    fn default() -> Self {
        DtPolicy {
            cfl: 0.4,
            dt_max: 0.01,
            mu: 0.0,
        }
    }
}

impl DtPolicy {
    pub fn dt(&self, grid: Grid, max_speed: f64) -> f64 {
        let mut dt = self.dt_max;
        if max_speed > 0.0 {
            dt = dt.min(self.cfl * grid.dx() / max_speed);
        }
        if self.mu > 0.0 {
            dt = dt.min(0.5 / self.mu);
        }
        dt
    }
}

/// Time-stepped state of the momentum equation.
#[derive(Debug, Clone)]
pub struct SolverState {
    pub u: VectorField,
    pub t: f64,
}

impl SolverState {
    pub fn new(mut u: VectorField, t: f64) -> Self {
        u = leray_project(&u);
        u.dealias();
        SolverState { u, t }
    }

    pub fn rest(grid: Grid) -> Self {
        SolverState {
            u: VectorField::zeros(grid),
            t: 0.0,
        }
    }
}

/// Solver context: dissipation symbol table, forcing, and FFT plans.
pub struct NseSolver {
    grid: Grid,
    sym: DissipationSymbol,
    forcing: ForcingSpec,
    lambda: Array2<f64>,
    exp_cache: std::cell::RefCell<Option<(f64, Array2<f64>)>>,
}

/// Explicit right-hand side evaluation: `-P (u.grad) u + P f + extra`,
/// with the max physical speed as a by-product for the CFL policy.
pub struct RhsEval {
    pub rhs: VectorField,
    pub max_speed: f64,
}

impl NseSolver {
    pub fn new(grid: Grid, sym: DissipationSymbol, forcing: ForcingSpec) -> Self {
        let n = grid.n();
        let mut lambda = Array2::zeros((n, n));
        for i in 0..n {
            let ky = grid.wavenumber(i) as f64;
            for j in 0..n {
                let kx = grid.wavenumber(j) as f64;
                lambda[[i, j]] = sym.multiplier(kx * kx + ky * ky);
            }
        }
        NseSolver {
            grid,
            sym,
            forcing,
            lambda,
            exp_cache: std::cell::RefCell::new(None),
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn dissipation(&self) -> DissipationSymbol {
        self.sym
    }

    pub fn forcing(&self) -> &ForcingSpec {
        &self.forcing
    }

    /// `P (u.grad) u` in divergence form, dealiased and Leray-projected.
    pub fn nonlinear_term(&self, u: &VectorField) -> VectorField {
        self.nonlinear_with_speed(u).0
    }

    fn nonlinear_with_speed(&self, u: &VectorField) -> (VectorField, f64) {
        let n = self.grid.n();
        let fft = Fft2::get(n);
        let ux = fft.inverse(u.x.coeffs());
        let uy = fft.inverse(u.y.coeffs());
        let mut max_speed = 0.0_f64;
        let mut pxx = Array2::<f64>::zeros((n, n));
        let mut pxy = Array2::<f64>::zeros((n, n));
        let mut pyy = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (ux[[i, j]], uy[[i, j]]);
                max_speed = max_speed.max(a.abs().max(b.abs()));
                pxx[[i, j]] = a * a;
                pxy[[i, j]] = a * b;
                pyy[[i, j]] = b * b;
            }
        }
        let sxx = fft.forward(&pxx);
        let sxy = fft.forward(&pxy);
        let syy = fft.forward(&pyy);
        // divergence form: N_i = dx (u_x u_i) + dy (u_y u_i)
        let mut nx = Array2::<C64>::zeros((n, n));
        let mut ny = Array2::<C64>::zeros((n, n));
        let cutoff = self.grid.dealias_cutoff() as i64;
        for i in 0..n {
            let ky = self.grid.wavenumber(i);
            for j in 0..n {
                let kx = self.grid.wavenumber(j);
                if kx.abs() > cutoff || ky.abs() > cutoff {
                    continue;
                }
                let (ikx, iky) = (
                    C64::new(0.0, kx as f64),
                    C64::new(0.0, ky as f64),
                );
                nx[[i, j]] = ikx * sxx[[i, j]] + iky * sxy[[i, j]];
                ny[[i, j]] = ikx * sxy[[i, j]] + iky * syy[[i, j]];
            }
        }
        let v = VectorField {
            x: SpectralField::from_coeffs(self.grid, nx).expect("sizes match"),
            y: SpectralField::from_coeffs(self.grid, ny).expect("sizes match"),
        };
        (leray_project(&v), max_speed)
    }

    /// Explicit part of the semi-discrete system.
    pub fn rhs(&self, u: &VectorField) -> RhsEval {
        let (nl, max_speed) = self.nonlinear_with_speed(u);
        let mut rhs = self.forcing.field().clone();
        rhs.axpy(-1.0, &nl);
        RhsEval { rhs, max_speed }
    }

    fn exp_factors(&self, dt: f64) -> Array2<f64> {
        let mut cache = self.exp_cache.borrow_mut();
        if let Some((cached_dt, e)) = cache.as_ref() {
            if *cached_dt == dt {
                return e.clone();
            }
        }
        let e = self.lambda.mapv(|l| (-l * dt).exp());
        *cache = Some((dt, e.clone()));
        e
    }

    fn scale_modes(&self, v: &mut VectorField, factors: &Array2<f64>) {
        v.x.coeffs_mut().zip_mut_with(factors, |c, &f| *c *= f);
        v.y.coeffs_mut().zip_mut_with(factors, |c, &f| *c *= f);
    }

    /// One integrating-factor Heun step with an optional extra explicit term
    /// (the nudging feedback) evaluated at both stages.
    pub fn step_with(
        &self,
        state: &mut SolverState,
        dt: f64,
        mut extra: impl FnMut(&VectorField, usize) -> Option<VectorField>,
    ) -> Result<f64, SolverError> {
        let e = self.exp_factors(dt);
        let mut f1 = self.rhs(&state.u);
        if let Some(add) = extra(&state.u, 0) {
            f1.rhs.axpy(1.0, &add);
        }
        // predictor: u_p = E (u + dt F1)
        let mut pred = state.u.clone();
        pred.axpy(dt, &f1.rhs);
        self.scale_modes(&mut pred, &e);
        let mut f2 = self.rhs(&pred);
        if let Some(add) = extra(&pred, 1) {
            f2.rhs.axpy(1.0, &add);
        }
        // corrector: u' = E u + dt/2 (E F1 + F2)
        let norm_before = state.u.max_coeff_magnitude();
        self.scale_modes(&mut state.u, &e);
        self.scale_modes(&mut f1.rhs, &e);
        state.u.axpy(0.5 * dt, &f1.rhs);
        state.u.axpy(0.5 * dt, &f2.rhs);
        state.u.x.zero_mean();
        state.u.y.zero_mean();
        state.t += dt;
        let norm_after = state.u.max_coeff_magnitude();
        if norm_before > 0.0 && norm_after > 10.0 * norm_before.max(1e-300) {
            return Err(SolverError::Instability {
                t: state.t,
                factor: norm_after / norm_before,
            });
        }
        Ok(f1.max_speed)
    }

    /// Plain (non-nudged) step.
    pub fn step(&self, state: &mut SolverState, dt: f64) -> Result<f64, SolverError> {
        self.step_with(state, dt, |_, _| None)
    }
}
