use super::fft::{fold_to_lattice, C64, Fft2};
use super::{Grid, SpectralError};
use ndarray::Array2;

/// Mean-free scalar field on the torus, stored as Fourier coefficients.
///
/// Invariants: coefficients carry Hermitian symmetry (the field is real) and
/// the zero mode is identically zero. Every constructor and mutating operation
/// re-zeroes the mean mode.
#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Array2<C64>,
}

impl SpectralField {
    pub fn zeros(grid: Grid) -> Self {
        SpectralField {
            grid,
            coeffs: Array2::zeros((grid.n(), grid.n())),
        }
    }

    /// Forward transform of physical samples; the mean mode is projected out.
    pub fn from_physical(grid: Grid, phys: &Array2<f64>) -> Result<Self, SpectralError> {
        if phys.nrows() != grid.n() || phys.ncols() != grid.n() {
            return Err(SpectralError::SizeMismatch(phys.nrows(), grid.n()));
        }
        let fft = Fft2::get(grid.n());
        let mut coeffs = fft.forward(phys);
        coeffs[[0, 0]] = C64::new(0.0, 0.0);
        Ok(SpectralField { grid, coeffs })
    }

    /// Build directly from coefficients (zero mode is cleared).
    pub fn from_coeffs(grid: Grid, mut coeffs: Array2<C64>) -> Result<Self, SpectralError> {
        if coeffs.nrows() != grid.n() || coeffs.ncols() != grid.n() {
            return Err(SpectralError::SizeMismatch(coeffs.nrows(), grid.n()));
        }
        coeffs[[0, 0]] = C64::new(0.0, 0.0);
        Ok(SpectralField { grid, coeffs })
    }

    /// Sample an analytic function on the grid and transform.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = grid.n();
        let mut phys = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                phys[[i, j]] = f(grid.coord(j), grid.coord(i));
            }
        }
        Self::from_physical(grid, &phys).expect("sizes match by construction")
    }

    pub fn to_physical(&self) -> Array2<f64> {
        Fft2::get(self.grid.n()).inverse(&self.coeffs)
    }

    #[inline]
    pub fn grid(&self) -> Grid {
        self.grid
    }

    #[inline]
    pub fn coeffs(&self) -> &Array2<C64> {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut Array2<C64> {
        &mut self.coeffs
    }

    /// Coefficient at signed wavevector `(kx, ky)`.
    pub fn coeff(&self, kx: i64, ky: i64) -> C64 {
        self.coeffs[[self.grid.index_of(ky), self.grid.index_of(kx)]]
    }

    pub fn set_coeff(&mut self, kx: i64, ky: i64, v: C64) {
        let (i, j) = (self.grid.index_of(ky), self.grid.index_of(kx));
        self.coeffs[[i, j]] = v;
        self.coeffs[[0, 0]] = C64::new(0.0, 0.0);
    }

    pub fn zero_mean(&mut self) {
        self.coeffs[[0, 0]] = C64::new(0.0, 0.0);
    }

    /// Partial derivative `d^(ax+ay)/dx^ax dy^ay`, computed spectrally.
    pub fn derivative(&self, ax: usize, ay: usize) -> SpectralField {
        let n = self.grid.n();
        let mut out = Array2::<C64>::zeros((n, n));
        for i in 0..n {
            let ky = self.grid.wavenumber(i) as f64;
            for j in 0..n {
                let kx = self.grid.wavenumber(j) as f64;
                let sym = C64::new(0.0, kx).powu(ax as u32) * C64::new(0.0, ky).powu(ay as u32);
                out[[i, j]] = self.coeffs[[i, j]] * sym;
            }
        }
        SpectralField {
            grid: self.grid,
            coeffs: out,
        }
    }

    /// Zero every mode with `max(|kx|,|ky|)` beyond the 2/3-rule cutoff.
    /// Idempotent.
    pub fn dealias(&mut self) {
        let cutoff = self.grid.dealias_cutoff() as i64;
        let n = self.grid.n();
        for i in 0..n {
            let ky = self.grid.wavenumber(i);
            for j in 0..n {
                let kx = self.grid.wavenumber(j);
                if kx.abs() > cutoff || ky.abs() > cutoff {
                    self.coeffs[[i, j]] = C64::new(0.0, 0.0);
                }
            }
        }
    }

    pub fn dealiased(&self) -> SpectralField {
        let mut out = self.clone();
        out.dealias();
        out
    }

    /// Exact point evaluation by direct mode summation. O(n^2) per call.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let n = self.grid.n();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            let ky = self.grid.wavenumber(i) as f64;
            for j in 0..n {
                let kx = self.grid.wavenumber(j) as f64;
                let c = self.coeffs[[i, j]];
                if c.re != 0.0 || c.im != 0.0 {
                    acc += c * C64::from_polar(1.0, kx * x + ky * y);
                }
            }
        }
        acc.re
    }

    /// Exact values on the shifted uniform `m x m` lattice (see
    /// [`fold_to_lattice`]).
    pub fn eval_lattice(&self, m: usize, off_x: f64, off_y: f64) -> Array2<f64> {
        let grid = self.grid;
        fold_to_lattice(&self.coeffs, move |i| grid.wavenumber(i), m, off_x, off_y)
    }

    pub fn scale(&mut self, a: f64) {
        self.coeffs.mapv_inplace(|c| c * a);
    }

    pub fn axpy(&mut self, a: f64, other: &SpectralField) {
        debug_assert_eq!(self.grid.n(), other.grid.n());
        self.coeffs.zip_mut_with(&other.coeffs, |s, o| *s += a * o);
    }

    pub fn sub(&self, other: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    pub fn add(&self, other: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    pub fn max_coeff_magnitude(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Planar vector field with mean-free components.
#[derive(Debug, Clone)]
pub struct VectorField {
    pub x: SpectralField,
    pub y: SpectralField,
}

impl VectorField {
    pub fn zeros(grid: Grid) -> Self {
        VectorField {
            x: SpectralField::zeros(grid),
            y: SpectralField::zeros(grid),
        }
    }

    pub fn from_fns(grid: Grid, fx: impl Fn(f64, f64) -> f64, fy: impl Fn(f64, f64) -> f64) -> Self {
        VectorField {
            x: SpectralField::from_fn(grid, fx),
            y: SpectralField::from_fn(grid, fy),
        }
    }

    #[inline]
    pub fn grid(&self) -> Grid {
        self.x.grid()
    }

    /// `max_k |k . u_hat(k)|`, the spectral divergence magnitude.
    pub fn max_divergence(&self) -> f64 {
        let grid = self.grid();
        let n = grid.n();
        let mut worst = 0.0_f64;
        for i in 0..n {
            let ky = grid.wavenumber(i) as f64;
            for j in 0..n {
                let kx = grid.wavenumber(j) as f64;
                let d = kx * self.x.coeffs()[[i, j]] + ky * self.y.coeffs()[[i, j]];
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    pub fn max_coeff_magnitude(&self) -> f64 {
        self.x
            .max_coeff_magnitude()
            .max(self.y.max_coeff_magnitude())
    }

    /// Solenoidal to working precision relative to the largest coefficient.
    pub fn is_solenoidal(&self, rel_tol: f64) -> bool {
        let mag = self.max_coeff_magnitude();
        if mag == 0.0 {
            return true;
        }
        self.max_divergence() <= rel_tol * mag
    }

    pub fn dealias(&mut self) {
        self.x.dealias();
        self.y.dealias();
    }

    pub fn axpy(&mut self, a: f64, other: &VectorField) {
        self.x.axpy(a, &other.x);
        self.y.axpy(a, &other.y);
    }

    pub fn sub(&self, other: &VectorField) -> VectorField {
        VectorField {
            x: self.x.sub(&other.x),
            y: self.y.sub(&other.y),
        }
    }

    pub fn scale(&mut self, a: f64) {
        self.x.scale(a);
        self.y.scale(a);
    }
}
