use crate::spectral::{leray_project, sobolev_norm_vec, Grid, SpectralError, VectorField};

/// Time-independent forcing, stored Leray-projected and mean-free, with its
/// norm and shape factors cached.
#[derive(Debug, Clone)]
pub struct ForcingSpec {
    field: VectorField,
    l2_norm: f64,
    sigmas: Vec<f64>,
}

impl ForcingSpec {
    pub const SIGMA_MAX: usize = 4;

    pub fn new(raw: VectorField) -> Result<Self, SpectralError> {
        let mut field = leray_project(&raw);
        field.dealias();
        let l2_norm = sobolev_norm_vec(&field, 0, true)?;
        let mut sigmas = Vec::new();
        if l2_norm > 0.0 {
            for k in 0..=Self::SIGMA_MAX {
                sigmas.push(sobolev_norm_vec(&field, k, true)? / l2_norm);
            }
        }
        Ok(ForcingSpec {
            field,
            l2_norm,
            sigmas,
        })
    }

    pub fn zero(grid: Grid) -> Self {
        ForcingSpec {
            field: VectorField::zeros(grid),
            l2_norm: 0.0,
            sigmas: Vec::new(),
        }
    }

    /// Solenoidal single-mode forcing `amp sin(k.x) (ky, -kx)/|k|`; for
    /// `k = (0,1)` this is exactly `amp (sin y, 0)`.
    pub fn single_mode(grid: Grid, kx: i64, ky: i64, amplitude: f64) -> Result<Self, SpectralError> {
        assert!(kx != 0 || ky != 0, "zero wavevector");
        let norm = ((kx * kx + ky * ky) as f64).sqrt();
        let (ex, ey) = (ky as f64 / norm, -kx as f64 / norm);
        let field = VectorField::from_fns(
            grid,
            |x, y| amplitude * (kx as f64 * x + ky as f64 * y).sin() * ex,
            |x, y| amplitude * (kx as f64 * x + ky as f64 * y).sin() * ey,
        );
        Self::new(field)
    }

    /// Single-mode forcing with amplitude chosen so the Grashof number at
    /// viscosity `nu` equals `g`.
    pub fn for_grashof(grid: Grid, kx: i64, ky: i64, g: f64, nu: f64) -> Result<Self, SpectralError> {
        let unit = Self::single_mode(grid, kx, ky, 1.0)?;
        let amp = g * nu * nu / unit.l2_norm;
        Self::single_mode(grid, kx, ky, amp)
    }

    pub fn field(&self) -> &VectorField {
        &self.field
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm
    }

    pub fn is_zero(&self) -> bool {
        self.l2_norm == 0.0
    }

    /// Grashof number `G = ||P f||_{L2} / nu^2` (the torus has `lambda_1 = 1`).
    pub fn grashof(&self, nu: f64) -> Result<f64, SpectralError> {
        if nu <= 0.0 {
            return Err(SpectralError::BadDissipation);
        }
        Ok(self.l2_norm / (nu * nu))
    }

    /// Shape factor `sigma_k = ||P f||_{H^k} / ||P f||_{L2} >= 1`.
    pub fn shape_factor(&self, k: usize) -> Result<f64, SpectralError> {
        if self.is_zero() {
            return Err(SpectralError::EmptyRegion);
        }
        if k < self.sigmas.len() {
            Ok(self.sigmas[k])
        } else {
            Ok(sobolev_norm_vec(&self.field, k, true)? / self.l2_norm)
        }
    }
}
