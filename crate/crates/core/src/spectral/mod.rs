//! Mean-free periodic field algebra on the torus `[0,2pi]^2`.
//!
//! Fields live in dual representation: complex Fourier coefficients indexed by
//! integer wavevectors, and real samples on a uniform `n x n` grid. The mean
//! mode is hard-zeroed after every operation that touches coefficients, so
//! every `SpectralField` is mean-free by construction.

mod dissipation;
mod fft;
mod field;
mod grid;
mod leray;
mod norms;
pub mod snapshot;

pub use dissipation::DissipationSymbol;
pub use fft::{fold_to_lattice, Fft2};
pub use field::{SpectralField, VectorField};
pub use grid::Grid;
pub use leray::leray_project;
pub use norms::{local_sobolev_norm, sobolev_norm, sobolev_norm_vec, sobolev_weight};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("grid size {0} is not a power of two >= 8")]
    BadGridSize(usize),
    #[error("field sizes do not match: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("derivative order {order} exceeds resolved bandwidth n/3 = {cutoff}")]
    ResolutionExceeded { order: usize, cutoff: usize },
    #[error("empty integration region")]
    EmptyRegion,
    #[error("dissipation symbol requires nu > 0, gamma >= 0, and p = 0 when gamma = 0")]
    BadDissipation,
    #[error("snapshot io: {0}")]
    Snapshot(String),
}
