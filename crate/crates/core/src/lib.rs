//! Pseudo-spectral 2D Navier-Stokes on the periodic box `[0,2pi]^2` with
//! mesh-free interpolant observables and nudging-based data assimilation.
//!
//! The crate is organized around six subsystems:
//!
//! * [`spectral`] — mean-free periodic field algebra: transforms, derivatives,
//!   Leray projection, Sobolev norms, dealiasing, dissipation symbols.
//! * [`cover`] — coverings of the torus by collared rectangles and smooth
//!   partitions of unity subordinate to them.
//! * [`interp`] — local interpolant observable operators (spectral, nodal,
//!   volume-average, Taylor, Sobolev, Lagrange, volume-element polynomial)
//!   together with empirical constant estimation.
//! * [`global`] — partition-of-unity assembly of local operators into global
//!   interpolants and their mean-free variants.
//! * [`solver`] — integrating-factor RK2 time stepping of the (hyper)viscous
//!   Navier-Stokes equations with diagnostics.
//! * [`assim`] — coupled truth/observer runs with nudging feedback, condition
//!   checks, and synchronization-rate fits.

pub mod assim;
pub mod cover;
pub mod global;
pub mod interp;
pub mod io;
pub mod solver;
pub mod spectral;
pub mod util;

pub use spectral::{Grid, SpectralField, VectorField};
