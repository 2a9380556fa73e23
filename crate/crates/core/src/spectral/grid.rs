use super::SpectralError;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Uniform `n x n` sampling of the torus `[0,2pi]^2`.
///
/// Wavenumbers per axis span `{-n/2, ..., n/2 - 1}` in standard FFT order and
/// the dealias cutoff for quadratic products is `floor(n/3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    n: usize,
}

impl Grid {
    pub fn new(n: usize) -> Result<Self, SpectralError> {
        if n < 8 || !n.is_power_of_two() {
            return Err(SpectralError::BadGridSize(n));
        }
        Ok(Grid { n })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    #[inline]
    pub fn dealias_cutoff(&self) -> usize {
        self.n / 3
    }

    /// Signed wavenumber for FFT index `i`.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i <= n / 2 - 1 {
            i
        } else {
            i - n
        }
    }

    /// FFT index holding signed wavenumber `k` (must satisfy `-n/2 <= k < n/2`).
    #[inline]
    pub fn index_of(&self, k: i64) -> usize {
        let n = self.n as i64;
        debug_assert!(k >= -n / 2 && k < n / 2);
        ((k + n) % n) as usize
    }

    /// Physical coordinate of sample index `i`.
    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        2.0 * PI * i as f64 / self.n as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(7).is_err());
        assert!(Grid::new(12).is_err());
        assert!(Grid::new(4).is_err());
        assert!(Grid::new(8).is_ok());
        assert!(Grid::new(256).is_ok());
    }

    #[test]
    fn wavenumber_roundtrip() {
        let g = Grid::new(16).unwrap();
        for i in 0..16 {
            let k = g.wavenumber(i);
            assert!((-8..8).contains(&k));
            assert_eq!(g.index_of(k), i);
        }
        assert_eq!(g.wavenumber(0), 0);
        assert_eq!(g.wavenumber(7), 7);
        assert_eq!(g.wavenumber(8), -8);
        assert_eq!(g.wavenumber(15), -1);
    }
}
