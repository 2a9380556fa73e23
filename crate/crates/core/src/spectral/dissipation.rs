use super::SpectralError;
use serde::{Deserialize, Serialize};

/// Dissipation symbol `nu |k|^2 + gamma |k|^(2(p+1))` of the (hyper)viscous
/// operator `-nu Lap + gamma (-Lap)^(p+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DissipationSymbol {
    nu: f64,
    gamma: f64,
    p: f64,
}

impl DissipationSymbol {
    /// Requires `nu > 0`, `gamma >= 0`, `p >= 0`, and `p = 0` whenever
    /// `gamma = 0`.
    pub fn new(nu: f64, gamma: f64, p: f64) -> Result<Self, SpectralError> {
        if !(nu > 0.0) || !(gamma >= 0.0) || !(p >= 0.0) || (gamma == 0.0 && p != 0.0) {
            return Err(SpectralError::BadDissipation);
        }
        Ok(DissipationSymbol { nu, gamma, p })
    }

    pub fn viscous(nu: f64) -> Result<Self, SpectralError> {
        Self::new(nu, 0.0, 0.0)
    }

    #[inline]
    pub fn nu(&self) -> f64 {
        self.nu
    }

    #[inline]
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    #[inline]
    pub fn p(&self) -> f64 {
        self.p
    }

    /// Multiplier at squared wavenumber `|k|^2`. Zero at `k = 0` and monotone
    /// in `|k|`.
    #[inline]
    pub fn multiplier(&self, k_sq: f64) -> f64 {
        if k_sq == 0.0 {
            return 0.0;
        }
        self.nu * k_sq + self.gamma * k_sq.powf(self.p + 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_laplacian() {
        let s = DissipationSymbol::viscous(1.0).unwrap();
        assert_eq!(s.multiplier(4.0), 4.0);
    }

    #[test]
    fn zero_mode_is_zero() {
        let s = DissipationSymbol::new(1.0, 2.0, 1.0).unwrap();
        assert_eq!(s.multiplier(0.0), 0.0);
    }

    #[test]
    fn hyperdissipative_evaluation() {
        // nu |k|^2 + gamma |k|^(2(p+1)) = 4 + 16 = 20
        let s = DissipationSymbol::new(1.0, 1.0, 1.0).unwrap();
        assert_eq!(s.multiplier(4.0), 20.0);
    }

    #[test]
    fn monotone_in_wavenumber() {
        let s = DissipationSymbol::new(0.5, 0.1, 2.0).unwrap();
        let mut prev = -1.0;
        for k2 in [0.0, 1.0, 2.0, 4.0, 9.0, 100.0] {
            let m = s.multiplier(k2);
            assert!(m > prev);
            prev = m;
        }
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(DissipationSymbol::new(0.0, 0.0, 0.0).is_err());
        assert!(DissipationSymbol::new(1.0, -1.0, 0.0).is_err());
        assert!(DissipationSymbol::new(1.0, 0.0, 1.0).is_err()); // p > 0 needs gamma > 0
        assert!(DissipationSymbol::new(1.0, 0.5, 2.0).is_ok());
    }

    #[test]
    fn gamma_zero_reduces_to_classical_symbol_bitwise() {
        let s = DissipationSymbol::viscous(0.37).unwrap();
        for k2 in [1.0, 2.0, 5.0, 13.0, 1024.0] {
            assert_eq!(s.multiplier(k2), 0.37 * k2);
        }
    }
}
