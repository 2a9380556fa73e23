use super::field::SpectralField;
use super::SpectralError;
use crate::util::TorusRect;
use std::f64::consts::PI;

/// `sum_{|alpha| = l} k^(2 alpha)`, each multi-index counted exactly once
/// (no multinomial weights). For `l = 0` this is 1.
pub fn sobolev_weight(l: usize, kx: f64, ky: f64) -> f64 {
    let (x, y) = (kx * kx, ky * ky);
    let mut acc = 0.0;
    for a in 0..=l {
        acc += x.powi(a as i32) * y.powi((l - a) as i32);
    }
    acc
}

/// Homogeneous (`homogeneous = true`) or inhomogeneous Sobolev norm of order
/// `l`, computed in spectral space:
/// `||phi||^2 = (2pi)^2 sum_k w_l(k) |phi_hat(k)|^2` with
/// `w_l(k) = sum_{|alpha|=l} k^(2 alpha)` (inhomogeneous sums over all orders
/// up to `l`).
pub fn sobolev_norm(field: &SpectralField, l: usize, homogeneous: bool) -> Result<f64, SpectralError> {
    let grid = field.grid();
    let cutoff = grid.dealias_cutoff();
    if l > cutoff {
        return Err(SpectralError::ResolutionExceeded { order: l, cutoff });
    }
    let n = grid.n();
    let mut acc = 0.0;
    for i in 0..n {
        let ky = grid.wavenumber(i) as f64;
        for j in 0..n {
            let kx = grid.wavenumber(j) as f64;
            let mag = field.coeffs()[[i, j]].norm_sqr();
            if mag == 0.0 {
                continue;
            }
            let w = if homogeneous {
                sobolev_weight(l, kx, ky)
            } else {
                (0..=l).map(|m| sobolev_weight(m, kx, ky)).sum()
            };
            acc += w * mag;
        }
    }
    Ok(((2.0 * PI).powi(2) * acc).sqrt())
}

/// Vector-field Sobolev norm: root sum of squares of the component norms.
pub fn sobolev_norm_vec(
    field: &super::VectorField,
    l: usize,
    homogeneous: bool,
) -> Result<f64, SpectralError> {
    let a = sobolev_norm(&field.x, l, homogeneous)?;
    let b = sobolev_norm(&field.y, l, homogeneous)?;
    Ok(a.hypot(b))
}

/// Homogeneous Sobolev norm restricted to a subdomain: derivatives are taken
/// globally (spectrally), then `sum_{|alpha|=l} |d^alpha phi|^2` is integrated
/// over the region by grid quadrature. Wrap-around regions are allowed.
pub fn local_sobolev_norm(
    field: &SpectralField,
    l: usize,
    region: &TorusRect,
) -> Result<f64, SpectralError> {
    let grid = field.grid();
    let cutoff = grid.dealias_cutoff();
    if l > cutoff {
        return Err(SpectralError::ResolutionExceeded { order: l, cutoff });
    }
    let n = grid.n();
    let dx = grid.dx();
    let mask: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|(i, j)| region.contains(grid.coord(*j), grid.coord(*i)))
        .collect();
    if mask.is_empty() {
        return Err(SpectralError::EmptyRegion);
    }
    let mut acc = 0.0;
    for a in 0..=l {
        let d = field.derivative(a, l - a).to_physical();
        for &(i, j) in &mask {
            acc += d[[i, j]] * d[[i, j]];
        }
    }
    Ok((acc * dx * dx).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use std::f64::consts::PI;

    #[test]
    fn sin_x_norms_match_exact_integrals() {
        let grid = Grid::new(64).unwrap();
        let f = SpectralField::from_fn(grid, |x, _| x.sin());
        // integral of sin^2 x over the box is 2 pi^2, so the L2 norm is pi sqrt(2)
        let l2 = sobolev_norm(&f, 0, true).unwrap();
        assert!((l2 - PI * 2.0_f64.sqrt()).abs() < 1e-12);
        // d/dx sin = cos: same norm
        let h1 = sobolev_norm(&f, 1, true).unwrap();
        assert!((h1 - PI * 2.0_f64.sqrt()).abs() < 1e-12);
        // only alpha = (2,0) contributes at order 2
        let h2 = sobolev_norm(&f, 2, true).unwrap();
        assert!((h2 * h2 - 2.0 * PI * PI).abs() < 1e-10);
    }

    #[test]
    fn multi_index_weight_enumeration_oracle() {
        // independent enumeration of sum over |alpha| = l of k^(2 alpha)
        let enumerate = |l: usize, kx: f64, ky: f64| -> f64 {
            let mut acc = 0.0;
            for ax in 0..=l {
                let ay = l - ax;
                acc += kx.powi(2 * ax as i32) * ky.powi(2 * ay as i32);
            }
            acc
        };
        for l in 0..=4 {
            for (kx, ky) in [(0.0, 3.0), (1.0, 2.0), (4.0, 5.0)] {
                assert_eq!(sobolev_weight(l, kx, ky), enumerate(l, kx, ky));
            }
        }
    }

    #[test]
    fn norm_equivalence_and_poincare() {
        let grid = Grid::new(64).unwrap();
        let f = SpectralField::from_fn(grid, |x, y| (2.0 * x).sin() + 0.3 * (x + 3.0 * y).cos());
        for l in 1..=3 {
            let hom = sobolev_norm(&f, l, true).unwrap();
            let inhom = sobolev_norm(&f, l, false).unwrap();
            // right inequality of the equivalence is exact: the homogeneous sum is a subsum
            assert!(hom <= inhom + 1e-13);
            assert!(inhom.is_finite() && hom > 0.0);
        }
        // Poincare with lambda_1 = 1 on mean-free fields
        let l2 = sobolev_norm(&f, 0, true).unwrap();
        let h1 = sobolev_norm(&f, 1, true).unwrap();
        assert!(l2 <= h1 + 1e-13);
    }

    #[test]
    fn local_norm_cases() {
        let grid = Grid::new(64).unwrap();
        let zero = SpectralField::zeros(grid);
        let full = TorusRect::new(0.0, 0.0, 2.0 * PI, 2.0 * PI);
        assert_eq!(local_sobolev_norm(&zero, 0, &full).unwrap(), 0.0);

        let f = SpectralField::from_fn(grid, |x, _| x.sin());
        // full torus agrees with the global norm
        let loc = local_sobolev_norm(&f, 0, &full).unwrap();
        let glob = sobolev_norm(&f, 0, true).unwrap();
        assert!((loc - glob).abs() < 1e-10);
        // on [0,pi]^2 the integral of sin^2 x is pi^2/2, norm pi/sqrt(2)
        let q = TorusRect::new(0.0, 0.0, PI, PI);
        let loc = local_sobolev_norm(&f, 0, &q).unwrap();
        assert!((loc - PI / 2.0_f64.sqrt()).abs() < 1e-10, "{loc}");
    }

    #[test]
    fn resolution_guard() {
        let grid = Grid::new(8).unwrap();
        let f = SpectralField::from_fn(grid, |x, _| x.sin());
        assert!(sobolev_norm(&f, 3, true).is_err());
    }
}
