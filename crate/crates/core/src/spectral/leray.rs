use super::fft::C64;
use super::VectorField;

/// Leray projection onto divergence-free fields:
/// `P v_hat(k) = v_hat - k (k . v_hat)/|k|^2`, with the zero mode cleared.
pub fn leray_project(v: &VectorField) -> VectorField {
    let grid = v.grid();
    let n = grid.n();
    let mut out = v.clone();
    for i in 0..n {
        let ky = grid.wavenumber(i) as f64;
        for j in 0..n {
            let kx = grid.wavenumber(j) as f64;
            let k2 = kx * kx + ky * ky;
            if k2 == 0.0 {
                out.x.coeffs_mut()[[i, j]] = C64::new(0.0, 0.0);
                out.y.coeffs_mut()[[i, j]] = C64::new(0.0, 0.0);
                continue;
            }
            let vx = v.x.coeffs()[[i, j]];
            let vy = v.y.coeffs()[[i, j]];
            let kdotv = (kx * vx + ky * vy) / k2;
            out.x.coeffs_mut()[[i, j]] = vx - kx * kdotv;
            out.y.coeffs_mut()[[i, j]] = vy - ky * kdotv;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Grid, SpectralField};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vec(grid: Grid, seed: u64) -> VectorField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut fx = ndarray::Array2::<f64>::zeros((grid.n(), grid.n()));
        let mut fy = fx.clone();
        fx.mapv_inplace(|_| rng.gen_range(-1.0..1.0));
        fy.mapv_inplace(|_| rng.gen_range(-1.0..1.0));
        VectorField {
            x: SpectralField::from_physical(grid, &fx).unwrap(),
            y: SpectralField::from_physical(grid, &fy).unwrap(),
        }
    }

    #[test]
    fn gradients_are_annihilated() {
        let grid = Grid::new(32).unwrap();
        let q = SpectralField::from_fn(grid, |x, y| (2.0 * x).sin() * (3.0 * y).cos());
        let grad = VectorField {
            x: q.derivative(1, 0),
            y: q.derivative(0, 1),
        };
        let p = leray_project(&grad);
        assert!(p.max_coeff_magnitude() < 1e-13 * grad.max_coeff_magnitude().max(1.0));
    }

    #[test]
    fn divergence_free_fields_unchanged() {
        let grid = Grid::new(32).unwrap();
        let v = VectorField::from_fns(grid, |_, y| y.sin(), |_, _| 0.0);
        let p = leray_project(&v);
        assert!(p.sub(&v).max_coeff_magnitude() < 1e-14);
    }

    #[test]
    fn idempotent_and_divergence_free_over_seeds() {
        let grid = Grid::new(16).unwrap();
        for seed in 0..100 {
            let v = random_vec(grid, seed);
            let p = leray_project(&v);
            let pp = leray_project(&p);
            let mag = v.max_coeff_magnitude();
            assert!(p.max_divergence() <= 1e-12 * mag, "seed {seed}");
            assert!(pp.sub(&p).max_coeff_magnitude() <= 1e-12 * mag, "seed {seed}");
        }
    }
}
