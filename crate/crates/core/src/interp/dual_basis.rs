//! Unisolvence of interval-average functionals on polynomials: the moment
//! matrix `M_kj = sigma_{k-1}(x^{j-1})` with `sigma_k(f) = int_k^{k+1} f`,
//! its Vandermonde determinant identity, and the biorthogonal dual basis.

use super::poly::{det_dense, solve_dense};
use super::InterpError;
use ndarray::Array2;

/// Moment matrix, inverse-derived dual basis, and determinant data for the
/// interval-average functionals on `P_{m-1}`.
#[derive(Debug, Clone)]
pub struct DualBasisVolPoly {
    pub m: usize,
    /// `M[i][j] = int_i^{i+1} x^j dx`, built by quadrature.
    pub matrix: Array2<f64>,
    /// Closed-form determinant `(1/m!) prod_{1<=l<k<=m} (k-l)`.
    pub det_closed_form: f64,
    /// Determinant of the quadrature-built matrix.
    pub det: f64,
    /// `basis[k]` holds ascending-power coefficients of `theta_k` with
    /// `sigma_l(theta_k) = delta_lk`.
    pub basis: Vec<Vec<f64>>,
}

/// 5-node Gauss-Legendre rule on [a, b].
fn gauss5(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    const X: [f64; 5] = [
        -0.906179845938664,
        -0.5384693101056831,
        0.0,
        0.5384693101056831,
        0.906179845938664,
    ];
    const W: [f64; 5] = [
        0.23692688505618908,
        0.47862867049936647,
        0.5688888888888889,
        0.47862867049936647,
        0.23692688505618908,
    ];
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for i in 0..5 {
        acc += W[i] * f(mid + half * X[i]);
    }
    acc * half
}

/// Composite quadrature of `f` over `[a, b]` with `segments` panels.
fn quadrature(a: f64, b: f64, segments: usize, f: impl Fn(f64) -> f64 + Copy) -> f64 {
    let h = (b - a) / segments as f64;
    (0..segments)
        .map(|i| gauss5(a + i as f64 * h, a + (i + 1) as f64 * h, f))
        .sum()
}

/// Build the order-`m` dual basis. Degrees beyond 8 are refused: the moment
/// matrix conditioning degrades past the stated tolerances.
pub fn build_volpoly_dual_basis(m: usize) -> Result<DualBasisVolPoly, InterpError> {
    if m == 0 {
        return Err(InterpError::DegreeOutOfRange(m));
    }
    if m > 8 {
        return Err(InterpError::IllConditioned(m));
    }
    let mut matrix = Array2::zeros((m, m));
    for i in 0..m {
        for j in 0..m {
            matrix[[i, j]] = quadrature(i as f64, (i + 1) as f64, 2, |x| x.powi(j as i32));
        }
    }
    let det = det_dense(&matrix);
    // det M = (1/m!) det(V T) with V_kj = k^j = k * k^(j-1): factoring the
    // row weights k out of the Vandermonde gives det V = m! prod(k - l), so
    // det M = prod_{1 <= l < k <= m} (k - l)
    let mut closed = 1.0;
    for k in 2..=m {
        for l in 1..k {
            closed *= (k - l) as f64;
        }
    }
    let mut basis = Vec::with_capacity(m);
    for k in 0..m {
        let mut rhs = vec![0.0; m];
        rhs[k] = 1.0;
        let coeffs = solve_dense(&matrix, &rhs).ok_or(InterpError::IllConditioned(m))?;
        basis.push(coeffs);
    }
    Ok(DualBasisVolPoly {
        m,
        matrix,
        det_closed_form: closed,
        det,
        basis,
    })
}

impl DualBasisVolPoly {
    /// `sigma_l(theta_k)` by quadrature; biorthogonality means this is the
    /// identity matrix.
    pub fn biorthogonality_matrix(&self) -> Array2<f64> {
        let m = self.m;
        let mut out = Array2::zeros((m, m));
        for l in 0..m {
            for k in 0..m {
                let coeffs = &self.basis[k];
                out[[l, k]] = quadrature(l as f64, (l + 1) as f64, 2, |x| {
                    coeffs
                        .iter()
                        .enumerate()
                        .map(|(p, &c)| c * x.powi(p as i32))
                        .sum()
                });
            }
        }
        out
    }

    pub fn max_biorthogonality_defect(&self) -> f64 {
        let b = self.biorthogonality_matrix();
        let mut worst = 0.0_f64;
        for i in 0..self.m {
            for j in 0..self.m {
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((b[[i, j]] - expect).abs());
            }
        }
        worst
    }

    pub fn det_relative_error(&self) -> f64 {
        (self.det - self.det_closed_form).abs() / self.det_closed_form.abs()
    }
}
