use crate::util::{TorusRect, TWO_PI};
use ndarray::Array2;

/// Bivariate polynomial in local coordinates about an anchor point:
/// `P(x,y) = sum_ij c[i][j] (y-ay)^i (x-ax)^j`.
///
/// Local coordinates are wrapped to `[-pi, pi)` relative to the anchor so the
/// polynomial can be evaluated across the periodic cut.
#[derive(Debug, Clone)]
pub struct TensorPoly {
    pub anchor: (f64, f64),
    pub coeffs: Array2<f64>,
}

#[inline]
fn wrap_pm(d: f64) -> f64 {
    d - TWO_PI * (d / TWO_PI).round()
}

impl TensorPoly {
    pub fn constant(anchor: (f64, f64), c: f64) -> Self {
        let mut coeffs = Array2::zeros((1, 1));
        coeffs[[0, 0]] = c;
        TensorPoly { anchor, coeffs }
    }

    pub fn degree_x(&self) -> usize {
        self.coeffs.ncols() - 1
    }

    pub fn degree_y(&self) -> usize {
        self.coeffs.nrows() - 1
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let dx = wrap_pm(x - self.anchor.0);
        let dy = wrap_pm(y - self.anchor.1);
        // Horner in y of Horner-in-x rows
        let mut acc = 0.0;
        for i in (0..self.coeffs.nrows()).rev() {
            let mut row = 0.0;
            for j in (0..self.coeffs.ncols()).rev() {
                row = row * dx + self.coeffs[[i, j]];
            }
            acc = acc * dy + row;
        }
        acc
    }

    /// Partial derivative as a new polynomial.
    pub fn derivative(&self, ax: usize, ay: usize) -> TensorPoly {
        let (ny, nx) = self.coeffs.dim();
        if ax >= nx || ay >= ny {
            return TensorPoly::constant(self.anchor, 0.0);
        }
        let mut out = Array2::zeros((ny - ay, nx - ax));
        for i in ay..ny {
            for j in ax..nx {
                let mut f = 1.0;
                for d in 0..ay {
                    f *= (i - d) as f64;
                }
                for d in 0..ax {
                    f *= (j - d) as f64;
                }
                out[[i - ay, j - ax]] = self.coeffs[[i, j]] * f;
            }
        }
        TensorPoly {
            anchor: self.anchor,
            coeffs: out,
        }
    }

    /// Homogeneous local Sobolev seminorm over a rectangle by midpoint
    /// quadrature: `(sum_{|alpha|=l} int_R |d^alpha P|^2)^(1/2)`.
    pub fn local_seminorm(&self, rect: &TorusRect, l: usize, quad_per_axis: usize) -> f64 {
        let m = quad_per_axis;
        let (hx, hy) = (rect.wx / m as f64, rect.wy / m as f64);
        let derivs: Vec<TensorPoly> = (0..=l).map(|a| self.derivative(a, l - a)).collect();
        let mut acc = 0.0;
        for i in 0..m {
            for j in 0..m {
                let x = rect.x0 + (j as f64 + 0.5) * hx;
                let y = rect.y0 + (i as f64 + 0.5) * hy;
                for d in &derivs {
                    let v = d.eval(x, y);
                    acc += v * v;
                }
            }
        }
        (acc * hx * hy).sqrt()
    }

    pub fn scale(&mut self, a: f64) {
        self.coeffs.mapv_inplace(|c| c * a);
    }

    pub fn add_assign(&mut self, other: &TensorPoly) {
        assert_eq!(self.anchor, other.anchor);
        let ny = self.coeffs.nrows().max(other.coeffs.nrows());
        let nx = self.coeffs.ncols().max(other.coeffs.ncols());
        let mut out = Array2::zeros((ny, nx));
        for ((i, j), v) in self.coeffs.indexed_iter() {
            out[[i, j]] += v;
        }
        for ((i, j), v) in other.coeffs.indexed_iter() {
            out[[i, j]] += v;
        }
        self.coeffs = out;
    }
}

/// Coefficients of the 1D Lagrange basis polynomial through `nodes` that is 1
/// at `nodes[i]` and 0 at the others. Ascending powers.
pub fn lagrange_basis_coeffs(nodes: &[f64], i: usize) -> Vec<f64> {
    let mut coeffs = vec![1.0];
    let mut denom = 1.0;
    for (j, &t) in nodes.iter().enumerate() {
        if j == i {
            continue;
        }
        denom *= nodes[i] - t;
        // multiply by (x - t)
        let mut next = vec![0.0; coeffs.len() + 1];
        for (p, &c) in coeffs.iter().enumerate() {
            next[p] -= c * t;
            next[p + 1] += c;
        }
        coeffs = next;
    }
    for c in &mut coeffs {
        *c /= denom;
    }
    coeffs
}

/// Dense LU solve of `A x = b` for small systems (partial pivoting).
pub fn solve_dense(a: &Array2<f64>, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.nrows();
    assert_eq!(a.ncols(), n);
    assert_eq!(b.len(), n);
    let mut m = a.clone();
    let mut x: Vec<f64> = b.to_vec();
    for col in 0..n {
        let (piv, mag) = (col..n)
            .map(|r| (r, m[[r, col]].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))?;
        if mag == 0.0 {
            return None;
        }
        if piv != col {
            for j in 0..n {
                let tmp = m[[col, j]];
                m[[col, j]] = m[[piv, j]];
                m[[piv, j]] = tmp;
            }
            x.swap(col, piv);
        }
        for r in col + 1..n {
            let f = m[[r, col]] / m[[col, col]];
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                m[[r, j]] -= f * m[[col, j]];
            }
            x[r] -= f * x[col];
        }
    }
    for col in (0..n).rev() {
        for r in col + 1..n {
            x[col] -= m[[col, r]] * x[r];
        }
        x[col] /= m[[col, col]];
    }
    Some(x)
}

/// Determinant by LU with partial pivoting.
pub fn det_dense(a: &Array2<f64>) -> f64 {
    let n = a.nrows();
    let mut m = a.clone();
    let mut det = 1.0;
    for col in 0..n {
        let (piv, mag) = (col..n)
            .map(|r| (r, m[[r, col]].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if mag == 0.0 {
            return 0.0;
        }
        if piv != col {
            for j in 0..n {
                let tmp = m[[col, j]];
                m[[col, j]] = m[[piv, j]];
                m[[piv, j]] = tmp;
            }
            det = -det;
        }
        det *= m[[col, col]];
        for r in col + 1..n {
            let f = m[[r, col]] / m[[col, col]];
            for j in col..n {
                m[[r, j]] -= f * m[[col, j]];
            }
        }
    }
    det
}
