//! Fourth-order jets (value plus derivatives 1..4) for the closed-form
//! plateau ramps. The smoothstep `s(t) = g(t)/(g(t)+g(1-t))` with
//! `g(t) = exp(-1/t)` is evaluated in jet arithmetic so that partition-of-unity
//! derivatives up to order 4 are analytic rather than finite-differenced.

const BINOM: [[f64; 5]; 5] = [
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0, 0.0],
    [1.0, 2.0, 1.0, 0.0, 0.0],
    [1.0, 3.0, 3.0, 1.0, 0.0],
    [1.0, 4.0, 6.0, 4.0, 1.0],
];

/// Value and derivatives 1..=4 of a scalar function at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet4 {
    pub d: [f64; 5],
}

impl Jet4 {
    pub fn constant(v: f64) -> Self {
        Jet4 {
            d: [v, 0.0, 0.0, 0.0, 0.0],
        }
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.d[0]
    }

    #[inline]
    pub fn deriv(&self, k: usize) -> f64 {
        self.d[k]
    }

    pub fn add(&self, o: &Jet4) -> Jet4 {
        let mut d = [0.0; 5];
        for k in 0..5 {
            d[k] = self.d[k] + o.d[k];
        }
        Jet4 { d }
    }

    /// Leibniz product rule.
    pub fn mul(&self, o: &Jet4) -> Jet4 {
        let mut d = [0.0; 5];
        for k in 0..5 {
            let mut acc = 0.0;
            for j in 0..=k {
                acc += BINOM[k][j] * self.d[j] * o.d[k - j];
            }
            d[k] = acc;
        }
        Jet4 { d }
    }

    /// Quotient, solving the Leibniz relations sequentially.
    pub fn div(&self, o: &Jet4) -> Jet4 {
        let mut c = [0.0; 5];
        for k in 0..5 {
            let mut acc = self.d[k];
            for j in 0..k {
                acc -= BINOM[k][j] * c[j] * o.d[k - j];
            }
            c[k] = acc / o.d[0];
        }
        Jet4 { d: c }
    }

    /// `exp` of a jet via `g' = f' g` and its derivatives.
    pub fn exp(&self) -> Jet4 {
        let mut g = [0.0; 5];
        g[0] = self.d[0].exp();
        for k in 1..5 {
            let mut acc = 0.0;
            for j in 0..k {
                acc += BINOM[k - 1][j] * self.d[1 + j] * g[k - 1 - j];
            }
            g[k] = acc;
        }
        Jet4 { d: g }
    }

    /// Flip the sign of odd derivatives: the jet of `t -> f(c - t)` given the
    /// jet of `f` at `c - t`.
    pub fn reflect(&self) -> Jet4 {
        let mut d = self.d;
        d[1] = -d[1];
        d[3] = -d[3];
        Jet4 { d }
    }

    /// Chain rule for an affine reparametrization `t -> f(a t + b)` given the
    /// jet of `f` at `a t + b`.
    pub fn rescale(&self, a: f64) -> Jet4 {
        let mut d = self.d;
        let mut pw = 1.0;
        for item in d.iter_mut().skip(1) {
            pw *= a;
            *item *= pw;
        }
        Jet4 { d }
    }
}

/// Jet of `g(t) = exp(-1/t)` for `t > 0`; identically zero for `t <= 0`.
fn bump_edge(t: f64) -> Jet4 {
    if t <= 0.0 {
        return Jet4::constant(0.0);
    }
    let inv = 1.0 / t;
    let f = Jet4 {
        d: [
            -inv,
            inv * inv,
            -2.0 * inv.powi(3),
            6.0 * inv.powi(4),
            -24.0 * inv.powi(5),
        ],
    };
    f.exp()
}

/// Smoothstep `s(t) = g(t)/(g(t)+g(1-t))`: 0 for `t <= 0`, 1 for `t >= 1`,
/// strictly increasing and `C^inf` in between, with `s(t) + s(1-t) = 1`.
pub fn smoothstep(t: f64) -> Jet4 {
    if t <= 0.0 {
        return Jet4::constant(0.0);
    }
    if t >= 1.0 {
        return Jet4::constant(1.0);
    }
    let a = bump_edge(t);
    let b = bump_edge(1.0 - t).reflect();
    a.div(&a.add(&b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn finite_diff(f: impl Fn(f64) -> f64, t: f64, k: usize) -> f64 {
        // central differences, adequate for sanity checking jets
        let h = 1e-3;
        match k {
            1 => (f(t + h) - f(t - h)) / (2.0 * h),
            2 => (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h),
            3 => (f(t + 2.0 * h) - 2.0 * f(t + h) + 2.0 * f(t - h) - f(t - 2.0 * h)) / (2.0 * h.powi(3)),
            4 => {
                (f(t + 2.0 * h) - 4.0 * f(t + h) + 6.0 * f(t) - 4.0 * f(t - h) + f(t - 2.0 * h))
                    / h.powi(4)
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn complementary_edges_sum_to_one() {
        for i in 1..200 {
            let t = i as f64 / 200.0;
            let s = smoothstep(t).value() + smoothstep(1.0 - t).value();
            assert!((s - 1.0).abs() < 1e-14, "t={t}: {s}");
        }
        assert_eq!(smoothstep(-0.5).value(), 0.0);
        assert_eq!(smoothstep(1.5).value(), 1.0);
        assert_eq!(smoothstep(1.0).value(), 1.0);
    }

    #[test]
    fn jet_derivatives_match_finite_differences() {
        let f = |t: f64| smoothstep(t).value();
        for t in [0.2, 0.35, 0.5, 0.65, 0.8] {
            let jet = smoothstep(t);
            for k in 1..=4 {
                let fd = finite_diff(f, t, k);
                let an = jet.deriv(k);
                let tol = 1e-4 * an.abs().max(10.0);
                assert!((an - fd).abs() < tol, "t={t} k={k}: jet {an} vs fd {fd}");
            }
        }
    }

    #[test]
    fn rescale_chain_rule() {
        // d/dx s(x/w) = s'(x/w)/w
        let w = 0.3;
        let x = 0.1;
        let inner = smoothstep(x / w);
        let outer = inner.rescale(1.0 / w);
        let fd = (smoothstep((x + 1e-6) / w).value() - smoothstep((x - 1e-6) / w).value()) / 2e-6;
        assert!((outer.deriv(1) - fd).abs() < 1e-5 * fd.abs().max(1.0));
    }
}
