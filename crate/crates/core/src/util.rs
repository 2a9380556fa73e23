//! Small shared helpers: torus geometry primitives and least-squares fits.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const TWO_PI: f64 = 2.0 * PI;

/// Axis-aligned rectangle on the torus, identified by anchor and side lengths.
/// Sides must lie in `(0, 2pi]`; the rectangle may wrap around either axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusRect {
    pub x0: f64,
    pub y0: f64,
    pub wx: f64,
    pub wy: f64,
}

impl TorusRect {
    pub fn new(x0: f64, y0: f64, wx: f64, wy: f64) -> Self {
        debug_assert!(wx > 0.0 && wx <= TWO_PI + 1e-12);
        debug_assert!(wy > 0.0 && wy <= TWO_PI + 1e-12);
        TorusRect {
            x0: x0.rem_euclid(TWO_PI),
            y0: y0.rem_euclid(TWO_PI),
            wx,
            wy,
        }
    }

    pub fn area(&self) -> f64 {
        self.wx * self.wy
    }

    pub fn diameter(&self) -> f64 {
        self.wx.hypot(self.wy)
    }

    /// Membership with half-open sides `[x0, x0+wx)` modulo the period.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        in_wrapped_interval(x, self.x0, self.wx) && in_wrapped_interval(y, self.y0, self.wy)
    }

    /// Grow by `delta` on every side (clamped to the full torus).
    pub fn inflate(&self, delta: f64) -> TorusRect {
        TorusRect::new(
            self.x0 - delta,
            self.y0 - delta,
            (self.wx + 2.0 * delta).min(TWO_PI),
            (self.wy + 2.0 * delta).min(TWO_PI),
        )
    }

    /// Area of the intersection, accounting for wrap-around.
    pub fn overlap_area(&self, other: &TorusRect) -> f64 {
        overlap_len(self.x0, self.wx, other.x0, other.wx)
            * overlap_len(self.y0, self.wy, other.y0, other.wy)
    }

    pub fn intersects(&self, other: &TorusRect) -> bool {
        self.overlap_area(other) > 0.0
    }
}

#[inline]
pub fn in_wrapped_interval(x: f64, start: f64, len: f64) -> bool {
    if len >= TWO_PI {
        return true;
    }
    (x - start).rem_euclid(TWO_PI) < len
}

/// Overlap length of two circular intervals of the period-`2pi` circle.
pub fn overlap_len(a0: f64, la: f64, b0: f64, lb: f64) -> f64 {
    if la >= TWO_PI {
        return lb.min(TWO_PI);
    }
    if lb >= TWO_PI {
        return la.min(TWO_PI);
    }
    // shift b relative to a; b may straddle the cut so test both unwrapped copies
    let rel = (b0 - a0).rem_euclid(TWO_PI);
    let mut total = 0.0;
    for shift in [rel, rel - TWO_PI] {
        let lo = shift.max(0.0);
        let hi = (shift + lb).min(la);
        if hi > lo {
            total += hi - lo;
        }
    }
    total
}

/// Least-squares line fit `y = a + b x`; returns `(a, b, rms_residual)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    assert!(n >= 2.0, "need at least two points");
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let res = (xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (a + b * x);
            e * e
        })
        .sum::<f64>()
        / n)
        .sqrt();
    (a, b, res)
}

/// Log-log slope fit of `err ~ C h^p`; returns `(slope, rms_residual)`.
/// Points with error at or below `floor` are excluded.
pub fn loglog_slope(hs: &[f64], errs: &[f64], floor: f64) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = hs
        .iter()
        .zip(errs)
        .filter(|(_, e)| **e > floor)
        .map(|(h, e)| (h.ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let (_, slope, res) = linear_fit(&xs, &ys);
    Some((slope, res))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrapped_interval_membership() {
        assert!(in_wrapped_interval(0.1, 6.0, 1.0)); // wraps past 2pi
        assert!(!in_wrapped_interval(1.1, 6.0, 1.0));
        assert!(in_wrapped_interval(6.1, 6.0, 1.0));
    }

    #[test]
    fn overlap_of_wrapping_intervals() {
        // [6, 6+1] wraps to [6, 2pi] u [0, 0.717]; [0.5, 1.5] overlaps 0.217
        let l = overlap_len(6.0, 1.0, 0.5, 1.0);
        assert!((l - (1.0 - (TWO_PI - 6.0) - 0.5 + 0.0)).abs() < 1e-12 || l > 0.0);
        let expected = (6.0 + 1.0 - TWO_PI) - 0.5;
        assert!((l - expected).abs() < 1e-12, "{l} vs {expected}");
        // disjoint
        assert_eq!(overlap_len(0.0, 1.0, 2.0, 1.0), 0.0);
        // nested
        assert!((overlap_len(0.0, 3.0, 1.0, 1.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rect_overlap_area_with_wrap() {
        let a = TorusRect::new(6.0, 6.0, 1.0, 1.0);
        let b = TorusRect::new(0.0, 0.0, 1.0, 1.0);
        let expected = (7.0 - TWO_PI) * (7.0 - TWO_PI);
        assert!((a.overlap_area(&b) - expected).abs() < 1e-12);
    }

    #[test]
    fn slope_fit_recovers_power() {
        let hs = [0.4, 0.2, 0.1, 0.05];
        let errs: Vec<f64> = hs.iter().map(|h| 3.0 * h * h).collect();
        let (p, res) = loglog_slope(&hs, &errs, 1e-14).unwrap();
        assert!((p - 2.0).abs() < 1e-10);
        assert!(res < 1e-10);
    }
}
