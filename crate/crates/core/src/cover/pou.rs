use super::jet::{smoothstep, Jet4};
use super::{Cover, CoverError};
use crate::util::{TorusRect, TWO_PI};

/// Tensor-product plateau partition of unity subordinate to a tiling cover.
///
/// Every interface line between cells carries a transition band of half-width
/// `ramp` (the smallest collar in the cover), with complementary
/// `exp(-1/x)`-smoothstep edges; each `psi_q` equals 1 on the cell shrunk by
/// `ramp`, vanishes outside the collared cell, and the family sums to 1
/// because opposing edges are exact complements.
#[derive(Debug, Clone)]
pub struct PartitionOfUnity {
    profiles: Vec<CellProfile>,
    ramp: f64,
    smoothness: usize,
}

#[derive(Debug, Clone)]
struct CellProfile {
    x: AxisProfile,
    y: AxisProfile,
}

#[derive(Debug, Clone)]
struct AxisProfile {
    start: f64,
    len: f64,
    full: bool,
}

impl AxisProfile {
    fn new(start: f64, len: f64) -> Self {
        AxisProfile {
            start,
            len,
            full: len >= TWO_PI - 1e-12,
        }
    }

    /// Jet of the 1D profile: rising edge at `start`, falling edge at
    /// `start + len`, both with transition half-width `ramp` centered on the
    /// edge. Positions are parametrized by the offset `u = x - start` modulo
    /// the period, which keeps edge distances unambiguous for wide cells.
    fn jet(&self, x: f64, ramp: f64) -> Jet4 {
        if self.full {
            return Jet4::constant(1.0);
        }
        let u = (x - self.start).rem_euclid(TWO_PI);
        if u < self.len {
            // inside: at most one edge band is active since 2 ramp <= len
            if u < ramp {
                smoothstep((u + ramp) / (2.0 * ramp)).rescale(1.0 / (2.0 * ramp))
            } else if u > self.len - ramp {
                let db = u - self.len;
                smoothstep((ramp - db) / (2.0 * ramp)).rescale(-1.0 / (2.0 * ramp))
            } else {
                Jet4::constant(1.0)
            }
        } else {
            // outside: either just past the far edge or just before the start
            let past = u - self.len;
            let before = TWO_PI - u;
            if past < ramp {
                smoothstep((ramp - past) / (2.0 * ramp)).rescale(-1.0 / (2.0 * ramp))
            } else if before < ramp {
                smoothstep((ramp - before) / (2.0 * ramp)).rescale(1.0 / (2.0 * ramp))
            } else {
                Jet4::constant(0.0)
            }
        }
    }

    fn value(&self, x: f64, ramp: f64) -> f64 {
        if self.full {
            return 1.0;
        }
        let u = (x - self.start).rem_euclid(TWO_PI);
        if u < self.len {
            if u < ramp {
                smoothstep((u + ramp) / (2.0 * ramp)).value()
            } else if u > self.len - ramp {
                smoothstep((ramp - (u - self.len)) / (2.0 * ramp)).value()
            } else {
                1.0
            }
        } else {
            let past = u - self.len;
            let before = TWO_PI - u;
            if past < ramp {
                smoothstep((ramp - past) / (2.0 * ramp)).value()
            } else if before < ramp {
                smoothstep((ramp - before) / (2.0 * ramp)).value()
            } else {
                0.0
            }
        }
    }
}

impl PartitionOfUnity {
    /// Build the plateau partition of unity for `cover`.
    ///
    /// `target_smoothness` is the derivative order (at most 4) for which
    /// analytic derivatives are exposed; the ramps themselves are `C^inf`.
    /// Construction fails if the transition bands cannot fit (collar too
    /// large for the smallest cell) or if the probe detects a sum-to-one
    /// violation, which happens exactly when the cover has gaps.
    pub fn build(cover: &Cover, target_smoothness: usize) -> Result<Self, CoverError> {
        if target_smoothness > 4 {
            return Err(CoverError::BadParams(
                "analytic derivatives available up to order 4".into(),
            ));
        }
        let ramp = cover
            .cells()
            .iter()
            .map(|c| c.collar())
            .fold(f64::INFINITY, f64::min);
        let min_side = cover
            .cells()
            .iter()
            .map(|c| c.min_side())
            .fold(f64::INFINITY, f64::min);
        let single_full_cell = cover.len() == 1 && min_side >= TWO_PI - 1e-12;
        if !single_full_cell && 2.0 * ramp > min_side * (1.0 + 1e-12) {
            return Err(CoverError::PouConstruction(format!(
                "transition band 2*{ramp:.3e} exceeds smallest cell side {min_side:.3e}"
            )));
        }
        for c in cover.cells() {
            let wide = c.rect().wx.max(c.rect().wy);
            if wide < TWO_PI - 1e-12 && wide + 2.0 * ramp > TWO_PI {
                return Err(CoverError::PouConstruction(
                    "cell side within one transition band of the full period".into(),
                ));
            }
        }
        let profiles = cover
            .cells()
            .iter()
            .map(|c| CellProfile {
                x: AxisProfile::new(c.rect().x0, c.rect().wx),
                y: AxisProfile::new(c.rect().y0, c.rect().wy),
            })
            .collect();
        let pou = PartitionOfUnity {
            profiles,
            ramp,
            smoothness: target_smoothness,
        };
        // P3 probe; a gapped cover shows up as sum < 1 somewhere
        let dev = pou.max_partition_deviation(73);
        if dev > 1e-12 {
            return Err(CoverError::PouConstruction(format!(
                "partition sum deviates from 1 by {dev:.3e}; cover has gaps or overlaps"
            )));
        }
        Ok(pou)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    #[inline]
    pub fn ramp(&self) -> f64 {
        self.ramp
    }

    #[inline]
    pub fn smoothness(&self) -> usize {
        self.smoothness
    }

    pub fn eval(&self, q: usize, x: f64, y: f64) -> f64 {
        let p = &self.profiles[q];
        let vx = p.x.value(x, self.ramp);
        if vx == 0.0 {
            return 0.0;
        }
        vx * p.y.value(y, self.ramp)
    }

    /// 1D tensor factor of `psi_q` along x.
    pub fn eval_x(&self, q: usize, x: f64) -> f64 {
        self.profiles[q].x.value(x, self.ramp)
    }

    /// 1D tensor factor of `psi_q` along y.
    pub fn eval_y(&self, q: usize, y: f64) -> f64 {
        self.profiles[q].y.value(y, self.ramp)
    }

    /// Analytic partial derivative `d^(ax+ay) psi_q / dx^ax dy^ay`,
    /// `ax, ay <= 4`.
    pub fn eval_partial(&self, q: usize, x: f64, y: f64, ax: usize, ay: usize) -> f64 {
        assert!(ax <= 4 && ay <= 4, "jet order is 4");
        let p = &self.profiles[q];
        p.x.jet(x, self.ramp).deriv(ax) * p.y.jet(y, self.ramp).deriv(ay)
    }

    pub fn sum_at(&self, x: f64, y: f64) -> f64 {
        (0..self.profiles.len()).map(|q| self.eval(q, x, y)).sum()
    }

    /// The region where `psi_q` is identically 1: the cell shrunk by the ramp.
    pub fn plateau(&self, q: usize) -> TorusRect {
        let p = &self.profiles[q];
        if p.x.full && p.y.full {
            return TorusRect::new(p.x.start, p.y.start, p.x.len, p.y.len);
        }
        TorusRect::new(
            p.x.start + self.ramp,
            p.y.start + self.ramp,
            (p.x.len - 2.0 * self.ramp).max(1e-12),
            (p.y.len - 2.0 * self.ramp).max(1e-12),
        )
    }

    /// Support bound: the cell inflated by the ramp.
    pub fn support(&self, q: usize) -> TorusRect {
        let p = &self.profiles[q];
        TorusRect::new(p.x.start, p.y.start, p.x.len, p.y.len).inflate(self.ramp)
    }

    /// Max of `|sum_q psi_q - 1|` over a jittered probe grid.
    pub fn max_partition_deviation(&self, probes_per_axis: usize) -> f64 {
        let n = probes_per_axis;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let x = TWO_PI * (j as f64 + 0.137) / n as f64;
                let y = TWO_PI * (i as f64 + 0.613) / n as f64;
                worst = worst.max((self.sum_at(x, y) - 1.0).abs());
            }
        }
        worst
    }

    /// Measured P4 constant: `sup |d^alpha psi_q|` over `|alpha| = l`,
    /// sampled on a fine lattice over the support of `psi_q`.
    pub fn measure_sup_derivative(&self, q: usize, l: usize, samples_per_axis: usize) -> f64 {
        let supp = self.support(q);
        let m = samples_per_axis;
        let mut sup = 0.0_f64;
        for i in 0..=m {
            for j in 0..=m {
                let x = supp.x0 + supp.wx * j as f64 / m as f64;
                let y = supp.y0 + supp.wy * i as f64 / m as f64;
                for ax in 0..=l {
                    let v = self.eval_partial(q, x, y, ax, l - ax).abs();
                    sup = sup.max(v);
                }
            }
        }
        sup
    }
}
