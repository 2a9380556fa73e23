use super::{CoverError, Subdomain};
use crate::util::{TorusRect, TWO_PI};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Covering of the torus by collared rectangles.
///
/// `delta` is the adicity ratio of P5; `uniform_scale` is set when every cell
/// shares the same collared diameter.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Cover {
    cells: Vec<Subdomain>,
    delta: f64,
    uniform_scale: Option<f64>,
}

/// Result of the greedy partition-multiplicity search (Def. of partition
/// multiplicity): `classes` are index sets that each tile the torus with
/// measure-zero overlaps.
#[derive(Debug, Clone)]
pub struct Multiplicity {
    pub m: usize,
    pub classes: Vec<Vec<usize>>,
}

/// Measured two-sided bound of the collar-counting inequality
/// `(1/pi0) sum_q int_{Q~_q} phi <= int phi <= sum_q int_{Q~_q} phi`.
#[derive(Debug, Clone, Serialize)]
pub struct MultiplicityLemmaReport {
    pub lhs: f64,
    pub total: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl Cover {
    pub fn from_cells(cells: Vec<Subdomain>, delta: f64) -> Result<Self, CoverError> {
        if cells.is_empty() {
            return Err(CoverError::Empty);
        }
        let h0 = cells[0].h();
        let uniform = cells.iter().all(|c| (c.h() - h0).abs() <= 1e-12 * h0);
        Ok(Cover {
            cells,
            delta,
            uniform_scale: uniform.then_some(h0),
        })
    }

    /// Uniform `c x c` tiling with collar width `collar_fraction * side`.
    ///
    /// Collar fractions of 1/2 or more would make collars reach past nearest
    /// neighbors (overlap count beyond 9) and leave no plateau; they are
    /// rejected.
    pub fn uniform(cells_per_axis: usize, collar_fraction: f64) -> Result<Self, CoverError> {
        if cells_per_axis == 0 {
            return Err(CoverError::BadParams("cells_per_axis must be >= 1".into()));
        }
        if !(collar_fraction > 0.0 && collar_fraction < 0.5) {
            return Err(CoverError::CollarTooLarge(collar_fraction));
        }
        let c = cells_per_axis;
        let side = TWO_PI / c as f64;
        let collar = collar_fraction * side;
        let mut cells = Vec::with_capacity(c * c);
        for iy in 0..c {
            for ix in 0..c {
                let rect = TorusRect::new(ix as f64 * side, iy as f64 * side, side, side);
                cells.push(Subdomain::new(rect, collar)?);
            }
        }
        Cover::from_cells(cells, 1.0)
    }

    /// Square-annulus cover with geometrically decreasing scales: frames of
    /// half-widths `pi 2^(1-j)` around the torus center, each split into four
    /// rectangular strips, plus a central square. Neighboring cells differ in
    /// diameter by at most a factor 2 (delta-adic with delta = 2).
    pub fn dyadic(levels: usize) -> Result<Self, CoverError> {
        if levels == 0 {
            return Err(CoverError::BadParams("levels must be >= 1".into()));
        }
        const COLLAR_FRACTION: f64 = 0.125;
        if levels == 1 {
            return Cover::uniform(1, COLLAR_FRACTION);
        }
        let center = PI;
        let w = |j: usize| PI * 0.5_f64.powi(j as i32 - 1);
        let mut cells = Vec::new();
        for j in 1..levels {
            let wo = w(j);
            let wi = w(j + 1);
            let collar = COLLAR_FRACTION * wi;
            // top and bottom strips span the frame's full width
            let top = TorusRect::new(center - wo, center + wi, 2.0 * wo, wo - wi);
            let bottom = TorusRect::new(center - wo, center - wo, 2.0 * wo, wo - wi);
            // left and right strips fill the remaining middle band
            let left = TorusRect::new(center - wo, center - wi, wo - wi, 2.0 * wi);
            let right = TorusRect::new(center + wi, center - wi, wo - wi, 2.0 * wi);
            for rect in [top, bottom, left, right] {
                cells.push(Subdomain::new(rect, collar)?);
            }
        }
        let wc = w(levels);
        let central = TorusRect::new(center - wc, center - wc, 2.0 * wc, 2.0 * wc);
        cells.push(Subdomain::new(central, COLLAR_FRACTION * 2.0 * wc)?);
        Cover::from_cells(cells, 2.0)
    }

    #[inline]
    pub fn cells(&self) -> &[Subdomain] {
        &self.cells
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    #[inline]
    pub fn delta(&self) -> f64 {
        self.delta
    }

    #[inline]
    pub fn uniform_scale(&self) -> Option<f64> {
        self.uniform_scale
    }

    /// Exact combinatorial overlap count `pi0`: the largest number of collared
    /// cells (including the cell itself) meeting any one collared cell.
    pub fn overlap_count(&self) -> usize {
        let collared: Vec<TorusRect> = self.cells.iter().map(|c| c.collared()).collect();
        let mut worst = 0;
        for a in &collared {
            let count = collared
                .iter()
                .filter(|b| a.overlap_area(b) > 1e-12)
                .count();
            worst = worst.max(count);
        }
        worst
    }

    /// P5: whenever two collared cells meet, their diameters are comparable
    /// within the adicity ratio.
    pub fn check_delta_adic(&self, delta: f64) -> bool {
        let collared: Vec<TorusRect> = self.cells.iter().map(|c| c.collared()).collect();
        for (i, a) in collared.iter().enumerate() {
            for (j, b) in collared.iter().enumerate() {
                if i == j || a.overlap_area(b) <= 1e-12 {
                    continue;
                }
                let (hi, hj) = (self.cells[i].h(), self.cells[j].h());
                if hj > delta * hi * (1.0 + 1e-12) || hj < hi / delta * (1.0 - 1e-12) {
                    return false;
                }
            }
        }
        true
    }

    /// Probe that the (un-collared) cells cover every point of a test grid.
    pub fn covers_probe(&self, probes_per_axis: usize) -> bool {
        for i in 0..probes_per_axis {
            for j in 0..probes_per_axis {
                let x = TWO_PI * (j as f64 + 0.21) / probes_per_axis as f64;
                let y = TWO_PI * (i as f64 + 0.43) / probes_per_axis as f64;
                if !self.cells.iter().any(|c| c.rect().contains(x, y)) {
                    return false;
                }
            }
        }
        true
    }

    /// Greedy search for the partition multiplicity `M` with witness tilings.
    /// Greedy is not guaranteed minimal; when a pass fails to assemble a
    /// tiling the multiplicity is reported as undetermined.
    pub fn partition_multiplicity(&self) -> Result<Multiplicity, CoverError> {
        let area_total = TWO_PI * TWO_PI;
        let mut remaining: Vec<usize> = (0..self.cells.len()).collect();
        let mut classes: Vec<Vec<usize>> = Vec::new();
        while !remaining.is_empty() {
            let mut class: Vec<usize> = Vec::new();
            let mut area = 0.0;
            let mut rest: Vec<usize> = Vec::new();
            for &idx in &remaining {
                let rect = self.cells[idx].rect();
                let disjoint = class
                    .iter()
                    .all(|&c| self.cells[c].rect().overlap_area(rect) <= 1e-10);
                if disjoint {
                    area += rect.area();
                    class.push(idx);
                } else {
                    rest.push(idx);
                }
            }
            if (area - area_total).abs() > 1e-9 * area_total {
                return Err(CoverError::MultiplicityUndetermined);
            }
            classes.push(class);
            remaining = rest;
        }
        Ok(Multiplicity {
            m: classes.len(),
            classes,
        })
    }

    /// Verify the partition-multiplicity sandwich
    /// `(1/M) sum_Q int_Q phi <= int phi <= sum_{Q in Q_j} int_Q phi`
    /// for a nonnegative function sampled by `phi`, on every witness class.
    pub fn check_partition_mult_lemma(
        &self,
        mult: &Multiplicity,
        phi: impl Fn(f64, f64) -> f64,
        probes_per_axis: usize,
    ) -> MultiplicityLemmaReport {
        let n = probes_per_axis;
        let dx = TWO_PI / n as f64;
        let mut total = 0.0;
        let mut per_cell = vec![0.0; self.cells.len()];
        for i in 0..n {
            for j in 0..n {
                let x = dx * j as f64;
                let y = dx * i as f64;
                let v = phi(x, y);
                debug_assert!(v >= 0.0);
                total += v;
                for (q, cell) in self.cells.iter().enumerate() {
                    if cell.rect().contains(x, y) {
                        per_cell[q] += v;
                    }
                }
            }
        }
        let w = dx * dx;
        let total = total * w;
        let sum_all: f64 = per_cell.iter().sum::<f64>() * w;
        let lhs = sum_all / mult.m as f64;
        let rhs = mult
            .classes
            .iter()
            .map(|cls| cls.iter().map(|&q| per_cell[q]).sum::<f64>() * w)
            .fold(f64::INFINITY, f64::min);
        let tol = 1e-10 * total.abs().max(1.0) + 1e-9;
        let pass = lhs <= total + tol && total <= rhs + tol;
        MultiplicityLemmaReport {
            lhs,
            total,
            rhs,
            pass,
        }
    }

    /// Verify the collar-counting inequality of nonnegative functions
    /// (`pi0` from P2): `(1/pi0) sum_q int_{Q~_q} phi <= int phi <= sum_q
    /// int_{Q~_q} phi`.
    pub fn check_multiplicity_lemma(
        &self,
        phi: impl Fn(f64, f64) -> f64,
        probes_per_axis: usize,
    ) -> MultiplicityLemmaReport {
        let pi0 = self.overlap_count() as f64;
        let n = probes_per_axis;
        let dx = TWO_PI / n as f64;
        let collared: Vec<TorusRect> = self.cells.iter().map(|c| c.collared()).collect();
        let mut total = 0.0;
        let mut sum_collared = 0.0;
        for i in 0..n {
            for j in 0..n {
                let x = dx * j as f64;
                let y = dx * i as f64;
                let v = phi(x, y);
                debug_assert!(v >= 0.0);
                total += v;
                for r in &collared {
                    if r.contains(x, y) {
                        sum_collared += v;
                    }
                }
            }
        }
        let w = dx * dx;
        let total = total * w;
        let sum_collared = sum_collared * w;
        let tol = 1e-10 * total.abs().max(1.0) + 1e-9;
        let pass = sum_collared / pi0 <= total + tol && total <= sum_collared + tol;
        MultiplicityLemmaReport {
            lhs: sum_collared / pi0,
            total,
            rhs: sum_collared,
            pass,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cell_cover() {
        let c = Cover::uniform(1, 0.25).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.overlap_count(), 1);
        assert!(c.covers_probe(16));
        assert!((c.uniform_scale().unwrap() - TWO_PI * 2.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn uniform_4x4_has_nine_overlaps() {
        let c = Cover::uniform(4, 0.15).unwrap();
        assert_eq!(c.len(), 16);
        assert_eq!(c.overlap_count(), 9);
        assert!(c.check_delta_adic(1.0));
        assert!(c.covers_probe(32));
        let h = c.uniform_scale().unwrap();
        let side = TWO_PI / 4.0;
        let expect = (side + 2.0 * 0.15 * side) * 2.0_f64.sqrt();
        assert!((h - expect).abs() < 1e-12);
    }

    #[test]
    fn uniform_2x2_all_mutually_overlapping() {
        let c = Cover::uniform(2, 0.3).unwrap();
        assert_eq!(c.overlap_count(), 4);
    }

    #[test]
    fn oversized_collar_rejected() {
        assert!(matches!(
            Cover::uniform(4, 0.5),
            Err(CoverError::CollarTooLarge(_))
        ));
        assert!(Cover::uniform(4, 0.49).is_ok());
    }

    #[test]
    fn uniform_geometry_oracle() {
        // 4 cells per axis, side pi/2, collar pi/8 -> h = (pi/2 + pi/4) sqrt(2)
        let c = Cover::uniform(4, 0.25).unwrap();
        let h = c.cells()[0].h();
        let expect = (PI / 2.0 + PI / 4.0) * 2.0_f64.sqrt();
        assert!((h - expect).abs() < 1e-12);
    }

    #[test]
    fn dyadic_level_one_matches_single_cell() {
        let d = Cover::dyadic(1).unwrap();
        let u = Cover::uniform(1, 0.125).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.cells()[0].rect(), u.cells()[0].rect());
    }

    #[test]
    fn dyadic_levels_tile_and_are_two_adic() {
        for levels in 2..=4 {
            let d = Cover::dyadic(levels).unwrap();
            assert_eq!(d.len(), 4 * (levels - 1) + 1);
            assert!(d.covers_probe(64), "levels {levels} gaps");
            assert!(d.check_delta_adic(2.0), "levels {levels} not 2-adic");
            // tiling: total area matches the torus
            let area: f64 = d.cells().iter().map(|c| c.rect().area()).sum();
            assert!((area - TWO_PI * TWO_PI).abs() < 1e-9);
            assert!(d.overlap_count() <= 9, "levels {levels}");
        }
    }

    #[test]
    fn multiplicity_of_tiling_is_one() {
        let c = Cover::uniform(4, 0.1).unwrap();
        let m = c.partition_multiplicity().unwrap();
        assert_eq!(m.m, 1);
        // sandwich at phi = 1: (1/M) sum |Q| = (2pi)^2 = sum over the class
        let rep = c.check_partition_mult_lemma(&m, |_, _| 1.0, 64);
        assert!(rep.pass);
        assert!((rep.lhs - TWO_PI * TWO_PI).abs() < 1e-9);
        assert!((rep.rhs - TWO_PI * TWO_PI).abs() < 1e-9);
    }

    #[test]
    fn stepped_squares_have_multiplicity_four() {
        // squares of side s stepped by s/2: 2x2 phase classes
        let s = TWO_PI / 4.0;
        let mut cells = Vec::new();
        for iy in 0..8 {
            for ix in 0..8 {
                let rect = TorusRect::new(ix as f64 * s / 2.0, iy as f64 * s / 2.0, s, s);
                cells.push(Subdomain::new(rect, 0.05 * s).unwrap());
            }
        }
        let c = Cover::from_cells(cells, 1.0).unwrap();
        let m = c.partition_multiplicity().unwrap();
        assert_eq!(m.m, 4);
        let rep = c.check_partition_mult_lemma(&m, |x, y| 1.0 + 0.5 * x.sin() * y.sin(), 64);
        assert!(rep.pass);
    }

    #[test]
    fn collar_lemma_sandwich() {
        // phi = 1 on the single-cell cover: equality on both sides
        let c1 = Cover::uniform(1, 0.2).unwrap();
        let rep = c1.check_multiplicity_lemma(|_, _| 1.0, 64);
        assert!(rep.pass);
        assert!((rep.lhs - rep.total).abs() < 1e-9);
        assert!((rep.rhs - rep.total).abs() < 1e-9);

        // 4x4: both inequalities strict
        let c = Cover::uniform(4, 0.15).unwrap();
        let rep = c.check_multiplicity_lemma(|_, _| 1.0, 96);
        assert!(rep.pass);
        assert!(rep.lhs < rep.total - 1e-6);
        assert!(rep.rhs > rep.total + 1e-6);

        // sin^2 x test function
        let rep = c.check_multiplicity_lemma(|x, _| x.sin() * x.sin(), 96);
        assert!(rep.pass);
    }
}
