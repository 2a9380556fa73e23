//! Structural error bounds and boundedness reports for global interpolants.

use super::{GlobalError, GlobalInterpolant};
use crate::interp::{band_limited_ensemble, estimate_constant, ApplyOptions};
use crate::spectral::{local_sobolev_norm, sobolev_norm, Grid, SpectralField};
use ndarray::Array2;
use serde::Serialize;

/// Matrix of empirical local constants `eps[i][j-1] ~ eps_{i,j}(Q)` for
/// `0 <= i <= m`, `1 <= j <= k - i` (entries beyond the level are zero).
#[derive(Debug, Clone)]
pub struct EpsTable {
    pub m: usize,
    pub k: usize,
    pub eps: Array2<f64>,
}

impl EpsTable {
    /// Global constant of the general display:
    /// `eps_{l,j}^2 = sum_{i=0}^{j-1} eps_{i,j-i}^2` (independent of `l`).
    pub fn global_eps_sq(&self, j: usize) -> f64 {
        let mut acc = 0.0;
        for i in 0..j.min(self.m + 1) {
            let jp = j - i;
            if jp >= 1 && jp <= self.k - i {
                acc += self.eps[[i, jp - 1]].powi(2);
            }
        }
        acc
    }

    /// Global constant of the optimal display:
    /// `eps_{l,k'}^2 = sum_{i<=l} eps_{i,k'-i}^2`.
    pub fn optimal_eps_sq(&self, l: usize, k_prime: usize) -> f64 {
        let mut acc = 0.0;
        for i in 0..=l.min(self.m) {
            if k_prime > i {
                let jp = k_prime - i;
                if jp <= self.k - i {
                    acc += self.eps[[i, jp - 1]].powi(2);
                }
            }
        }
        acc
    }
}

/// Measure the local constants of the representative cell of a uniform
/// family (all cells share one table) by band-limited ensembles.
pub fn estimate_global_constants(
    interp: &GlobalInterpolant,
    grid: Grid,
    band: usize,
    ensemble_size: usize,
    seed: u64,
    opts: ApplyOptions,
) -> Result<EpsTable, GlobalError> {
    let op = &interp.locals()[0];
    let cell = &interp.cover().cells()[0];
    let (m, k) = (op.order, op.level);
    let mut eps = Array2::zeros((m + 1, k));
    for i in 0..=m {
        for jp in 1..=(k - i) {
            eps[[i, jp - 1]] = estimate_constant(
                op,
                cell,
                grid,
                band,
                ensemble_size,
                seed.wrapping_add((i * 31 + jp) as u64),
                i,
                i + jp,
                opts,
            )?;
        }
    }
    Ok(EpsTable { m, k, eps })
}

#[derive(Debug, Clone, Serialize)]
pub struct GlobalErrorRow {
    pub l: usize,
    pub j: usize,
    pub h: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// Measured left side `||phi - I phi||^2_{H^l}` against the structural right
/// side `sum_j sum_q eps_{l,j}(Q_q)^2 h_q^(2(j-l)) ||phi||^2_{H^j(Q~_q)}`
/// with the universal constant normalized to 1.
#[derive(Debug, Clone, Serialize)]
pub struct GlobalErrorReport {
    pub l: usize,
    pub lhs_sq: f64,
    pub rhs_sq: f64,
    pub ratio: f64,
    pub rows: Vec<GlobalErrorRow>,
}

/// Global error norm `||phi - I phi||_{H^l}`; the `l = 0` case is integrated
/// in physical space so the mean component of the interpolant error counts.
pub fn global_error_norm(
    phi: &SpectralField,
    interp_values: &Array2<f64>,
    l: usize,
) -> Result<f64, GlobalError> {
    let grid = phi.grid();
    if l == 0 {
        let phys = phi.to_physical();
        let dx = grid.dx();
        let mut acc = 0.0;
        for (a, b) in phys.iter().zip(interp_values.iter()) {
            let e = a - b;
            acc += e * e;
        }
        Ok((acc * dx * dx).sqrt())
    } else {
        let ispec = SpectralField::from_physical(grid, interp_values).expect("grid match");
        let diff = phi.sub(&ispec);
        Ok(sobolev_norm(&diff, l, true)?)
    }
}

pub fn verify_global_error(
    interp: &GlobalInterpolant,
    phi: &SpectralField,
    l: usize,
    eps: &EpsTable,
) -> Result<GlobalErrorReport, GlobalError> {
    if l > interp.order() {
        return Err(GlobalError::OrderViolation {
            l,
            m: interp.order(),
        });
    }
    let out = interp.apply(phi)?;
    let lhs = global_error_norm(phi, &out, l)?;
    let lhs_sq = lhs * lhs;
    let mut rows = Vec::new();
    let mut rhs_sq = 0.0;
    for j in 1..=interp.level() {
        let eps_sq = eps.global_eps_sq(j);
        let mut contribution = 0.0;
        for cell in interp.cover().cells() {
            let h = cell.h();
            let local = local_sobolev_norm(phi, j, &cell.collared())
                ?;
            contribution += eps_sq * h.powi(2 * (j as i32 - l as i32)) * local * local;
        }
        rhs_sq += contribution;
        rows.push(GlobalErrorRow {
            l,
            j,
            h: interp.uniform_scale().unwrap_or(f64::NAN),
            lhs: lhs_sq,
            rhs: contribution,
            ratio: f64::NAN,
        });
    }
    let ratio = lhs_sq / rhs_sq;
    for row in &mut rows {
        row.ratio = ratio;
    }
    Ok(GlobalErrorReport {
        l,
        lhs_sq,
        rhs_sq,
        ratio,
        rows,
    })
}

/// Boundedness ratios of Cor. "global interpolants are bounded": the
/// ensemble sup of `||I phi||_{H^l} / ||phi||_{H^k}` for `l = 0, 1`, plus the
/// uniform-scale pattern constants
/// `c_l = sup ||I phi||_{H^l} h^l / (h ||phi||_{H^k})` for `2 <= l <= m` and
/// without the extra `h` for `m < l <= k`.
#[derive(Debug, Clone, Serialize)]
pub struct BoundednessReport {
    pub ratio_l0: f64,
    pub ratio_l1: f64,
    pub uniform_pattern: Vec<(usize, f64)>,
}

pub fn verify_boundedness(
    interp: &GlobalInterpolant,
    grid: Grid,
    band: usize,
    ensemble_size: usize,
    seed: u64,
) -> Result<BoundednessReport, GlobalError> {
    let k = interp.level();
    let m = interp.order();
    let ensemble = band_limited_ensemble(grid, band, ensemble_size, seed);
    let mut r0 = 0.0_f64;
    let mut r1 = 0.0_f64;
    let mut pattern: Vec<(usize, f64)> = (2..=k).map(|l| (l, 0.0)).collect();
    let h = interp.uniform_scale();
    for phi in &ensemble {
        let den = sobolev_norm(phi, k, true)?;
        if den <= 1e-13 {
            continue;
        }
        let out = interp.apply(phi)?;
        let n0 = global_error_norm_of_values(phi.grid(), &out, 0)?;
        let ispec = SpectralField::from_physical(phi.grid(), &out).expect("grid match");
        r0 = r0.max(n0 / den);
        let n1 = sobolev_norm(&ispec, 1, true)?;
        r1 = r1.max(n1 / den);
        if let Some(h) = h {
            for (l, c) in pattern.iter_mut() {
                let nl =
                    sobolev_norm(&ispec, *l, true)?;
                let bound = if *l <= m {
                    h.powi(1 - *l as i32) * den
                } else {
                    h.powi(-(*l as i32)) * den
                };
                *c = c.max(nl / bound);
            }
        }
    }
    Ok(BoundednessReport {
        ratio_l0: r0,
        ratio_l1: r1,
        uniform_pattern: pattern,
    })
}

/// Plain `H^l` norm of sampled values (physical for `l = 0`).
fn global_error_norm_of_values(grid: Grid, values: &Array2<f64>, l: usize) -> Result<f64, GlobalError> {
    if l == 0 {
        let dx = grid.dx();
        let acc: f64 = values.iter().map(|v| v * v).sum();
        Ok((acc * dx * dx).sqrt())
    } else {
        let spec = SpectralField::from_physical(grid, values).expect("grid match");
        sobolev_norm(&spec, l, true).map_err(GlobalError::from)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::Cover;
    use crate::interp::LocalInterpolant;
    use crate::util::loglog_slope;

    fn smooth_test_field(grid: Grid) -> SpectralField {
        SpectralField::from_fn(grid, |x, y| {
            (2.0 * x).sin() * y.cos() + 0.5 * (x + y).sin() + 0.3 * (2.0 * y - x).cos()
        })
    }

    #[test]
    fn spectral_single_cell_zero_error() {
        let grid = Grid::new(32).unwrap();
        let cover = Cover::uniform(1, 0.2).unwrap();
        let interp =
            GlobalInterpolant::uniform(cover, LocalInterpolant::spectral_local(8.0)).unwrap();
        let phi = smooth_test_field(grid);
        let out = interp.apply(&phi).unwrap();
        let err = global_error_norm(&phi, &out, 0).unwrap();
        assert!(err < 1e-9, "band-limited: {err}");
    }

    #[test]
    fn uniform_families_converge_at_declared_rates() {
        let grid = Grid::new(128).unwrap();
        let phi = smooth_test_field(grid);
        // volavg: slope ~ 1 at l=0; lagrange(2): slope ~ 3 at l=0
        for (op, expect, tol) in [
            (LocalInterpolant::vol_avg0(), 1.0, 0.3),
            (LocalInterpolant::lagrange(2).unwrap(), 3.0, 0.35),
        ] {
            let mut hs = Vec::new();
            let mut errs = Vec::new();
            for c in [4usize, 8, 16, 32] {
                let cover = Cover::uniform(c, 0.2).unwrap();
                let interp = GlobalInterpolant::uniform(cover, op).unwrap();
                let out = interp.apply(&phi).unwrap();
                hs.push(interp.uniform_scale().unwrap());
                errs.push(global_error_norm(&phi, &out, 0).unwrap());
            }
            let (slope, _) = loglog_slope(&hs, &errs, 1e-12).unwrap();
            assert!(
                (slope - expect).abs() <= tol,
                "{:?}: slope {slope} vs {expect} (errors {errs:?})",
                op.kind
            );
        }
    }

    #[test]
    fn structural_bound_ratio_is_order_one() {
        let grid = Grid::new(64).unwrap();
        let phi = smooth_test_field(grid);
        let cover = Cover::uniform(8, 0.2).unwrap();
        let interp = GlobalInterpolant::uniform(cover, LocalInterpolant::vol_avg0()).unwrap();
        let eps = estimate_global_constants(&interp, grid, 2, 8, 5, Default::default()).unwrap();
        let report = verify_global_error(&interp, &phi, 0, &eps).unwrap();
        assert!(report.lhs_sq > 0.0 && report.rhs_sq > 0.0);
        // the measured error should be controlled by the structural sum up
        // to an O(1) constant
        assert!(
            report.ratio < 30.0,
            "structural bound ratio too large: {}",
            report.ratio
        );
        assert_eq!(report.rows.len(), interp.level());
    }

    #[test]
    fn order_violation_rejected() {
        let grid = Grid::new(64).unwrap();
        let phi = smooth_test_field(grid);
        let cover = Cover::uniform(4, 0.2).unwrap();
        let interp = GlobalInterpolant::uniform(cover, LocalInterpolant::vol_avg0()).unwrap();
        let eps = EpsTable {
            m: 0,
            k: 1,
            eps: Array2::zeros((1, 1)),
        };
        assert!(matches!(
            verify_global_error(&interp, &phi, 1, &eps),
            Err(GlobalError::OrderViolation { .. })
        ));
    }

    #[test]
    fn boundedness_single_cell_spectral_is_contraction() {
        let grid = Grid::new(32).unwrap();
        let cover = Cover::uniform(1, 0.2).unwrap();
        let interp =
            GlobalInterpolant::uniform(cover, LocalInterpolant::spectral_local(10.0)).unwrap();
        let rep = verify_boundedness(&interp, grid, 4, 6, 11).unwrap();
        // truncation never increases the L2 norm; H^k/L2 comparisons keep the
        // ratio at or below 1 up to roundoff
        assert!(rep.ratio_l0 <= 1.0 + 1e-10, "{}", rep.ratio_l0);
    }

    #[test]
    fn boundedness_ratios_h_stable() {
        let grid = Grid::new(64).unwrap();
        // l=1 ratio for lagrange(2) across two scales
        let mut l1 = Vec::new();
        let mut l0_volavg = Vec::new();
        for c in [4usize, 8] {
            let cover = Cover::uniform(c, 0.2).unwrap();
            let li =
                GlobalInterpolant::uniform(cover.clone(), LocalInterpolant::lagrange(2).unwrap())
                    .unwrap();
            let rep = verify_boundedness(&li, grid, 3, 6, 13).unwrap();
            l1.push(rep.ratio_l1);
            let vi = GlobalInterpolant::uniform(cover, LocalInterpolant::vol_avg0()).unwrap();
            let rep = verify_boundedness(&vi, grid, 3, 6, 13).unwrap();
            l0_volavg.push(rep.ratio_l0);
        }
        for r in l1.iter().chain(&l0_volavg) {
            assert!(r.is_finite() && *r > 0.0);
        }
        assert!(l1[1] / l1[0] < 4.0, "l1 ratio not h-stable: {l1:?}");
        assert!(
            l0_volavg[1] / l0_volavg[0] < 4.0,
            "volavg l0 ratio not h-stable: {l0_volavg:?}"
        );
    }
}
