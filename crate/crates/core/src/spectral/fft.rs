use ndarray::Array2;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

pub type C64 = Complex<f64>;

/// Planned complex 2D FFT of a fixed size, shared process-wide.
///
/// The forward direction maps grid samples to Fourier coefficients of
/// `sum_k c_k exp(i k.x)` (i.e. it includes the `1/n^2` normalization); the
/// inverse is unnormalized synthesis.
pub struct Fft2 {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

static PLANS: OnceLock<Mutex<HashMap<usize, Arc<Fft2>>>> = OnceLock::new();

thread_local! {
    static SCRATCH: RefCell<Vec<C64>> = const { RefCell::new(Vec::new()) };
    static FFT_SCRATCH: RefCell<Vec<C64>> = const { RefCell::new(Vec::new()) };
}

fn process_rows(plan: &Arc<dyn Fft<f64>>, buf: &mut [C64]) {
    FFT_SCRATCH.with(|s| {
        let mut scratch = s.borrow_mut();
        let need = plan.get_inplace_scratch_len();
        if scratch.len() < need {
            scratch.resize(need, C64::new(0.0, 0.0));
        }
        plan.process_with_scratch(buf, &mut scratch);
    });
}

impl Fft2 {
    pub fn get(n: usize) -> Arc<Fft2> {
        let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = cache.lock().unwrap();
        map.entry(n)
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                Arc::new(Fft2 {
                    n,
                    fwd: planner.plan_fft_forward(n),
                    inv: planner.plan_fft_inverse(n),
                })
            })
            .clone()
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// In-place 2D transform of a flat row-major `n x n` buffer.
    fn transform(&self, buf: &mut [C64], forward: bool) {
        let n = self.n;
        debug_assert_eq!(buf.len(), n * n);
        let plan = if forward { &self.fwd } else { &self.inv };
        process_rows(plan, buf); // rows (x direction)
        SCRATCH.with(|s| {
            let mut t = s.borrow_mut();
            t.resize(n * n, C64::new(0.0, 0.0));
            transpose_flat(buf, &mut t, n);
            process_rows(plan, &mut t); // columns
            transpose_flat(&t, buf, n);
        });
    }

    /// Physical samples -> Fourier coefficients (with `1/n^2`).
    pub fn forward(&self, phys: &Array2<f64>) -> Array2<C64> {
        let n = self.n;
        let mut out = Array2::<C64>::zeros((n, n));
        self.forward_into(phys, &mut out);
        out
    }

    pub fn forward_into(&self, phys: &Array2<f64>, out: &mut Array2<C64>) {
        let n = self.n;
        debug_assert_eq!(phys.dim(), (n, n));
        let src = phys.as_slice().expect("contiguous");
        let dst = out.as_slice_mut().expect("contiguous");
        for (d, s) in dst.iter_mut().zip(src) {
            *d = C64::new(*s, 0.0);
        }
        self.transform(dst, true);
        let scale = 1.0 / (n * n) as f64;
        for d in dst.iter_mut() {
            *d *= scale;
        }
    }

    /// Fourier coefficients -> physical samples (real part).
    pub fn inverse(&self, coeffs: &Array2<C64>) -> Array2<f64> {
        let n = self.n;
        let mut out = Array2::<f64>::zeros((n, n));
        self.inverse_into(coeffs, &mut out);
        out
    }

    pub fn inverse_into(&self, coeffs: &Array2<C64>, out: &mut Array2<f64>) {
        let n = self.n;
        debug_assert_eq!(coeffs.dim(), (n, n));
        thread_local! {
            static WORK: RefCell<Vec<C64>> = const { RefCell::new(Vec::new()) };
        }
        WORK.with(|w| {
            let mut work = w.borrow_mut();
            work.clear();
            work.extend_from_slice(coeffs.as_slice().expect("contiguous"));
            self.transform(&mut work, false);
            let dst = out.as_slice_mut().expect("contiguous");
            for (d, s) in dst.iter_mut().zip(work.iter()) {
                *d = s.re;
            }
        });
    }

    /// Unnormalized inverse keeping the complex values.
    pub fn inverse_complex(&self, coeffs: &Array2<C64>) -> Array2<C64> {
        let mut buf = coeffs.clone();
        self.transform(buf.as_slice_mut().expect("contiguous"), false);
        buf
    }
}

/// Cache-blocked out-of-place transpose of a flat row-major square matrix.
fn transpose_flat(src: &[C64], dst: &mut [C64], n: usize) {
    const B: usize = 32;
    for ib in (0..n).step_by(B) {
        let imax = (ib + B).min(n);
        for jb in (0..n).step_by(B) {
            let jmax = (jb + B).min(n);
            for i in ib..imax {
                for j in jb..jmax {
                    dst[j * n + i] = src[i * n + j];
                }
            }
        }
    }
}

/// Evaluate `sum_k c_k exp(i k.x)` exactly on the uniform `m x m` lattice
/// `x_ij = (2pi (j + off_x)/m, 2pi (i + off_y)/m)`.
///
/// Works for any lattice size `m >= 1` by aliasing the spectrum onto the
/// lattice's resolved modes before a size-`m` synthesis; this is exact because
/// `exp(i k x)` and `exp(i (k mod m) x)` agree on the lattice.
pub fn fold_to_lattice(
    coeffs: &Array2<C64>,
    wavenumber: impl Fn(usize) -> i64,
    m: usize,
    off_x: f64,
    off_y: f64,
) -> Array2<f64> {
    let n = coeffs.nrows();
    let mut folded = vec![C64::new(0.0, 0.0); m * m];
    let step = 2.0 * std::f64::consts::PI / m as f64;
    let phases: Vec<(usize, C64, C64)> = (0..n)
        .map(|i| {
            let k = wavenumber(i);
            let px = C64::from_polar(1.0, k as f64 * off_x * step);
            let py = C64::from_polar(1.0, k as f64 * off_y * step);
            ((k.rem_euclid(m as i64)) as usize, px, py)
        })
        .collect();
    let src = coeffs.as_slice().expect("contiguous");
    for i in 0..n {
        let (mi, _, py) = phases[i];
        let row = &src[i * n..(i + 1) * n];
        for (j, c) in row.iter().enumerate() {
            if c.re != 0.0 || c.im != 0.0 {
                let (mj, px, _) = phases[j];
                folded[mi * m + mj] += c * px * py;
            }
        }
    }
    let plan = inverse_plan(m);
    process_rows(&plan, &mut folded);
    let mut t = vec![C64::new(0.0, 0.0); m * m];
    transpose_flat(&folded, &mut t, m);
    process_rows(&plan, &mut t);
    let mut out = Array2::<f64>::zeros((m, m));
    let dst = out.as_slice_mut().expect("contiguous");
    // final transpose back, taking real parts
    for i in 0..m {
        for j in 0..m {
            dst[i * m + j] = t[j * m + i].re;
        }
    }
    out
}

/// Inverse plan for arbitrary (not necessarily power-of-two) sizes.
fn inverse_plan(m: usize) -> Arc<dyn Fft<f64>> {
    static INV_PLANS: OnceLock<Mutex<HashMap<usize, Arc<dyn Fft<f64>>>>> = OnceLock::new();
    let cache = INV_PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    map.entry(m)
        .or_insert_with(|| FftPlanner::new().plan_fft_inverse(m))
        .clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn forward_inverse_roundtrip() {
        let n = 32;
        let fft = Fft2::get(n);
        let mut phys = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                let x = 2.0 * PI * j as f64 / n as f64;
                let y = 2.0 * PI * i as f64 / n as f64;
                phys[[i, j]] = (3.0 * x).sin() * (2.0 * y).cos() + 0.5 * (x - y).sin();
            }
        }
        let coeffs = fft.forward(&phys);
        let back = fft.inverse(&coeffs);
        let err = phys
            .iter()
            .zip(back.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        assert!(err < 1e-12, "roundtrip error {err}");
    }

    #[test]
    fn fold_matches_direct_evaluation() {
        let n = 16;
        let fft = Fft2::get(n);
        let mut phys = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                let x = 2.0 * PI * j as f64 / n as f64;
                let y = 2.0 * PI * i as f64 / n as f64;
                phys[[i, j]] = (2.0 * x + y).sin() + (3.0 * y).cos();
            }
        }
        let coeffs = fft.forward(&phys);
        let wn = move |i: usize| {
            let ii = i as i64;
            if ii <= (n as i64) / 2 - 1 {
                ii
            } else {
                ii - n as i64
            }
        };
        // coarser, finer, and offset lattices against direct mode sums
        for (m, ox, oy) in [(12usize, 0.5, 0.5), (24, 0.0, 0.25), (16, 0.5, 0.0)] {
            let vals = fold_to_lattice(&coeffs, wn, m, ox, oy);
            for i in 0..m {
                for j in 0..m {
                    let x = 2.0 * PI * (j as f64 + ox) / m as f64;
                    let y = 2.0 * PI * (i as f64 + oy) / m as f64;
                    let direct = (2.0 * x + y).sin() + (3.0 * y).cos();
                    assert!(
                        (vals[[i, j]] - direct).abs() < 1e-11,
                        "m={m} lattice mismatch at ({i},{j}): {} vs {direct}",
                        vals[[i, j]]
                    );
                }
            }
        }
    }
}
