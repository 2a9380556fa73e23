use crate::spectral::SpectralField;
use ndarray::Array2;
use std::cell::RefCell;
use std::collections::HashMap;

/// Source of observed field values for local interpolant operators: point
/// values and (for derivative-observing operators) point derivatives.
pub trait Sampler {
    fn value(&self, x: f64, y: f64) -> f64;
    fn derivative(&self, ax: usize, ay: usize, x: f64, y: f64) -> f64;
}

/// Analytic sampler from closures; derivatives are supplied explicitly for
/// the operators that observe them.
pub struct FnSampler<'a> {
    value: Box<dyn Fn(f64, f64) -> f64 + 'a>,
    derivs: HashMap<(usize, usize), Box<dyn Fn(f64, f64) -> f64 + 'a>>,
}

impl<'a> FnSampler<'a> {
    pub fn new(value: impl Fn(f64, f64) -> f64 + 'a) -> Self {
        FnSampler {
            value: Box::new(value),
            derivs: HashMap::new(),
        }
    }

    pub fn with_derivative(
        mut self,
        ax: usize,
        ay: usize,
        f: impl Fn(f64, f64) -> f64 + 'a,
    ) -> Self {
        self.derivs.insert((ax, ay), Box::new(f));
        self
    }
}

impl Sampler for FnSampler<'_> {
    fn value(&self, x: f64, y: f64) -> f64 {
        (self.value)(x, y)
    }

    fn derivative(&self, ax: usize, ay: usize, x: f64, y: f64) -> f64 {
        if ax == 0 && ay == 0 {
            return self.value(x, y);
        }
        let f = self
            .derivs
            .get(&(ax, ay))
            .unwrap_or_else(|| panic!("FnSampler missing derivative ({ax},{ay})"));
        f(x, y)
    }
}

/// Sampler backed by a spectral field: point values by exact mode summation,
/// derivatives by global spectral differentiation (cached per order).
pub struct SpectralSampler<'a> {
    field: &'a SpectralField,
    deriv_cache: RefCell<HashMap<(usize, usize), SpectralField>>,
}

impl<'a> SpectralSampler<'a> {
    pub fn new(field: &'a SpectralField) -> Self {
        SpectralSampler {
            field,
            deriv_cache: RefCell::new(HashMap::new()),
        }
    }

    pub fn field(&self) -> &SpectralField {
        self.field
    }

    /// Physical samples of a derivative on the field's own grid.
    pub fn derivative_grid(&self, ax: usize, ay: usize) -> Array2<f64> {
        if ax == 0 && ay == 0 {
            return self.field.to_physical();
        }
        self.field.derivative(ax, ay).to_physical()
    }
}

impl Sampler for SpectralSampler<'_> {
    fn value(&self, x: f64, y: f64) -> f64 {
        self.field.eval(x, y)
    }

    fn derivative(&self, ax: usize, ay: usize, x: f64, y: f64) -> f64 {
        if ax == 0 && ay == 0 {
            return self.field.eval(x, y);
        }
        let mut cache = self.deriv_cache.borrow_mut();
        let d = cache
            .entry((ax, ay))
            .or_insert_with(|| self.field.derivative(ax, ay));
        d.eval(x, y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    #[test]
    fn spectral_sampler_derivatives() {
        let grid = Grid::new(32).unwrap();
        let f = SpectralField::from_fn(grid, |x, y| (2.0 * x).sin() * y.cos());
        let s = SpectralSampler::new(&f);
        let (x, y) = (0.7, 1.9);
        let dxy = s.derivative(1, 1, x, y);
        let expect = -2.0 * (2.0 * x).cos() * y.sin();
        assert!((dxy - expect).abs() < 1e-10, "{dxy} vs {expect}");
    }
}
