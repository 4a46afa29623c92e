use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};

use crate::error::{Error, Result};
use crate::grid::PeriodicGrid;

/// Forward/inverse real FFT plans for one transform length.
#[derive(Clone)]
pub struct FftPlans {
    forward: Arc<dyn RealToComplex<f64>>,
    inverse: Arc<dyn ComplexToReal<f64>>,
    n: usize,
}

impl FftPlans {
    pub fn new(n: usize) -> Self {
        let mut planner = RealFftPlanner::<f64>::new();
        Self {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            n,
        }
    }

    /// Plans shared per thread; plans are immutable so reuse is safe.
    pub fn cached(n: usize) -> Self {
        thread_local! {
            static CACHE: RefCell<HashMap<usize, FftPlans>> = RefCell::new(HashMap::new());
        }
        CACHE.with(|c| {
            c.borrow_mut()
                .entry(n)
                .or_insert_with(|| FftPlans::new(n))
                .clone()
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Amplitude-normalized forward transform: `coeffs[0]` is the mean.
    pub fn forward_into(&self, values: &[f64], coeffs: &mut [Complex64]) {
        let mut input = values.to_vec();
        self.forward
            .process(&mut input, coeffs)
            .expect("forward FFT buffer sizes");
        let scale = 1.0 / self.n as f64;
        for c in coeffs.iter_mut() {
            *c *= scale;
        }
    }

    /// Inverse of [`forward_into`](Self::forward_into). The DC and Nyquist
    /// imaginary parts are discarded (they must vanish for real data).
    pub fn inverse_into(&self, coeffs: &[Complex64], values: &mut [f64]) {
        let mut spec = coeffs.to_vec();
        project_real(&mut spec);
        self.inverse
            .process(&mut spec, values)
            .expect("inverse FFT buffer sizes");
    }
}

/// Zero the imaginary parts that a real signal cannot carry.
pub(crate) fn project_real(coeffs: &mut [Complex64]) {
    if let Some(c) = coeffs.first_mut() {
        c.im = 0.0;
    }
    if let Some(c) = coeffs.last_mut() {
        c.im = 0.0;
    }
}

/// Real samples on a periodic grid together with their half-spectrum.
///
/// Immutable after construction; every operation returns a new field.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: PeriodicGrid,
    values: Vec<f64>,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn from_values(grid: PeriodicGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("field samples must be finite".into()));
        }
        let plans = FftPlans::cached(grid.len());
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.modes()];
        plans.forward_into(&values, &mut coeffs);
        project_real(&mut coeffs);
        Ok(Self {
            grid,
            values,
            coeffs,
        })
    }

    pub fn from_fn(grid: PeriodicGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.points().into_iter().map(f).collect();
        Self::from_values(grid, values)
    }

    pub fn from_coeffs(grid: PeriodicGrid, mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.modes() {
            return Err(Error::InvalidGrid(format!(
                "expected {} spectral modes, got {}",
                grid.modes(),
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::InvalidParameter(
                "spectral coefficients must be finite".into(),
            ));
        }
        project_real(&mut coeffs);
        let plans = FftPlans::cached(grid.len());
        let mut values = vec![0.0; grid.len()];
        plans.inverse_into(&coeffs, &mut values);
        Ok(Self {
            grid,
            values,
            coeffs,
        })
    }

    pub fn zeros(grid: PeriodicGrid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
            coeffs: vec![Complex64::new(0.0, 0.0); grid.modes()],
        }
    }

    pub fn constant(grid: PeriodicGrid, c: f64) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.modes()];
        coeffs[0] = Complex64::new(c, 0.0);
        Self {
            grid,
            values: vec![c; grid.len()],
            coeffs,
        }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Multiply mode `j` (wavenumber `k_j`) by `m(j, k_j)`.
    pub fn apply_multiplier(&self, m: impl Fn(usize, f64) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c * m(j, self.grid.wavenumber(j)))
            .collect();
        Self::from_coeffs(self.grid, coeffs).expect("multiplier preserved mode count")
    }

    /// Zero every mode above index `j_max`.
    pub fn band_limited(&self, j_max: usize) -> Self {
        self.apply_multiplier(|j, _| {
            if j <= j_max {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Highest mode index with a nonzero coefficient, if any.
    pub fn highest_active_mode(&self) -> Option<usize> {
        self.coeffs
            .iter()
            .rposition(|c| c.re != 0.0 || c.im != 0.0)
    }

    fn check_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::from_values(self.grid, values)
    }

    /// Pointwise product in physical space.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * s).collect(),
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// `a*self + b*other`.
    pub fn lincomb(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.zip_with(other, |x, y| a * x + b * y)
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// Trapezoidal (spectrally exact for periodic data) integral over one period.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.dx()
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.dx()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn single_mode_lands_in_one_coefficient() {
        let grid = PeriodicGrid::centered(PI, 32).unwrap();
        let f = SpectralField::from_fn(grid, |x| 3.0 * (2.0 * x).cos()).unwrap();
        // cos(2x) = (e^{2ix} + e^{-2ix})/2, and x is measured from -pi (phase (-1)^2 = 1).
        assert!((f.coeffs()[2] - Complex64::new(1.5, 0.0)).norm() < 1e-14);
        for (j, c) in f.coeffs().iter().enumerate() {
            if j != 2 {
                assert!(c.norm() < 1e-14, "mode {j}: {c}");
            }
        }
    }

    #[test]
    fn constant_field_is_pure_mean() {
        let grid = PeriodicGrid::centered(5.0, 16).unwrap();
        let f = SpectralField::from_values(grid, vec![2.5; 16]).unwrap();
        assert!((f.mean() - 2.5).abs() < 1e-15);
        assert!((f.integral() - 25.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_wrong_lengths_and_nan() {
        let grid = PeriodicGrid::centered(1.0, 8).unwrap();
        assert!(SpectralField::from_values(grid, vec![0.0; 7]).is_err());
        assert!(SpectralField::from_values(grid, vec![f64::NAN; 8]).is_err());
        assert!(SpectralField::from_coeffs(grid, vec![Complex64::new(0.0, 0.0); 4]).is_err());
    }

    proptest! {
        #[test]
        fn round_trip_reproduces_samples(values in prop::collection::vec(-10.0f64..10.0, 64)) {
            let grid = PeriodicGrid::centered(7.0, 64).unwrap();
            let f = SpectralField::from_values(grid, values.clone()).unwrap();
            let g = SpectralField::from_coeffs(grid, f.coeffs().to_vec()).unwrap();
            let scale = values.iter().fold(1e-300f64, |m, v| m.max(v.abs()));
            for (a, b) in values.iter().zip(g.values()) {
                prop_assert!((a - b).abs() <= 1e-12 * scale);
            }
            // Real data: DC and Nyquist are real.
            prop_assert_eq!(f.coeffs()[0].im, 0.0);
            prop_assert_eq!(f.coeffs()[32].im, 0.0);
        }
    }
}
