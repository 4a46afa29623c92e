use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic grid covering `[x0 - L, x0 + L)` with `N` samples.
///
/// Spectral index `j = 0..=N/2` carries wavenumber `k_j = j*pi/L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodicGrid {
    half_length: f64,
    offset: f64,
    n: usize,
}

impl PeriodicGrid {
    pub fn new(half_length: f64, n: usize, offset: f64) -> Result<Self> {
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half-length must be finite and > 0, got {half_length}"
            )));
        }
        if !offset.is_finite() {
            return Err(Error::InvalidGrid("offset must be finite".into()));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "sample count must be a power of two >= 8, got {n}"
            )));
        }
        Ok(Self {
            half_length,
            offset,
            n,
        })
    }

    /// Grid centred on the origin.
    pub fn centered(half_length: f64, n: usize) -> Result<Self> {
        Self::new(half_length, n, 0.0)
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn period(&self) -> f64 {
        2.0 * self.half_length
    }

    pub fn dx(&self) -> f64 {
        self.period() / self.n as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.offset - self.half_length + i as f64 * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Number of stored half-spectrum modes, `N/2 + 1`.
    pub fn modes(&self) -> usize {
        self.n / 2 + 1
    }

    pub fn wavenumber(&self, j: usize) -> f64 {
        j as f64 * PI / self.half_length
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.modes()).map(|j| self.wavenumber(j)).collect()
    }

    pub fn nyquist(&self) -> usize {
        self.n / 2
    }

    pub fn k_max(&self) -> f64 {
        self.wavenumber(self.nyquist())
    }

    /// `k_max * h`, the diagnostic that governs growth of the exponential multipliers.
    pub fn kmax_h(&self, h: f64) -> f64 {
        self.k_max() * h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covers_half_open_interval() {
        let g = PeriodicGrid::new(3.0, 16, 1.0).unwrap();
        assert_eq!(g.x(0), -2.0);
        assert!((g.x(15) + g.dx() - 4.0).abs() < 1e-15);
        assert_eq!(g.dx(), 6.0 / 16.0);
        assert_eq!(g.modes(), 9);
        assert!((g.wavenumber(2) - 2.0 * PI / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(PeriodicGrid::centered(1.0, 12).is_err());
        assert!(PeriodicGrid::centered(1.0, 4).is_err());
        assert!(PeriodicGrid::centered(0.0, 16).is_err());
        assert!(PeriodicGrid::centered(1.0, 8).is_ok());
    }
}
