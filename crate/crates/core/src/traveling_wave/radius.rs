use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::recursion::ScaledCoefficients;
use super::SeriesSolution;

/// RMS fit residual (in units of `log|beta_k|/k`) above which growth is
/// flagged as non-geometric.
pub const RADIUS_FIT_THRESHOLD: f64 = 1e-2;

const BLOCKS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadiusEstimate {
    /// Estimated radius in units of the unscaled amplitude `a1`.
    pub radius: f64,
    pub fit_residual: f64,
    /// Number of (block-maximum) points entering the fit.
    pub points: usize,
    pub flagged: bool,
}

pub fn radius_estimate(sol: &SeriesSolution) -> RadiusEstimate {
    *sol.radius()
}

/// Cauchy-Hadamard radius from the tail of the coefficient sequence.
///
/// `log|beta_k|/k` is regressed on `[1, 1/k, ln(k)/k]` over the top half of
/// the available orders; the intercept is the limsup rate. With more than
/// three blocks' worth of points only the block maxima enter the fit so that
/// sign oscillations and near-zeros do not drag the envelope down.
pub(crate) fn fit_radius(coeffs: &ScaledCoefficients) -> RadiusEstimate {
    let k_max = coeffs.len();
    let orders: Vec<(f64, f64)> = (k_max / 2 + 1..=k_max)
        .filter(|&k| k >= 2)
        .filter_map(|k| {
            let b = coeffs.beta(k);
            (b != 0.0 && b.is_finite()).then(|| (k as f64, b.abs().ln() / k as f64))
        })
        .collect();
    let points = block_maxima(&orders);
    let r = coeffs.scale();
    match points.len() {
        0 => RadiusEstimate {
            radius: f64::INFINITY,
            fit_residual: 0.0,
            points: 0,
            flagged: true,
        },
        1..=3 => {
            // Too few points for the three-term model: root test on the last one.
            let (k, y) = *points.last().unwrap();
            let radius = r * (-(y * k) / (k - 1.0)).exp();
            RadiusEstimate {
                radius,
                fit_residual: f64::NAN,
                points: points.len(),
                flagged: true,
            }
        }
        n => {
            let a = DMatrix::from_fn(n, 3, |i, j| {
                let k = points[i].0;
                match j {
                    0 => 1.0,
                    1 => 1.0 / k,
                    _ => k.ln() / k,
                }
            });
            let y = DVector::from_iterator(n, points.iter().map(|p| p.1));
            let svd = a.clone().svd(true, true);
            let Ok(coef) = svd.solve(&y, 1e-14) else {
                return RadiusEstimate {
                    radius: f64::NAN,
                    fit_residual: f64::NAN,
                    points: n,
                    flagged: true,
                };
            };
            let res = &a * &coef - y;
            let fit_residual = (res.norm_squared() / n as f64).sqrt();
            RadiusEstimate {
                radius: r * (-coef[0]).exp(),
                fit_residual,
                points: n,
                flagged: fit_residual.is_nan() || fit_residual > RADIUS_FIT_THRESHOLD,
            }
        }
    }
}

/// Radius from the finite prefix only, for retuning an overflowing scale.
pub(crate) fn fit_radius_finite(coeffs: &ScaledCoefficients) -> f64 {
    let finite = coeffs
        .betas()
        .iter()
        .position(|b| !b.is_finite())
        .unwrap_or(coeffs.len());
    if finite < 2 {
        return f64::NAN;
    }
    let prefix = ScaledCoefficients::new(coeffs.scale(), coeffs.betas()[..finite].to_vec())
        .expect("prefix of valid coefficients");
    fit_radius(&prefix).radius
}

fn block_maxima(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    if points.len() < 3 * BLOCKS {
        return points.to_vec();
    }
    let size = points.len().div_ceil(BLOCKS);
    points
        .chunks(size)
        .map(|c| {
            *c.iter()
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .expect("non-empty chunk")
        })
        .collect()
}
