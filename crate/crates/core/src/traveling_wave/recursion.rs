use crate::error::{Error, Result};

use super::radius;

/// Scaled denominators `|k sin x - sin kx| / k` at or below this are resonant.
pub const DENOMINATOR_TOLERANCE: f64 = 1e-12;

const SCALE_BAND: (f64, f64) = (1e-12, 1e12);
const SCALE_ITERATIONS: usize = 6;

/// Coefficients stored as `beta_k = alpha_k * r^(k-1)` for a scale `r > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledCoefficients {
    scale: f64,
    betas: Vec<f64>,
}

impl ScaledCoefficients {
    pub fn new(scale: f64, betas: Vec<f64>) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "coefficient scale must be finite and > 0, got {scale}"
            )));
        }
        if betas.first() != Some(&1.0) {
            return Err(Error::InvalidParameter(
                "leading coefficient must be exactly 1".into(),
            ));
        }
        Ok(Self { scale, betas })
    }

    /// Store unscaled `alpha_1..alpha_K` with `r = 1`.
    pub fn from_alphas(alphas: &[f64]) -> Result<Self> {
        if alphas.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidParameter("coefficients must be finite".into()));
        }
        Self::new(1.0, alphas.to_vec())
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `beta_1..beta_K`; index 0 holds order 1.
    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn beta(&self, k: usize) -> f64 {
        self.betas[k - 1]
    }

    pub fn len(&self) -> usize {
        self.betas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.betas.is_empty()
    }

    /// `alpha_k = beta_k / r^(k-1)`, falling back to log space when the
    /// power over- or underflows.
    pub fn alpha(&self, k: usize) -> f64 {
        let b = self.beta(k);
        if b == 0.0 {
            return 0.0;
        }
        let p = self.scale.powi(k as i32 - 1);
        if p.is_normal() {
            return b / p;
        }
        let log = b.abs().ln() - (k as f64 - 1.0) * self.scale.ln();
        b.signum() * log.exp()
    }

    pub fn alphas(&self) -> Vec<f64> {
        (1..=self.len()).map(|k| self.alpha(k)).collect()
    }

    fn within_band(&self) -> bool {
        self.betas
            .iter()
            .filter(|b| **b != 0.0)
            .all(|b| b.is_finite() && (SCALE_BAND.0..=SCALE_BAND.1).contains(&b.abs()))
    }
}

/// `k sin x - sin(kx)`, by series where the two terms nearly cancel.
pub fn resonance_denominator(k: usize, x: f64) -> f64 {
    let kf = k as f64;
    let y = kf * x;
    if y.abs() > 1.5 {
        return kf * x.sin() - y.sin();
    }
    // sum_{j>=1} (-1)^(j+1) x^(2j+1) (k^(2j+1) - k) / (2j+1)!
    let mut sum = 0.0;
    let mut xp = x; // x^(2j+1)/(2j+1)!
    let mut kp = kf; // k^(2j+1)
    for j in 1..40 {
        let n = (2 * j) as f64;
        xp *= x * x / (n * (n + 1.0));
        kp *= kf * kf;
        let term = xp * (kp - kf);
        sum += if j % 2 == 1 { term } else { -term };
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

fn check_inputs(b: f64, h: f64, order: usize) -> Result<()> {
    if !(b.is_finite() && b > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "decay rate B must be finite and > 0, got {b}"
        )));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "depth h must be finite and > 0, got {h}"
        )));
    }
    if order == 0 {
        return Err(Error::InvalidParameter("truncation order must be >= 1".into()));
    }
    Ok(())
}

fn checked_denominator(k: usize, x: f64) -> Result<f64> {
    let d = resonance_denominator(k, x);
    if d.is_nan() || d.abs() / k as f64 <= DENOMINATOR_TOLERANCE {
        return Err(Error::ResonantDenominator {
            order: k,
            denominator: d,
        });
    }
    Ok(d)
}

/// Run a scaled recursion `beta_k = r * step(k, betas)` and retune `r`
/// until the nonzero scaled coefficients sit inside the working band.
fn scaled_recursion(
    initial_scale: f64,
    order: usize,
    step: impl Fn(usize, &[f64]) -> f64,
) -> Result<ScaledCoefficients> {
    let run = |r: f64| {
        let mut betas = Vec::with_capacity(order);
        betas.push(1.0);
        for k in 2..=order {
            let v = r * step(k, &betas);
            betas.push(v);
        }
        ScaledCoefficients { scale: r, betas }
    };
    let mut r = initial_scale;
    let mut coeffs = run(r);
    for _ in 0..SCALE_ITERATIONS {
        if coeffs.within_band() {
            break;
        }
        let fit = radius::fit_radius_finite(&coeffs);
        if !(fit.is_finite() && fit > 0.0) || fit == r {
            break;
        }
        r = fit;
        coeffs = run(r);
    }
    Ok(coeffs)
}

/// Verbatim printed full-depth recursion.
pub fn recursion_paper_printed(b: f64, h: f64, order: usize) -> Result<ScaledCoefficients> {
    check_inputs(b, h, order)?;
    let x = b * h;
    let mut factors = vec![0.0; order + 1];
    for (k, f) in factors.iter_mut().enumerate().skip(2) {
        let d = checked_denominator(k, x)?;
        *f = 2.0 * b * (x * (k as f64 - 1.0) / 2.0).cos() / d;
    }
    scaled_recursion(2.0 * b * b * h.powi(3), order, |k, beta| {
        let kf = k as f64;
        let s: f64 = (1..k)
            .map(|n| {
                let nf = n as f64;
                nf * (x * (2.0 * kf - nf - 1.0) / 2.0).cos() * beta[n - 1] * beta[k - n - 1]
            })
            .sum();
        factors[k] * s
    })
}

/// Printed shallow-water recursion; solved by `alpha_k = k (2 B^2 h^3)^(1-k)`.
pub fn recursion_shallow_printed(b: f64, h: f64, order: usize) -> Result<ScaledCoefficients> {
    check_inputs(b, h, order)?;
    let c = 6.0 / (b * b * h.powi(3));
    scaled_recursion(2.0 * b * b * h.powi(3), order, |k, beta| {
        let kf = k as f64;
        let s: f64 = (1..k)
            .map(|n| n as f64 * beta[n - 1] * beta[k - n - 1])
            .sum();
        c / (kf * (kf * kf - 1.0)) * s
    })
}

/// Full-depth recursion obtained from the steady equation with exact
/// operator action on `exp(-nBX)`.
pub fn recursion_steady_derived(b: f64, h: f64, order: usize) -> Result<ScaledCoefficients> {
    check_inputs(b, h, order)?;
    let x = b * h;
    let mut factors = vec![0.0; order + 1];
    for (k, f) in factors.iter_mut().enumerate().skip(2) {
        let d = checked_denominator(k, x)?;
        *f = b * k as f64 / d;
    }
    let cosines: Vec<f64> = (0..order).map(|m| (m as f64 * x).cos()).collect();
    scaled_recursion(2.0 * b * b * h.powi(3), order, |k, beta| {
        let s: f64 = (1..k)
            .map(|m| cosines[m] * beta[m - 1] * beta[k - m - 1])
            .sum();
        factors[k] * s
    })
}

/// Shallow limit of [`recursion_steady_derived`]; solved by `alpha_k = k (B^2 h^3)^(1-k)`.
pub fn recursion_shallow_derived(b: f64, h: f64, order: usize) -> Result<ScaledCoefficients> {
    check_inputs(b, h, order)?;
    let c = 6.0 / (b * b * h.powi(3));
    scaled_recursion(2.0 * b * b * h.powi(3), order, |k, beta| {
        let kf = k as f64;
        let s: f64 = (1..k).map(|m| beta[m - 1] * beta[k - m - 1]).sum();
        c / (kf * kf - 1.0) * s
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn denominator_series_matches_direct_form() {
        for &k in &[2usize, 3, 7, 20] {
            for &x in &[0.01, 0.05, 0.07] {
                let direct = k as f64 * f64::sin(x) - f64::sin(k as f64 * x);
                let series = resonance_denominator(k, x);
                assert!(rel(series, direct) < 1e-7, "k={k} x={x}");
            }
        }
        // Leading term x^3 (k^3 - k)/6 for tiny x.
        let d = resonance_denominator(3, 1e-6);
        assert!(rel(d, 1e-18 * 24.0 / 6.0) < 1e-10);
    }

    #[test]
    fn printed_shallow_closed_form() {
        let c = recursion_shallow_printed(1.0, 1.0, 30).unwrap();
        for k in 1..=30 {
            let exact = k as f64 / 2f64.powi(k as i32 - 1);
            assert!(rel(c.alpha(k), exact) < 1e-12, "k={k}");
        }
        assert_eq!(c.alpha(2), 1.0);
        assert_eq!(c.alpha(3), 0.75);
    }

    #[test]
    fn derived_shallow_closed_form() {
        for &(b, h) in &[(1.0, 1.0), (0.5, 2.0), (2.0, 0.3)] {
            let c = recursion_shallow_derived(b, h, 200).unwrap();
            let r = b * b * f64::powi(h, 3);
            for k in 1..=200 {
                let exact_scaled = k as f64 * (c.scale() / r).powi(k as i32 - 1);
                assert!(rel(c.beta(k), exact_scaled) < 1e-12, "B={b} h={h} k={k}");
            }
            assert!(c.within_band());
        }
    }

    #[test]
    fn printed_full_second_coefficient() {
        let c = recursion_paper_printed(1.0, 1.0, 2).unwrap();
        let exact = 2.0 * f64::cos(0.5) * f64::cos(1.0) / (2.0 * f64::sin(1.0) - f64::sin(2.0));
        assert!(rel(c.alpha(2), exact) < 1e-14);
    }

    #[test]
    fn resonant_denominators_are_reported() {
        // x = pi makes every k sin x - sin kx vanish.
        let err = recursion_steady_derived(std::f64::consts::PI, 1.0, 5).unwrap_err();
        assert!(matches!(err, Error::ResonantDenominator { order: 2, .. }));
        assert!(recursion_paper_printed(std::f64::consts::PI, 1.0, 5).is_err());
    }

    #[test]
    fn scale_keeps_large_orders_in_band() {
        for &bh in &[0.2, 0.5, 1.0] {
            let c = recursion_steady_derived(bh, 1.0, 200).unwrap();
            assert!(c.within_band(), "Bh={bh}");
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(recursion_shallow_printed(0.0, 1.0, 3).is_err());
        assert!(recursion_shallow_printed(1.0, 0.0, 3).is_err());
        assert!(recursion_shallow_printed(1.0, 1.0, 0).is_err());
        assert_eq!(recursion_shallow_printed(1.0, 1.0, 1).unwrap().betas(), &[1.0]);
    }
}
