//! Linear dispersion of the layer and the model equation's own linear frequency.
//!
//! Substituting `eta = exp(i(kx - wt))` into the linearized system gives
//! `w^2 = (g k + sigma k^3 / rho) tanh(kh)`. The model equation keeps the
//! full `sin(h d)` operator, so its linear frequency is `(c0/h) sinh(kh)`
//! instead; the two agree only as `kh -> 0`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::spectral_ops::DEFAULT_BAND_LIMIT;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersionSample {
    pub k: f64,
    pub omega2: f64,
    pub omega_model: f64,
    pub phase_velocity: f64,
    pub group_velocity: f64,
}

fn check_k(k: f64) -> Result<()> {
    if !(k.is_finite() && k >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "wavenumber must be finite and >= 0, got {k}"
        )));
    }
    Ok(())
}

/// `w^2(k) = (g k + sigma k^3 / rho) tanh(kh)`.
pub fn omega_squared(k: f64, params: &PhysicalParams) -> Result<f64> {
    check_k(k)?;
    let stiffness = params.g() * k + params.sigma() * k.powi(3) / params.rho();
    Ok(stiffness * (k * params.h()).tanh())
}

/// Linear frequency of the generalized model, `(c0/h) sinh(kh)`.
pub fn model_dispersion_gkdv(k: f64, params: &PhysicalParams) -> Result<f64> {
    model_dispersion_gkdv_limited(k, params, DEFAULT_BAND_LIMIT)
}

pub fn model_dispersion_gkdv_limited(k: f64, params: &PhysicalParams, band_limit: f64) -> Result<f64> {
    check_k(k)?;
    let kh = k * params.h();
    if kh > band_limit {
        return Err(Error::BandLimit {
            mode: 0,
            wavenumber: k,
            kh,
            limit: band_limit,
        });
    }
    Ok(params.c0() / params.h() * kh.sinh())
}

/// `w/k`, continuous at `k = 0` (`c0` with gravity, `0` for a purely capillary layer).
pub fn phase_velocity(k: f64, params: &PhysicalParams) -> Result<f64> {
    check_k(k)?;
    if k == 0.0 {
        return Ok(params.c0());
    }
    Ok(omega_squared(k, params)?.sqrt() / k)
}

/// `dw/dk` from the analytic derivative of `w^2`: `dw/dk = (dw^2/dk) / (2w)`.
pub fn group_velocity(k: f64, params: &PhysicalParams) -> Result<f64> {
    check_k(k)?;
    if k == 0.0 {
        return Ok(params.c0());
    }
    let (g, h) = (params.g(), params.h());
    let s = params.sigma() / params.rho();
    let kh = k * h;
    let t = kh.tanh();
    let sech2 = 1.0 / kh.cosh().powi(2);
    let w2 = (g * k + s * k.powi(3)) * t;
    let dw2 = (g + 3.0 * s * k * k) * t + (g * k + s * k.powi(3)) * h * sech2;
    Ok(dw2 / (2.0 * w2.sqrt()))
}

pub fn sample(k: f64, params: &PhysicalParams) -> Result<DispersionSample> {
    Ok(DispersionSample {
        k,
        omega2: omega_squared(k, params)?,
        omega_model: model_dispersion_gkdv(k, params)?,
        phase_velocity: phase_velocity(k, params)?,
        group_velocity: group_velocity(k, params)?,
    })
}

/// Uniform sweep of `n` wavenumbers over `[k_min, k_max]`.
pub fn sweep(k_min: f64, k_max: f64, n: usize, params: &PhysicalParams) -> Result<Vec<DispersionSample>> {
    if !(k_min.is_finite() && k_max.is_finite()) || k_min < 0.0 || k_max < k_min || n == 0 {
        return Err(Error::InvalidParameter(format!(
            "invalid wavenumber range [{k_min}, {k_max}] with {n} samples"
        )));
    }
    if n > 1 && k_max == k_min {
        return Err(Error::InvalidParameter(
            "a degenerate range needs exactly one sample".into(),
        ));
    }
    (0..n)
        .map(|i| {
            let k = if n == 1 {
                k_min
            } else {
                k_min + (k_max - k_min) * i as f64 / (n - 1) as f64
            };
            sample(k, params)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gravity() -> PhysicalParams {
        PhysicalParams::new(1.0, 9.81, 1000.0, 0.0).unwrap()
    }

    fn capillary() -> PhysicalParams {
        PhysicalParams::new(0.5, 0.0, 1000.0, 0.073).unwrap()
    }

    #[test]
    fn zero_wavenumber() {
        assert_eq!(omega_squared(0.0, &gravity()).unwrap(), 0.0);
        assert_eq!(model_dispersion_gkdv(0.0, &gravity()).unwrap(), 0.0);
        assert_eq!(group_velocity(0.0, &gravity()).unwrap(), gravity().c0());
        assert!(omega_squared(-1.0, &gravity()).is_err());
    }

    #[test]
    fn acoustic_limit() {
        let p = gravity();
        for kh in [0.001, 0.01, 0.05] {
            let k = kh / p.h();
            let r = omega_squared(k, &p).unwrap() / (p.c0() * k).powi(2);
            assert!((r - 1.0).abs() < 1e-3, "kh={kh}: ratio {r}");
        }
    }

    #[test]
    fn capillary_limit() {
        let p = capillary();
        for kh in [0.005, 0.02, 0.05] {
            let k = kh / p.h();
            let expect = p.h() * p.sigma() / p.rho() * k.powi(4);
            let r = omega_squared(k, &p).unwrap() / expect;
            assert!((r - 1.0).abs() < 1e-2, "kh={kh}: ratio {r}");
        }
    }

    #[test]
    fn model_frequency_shallow_and_unit_cases() {
        let p = gravity();
        let k = 0.05 / p.h();
        let r = model_dispersion_gkdv(k, &p).unwrap() / (p.c0() * k);
        assert!((r - 1.0).abs() < 1e-3);
        let unit = PhysicalParams::unit_speed(1.0).unwrap();
        let w = model_dispersion_gkdv(1.0, &unit).unwrap();
        assert!((w - 1.175_201_193_643_801_4).abs() < 1e-15);
        assert!(model_dispersion_gkdv(40.0, &unit).is_err());
    }

    #[test]
    fn model_to_true_ratio_converges_at_second_order() {
        let p = gravity();
        let gap = |kh: f64| {
            let k = kh / p.h();
            let w = omega_squared(k, &p).unwrap().sqrt();
            (model_dispersion_gkdv(k, &p).unwrap() / w - 1.0).abs()
        };
        let slope = (gap(0.02) / gap(0.01)).log2();
        assert!((slope - 2.0).abs() < 0.05, "measured order {slope}");
    }

    #[test]
    fn group_velocity_matches_finite_differences() {
        for p in [gravity(), capillary(), PhysicalParams::new(0.3, 9.81, 1000.0, 0.073).unwrap()] {
            for &k in &[0.01, 0.3, 1.0, 4.0, 17.0] {
                let step = 1e-6 * k;
                let w = |k: f64| omega_squared(k, &p).unwrap().sqrt();
                let fd = (w(k + step) - w(k - step)) / (2.0 * step);
                let an = group_velocity(k, &p).unwrap();
                assert!((an - fd).abs() <= 1e-5 * an.abs(), "k={k}: {an} vs {fd}");
            }
        }
    }

    #[test]
    fn deep_water_group_velocity() {
        let p = gravity();
        let k = 20.0 / p.h();
        let cg = group_velocity(k, &p).unwrap();
        let deep = 0.5 * (p.g() / k).sqrt();
        assert!((cg / deep - 1.0).abs() < 1e-3);
        let shallow = group_velocity(1e-6, &p).unwrap();
        assert!((shallow / p.c0() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn omega_squared_monotone() {
        for p in [gravity(), capillary()] {
            let mut prev = -1.0;
            for i in 0..2000 {
                let w = omega_squared(i as f64 * 0.01, &p).unwrap();
                assert!(w >= prev);
                assert!(w >= 0.0);
                prev = w;
            }
        }
    }

    #[test]
    fn nondimensional_collapse() {
        // Shared Bond-like ratio sigma/(rho g h^2) = 0.02.
        let a = PhysicalParams::new(1.0, 9.81, 1000.0, 0.02 * 1000.0 * 9.81).unwrap();
        let b = PhysicalParams::new(0.25, 2.0, 500.0, 0.02 * 500.0 * 2.0 * 0.0625).unwrap();
        for kh in [0.1, 0.7, 2.0, 5.0] {
            let wa = omega_squared(kh / a.h(), &a).unwrap() * a.h() / a.g();
            let wb = omega_squared(kh / b.h(), &b).unwrap() * b.h() / b.g();
            assert!((wa - wb).abs() <= 1e-12 * wa);
            let direct = (kh + 0.02 * kh.powi(3)) * kh.tanh();
            assert!((wa - direct).abs() <= 1e-12 * wa);
        }
    }

    #[test]
    fn sweep_single_row_at_zero() {
        let rows = sweep(0.0, 0.0, 1, &gravity()).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].omega2, 0.0);
        assert_eq!(rows[0].omega_model, 0.0);
        assert!(sweep(1.0, 0.0, 3, &gravity()).is_err());
    }
}
