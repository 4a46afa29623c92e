//! Exact Fourier-multiplier action of the depth operators `sin(h d/dx)`,
//! `cos(h d/dx)`, spatial derivatives, and the linear-theory velocity potential.
//!
//! On an oscillatory mode `e^{ikx}` the derivative acts as `ik`, so
//! `sin(h d) -> i sinh(kh)` and `cos(h d) -> cosh(kh)`. Both grow
//! exponentially, so every operator checks a band limit on `k*h` before
//! touching a mode that carries content.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::params::PhysicalParams;

/// Default ceiling on `k*h` for any mode with nonzero content.
pub const DEFAULT_BAND_LIMIT: f64 = 30.0;

/// Operator set sharing one band-limit guard.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlocalOps {
    band_limit: f64,
}

impl Default for NonlocalOps {
    fn default() -> Self {
        Self {
            band_limit: DEFAULT_BAND_LIMIT,
        }
    }
}

impl NonlocalOps {
    pub fn with_band_limit(band_limit: f64) -> Result<Self> {
        if !(band_limit.is_finite() && band_limit > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "band limit must be finite and > 0, got {band_limit}"
            )));
        }
        Ok(Self { band_limit })
    }

    pub fn band_limit(&self) -> f64 {
        self.band_limit
    }

    /// Fails on the lowest active mode whose `k*h` exceeds the limit.
    pub fn check_band_limit(&self, field: &SpectralField, h: f64) -> Result<()> {
        let grid = field.grid();
        for (j, c) in field.coeffs().iter().enumerate() {
            let kh = grid.wavenumber(j) * h;
            if kh > self.band_limit && (c.re != 0.0 || c.im != 0.0) {
                return Err(Error::BandLimit {
                    mode: j,
                    wavenumber: grid.wavenumber(j),
                    kh,
                    limit: self.band_limit,
                });
            }
        }
        Ok(())
    }

    fn check_depth(h: f64) -> Result<()> {
        if !(h.is_finite() && h >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "operator depth must be finite and >= 0, got {h}"
            )));
        }
        Ok(())
    }

    /// `sin(h d/dx)`: mode `k` times `i sinh(kh)`.
    pub fn sin_h_dx(&self, field: &SpectralField, h: f64) -> Result<SpectralField> {
        Self::check_depth(h)?;
        self.check_band_limit(field, h)?;
        Ok(field.apply_multiplier(|_, k| Complex64::new(0.0, (k * h).sinh())))
    }

    /// `cos(h d/dx)`: mode `k` times `cosh(kh)`.
    pub fn cos_h_dx(&self, field: &SpectralField, h: f64) -> Result<SpectralField> {
        Self::check_depth(h)?;
        self.check_band_limit(field, h)?;
        Ok(field.apply_multiplier(|_, k| Complex64::new((k * h).cosh(), 0.0)))
    }

    /// Surface trace of the velocity field to first order in `eta`:
    ///
    /// `u = [cos(h d) - eta d sin(h d)] f`, `v = -[sin(h d) + eta d cos(h d)] f`.
    pub fn surface_velocity(
        &self,
        f: &SpectralField,
        eta: &SpectralField,
        params: &PhysicalParams,
    ) -> Result<(SpectralField, SpectralField)> {
        if f.grid() != eta.grid() {
            return Err(Error::GridMismatch);
        }
        let h = params.h();
        let sin_f = self.sin_h_dx(f, h)?;
        let cos_f = self.cos_h_dx(f, h)?;
        let d_sin_f = derivative(&sin_f, 1)?;
        let d_cos_f = derivative(&cos_f, 1)?;
        let u = cos_f.sub(&eta.mul(&d_sin_f)?)?;
        let v = sin_f.add(&eta.mul(&d_cos_f)?)?.scale(-1.0);
        Ok((u, v))
    }

    /// Linear-theory potential for a gravity layer:
    /// mode `k` times `(c0/h) (sinh(2kh)/(2kh))^{-1/2}`, with the `k = 0`
    /// entry set to its limit `c0/h`.
    pub fn f_linear_from_eta(
        &self,
        eta: &SpectralField,
        params: &PhysicalParams,
    ) -> Result<SpectralField> {
        let h = params.h();
        self.check_band_limit(eta, h)?;
        let base = params.c0() / h;
        Ok(eta.apply_multiplier(|_, k| Complex64::new(base * linear_potential_factor(k * h), 0.0)))
    }
}

/// `(sinh(2x)/(2x))^{-1/2}` with the removable singularity filled in.
pub fn linear_potential_factor(x: f64) -> f64 {
    let y = 2.0 * x;
    let sinhc = if y.abs() < 1e-4 {
        1.0 + y * y / 6.0
    } else {
        y.sinh() / y
    };
    1.0 / sinhc.sqrt()
}

pub fn apply_sin_h_dx(field: &SpectralField, h: f64) -> Result<SpectralField> {
    NonlocalOps::default().sin_h_dx(field, h)
}

pub fn apply_cos_h_dx(field: &SpectralField, h: f64) -> Result<SpectralField> {
    NonlocalOps::default().cos_h_dx(field, h)
}

pub fn surface_velocity(
    f: &SpectralField,
    eta: &SpectralField,
    params: &PhysicalParams,
) -> Result<(SpectralField, SpectralField)> {
    NonlocalOps::default().surface_velocity(f, eta, params)
}

pub fn f_linear_from_eta(eta: &SpectralField, params: &PhysicalParams) -> Result<SpectralField> {
    NonlocalOps::default().f_linear_from_eta(eta, params)
}

/// Spectral derivative of order 1 to 4: mode `k` times `(ik)^order`.
pub fn derivative(field: &SpectralField, order: u32) -> Result<SpectralField> {
    if !(1..=4).contains(&order) {
        return Err(Error::InvalidParameter(format!(
            "derivative order must be in 1..=4, got {order}"
        )));
    }
    Ok(field.apply_multiplier(|_, k| Complex64::new(0.0, k).powu(order)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::PeriodicGrid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn grid() -> PeriodicGrid {
        PeriodicGrid::centered(PI, 64).unwrap()
    }

    fn max_diff(a: &SpectralField, b: &SpectralField) -> f64 {
        a.values()
            .iter()
            .zip(b.values())
            .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    /// Truncated Taylor series of `sin(h d)` / `cos(h d)` built only from
    /// repeated first derivatives.
    fn taylor_oracle(field: &SpectralField, h: f64, odd: bool, terms: usize) -> SpectralField {
        let mut acc = SpectralField::zeros(*field.grid());
        let mut power = field.clone(); // (h d)^p f
        let mut fact = 1.0;
        let mut p = 0usize;
        let mut used = 0;
        while used < terms {
            if (p % 2 == 1) == odd {
                // sin: (-1)^m x^{2m+1}/(2m+1)!, cos: (-1)^m x^{2m}/(2m)!
                let sign = if (p / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
                acc = acc.lincomb(1.0, &power, sign / fact).unwrap();
                used += 1;
            }
            p += 1;
            fact *= p as f64;
            power = derivative(&power, 1).unwrap().scale(h);
        }
        acc
    }

    #[test]
    fn constant_field_annihilated_by_sin() {
        let c = SpectralField::constant(grid(), 4.0);
        let s = apply_sin_h_dx(&c, 0.7).unwrap();
        assert!(s.max_abs() < 1e-15);
        let cc = apply_cos_h_dx(&c, 0.7).unwrap();
        assert!(max_diff(&cc, &c) < 1e-14);
    }

    #[test]
    fn zero_depth_limits() {
        let f = SpectralField::from_fn(grid(), |x| x.sin() + 0.3 * (3.0 * x).cos()).unwrap();
        assert!(apply_sin_h_dx(&f, 0.0).unwrap().max_abs() < 1e-15);
        assert!(max_diff(&apply_cos_h_dx(&f, 0.0).unwrap(), &f) < 1e-14);
    }

    #[test]
    fn single_mode_kh_one_matches_taylor_oracle() {
        // k = 2 on [-pi, pi), h = 1/2 => kh = 1.
        let k = 2.0;
        let h = 0.5;
        let f = SpectralField::from_fn(grid(), |x| (k * x).cos())
            .unwrap()
            .band_limited(4);
        let s = apply_sin_h_dx(&f, h).unwrap();
        let c = apply_cos_h_dx(&f, h).unwrap();
        let s_oracle = taylor_oracle(&f, h, true, 12);
        let c_oracle = taylor_oracle(&f, h, false, 12);
        assert!(max_diff(&s, &s_oracle) < 1e-13);
        assert!(max_diff(&c, &c_oracle) < 1e-13);
        // Frozen values from the oracle: -sinh(1) sin(kx), cosh(1) cos(kx).
        let x = grid().x(5);
        assert!((s.values()[5] + 1.175_201_193_643_801_4 * (k * x).sin()).abs() < 1e-13);
        assert!((c.values()[5] - 1.543_080_634_815_243_7 * (k * x).cos()).abs() < 1e-13);
    }

    #[test]
    fn derivative_examples() {
        let k = 3.0;
        let f = SpectralField::from_fn(grid(), |x| (k * x).sin()).unwrap();
        let d1 = derivative(&f, 1).unwrap();
        let d3 = derivative(&f, 3).unwrap();
        let e1 = SpectralField::from_fn(grid(), |x| k * (k * x).cos()).unwrap();
        let e3 = SpectralField::from_fn(grid(), |x| -k.powi(3) * (k * x).cos()).unwrap();
        assert!(max_diff(&d1, &e1) < 1e-12);
        assert!(max_diff(&d3, &e3) < 1e-12 * 27.0);
        let c = SpectralField::constant(grid(), 2.0);
        for order in 1..=4 {
            assert!(derivative(&c, order).unwrap().max_abs() < 1e-15);
        }
        assert!(derivative(&f, 0).is_err());
        assert!(derivative(&f, 5).is_err());
    }

    #[test]
    fn band_limit_names_the_offending_mode() {
        let g = PeriodicGrid::centered(PI, 64).unwrap();
        let f = SpectralField::from_fn(g, |x| (20.0 * x).cos()).unwrap();
        match apply_sin_h_dx(&f, 2.0) {
            Err(Error::BandLimit { mode, kh, limit, .. }) => {
                // Round-off fills every mode, so the first one past kh = 30 trips.
                assert_eq!(mode, 16);
                assert!(kh > limit);
            }
            other => panic!("expected band-limit error, got {other:?}"),
        }
        // A field explicitly band-limited below the threshold passes.
        let limited = f.band_limited(20);
        assert!(apply_cos_h_dx(&limited, 1.4).is_ok());
        let strict = NonlocalOps::with_band_limit(5.0).unwrap();
        assert!(strict.cos_h_dx(&limited, 1.4).is_err());
    }

    #[test]
    fn surface_velocity_examples() {
        let p = PhysicalParams::gravity(0.5, 9.81).unwrap();
        let g = grid();
        let zero = SpectralField::zeros(g);
        let fc = SpectralField::constant(g, 1.5);
        let (u, v) = surface_velocity(&fc, &zero, &p).unwrap();
        assert!(max_diff(&u, &fc) < 1e-14);
        assert!(v.max_abs() < 1e-14);

        let k = 2.0;
        let f = SpectralField::from_fn(g, |x| (k * x).cos())
            .unwrap()
            .band_limited(4);
        let (u, v) = surface_velocity(&f, &zero, &p).unwrap();
        let kh = k * p.h();
        let eu = SpectralField::from_fn(g, |x| kh.cosh() * (k * x).cos()).unwrap();
        let ev = SpectralField::from_fn(g, |x| kh.sinh() * (k * x).sin()).unwrap();
        assert!(max_diff(&u, &eu) < 1e-13);
        assert!(max_diff(&v, &ev) < 1e-13);
        // Same against the Taylor oracle path.
        let ou = taylor_oracle(&f, p.h(), false, 12);
        let ov = taylor_oracle(&f, p.h(), true, 12).scale(-1.0);
        assert!(max_diff(&u, &ou) < 1e-12);
        assert!(max_diff(&v, &ov) < 1e-12);

        let eta = SpectralField::from_fn(g, |x| 0.1 * x.sin()).unwrap();
        let (u, v) = surface_velocity(&zero, &eta, &p).unwrap();
        assert_eq!(u.max_abs(), 0.0);
        assert_eq!(v.max_abs(), 0.0);
    }

    #[test]
    fn surface_velocity_first_order_correction() {
        // f = cos(kx), eta = e*cos(qx): u = cosh(kh)cos(kx) + e cos(qx) k sinh(kh) cos(kx).
        let p = PhysicalParams::gravity(0.5, 1.0).unwrap();
        let (k, q, e) = (2.0, 1.0, 0.05);
        let g = grid();
        let f = SpectralField::from_fn(g, |x| (k * x).cos())
            .unwrap()
            .band_limited(4);
        let eta = SpectralField::from_fn(g, |x| e * (q * x).cos())
            .unwrap()
            .band_limited(4);
        let (u, v) = surface_velocity(&f, &eta, &p).unwrap();
        let kh = k * p.h();
        let eu = SpectralField::from_fn(g, |x| {
            kh.cosh() * (k * x).cos() + e * (q * x).cos() * k * kh.sinh() * (k * x).cos()
        })
        .unwrap();
        let ev = SpectralField::from_fn(g, |x| {
            kh.sinh() * (k * x).sin() + e * (q * x).cos() * k * kh.cosh() * (k * x).sin()
        })
        .unwrap();
        assert!(max_diff(&u, &eu) < 1e-12);
        assert!(max_diff(&v, &ev) < 1e-12);
    }

    #[test]
    fn f_linear_shallow_limit() {
        let p = PhysicalParams::gravity(0.01 / 3.0, 9.81).unwrap();
        let g = PeriodicGrid::centered(PI, 32).unwrap();
        // Mode j = 3 => k = 3, kh = 0.01.
        let eta = SpectralField::from_fn(g, |x| (3.0 * x).cos()).unwrap();
        let f = f_linear_from_eta(&eta, &p).unwrap();
        let ratio = f.coeffs()[3].re / eta.coeffs()[3].re;
        let base = p.c0() / p.h();
        assert!((ratio / base - 1.0).abs() < 1e-4);
        // Expansion oracle: (1 + (2kh)^2/6)^{-1/2}.
        let oracle = (1.0 + 0.02f64.powi(2) / 6.0).powf(-0.5);
        assert!((ratio / base - oracle).abs() < 1e-9);
        // k = 0 gets exactly c0/h.
        let c = f_linear_from_eta(&SpectralField::constant(g, 2.0), &p).unwrap();
        assert!((c.mean() - 2.0 * base).abs() < 1e-12 * base);
        assert_eq!(f_linear_from_eta(&SpectralField::zeros(g), &p).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn cosh_sinh_identity_per_mode() {
        let g = PeriodicGrid::centered(PI, 64).unwrap();
        for j in 0..g.modes() {
            let kh = g.wavenumber(j) * 0.4;
            let id = kh.cosh().powi(2) - kh.sinh().powi(2);
            assert!((id - 1.0).abs() <= 1e-12 * kh.cosh().powi(2).max(1.0));
        }
    }

    fn random_field(rng: &mut ChaCha8Rng, g: PeriodicGrid, j_max: usize) -> SpectralField {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); g.modes()];
        for c in coeffs.iter_mut().take(j_max + 1) {
            *c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
        SpectralField::from_coeffs(g, coeffs).unwrap()
    }

    #[test]
    fn operators_are_linear() {
        let g = PeriodicGrid::centered(4.0, 64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = 0.8;
        for _ in 0..20 {
            let f = random_field(&mut rng, g, 20);
            let q = random_field(&mut rng, g, 20);
            let (a, b) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let comb = f.lincomb(a, &q, b).unwrap();
            let ops: [&dyn Fn(&SpectralField) -> SpectralField; 3] = [
                &|x| apply_sin_h_dx(x, h).unwrap(),
                &|x| apply_cos_h_dx(x, h).unwrap(),
                &|x| derivative(x, 2).unwrap(),
            ];
            for op in ops {
                let lhs = op(&comb);
                let rhs = op(&f).lincomb(a, &op(&q), b).unwrap();
                let scale = lhs.max_abs().max(1.0);
                assert!(max_diff(&lhs, &rhs) <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn parity_under_reflection() {
        // Grid symmetric about 0 apart from the endpoint: x_i and x_{N-i} mirror.
        let g = PeriodicGrid::centered(PI, 64).unwrap();
        let even = SpectralField::from_fn(g, |x| (x.cos() + 0.5 * (2.0 * x).cos()).exp()).unwrap();
        let s = apply_sin_h_dx(&even.band_limited(20), 0.3).unwrap();
        let c = apply_cos_h_dx(&even.band_limited(20), 0.3).unwrap();
        let n = g.len();
        let scale = s.max_abs();
        for i in 1..n {
            let m = n - i;
            assert!((s.values()[i] + s.values()[m]).abs() < 1e-12 * scale, "sin output not odd");
            assert!((c.values()[i] - c.values()[m]).abs() < 1e-12 * c.max_abs(), "cos output not even");
        }
    }

    #[test]
    fn random_fields_match_taylor_oracle_for_kh_up_to_two() {
        let g = PeriodicGrid::centered(PI, 64).unwrap();
        let h = 0.25; // k_j = j, so j <= 8 gives kh <= 2
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let f = random_field(&mut rng, g, 8);
            for odd in [true, false] {
                let exact = if odd {
                    apply_sin_h_dx(&f, h).unwrap()
                } else {
                    apply_cos_h_dx(&f, h).unwrap()
                };
                let oracle = taylor_oracle(&f, h, odd, 9);
                let rel = exact.sub(&oracle).unwrap().l2_norm() / exact.l2_norm();
                assert!(rel < 1e-8, "relative error {rel}");
            }
        }
    }
}
