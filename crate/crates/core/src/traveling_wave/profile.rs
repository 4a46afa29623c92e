use serde::Serialize;

use crate::error::{Error, Result};
use crate::summation::{sum_power_series, Method, SeriesValue, Summation};

use super::SeriesSolution;

/// Relative error above which an accelerated profile value is rejected.
pub const PROFILE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileSample {
    pub x: f64,
    pub eta: f64,
}

/// Evaluate `r * sum_n weight(n) beta_n z^n` with `z = (a1/r) exp(-B|X|)`.
///
/// With `weight(n) = (-nB)^p` this is the `p`-th derivative of the profile on
/// `X > 0`; other weights give the exact action of Fourier-type operators on
/// the exponential terms.
pub fn evaluate_weighted(
    sol: &SeriesSolution,
    x: f64,
    summation: Summation,
    weight: impl Fn(usize) -> f64,
) -> Result<SeriesValue> {
    let a1 = sol.require_a1()?;
    let coeffs = sol.coefficients();
    let r = coeffs.scale();
    let mut c = Vec::with_capacity(coeffs.len() + 1);
    c.push(0.0);
    c.extend(
        coeffs
            .betas()
            .iter()
            .enumerate()
            .map(|(i, b)| weight(i + 1) * b),
    );
    let z = a1 / r * (-sol.b() * x.abs()).exp();
    let rho = sol.radius().radius / r;
    let v = sum_power_series(&c, z, rho, summation);
    Ok(SeriesValue {
        value: r * v.value,
        error: r * v.error,
        method: v.method,
    })
}

/// Sample `eta(X) = sum alpha_n a1^n exp(-nB|X|)` on `xs`.
pub fn reconstruct_profile(sol: &SeriesSolution, xs: &[f64]) -> Result<Vec<ProfileSample>> {
    xs.iter()
        .map(|&x| {
            let v = evaluate_weighted(sol, x, Summation::Auto, |_| 1.0)?;
            let bad = !v.value.is_finite()
                || (v.method == Method::Accelerated
                    && (v.error.is_nan() || v.error > PROFILE_TOLERANCE * v.value.abs()));
            if bad {
                return Err(Error::Evaluation {
                    x,
                    detail: format!(
                        "series at z/R = {:.4} did not converge under acceleration \
                         (value {:e}, error estimate {:e})",
                        sol.a1().unwrap_or(0.0) * (-sol.b() * x.abs()).exp()
                            / sol.radius().radius,
                        v.value,
                        v.error
                    ),
                });
            }
            Ok(ProfileSample { x, eta: v.value })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::Recursion;
    use super::*;

    fn sech2(x: f64) -> f64 {
        1.0 / x.cosh().powi(2)
    }

    #[test]
    fn derived_shallow_profile_is_kdv_depression() {
        let sol = SeriesSolution::solved(Recursion::ShallowDerived, 1.0, 1.0, 200).unwrap();
        let xs: Vec<f64> = (-200..=200).map(|i| i as f64 * 0.1).collect();
        for s in reconstruct_profile(&sol, &xs).unwrap() {
            let exact = -0.25 * sech2(s.x / 2.0);
            assert!((s.eta - exact).abs() < 1e-10, "X={} {} vs {}", s.x, s.eta, exact);
        }
    }

    #[test]
    fn printed_shallow_profile_is_negative() {
        // The printed coefficients with a1 = -2 B^2 h^3 sum to a depression.
        let sol = SeriesSolution::solved(Recursion::ShallowPrinted, 1.0, 1.0, 200).unwrap();
        let p = reconstruct_profile(&sol, &[0.0, 1.0]).unwrap();
        assert!((p[0].eta + 0.5).abs() < 1e-9);
        assert!((p[1].eta + 0.5 * sech2(0.5)).abs() < 1e-9);
    }

    #[test]
    fn profile_is_even_and_decays() {
        let sol = SeriesSolution::solved(Recursion::ShallowDerived, 0.5, 1.0, 120).unwrap();
        let xs = [3.0, -3.0, 80.0, -80.0, 0.0];
        let p = reconstruct_profile(&sol, &xs).unwrap();
        assert_eq!(p[0].eta, p[1].eta);
        assert!(p[2].eta.abs() < 1e-10 * p[4].eta.abs());
    }

    #[test]
    fn requires_amplitude() {
        let sol = SeriesSolution::build(Recursion::ShallowDerived, 1.0, 1.0, 10).unwrap();
        assert!(reconstruct_profile(&sol, &[0.0]).is_err());
    }
}
