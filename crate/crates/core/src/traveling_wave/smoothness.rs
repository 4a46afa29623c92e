use serde::Serialize;

use crate::error::{Error, Result};
use crate::summation::{sum_power_series, SeriesValue, Summation};

use super::SeriesSolution;

/// Relative overshoot `eps` of the search interval `a1/R in (-1-eps, 0)`.
pub const SEARCH_MARGIN: f64 = 0.1;

const SCAN_POINTS: usize = 200;
const POLE_RATIO: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothRoot {
    pub a1: f64,
    /// Root in the scaled variable `w = a1 / r`.
    pub w: f64,
    /// Number of trusted sign changes seen in the search interval.
    pub root_count: usize,
    /// `|sum n alpha_n a1^(n-1)|` at the root, as evaluated.
    pub derivative_residual: f64,
}

/// Solve `sum n alpha_n a1^(n-1) = 0` for the negative root closest to zero.
pub fn solve_a1(sol: &SeriesSolution) -> Result<SmoothRoot> {
    solve_a1_with(sol, SEARCH_MARGIN)
}

pub fn solve_a1_with(sol: &SeriesSolution, margin: f64) -> Result<SmoothRoot> {
    let coeffs = sol.coefficients();
    let r = coeffs.scale();
    // P(w) = sum_{n>=1} n beta_n w^(n-1)
    let p: Vec<f64> = coeffs
        .betas()
        .iter()
        .enumerate()
        .map(|(i, b)| (i + 1) as f64 * b)
        .collect();
    let dp: Vec<f64> = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| i as f64 * c)
        .collect();
    let radius = sol.radius().radius;
    let rho = if radius.is_finite() && radius > 0.0 {
        radius / r
    } else {
        // No usable radius: search a unit window in the scaled variable.
        1.0
    };
    let eval = |w: f64| sum_power_series(&p, w, rho, Summation::Auto);
    let trusted = |v: &SeriesValue| v.value.is_finite() && v.value.abs() > v.error;

    let w_end = -rho * (1.0 + margin);
    let mut brackets = Vec::new();
    let mut prev: Option<(f64, SeriesValue)> = Some((0.0, eval(0.0)));
    for i in 1..=SCAN_POINTS {
        let w = w_end * i as f64 / SCAN_POINTS as f64;
        let v = eval(w);
        if !trusted(&v) {
            continue;
        }
        if let Some((wp, vp)) = prev {
            if vp.value.signum() != v.value.signum() {
                brackets.push((wp, vp.value, w, v.value));
            }
        }
        prev = Some((w, v));
    }

    let mut roots = Vec::new();
    for &(lo, flo, hi, fhi) in &brackets {
        let w = bisect(&eval, lo, flo, hi);
        let w = newton_polish(&eval, &dp, rho, w, lo.min(hi), lo.max(hi));
        let at = eval(w);
        // A sign change through a pole leaves a large value at the crossing.
        if at.value.abs() <= POLE_RATIO * flo.abs().min(fhi.abs()) || at.value == 0.0 {
            roots.push((w, at.value.abs()));
        }
    }
    let Some(&(w, resid)) = roots.first() else {
        return Err(Error::NoSmoothMatching(format!(
            "no sign change of the derivative series for a1/R in ({:.3}, 0) \
             (B = {}, h = {}, K = {}, R = {:.6e})",
            -1.0 - margin,
            sol.b(),
            sol.h(),
            sol.order(),
            radius
        )));
    };
    Ok(SmoothRoot {
        a1: w * r,
        w,
        root_count: roots.len(),
        derivative_residual: resid,
    })
}

fn bisect(eval: &impl Fn(f64) -> SeriesValue, mut lo: f64, flo: f64, mut hi: f64) -> f64 {
    let slo = flo.signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let v = eval(mid).value;
        if v == 0.0 {
            return mid;
        }
        if v.signum() == slo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn newton_polish(
    eval: &impl Fn(f64) -> SeriesValue,
    dp: &[f64],
    rho: f64,
    mut w: f64,
    lo: f64,
    hi: f64,
) -> f64 {
    let mut f = eval(w).value.abs();
    for _ in 0..3 {
        let v = eval(w).value;
        let d = sum_power_series(dp, w, rho, Summation::Auto).value;
        if !(d.is_finite() && d != 0.0) {
            break;
        }
        let next = w - v / d;
        if !(lo..=hi).contains(&next) {
            break;
        }
        let fnext = eval(next).value.abs();
        if fnext.is_nan() || fnext >= f {
            break;
        }
        w = next;
        f = fnext;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::super::Recursion;
    use super::*;

    #[test]
    fn printed_shallow_root() {
        let sol = SeriesSolution::build(Recursion::ShallowPrinted, 1.0, 1.0, 200).unwrap();
        let root = solve_a1(&sol).unwrap();
        assert!((root.a1 + 2.0).abs() < 2e-8, "{root:?}");
    }

    #[test]
    fn derived_shallow_root_on_boundary() {
        for &(b, h) in &[(1.0, 1.0), (0.7, 1.3)] {
            let sol = SeriesSolution::build(Recursion::ShallowDerived, b, h, 200).unwrap();
            let root = solve_a1(&sol).unwrap();
            let exact = -b * b * f64::powi(h, 3);
            assert!(((root.a1 - exact) / exact).abs() < 1e-8, "{root:?}");
            assert_eq!(root.root_count, 1);
        }
    }

    #[test]
    fn degenerate_series_has_no_root() {
        let sol = SeriesSolution::from_alphas(Recursion::SteadyDerived, 1.0, 1.0, &[1.0, 0.0, 0.0])
            .unwrap();
        assert!(matches!(solve_a1(&sol), Err(Error::NoSmoothMatching(_))));
    }
}
