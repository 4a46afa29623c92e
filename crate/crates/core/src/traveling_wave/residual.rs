use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::summation::Summation;

use super::profile::evaluate_weighted;
use super::SeriesSolution;

/// Scaled residuals below this are treated as round-off when judging PASS.
pub const RESIDUAL_ROUNDOFF_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SteadyEquation {
    /// `A h eta' + sin(h d)eta + (eta cos(h d)eta)' = 0`
    #[serde(rename = "gkdv_steady")]
    Gkdv,
    /// `A h eta' + h eta' - (h^3/6) eta''' + (eta^2)' = 0` with `A = (Bh)^2/6 - 1`
    #[serde(rename = "kdv_steady")]
    Kdv,
}

impl SteadyEquation {
    pub fn as_str(&self) -> &'static str {
        match self {
            SteadyEquation::Gkdv => "gkdv_steady",
            SteadyEquation::Kdv => "kdv_steady",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualOptions {
    /// Left end of the half-line window, in units of `1/B`.
    pub delta: f64,
    /// Right end of the window, in units of `1/B`.
    pub extent: f64,
    pub samples: usize,
    pub summation: Summation,
}

impl Default for ResidualOptions {
    fn default() -> Self {
        Self {
            delta: 0.1,
            extent: 40.0,
            samples: 400,
            summation: Summation::Auto,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub equation: SteadyEquation,
    /// Envelope velocity factor used in the equation.
    pub velocity: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub sup_abs: f64,
    /// Sum over terms of each term's sup norm; residuals are divided by it.
    pub scale: f64,
    pub sup_scaled: f64,
    /// Root-mean-square of the scaled residual over the window.
    pub l2_scaled: f64,
    /// Largest propagated evaluation-error estimate, scaled.
    pub tail_bound: f64,
    /// Partial-sum tail `(K+1)^3 q^(K+1) / (1-q)`, `q = |a1 exp(-B delta)|/R`.
    pub analytic_tail: f64,
    pub pass: bool,
}

pub fn residual_check(sol: &SeriesSolution, which: SteadyEquation) -> Result<ResidualReport> {
    residual_check_with(sol, which, &ResidualOptions::default())
}

pub fn residual_check_with(
    sol: &SeriesSolution,
    which: SteadyEquation,
    opts: &ResidualOptions,
) -> Result<ResidualReport> {
    let a1 = sol.require_a1()?;
    let b = sol.b();
    let h = sol.h();
    let x_min = opts.delta / b;
    let x_max = opts.extent / b;
    let n = opts.samples.max(2);
    let velocity = match which {
        SteadyEquation::Gkdv => sol.a(),
        SteadyEquation::Kdv => (b * h).powi(2) / 6.0 - 1.0,
    };

    let mut residuals = Vec::with_capacity(n);
    let mut errors = Vec::with_capacity(n);
    let mut sup_terms = [0.0f64; 4];
    for i in 0..n {
        let x = x_min + (x_max - x_min) * i as f64 / (n - 1) as f64;
        let ev = |w: &dyn Fn(usize) -> f64| evaluate_weighted(sol, x, opts.summation, w);
        let d1 = ev(&|k| -(k as f64) * b)?;
        let (terms, err) = match which {
            SteadyEquation::Gkdv => {
                let eta = ev(&|_| 1.0)?;
                let s = ev(&|k| -(k as f64 * b * h).sin())?;
                let c = ev(&|k| (k as f64 * b * h).cos())?;
                let c1 = ev(&|k| -(k as f64) * b * (k as f64 * b * h).cos())?;
                let terms = [
                    velocity * h * d1.value,
                    s.value,
                    d1.value * c.value,
                    eta.value * c1.value,
                ];
                let err = (velocity * h).abs() * d1.error
                    + s.error
                    + d1.value.abs() * c.error
                    + c.value.abs() * d1.error
                    + eta.value.abs() * c1.error
                    + c1.value.abs() * eta.error;
                (terms, err)
            }
            SteadyEquation::Kdv => {
                let eta = ev(&|_| 1.0)?;
                let d3 = ev(&|k| -(k as f64 * b).powi(3))?;
                let terms = [
                    velocity * h * d1.value,
                    h * d1.value,
                    -h.powi(3) / 6.0 * d3.value,
                    2.0 * eta.value * d1.value,
                ];
                let err = (velocity * h + h).abs() * d1.error
                    + h.powi(3) / 6.0 * d3.error
                    + 2.0 * (eta.value.abs() * d1.error + d1.value.abs() * eta.error);
                (terms, err)
            }
        };
        for (s, t) in sup_terms.iter_mut().zip(terms) {
            *s = s.max(t.abs());
        }
        residuals.push(terms.iter().sum::<f64>());
        errors.push(err);
    }

    let scale: f64 = sup_terms.iter().sum();
    let norm = if scale > 0.0 { scale } else { 1.0 };
    let sup_abs = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let sup_scaled = sup_abs / norm;
    let mean_sq = trapezoid_mean(&residuals.iter().map(|r| r * r).collect::<Vec<_>>());
    let l2_scaled = mean_sq.sqrt() / norm;
    let tail_bound = errors.iter().fold(0.0f64, |m, e| m.max(*e)) / norm;

    let k = sol.order() as f64;
    let q = (a1 * (-b * x_min).exp()).abs() / sol.radius().radius;
    let analytic_tail = if q < 1.0 {
        (k + 1.0).powi(3) * q.powf(k + 1.0) / (1.0 - q)
    } else {
        f64::INFINITY
    };
    let pass = sup_scaled <= 10.0 * (tail_bound + RESIDUAL_ROUNDOFF_FLOOR);
    Ok(ResidualReport {
        equation: which,
        velocity,
        x_min,
        x_max,
        sup_abs,
        scale,
        sup_scaled,
        l2_scaled,
        tail_bound,
        analytic_tail,
        pass,
    })
}

fn trapezoid_mean(v: &[f64]) -> f64 {
    let n = v.len();
    let inner: f64 = v[1..n - 1].iter().sum();
    (inner + 0.5 * (v[0] + v[n - 1])) / (n - 1) as f64
}
