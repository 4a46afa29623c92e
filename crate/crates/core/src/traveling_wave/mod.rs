//! Steady solitary waves `eta(X)`, `X = x + A c0 t`, built as power series in
//! `v = exp(-B|X|)`:
//!
//! `eta(X) = sum_{n>=1} alpha_n a1^n v^n`, `alpha_1 = 1`.
//!
//! The coefficients come from a nonlinear recursion. Four variants are
//! available: the two forms printed alongside the original derivation
//! ([`Recursion::PaperPrinted`], [`Recursion::ShallowPrinted`]) and the two
//! obtained by substituting the series into the steady equation with exact
//! operator action on exponentials ([`Recursion::SteadyDerived`],
//! [`Recursion::ShallowDerived`]). The printed and derived forms differ by
//! constant factors; [`residual_check`] decides which one actually solves the
//! steady equation. The derived full recursion is the default.

mod koebe;
mod profile;
mod radius;
mod recursion;
mod residual;
mod smoothness;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use koebe::{koebe_diagnostic, KoebeReport};
pub use profile::{evaluate_weighted, reconstruct_profile, ProfileSample, PROFILE_TOLERANCE};
pub use radius::{radius_estimate, RadiusEstimate, RADIUS_FIT_THRESHOLD};
pub use recursion::{
    recursion_paper_printed, recursion_shallow_derived, recursion_shallow_printed,
    recursion_steady_derived, resonance_denominator, ScaledCoefficients,
    DENOMINATOR_TOLERANCE,
};
pub use residual::{
    residual_check, residual_check_with, ResidualOptions, ResidualReport, SteadyEquation,
    RESIDUAL_ROUNDOFF_FLOOR,
};
pub use smoothness::{solve_a1, solve_a1_with, SmoothRoot, SEARCH_MARGIN};

/// Tolerance on `|Bh - m*pi|` below which the envelope velocity is resonant.
pub const VELOCITY_RESONANCE_TOLERANCE: f64 = 1e-9;

/// Which family a coefficient set belongs to.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    PaperPrinted,
    #[default]
    SteadyDerived,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::PaperPrinted => "paper_printed",
            Mode::SteadyDerived => "steady_derived",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper_printed" => Ok(Mode::PaperPrinted),
            "steady_derived" => Ok(Mode::SteadyDerived),
            other => Err(Error::InvalidParameter(format!(
                "unknown mode '{other}' (expected paper_printed or steady_derived)"
            ))),
        }
    }
}

/// Coefficient recursion variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Recursion {
    /// `alpha_k = 2B cos(Bh(k-1)/2) / (k sin Bh - sin kBh) * sum n cos(Bh(2k-n-1)/2) alpha_n alpha_{k-n}`
    PaperPrinted,
    /// `alpha_k = 6 / (B^2 h^3 k (k^2-1)) * sum n alpha_n alpha_{k-n}`
    ShallowPrinted,
    /// `(k sin Bh - sin kBh) alpha_k = B k * sum cos(m Bh) alpha_m alpha_{k-m}`
    SteadyDerived,
    /// `alpha_k = 6 / (B^2 h^3 (k^2-1)) * sum alpha_m alpha_{k-m}`
    ShallowDerived,
}

impl Recursion {
    pub fn new(mode: Mode, shallow: bool) -> Self {
        match (mode, shallow) {
            (Mode::PaperPrinted, false) => Recursion::PaperPrinted,
            (Mode::PaperPrinted, true) => Recursion::ShallowPrinted,
            (Mode::SteadyDerived, false) => Recursion::SteadyDerived,
            (Mode::SteadyDerived, true) => Recursion::ShallowDerived,
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            Recursion::PaperPrinted | Recursion::ShallowPrinted => Mode::PaperPrinted,
            Recursion::SteadyDerived | Recursion::ShallowDerived => Mode::SteadyDerived,
        }
    }

    pub fn is_shallow(&self) -> bool {
        matches!(self, Recursion::ShallowPrinted | Recursion::ShallowDerived)
    }

    pub fn coefficients(&self, b: f64, h: f64, order: usize) -> Result<ScaledCoefficients> {
        match self {
            Recursion::PaperPrinted => recursion_paper_printed(b, h, order),
            Recursion::ShallowPrinted => recursion_shallow_printed(b, h, order),
            Recursion::SteadyDerived => recursion_steady_derived(b, h, order),
            Recursion::ShallowDerived => recursion_shallow_derived(b, h, order),
        }
    }
}

/// Envelope velocity factor `A = -sin(Bh)/(Bh)`, with the limit `-1` at `Bh = 0`.
pub fn velocity_constraint(b: f64, h: f64) -> Result<f64> {
    if !(b.is_finite() && b > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "decay rate B must be finite and > 0, got {b}"
        )));
    }
    if !(h.is_finite() && h >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "depth h must be finite and >= 0, got {h}"
        )));
    }
    let x = b * h;
    let m = (x / std::f64::consts::PI).round();
    if m >= 1.0 && (x - m * std::f64::consts::PI).abs() <= VELOCITY_RESONANCE_TOLERANCE {
        return Err(Error::ResonantVelocity {
            bh: x,
            multiple: m as u64,
        });
    }
    if x < 1e-4 {
        return Ok(-(1.0 - x * x / 6.0 + x.powi(4) / 120.0));
    }
    Ok(-x.sin() / x)
}

/// Truncated traveling-wave series with its envelope velocity and,
/// once solved, the matching amplitude `a1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSolution {
    b: f64,
    h: f64,
    a: f64,
    recursion: Recursion,
    coeffs: ScaledCoefficients,
    radius: RadiusEstimate,
    a1: Option<f64>,
}

impl SeriesSolution {
    /// Run `recursion` to order `order` (at least 2).
    pub fn build(recursion: Recursion, b: f64, h: f64, order: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::InvalidParameter(format!(
                "truncation order must be >= 2, got {order}"
            )));
        }
        let a = velocity_constraint(b, h)?;
        let coeffs = recursion.coefficients(b, h, order)?;
        let radius = radius::fit_radius(&coeffs);
        Ok(Self {
            b,
            h,
            a,
            recursion,
            coeffs,
            radius,
            a1: None,
        })
    }

    /// Wrap explicit normalized coefficients `alpha_1..alpha_K` (`alpha_1` must be 1).
    pub fn from_alphas(recursion: Recursion, b: f64, h: f64, alphas: &[f64]) -> Result<Self> {
        let a = velocity_constraint(b, h)?;
        let coeffs = ScaledCoefficients::from_alphas(alphas)?;
        let radius = radius::fit_radius(&coeffs);
        Ok(Self {
            b,
            h,
            a,
            recursion,
            coeffs,
            radius,
            a1: None,
        })
    }

    pub fn with_a1(mut self, a1: f64) -> Self {
        self.a1 = Some(a1);
        self
    }

    /// Build, then solve the smoothness condition for `a1`.
    pub fn solved(recursion: Recursion, b: f64, h: f64, order: usize) -> Result<Self> {
        let sol = Self::build(recursion, b, h, order)?;
        let root = solve_a1(&sol)?;
        Ok(sol.with_a1(root.a1))
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Envelope velocity factor `A`.
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn recursion(&self) -> Recursion {
        self.recursion
    }

    pub fn mode(&self) -> Mode {
        self.recursion.mode()
    }

    pub fn is_shallow(&self) -> bool {
        self.recursion.is_shallow()
    }

    pub fn coefficients(&self) -> &ScaledCoefficients {
        &self.coeffs
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.coeffs.alphas()
    }

    pub fn radius(&self) -> &RadiusEstimate {
        &self.radius
    }

    pub fn a1(&self) -> Option<f64> {
        self.a1
    }

    pub(crate) fn require_a1(&self) -> Result<f64> {
        self.a1.ok_or_else(|| {
            Error::InvalidParameter("matching amplitude a1 has not been set".into())
        })
    }

    /// Speed of the profile in the lab frame, `-A c0`.
    pub fn lab_speed(&self, c0: f64) -> f64 {
        -self.a * c0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn velocity_constraint_examples() {
        assert_eq!(velocity_constraint(1.0, 0.0).unwrap(), -1.0);
        assert!((velocity_constraint(1e-9, 1.0).unwrap() + 1.0).abs() < 1e-15);
        let a = velocity_constraint(PI / 2.0, 1.0).unwrap();
        assert!((a + 2.0 / PI).abs() < 1e-15);
        assert!(matches!(
            velocity_constraint(PI, 1.0),
            Err(Error::ResonantVelocity { multiple: 1, .. })
        ));
        assert!(velocity_constraint(1.0, 2.0 * PI + 5e-10).is_err());
        assert!(velocity_constraint(1.0, 2.0 * PI + 1e-6).is_ok());
    }

    #[test]
    fn velocity_constraint_stays_in_open_unit_interval() {
        for i in 1..1000 {
            let x = PI * i as f64 / 1000.0;
            let a = velocity_constraint(x, 1.0).unwrap();
            assert!(a > -1.0 && a < 1.0 && a != 0.0, "Bh={x}: A={a}");
            assert!((a + x.sin() / x).abs() <= 1e-14);
        }
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("paper_printed".parse::<Mode>().unwrap(), Mode::PaperPrinted);
        assert_eq!("steady_derived".parse::<Mode>().unwrap(), Mode::SteadyDerived);
        assert!("other".parse::<Mode>().is_err());
        assert_eq!(Recursion::new(Mode::SteadyDerived, true), Recursion::ShallowDerived);
    }
}
