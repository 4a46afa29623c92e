use serde::Serialize;

use super::SeriesSolution;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KoebeReport {
    /// `2 / alpha_2`: the scaling that maps `sum alpha_k z^k` onto `R w/(1-w)^2`.
    pub radius: f64,
    /// `alpha_n R^(n-1)`; equal to `n` for the Koebe function.
    pub normalized: Vec<f64>,
    /// `max_n |normalized_n - n|`.
    pub max_deviation: f64,
    /// `max_n |normalized_n| / n`; 1 when the Bieberbach bound is saturated.
    pub bieberbach_ratio: f64,
}

/// Compare the generating function `g(z) = sum alpha_k z^k` with the Koebe
/// function `z/(1-z)^2` after the rescaling `z = R w`.
pub fn koebe_diagnostic(sol: &SeriesSolution) -> KoebeReport {
    let coeffs = sol.coefficients();
    let r = coeffs.scale();
    let betas = coeffs.betas();
    let ratio = if betas.len() >= 2 && betas[1] != 0.0 {
        2.0 / betas[1]
    } else {
        f64::NAN
    };
    let normalized: Vec<f64> = betas
        .iter()
        .enumerate()
        .map(|(i, b)| b * ratio.powi(i as i32))
        .collect();
    let max_deviation = normalized
        .iter()
        .enumerate()
        .map(|(i, c)| (c - (i + 1) as f64).abs())
        .fold(0.0, f64::max);
    let bieberbach_ratio = normalized
        .iter()
        .enumerate()
        .map(|(i, c)| c.abs() / (i + 1) as f64)
        .fold(0.0, f64::max);
    KoebeReport {
        radius: r * ratio,
        normalized,
        max_deviation,
        bieberbach_ratio,
    }
}

#[cfg(test)]
mod tests {
    use super::super::Recursion;
    use super::*;

    #[test]
    fn shallow_modes_are_koebe() {
        let sol = SeriesSolution::build(Recursion::ShallowPrinted, 1.0, 1.0, 30).unwrap();
        let rep = koebe_diagnostic(&sol);
        assert!(rep.max_deviation <= 1e-12, "{rep:?}");
        assert!((rep.radius - 2.0).abs() < 1e-14);

        let sol = SeriesSolution::build(Recursion::ShallowDerived, 0.5, 2.0, 30).unwrap();
        let rep = koebe_diagnostic(&sol);
        assert!(rep.max_deviation <= 1e-12);
        assert!((rep.radius - 2.0).abs() < 1e-14);
        assert!((rep.bieberbach_ratio - 1.0).abs() < 1e-13);
    }

    #[test]
    fn short_truncation() {
        let sol = SeriesSolution::build(Recursion::ShallowDerived, 1.0, 1.0, 5).unwrap();
        let rep = koebe_diagnostic(&sol);
        for (i, c) in rep.normalized.iter().enumerate() {
            assert!((c - (i + 1) as f64).abs() <= 1e-12);
        }
    }

    #[test]
    fn full_depth_deviates() {
        let sol = SeriesSolution::build(Recursion::SteadyDerived, 1.0, 1.0, 30).unwrap();
        assert!(koebe_diagnostic(&sol).max_deviation > 1e-3);
    }
}
