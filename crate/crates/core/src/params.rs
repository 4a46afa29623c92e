use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical constants of the fluid layer.
///
/// The long-wave speed `c0 = sqrt(g h)` is always derived on access, never stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct PhysicalParams {
    h: f64,
    g: f64,
    rho: f64,
    sigma: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    h: f64,
    g: f64,
    rho: f64,
    #[serde(default)]
    sigma: f64,
}

impl TryFrom<RawParams> for PhysicalParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        PhysicalParams::new(raw.h, raw.g, raw.rho, raw.sigma)
    }
}

impl From<PhysicalParams> for RawParams {
    fn from(p: PhysicalParams) -> Self {
        RawParams {
            h: p.h,
            g: p.g,
            rho: p.rho,
            sigma: p.sigma,
        }
    }
}

impl PhysicalParams {
    pub fn new(h: f64, g: f64, rho: f64, sigma: f64) -> Result<Self> {
        let all_finite = [h, g, rho, sigma].iter().all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::InvalidParameter("parameters must be finite".into()));
        }
        if h <= 0.0 {
            return Err(Error::InvalidParameter(format!("depth h must be > 0, got {h}")));
        }
        if rho <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "density rho must be > 0, got {rho}"
            )));
        }
        if g < 0.0 || sigma < 0.0 {
            return Err(Error::InvalidParameter(
                "force constant g and surface-pressure coefficient sigma must be >= 0".into(),
            ));
        }
        if g == 0.0 && sigma == 0.0 {
            return Err(Error::InvalidParameter(
                "g and sigma cannot both vanish".into(),
            ));
        }
        Ok(Self { h, g, rho, sigma })
    }

    /// Gravity-only layer (sigma = 0) with unit density.
    pub fn gravity(h: f64, g: f64) -> Result<Self> {
        Self::new(h, g, 1.0, 0.0)
    }

    /// Parameters with `c0 = 1` at depth `h`: `g = 1/h`.
    pub fn unit_speed(h: f64) -> Result<Self> {
        Self::new(h, 1.0 / h, 1.0, 0.0)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn c0(&self) -> f64 {
        (self.g * self.h).sqrt()
    }

    /// Same fluid at a different depth.
    pub fn with_depth(&self, h: f64) -> Result<Self> {
        Self::new(h, self.g, self.rho, self.sigma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c0_squared_is_gh() {
        let p = PhysicalParams::new(2.5, 9.81, 1000.0, 0.07).unwrap();
        assert_eq!(p.c0() * p.c0(), 2.5 * 9.81);
        assert!((p.c0().powi(2) - p.g() * p.h()).abs() <= 1e-15 * p.g() * p.h());
    }

    #[test]
    fn rejects_invalid() {
        assert!(PhysicalParams::new(0.0, 1.0, 1.0, 0.0).is_err());
        assert!(PhysicalParams::new(1.0, 1.0, 0.0, 0.0).is_err());
        assert!(PhysicalParams::new(1.0, 0.0, 1.0, 0.0).is_err());
        assert!(PhysicalParams::new(1.0, -1.0, 1.0, 0.0).is_err());
        assert!(PhysicalParams::new(f64::NAN, 1.0, 1.0, 0.0).is_err());
        assert!(PhysicalParams::new(1.0, 0.0, 1.0, 0.5).is_ok());
    }

    #[test]
    fn deserialization_validates_and_rejects_unknown_keys() {
        let ok: PhysicalParams =
            serde_json::from_str(r#"{"h":1.0,"g":9.81,"rho":1.0,"sigma":0.0}"#).unwrap();
        assert_eq!(ok.h(), 1.0);
        assert!(serde_json::from_str::<PhysicalParams>(r#"{"h":-1.0,"g":9.81,"rho":1.0}"#).is_err());
        assert!(serde_json::from_str::<PhysicalParams>(
            r#"{"h":1.0,"g":9.81,"rho":1.0,"depth":3}"#
        )
        .is_err());
    }
}
