use std::path::Path;

use anyhow::{Context, Result};
use gkdv::evolution::{Equation, FilterSpec};
use gkdv::traveling_wave::{Mode, SteadyEquation};
use gkdv::PhysicalParams;
use serde::de::DeserializeOwned;
use serde::Deserialize;

pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

fn default_params() -> PhysicalParams {
    PhysicalParams::gravity(1.0, 9.81).expect("valid defaults")
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DispersionConfig {
    pub params: PhysicalParams,
    pub k_min: f64,
    pub k_max: f64,
    pub samples: usize,
}

impl Default for DispersionConfig {
    fn default() -> Self {
        Self {
            params: default_params(),
            k_min: 0.0,
            k_max: 10.0,
            samples: 101,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolitonConfig {
    pub b: f64,
    pub h: f64,
    pub order: usize,
    pub mode: Mode,
    /// Use the shallow-water form of the recursion.
    pub shallow: bool,
    /// Profile window `|X| <= extent / B`.
    pub extent: f64,
    pub samples: usize,
    /// Steady equation for the residual check; defaults to the weakly
    /// dispersive one for shallow recursions.
    pub residual: Option<SteadyEquation>,
}

impl Default for SolitonConfig {
    fn default() -> Self {
        Self {
            b: 1.0,
            h: 1.0,
            order: 200,
            mode: Mode::SteadyDerived,
            shallow: false,
            extent: 20.0,
            samples: 401,
            residual: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub half_length: f64,
    pub n: usize,
    #[serde(default)]
    pub offset: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Initial {
    Zero,
    /// `amplitude * cos(k_j x + phase)`
    Mode {
        amplitude: f64,
        index: usize,
        #[serde(default)]
        phase: f64,
    },
    Soliton {
        b: f64,
        #[serde(default)]
        mode: Option<Mode>,
        #[serde(default)]
        shallow: bool,
        #[serde(default = "default_order")]
        order: usize,
        #[serde(default)]
        shift: f64,
        /// Pass the sampled profile through the exponential filter once.
        #[serde(default)]
        filtered: bool,
    },
}

fn default_order() -> usize {
    200
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolveConfig {
    pub params: PhysicalParams,
    pub equation: Equation,
    pub grid: GridConfig,
    pub dt: f64,
    pub t_end: f64,
    /// Output times in `(0, t_end]`; `t_end` is always included.
    pub snapshots: Vec<f64>,
    pub initial: Initial,
    pub filter: Option<FilterSpec>,
    pub dealias: f64,
    pub nonlinear: bool,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            params: PhysicalParams::unit_speed(1.0).expect("valid defaults"),
            equation: Equation::Kdv,
            grid: GridConfig {
                half_length: 40.0,
                n: 512,
                offset: 0.0,
            },
            dt: 0.01,
            t_end: 10.0,
            snapshots: Vec::new(),
            initial: Initial::Soliton {
                b: 1.0,
                mode: None,
                shallow: true,
                order: 200,
                shift: 0.0,
                filtered: false,
            },
            filter: None,
            dealias: gkdv::evolution::DEFAULT_DEALIAS,
            nonlinear: true,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub demand_printed_kdv: bool,
    pub seed: Option<u64>,
    /// Subset of criterion ids; all when absent.
    pub criteria: Option<Vec<u32>>,
}
