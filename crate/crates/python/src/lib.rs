//! Python bindings: `import pygkdv`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use gkdv::evolution::{self as ev, Equation, EvolutionState, FilterSpec};
use gkdv::traveling_wave::{self as tw, Mode, Recursion, SteadyEquation};
use gkdv::verify::{run_criterion, VerifyOptions, CRITERIA};
use gkdv::{dispersion, Error, PeriodicGrid, SpectralField};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidParameter(_)
        | Error::InvalidGrid(_)
        | Error::GridMismatch
        | Error::BandLimit { .. } => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn parse_mode(mode: &str) -> PyResult<Mode> {
    mode.parse().map_err(|_| {
        PyValueError::new_err(format!(
            "mode must be 'paper_printed' or 'steady_derived', got '{mode}'"
        ))
    })
}

fn parse_equation(equation: &str) -> PyResult<Equation> {
    match equation {
        "gkdv" => Ok(Equation::Gkdv),
        "kdv" => Ok(Equation::Kdv),
        _ => Err(PyValueError::new_err(format!(
            "equation must be 'gkdv' or 'kdv', got '{equation}'"
        ))),
    }
}

#[pyclass(name = "PhysicalParams", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyParams(gkdv::PhysicalParams);

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (h, g=9.81, rho=1000.0, sigma=0.0))]
    fn new(h: f64, g: f64, rho: f64, sigma: f64) -> PyResult<Self> {
        gkdv::PhysicalParams::new(h, g, rho, sigma)
            .map(Self)
            .map_err(to_py)
    }

    #[getter]
    fn h(&self) -> f64 {
        self.0.h()
    }

    #[getter]
    fn g(&self) -> f64 {
        self.0.g()
    }

    #[getter]
    fn rho(&self) -> f64 {
        self.0.rho()
    }

    #[getter]
    fn sigma(&self) -> f64 {
        self.0.sigma()
    }

    #[getter]
    fn c0(&self) -> f64 {
        self.0.c0()
    }

    fn omega_squared(&self, k: f64) -> PyResult<f64> {
        dispersion::omega_squared(k, &self.0).map_err(to_py)
    }

    fn omega_model(&self, k: f64) -> PyResult<f64> {
        dispersion::model_dispersion_gkdv(k, &self.0).map_err(to_py)
    }

    fn phase_velocity(&self, k: f64) -> PyResult<f64> {
        dispersion::phase_velocity(k, &self.0).map_err(to_py)
    }

    fn group_velocity(&self, k: f64) -> PyResult<f64> {
        dispersion::group_velocity(k, &self.0).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "PhysicalParams(h={}, g={}, rho={}, sigma={})",
            self.0.h(),
            self.0.g(),
            self.0.rho(),
            self.0.sigma()
        )
    }
}

/// Series traveling wave with its smoothness-matched `a1`.
#[pyclass(name = "Soliton", frozen)]
struct PySoliton(tw::SeriesSolution);

#[pymethods]
impl PySoliton {
    #[new]
    #[pyo3(signature = (b, h, order=200, mode="steady_derived", shallow=false))]
    fn new(b: f64, h: f64, order: usize, mode: &str, shallow: bool) -> PyResult<Self> {
        let rec = Recursion::new(parse_mode(mode)?, shallow);
        tw::SeriesSolution::solved(rec, b, h, order)
            .map(Self)
            .map_err(to_py)
    }

    #[getter]
    fn a1(&self) -> Option<f64> {
        self.0.a1()
    }

    #[getter]
    fn velocity_factor(&self) -> f64 {
        self.0.a()
    }

    #[getter]
    fn radius(&self) -> f64 {
        self.0.radius().radius
    }

    fn alphas(&self) -> Vec<f64> {
        self.0.alphas()
    }

    fn lab_speed(&self, c0: f64) -> f64 {
        self.0.lab_speed(c0)
    }

    fn profile(&self, xs: Vec<f64>) -> PyResult<Vec<f64>> {
        tw::reconstruct_profile(&self.0, &xs)
            .map(|p| p.into_iter().map(|s| s.eta).collect())
            .map_err(to_py)
    }

    /// Steady-equation residual; `equation` is "gkdv" or "kdv".
    #[pyo3(signature = (equation=None))]
    fn residual<'py>(&self, py: Python<'py>, equation: Option<&str>) -> PyResult<Bound<'py, PyDict>> {
        let which = match equation {
            None if self.0.is_shallow() => SteadyEquation::Kdv,
            None | Some("gkdv") => SteadyEquation::Gkdv,
            Some("kdv") => SteadyEquation::Kdv,
            Some(other) => {
                return Err(PyValueError::new_err(format!(
                    "equation must be 'gkdv' or 'kdv', got '{other}'"
                )))
            }
        };
        let r = tw::residual_check(&self.0, which).map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("sup_scaled", r.sup_scaled)?;
        d.set_item("l2_scaled", r.l2_scaled)?;
        d.set_item("tail_bound", r.tail_bound)?;
        d.set_item("analytic_tail", r.analytic_tail)?;
        d.set_item("pass", r.pass)?;
        Ok(d)
    }

    fn koebe_deviation(&self) -> f64 {
        tw::koebe_diagnostic(&self.0).max_deviation
    }
}

/// Evolve `eta0` sampled on the centered grid of half-length `half_length`.
///
/// Returns `(t, eta)` pairs at each of `times`.
#[pyfunction]
#[pyo3(signature = (params, eta0, half_length, dt, times, equation="gkdv", filter=None, nonlinear=true))]
#[allow(clippy::too_many_arguments)]
fn evolve(
    params: &PyParams,
    eta0: Vec<f64>,
    half_length: f64,
    dt: f64,
    times: Vec<f64>,
    equation: &str,
    filter: Option<bool>,
    nonlinear: bool,
) -> PyResult<Vec<(f64, Vec<f64>)>> {
    let equation = parse_equation(equation)?;
    let grid = PeriodicGrid::centered(half_length, eta0.len()).map_err(to_py)?;
    let field = SpectralField::from_values(grid, eta0).map_err(to_py)?;
    let filter = match filter {
        Some(true) => FilterSpec::on(),
        Some(false) => FilterSpec::off(),
        None => FilterSpec::default_for(equation),
    };
    let mut state = EvolutionState::new(field, params.0, equation, dt)
        .and_then(|s| s.with_filter(filter))
        .map(|s| s.with_nonlinear(nonlinear))
        .map_err(to_py)?;
    let mut out = Vec::with_capacity(times.len());
    for t in times {
        if t < state.t {
            return Err(PyValueError::new_err("times must be nondecreasing"));
        }
        if t > state.t {
            let span = t - state.t;
            state = ev::evolve(state, span, &mut []).map_err(to_py)?.0;
        }
        out.push((state.t, state.field.values().to_vec()));
    }
    Ok(out)
}

/// Run acceptance criteria; returns a list of `(id, name, pass, detail)`.
#[pyfunction]
#[pyo3(signature = (criteria=None))]
fn verify(criteria: Option<Vec<u32>>) -> PyResult<Vec<(u32, String, bool, String)>> {
    let opts = VerifyOptions::default();
    let ids = criteria.unwrap_or_else(|| CRITERIA.iter().map(|c| c.id).collect());
    ids.into_iter()
        .map(|id| {
            if !CRITERIA.iter().any(|c| c.id == id) {
                return Err(PyValueError::new_err(format!("unknown criterion id {id}")));
            }
            let o = run_criterion(id, &opts);
            Ok((o.id, o.name.to_string(), o.pass, o.detail))
        })
        .collect()
}

#[pymodule]
fn pygkdv(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyParams>()?;
    m.add_class::<PySoliton>()?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
