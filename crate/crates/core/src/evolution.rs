//! Pseudospectral time integration of the depth-resolved equation
//!
//! `eta_t = -(c0/h) sin(h d) eta - (c0/h) d(eta cos(h d) eta)`
//!
//! and its weakly dispersive limit
//!
//! `eta_t = -c0 eta_x + (c0 h^2/6) eta_xxx - (c0/h) d(eta^2)`.
//!
//! Time stepping is Lawson's integrating-factor RK4: the linear multiplier
//! is propagated exactly per mode and RK4 acts on the transformed nonlinear
//! term. Both nonlinear terms are formed as exact derivatives, so the mean
//! mode never changes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FftPlans, SpectralField};
use crate::grid::PeriodicGrid;
use crate::params::PhysicalParams;
use crate::spectral_ops::{apply_cos_h_dx, apply_sin_h_dx, derivative};

/// Ceiling on `k h` for the highest retained mode in evolution runs.
pub const EVOLUTION_BAND_LIMIT: f64 = 20.0;
/// Ceiling on `|dt| * L` where `L` bounds the nonlinear term's Lipschitz constant.
/// RK4's stability interval on the imaginary axis is `2 sqrt 2`.
pub const STABILITY_LIMIT: f64 = 2.8;
pub const DEFAULT_DEALIAS: f64 = 2.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Equation {
    Gkdv,
    Kdv,
}

/// Exponential filter `exp(-strength (k/k_max)^order)` applied after every step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSpec {
    pub enabled: bool,
    #[serde(default = "FilterSpec::default_strength")]
    pub strength: f64,
    #[serde(default = "FilterSpec::default_order")]
    pub order: u32,
}

impl FilterSpec {
    fn default_strength() -> f64 {
        36.0
    }

    fn default_order() -> u32 {
        16
    }

    pub fn on() -> Self {
        Self {
            enabled: true,
            strength: Self::default_strength(),
            order: Self::default_order(),
        }
    }

    pub fn off() -> Self {
        Self {
            enabled: false,
            ..Self::on()
        }
    }

    pub fn default_for(equation: Equation) -> Self {
        match equation {
            Equation::Gkdv => Self::on(),
            Equation::Kdv => Self::off(),
        }
    }

    /// Damping factor for mode `j` on `grid`.
    pub fn factor(&self, grid: &PeriodicGrid, j: usize) -> f64 {
        if !self.enabled {
            return 1.0;
        }
        let s = grid.wavenumber(j) / grid.k_max();
        (-self.strength * s.powi(self.order as i32)).exp()
    }

    pub fn apply(&self, field: &SpectralField) -> SpectralField {
        let grid = *field.grid();
        field.apply_multiplier(|j, _| Complex64::new(self.factor(&grid, j), 0.0))
    }

    fn validate(&self) -> Result<()> {
        if !(self.strength.is_finite() && self.strength >= 0.0) || self.order == 0 {
            return Err(Error::InvalidParameter(format!(
                "filter needs strength >= 0 and order >= 1, got {} and {}",
                self.strength, self.order
            )));
        }
        Ok(())
    }
}

/// Right-hand side of the depth-resolved equation, evaluated without dealiasing.
pub fn rhs_gkdv(eta: &SpectralField, params: &PhysicalParams) -> Result<SpectralField> {
    let h = params.h();
    let c = params.c0() / h;
    let lin = apply_sin_h_dx(eta, h)?;
    let flux = eta.mul(&apply_cos_h_dx(eta, h)?)?;
    let nl = derivative(&flux, 1)?;
    lin.lincomb(-c, &nl, -c)
}

/// Right-hand side of the weakly dispersive limit.
pub fn rhs_kdv(eta: &SpectralField, params: &PhysicalParams) -> Result<SpectralField> {
    let h = params.h();
    let c0 = params.c0();
    let d1 = derivative(eta, 1)?;
    let d3 = derivative(eta, 3)?;
    let nl = derivative(&eta.mul(eta)?, 1)?;
    let lin = d1.lincomb(-c0, &d3, c0 * h * h / 6.0)?;
    lin.lincomb(1.0, &nl, -c0 / h)
}

/// Linear multiplier `L(k)` with `eta_hat_t = L(k) eta_hat + ...`.
pub fn linear_multiplier(equation: Equation, k: f64, params: &PhysicalParams) -> Complex64 {
    let h = params.h();
    let c0 = params.c0();
    let w = match equation {
        Equation::Gkdv => c0 / h * (k * h).sinh(),
        Equation::Kdv => c0 * (k + h * h * k.powi(3) / 6.0),
    };
    Complex64::new(0.0, -w)
}

/// Everything needed to advance one run.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionState {
    pub field: SpectralField,
    pub t: f64,
    pub steps: usize,
    pub params: PhysicalParams,
    pub dt: f64,
    pub equation: Equation,
    pub filter: FilterSpec,
    pub dealias: f64,
    /// With `false` only the linear part is propagated.
    pub nonlinear: bool,
}

impl EvolutionState {
    /// Start at `t = 0` with the default filter for `equation` and 2/3 dealiasing.
    /// The field is truncated to the retained modes.
    pub fn new(
        field: SpectralField,
        params: PhysicalParams,
        equation: Equation,
        dt: f64,
    ) -> Result<Self> {
        let s = Self {
            field,
            t: 0.0,
            steps: 0,
            params,
            dt,
            equation,
            filter: FilterSpec::default_for(equation),
            dealias: DEFAULT_DEALIAS,
            nonlinear: true,
        };
        s.validate()?;
        Ok(s.truncated())
    }

    pub fn with_filter(mut self, filter: FilterSpec) -> Result<Self> {
        self.filter = filter;
        self.validate()?;
        Ok(self)
    }

    pub fn with_dealias(mut self, dealias: f64) -> Result<Self> {
        self.dealias = dealias;
        self.validate()?;
        Ok(self.truncated())
    }

    pub fn with_dt(mut self, dt: f64) -> Result<Self> {
        self.dt = dt;
        self.validate()?;
        Ok(self)
    }

    pub fn with_nonlinear(mut self, nonlinear: bool) -> Self {
        self.nonlinear = nonlinear;
        self
    }

    pub fn grid(&self) -> &PeriodicGrid {
        self.field.grid()
    }

    /// Highest retained mode index.
    pub fn cutoff(&self) -> usize {
        cutoff(self.grid(), self.dealias)
    }

    fn truncated(mut self) -> Self {
        let jc = self.cutoff();
        if self.field.highest_active_mode().is_some_and(|j| j > jc) {
            self.field = self.field.band_limited(jc);
        }
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt != 0.0) {
            return Err(Error::InvalidParameter(format!(
                "time step must be finite and nonzero, got {}",
                self.dt
            )));
        }
        if !(self.dealias > 0.0 && self.dealias <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "dealias fraction must be in (0, 1], got {}",
                self.dealias
            )));
        }
        self.filter.validate()?;
        if self.equation == Equation::Gkdv {
            let jc = self.cutoff();
            let k = self.grid().wavenumber(jc);
            let kh = k * self.params.h();
            if kh > EVOLUTION_BAND_LIMIT {
                return Err(Error::BandLimit {
                    mode: jc,
                    wavenumber: k,
                    kh,
                    limit: EVOLUTION_BAND_LIMIT,
                });
            }
        }
        Ok(())
    }
}

fn cutoff(grid: &PeriodicGrid, dealias: f64) -> usize {
    ((dealias * grid.len() as f64 / 2.0).floor() as usize).min(grid.nyquist())
}

/// Integrating-factor RK4 stepper with per-run transforms and multipliers.
pub struct Stepper {
    grid: PeriodicGrid,
    dt: f64,
    nonlinear: bool,
    plans: FftPlans,
    jc: usize,
    half: Vec<Complex64>,
    full: Vec<Complex64>,
    /// `-(c0/h) i k` on retained modes, zero above the cutoff.
    flux_derivative: Vec<Complex64>,
    /// `cosh(kh)` for the depth-resolved flux, absent for the weakly dispersive one.
    cosh: Option<Vec<f64>>,
    filter: Vec<f64>,
    lipschitz_per_amplitude: f64,
    values: Vec<f64>,
    aux: Vec<f64>,
}

impl Stepper {
    pub fn new(state: &EvolutionState) -> Result<Self> {
        state.validate()?;
        let grid = *state.grid();
        let params = state.params;
        let h = params.h();
        let c = params.c0() / h;
        let jc = state.cutoff();
        let modes = grid.modes();
        let mut half = vec![Complex64::new(0.0, 0.0); modes];
        let mut full = half.clone();
        let mut flux_derivative = half.clone();
        let mut filter = vec![0.0; modes];
        for j in 0..=jc {
            let k = grid.wavenumber(j);
            let l = linear_multiplier(state.equation, k, &params);
            half[j] = (l * (state.dt / 2.0)).exp();
            full[j] = (l * state.dt).exp();
            flux_derivative[j] = Complex64::new(0.0, -c * k);
            filter[j] = state.filter.factor(&grid, j);
        }
        let cosh = match state.equation {
            Equation::Gkdv => Some(
                (0..modes)
                    .map(|j| if j <= jc { (grid.wavenumber(j) * h).cosh() } else { 0.0 })
                    .collect(),
            ),
            Equation::Kdv => None,
        };
        let k_cut = grid.wavenumber(jc);
        let growth = cosh.as_ref().map_or(1.0, |v: &Vec<f64>| v[jc]);
        Ok(Self {
            grid,
            dt: state.dt,
            nonlinear: state.nonlinear,
            plans: FftPlans::new(grid.len()),
            jc,
            half,
            full,
            flux_derivative,
            cosh,
            filter,
            lipschitz_per_amplitude: c * k_cut * 2.0 * growth,
            values: vec![0.0; grid.len()],
            aux: vec![0.0; grid.len()],
        })
    }

    /// `dt * L` estimate for a field with sup norm `amplitude`.
    pub fn stability_number(&self, amplitude: f64) -> f64 {
        self.dt.abs() * self.lipschitz_per_amplitude * amplitude
    }

    /// Transformed nonlinear term, masked to the retained modes.
    fn nonlinear_term(&mut self, u: &[Complex64], out: &mut [Complex64]) {
        if !self.nonlinear {
            out.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
            return;
        }
        self.plans.inverse_into(u, &mut self.values);
        match &self.cosh {
            Some(cosh) => {
                let cu: Vec<Complex64> = u.iter().zip(cosh).map(|(c, w)| c * w).collect();
                self.plans.inverse_into(&cu, &mut self.aux);
                for (v, a) in self.values.iter_mut().zip(&self.aux) {
                    *v *= a;
                }
            }
            None => {
                for v in self.values.iter_mut() {
                    *v *= *v;
                }
            }
        }
        self.plans.forward_into(&self.values, out);
        for (o, d) in out.iter_mut().zip(&self.flux_derivative) {
            *o *= d;
        }
    }

    pub fn step(&mut self, state: &EvolutionState) -> Result<EvolutionState> {
        if state.field.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        if self.nonlinear {
            let cfl = self.stability_number(state.field.max_abs());
            if cfl > STABILITY_LIMIT {
                return Err(Error::StabilityGuard {
                    cfl,
                    limit: STABILITY_LIMIT,
                });
            }
        }
        let dt = self.dt;
        let u = state.field.coeffs().to_vec();
        let m = u.len();
        let zero = Complex64::new(0.0, 0.0);
        let mut a = vec![zero; m];
        let mut b = vec![zero; m];
        let mut c = vec![zero; m];
        let mut d = vec![zero; m];
        let mut tmp = vec![zero; m];

        self.nonlinear_term(&u, &mut a);
        a.iter_mut().for_each(|x| *x *= dt);
        for j in 0..m {
            tmp[j] = self.half[j] * (u[j] + a[j] * 0.5);
        }
        self.nonlinear_term(&tmp, &mut b);
        b.iter_mut().for_each(|x| *x *= dt);
        for j in 0..m {
            tmp[j] = self.half[j] * u[j] + b[j] * 0.5;
        }
        self.nonlinear_term(&tmp, &mut c);
        c.iter_mut().for_each(|x| *x *= dt);
        for j in 0..m {
            tmp[j] = self.full[j] * u[j] + self.half[j] * c[j];
        }
        self.nonlinear_term(&tmp, &mut d);
        d.iter_mut().for_each(|x| *x *= dt);

        let mut next = vec![zero; m];
        for j in 0..=self.jc.min(m - 1) {
            let v = self.full[j] * u[j]
                + (self.full[j] * a[j] + self.half[j] * (b[j] + c[j]) * 2.0 + d[j]) / 6.0;
            next[j] = v * self.filter[j];
        }
        let t = state.t + dt;
        if next.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::BlowUp {
                step: state.steps + 1,
                time: t,
                last_good_time: state.t,
            });
        }
        let field = SpectralField::from_coeffs(self.grid, next)?;
        if field.values().iter().any(|v| !v.is_finite()) {
            return Err(Error::BlowUp {
                step: state.steps + 1,
                time: t,
                last_good_time: state.t,
            });
        }
        Ok(EvolutionState {
            field,
            t,
            steps: state.steps + 1,
            ..state.clone()
        })
    }
}

/// Advance `state` by one step of size `state.dt`.
pub fn step(state: &EvolutionState) -> Result<EvolutionState> {
    Stepper::new(state)?.step(state)
}

/// Diagnostics of one snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Snapshot {
    pub t: f64,
    /// `integral eta dx`, from the mean mode.
    pub mass: f64,
    /// `integral eta^2 dx`.
    pub energy: f64,
    /// Extremum location (largest `|eta - mean|`), quadratically interpolated.
    pub peak_position: f64,
    pub peak_value: f64,
    /// Largest coefficient among the top tenth of retained modes, relative to the largest overall.
    pub spectral_tail: f64,
}

impl Snapshot {
    pub fn of(state: &EvolutionState) -> Self {
        let field = &state.field;
        let grid = field.grid();
        let (peak_position, peak_value) = locate_peak(field);
        let coeffs = field.coeffs();
        let jc = state.cutoff();
        let top = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let lo = (jc * 9) / 10;
        let tail = coeffs[lo..=jc].iter().map(|c| c.norm()).fold(0.0, f64::max);
        Self {
            t: state.t,
            mass: field.mean() * grid.period(),
            energy: field.l2_norm().powi(2),
            peak_position,
            peak_value,
            spectral_tail: if top > 0.0 { tail / top } else { 0.0 },
        }
    }
}

/// Position and value of the largest deviation from the mean.
pub fn locate_peak(field: &SpectralField) -> (f64, f64) {
    let grid = field.grid();
    let v = field.values();
    let n = v.len();
    let mean = field.mean();
    let i = (0..n)
        .max_by(|&a, &b| (v[a] - mean).abs().total_cmp(&(v[b] - mean).abs()))
        .unwrap_or(0);
    let fm = v[(i + n - 1) % n];
    let f0 = v[i];
    let fp = v[(i + 1) % n];
    let denom = fm - 2.0 * f0 + fp;
    let offset = if denom != 0.0 {
        (0.5 * (fm - fp) / denom).clamp(-0.5, 0.5)
    } else {
        0.0
    };
    (
        grid.x(i) + offset * grid.dx(),
        f0 - 0.25 * (fm - fp) * offset,
    )
}

pub trait Observer {
    fn observe(&mut self, state: &EvolutionState);
}

/// Records a [`Snapshot`] every `every` steps (and at the start).
#[derive(Debug, Clone, PartialEq)]
pub struct Recorder {
    every: usize,
    pub snapshots: Vec<Snapshot>,
}

impl Recorder {
    pub fn new(every: usize) -> Self {
        Self {
            every: every.max(1),
            snapshots: Vec::new(),
        }
    }
}

impl Observer for Recorder {
    fn observe(&mut self, state: &EvolutionState) {
        if state.steps.is_multiple_of(self.every) {
            self.snapshots.push(Snapshot::of(state));
        }
    }
}

/// Follows the extremum across periodic wrap-around.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PeakTracker {
    last_raw: Option<f64>,
    unwrapped: f64,
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
}

impl PeakTracker {
    pub fn new() -> Self {
        Self::default()
    }

    /// Least-squares slope of the unwrapped trajectory.
    pub fn speed(&self) -> f64 {
        let n = self.times.len() as f64;
        if self.times.len() < 2 {
            return 0.0;
        }
        let tm = self.times.iter().sum::<f64>() / n;
        let xm = self.positions.iter().sum::<f64>() / n;
        let (mut sxy, mut sxx) = (0.0, 0.0);
        for (t, x) in self.times.iter().zip(&self.positions) {
            sxy += (t - tm) * (x - xm);
            sxx += (t - tm) * (t - tm);
        }
        sxy / sxx
    }
}

impl Observer for PeakTracker {
    fn observe(&mut self, state: &EvolutionState) {
        let (raw, _) = locate_peak(&state.field);
        let period = state.grid().period();
        match self.last_raw {
            None => self.unwrapped = raw,
            Some(prev) => {
                let d = raw - prev;
                self.unwrapped += d - period * (d / period).round();
            }
        }
        self.last_raw = Some(raw);
        self.times.push(state.t);
        self.positions.push(self.unwrapped);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectorySummary {
    pub t_final: f64,
    pub steps: usize,
    pub mass_initial: f64,
    pub mass_final: f64,
    /// `|dM| / max(|M0|, integral |eta0|)`.
    pub mass_drift: f64,
    pub energy_initial: f64,
    pub energy_final: f64,
    /// Relative change of `integral eta^2`; recorded only, not conserved.
    pub energy_drift: f64,
    pub peak_initial: f64,
    /// Unwrapped final extremum position.
    pub peak_final: f64,
    pub peak_speed: f64,
    pub spectral_tail: f64,
}

/// Run from `state.t` to `state.t + duration`, calling every observer at the
/// start and after every step. A final partial step lands exactly on the end time.
pub fn evolve(
    state: EvolutionState,
    duration: f64,
    observers: &mut [&mut dyn Observer],
) -> Result<(EvolutionState, TrajectorySummary)> {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "evolution time must be finite and > 0, got {duration}"
        )));
    }
    if state.dt < 0.0 {
        return Err(Error::InvalidParameter(
            "evolve runs forward; use a positive time step".into(),
        ));
    }
    let first = Snapshot::of(&state);
    let l1 = state.field.values().iter().map(|v| v.abs()).sum::<f64>() * state.grid().dx();
    let mut tracker = PeakTracker::new();
    tracker.observe(&state);
    for o in observers.iter_mut() {
        o.observe(&state);
    }

    let full_steps = (duration / state.dt * (1.0 + 1e-12)).floor() as usize;
    let t_end = state.t + duration;
    let mut stepper = Stepper::new(&state)?;
    let mut state = state;
    for _ in 0..full_steps {
        state = stepper.step(&state)?;
        tracker.observe(&state);
        for o in observers.iter_mut() {
            o.observe(&state);
        }
    }
    let rest = t_end - state.t;
    if rest > 1e-12 * duration {
        let dt = state.dt;
        let short = state.clone().with_dt(rest)?;
        let mut s = Stepper::new(&short)?.step(&short)?;
        s.dt = dt;
        s.t = t_end;
        state = s;
        tracker.observe(&state);
        for o in observers.iter_mut() {
            o.observe(&state);
        }
    } else {
        // Accumulated `t += dt` round-off only.
        state.t = t_end;
    }

    let last = Snapshot::of(&state);
    let mass_ref = first.mass.abs().max(l1);
    let summary = TrajectorySummary {
        t_final: state.t,
        steps: state.steps,
        mass_initial: first.mass,
        mass_final: last.mass,
        mass_drift: if mass_ref > 0.0 {
            (last.mass - first.mass).abs() / mass_ref
        } else {
            0.0
        },
        energy_initial: first.energy,
        energy_final: last.energy,
        energy_drift: if first.energy > 0.0 {
            (last.energy - first.energy) / first.energy
        } else {
            0.0
        },
        peak_initial: tracker.positions[0],
        peak_final: *tracker.positions.last().unwrap(),
        peak_speed: tracker.speed(),
        spectral_tail: last.spectral_tail,
    };
    Ok((state, summary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(n: usize) -> PeriodicGrid {
        PeriodicGrid::centered(PI, n).unwrap()
    }

    fn rel_l2(a: &SpectralField, b: &SpectralField) -> f64 {
        a.sub(b).unwrap().l2_norm() / b.l2_norm()
    }

    #[test]
    fn rhs_vanishes_on_constants() {
        let p = PhysicalParams::unit_speed(0.5).unwrap();
        for f in [SpectralField::zeros(grid(32)), SpectralField::constant(grid(32), 0.3)] {
            assert!(rhs_gkdv(&f, &p).unwrap().max_abs() < 1e-15);
            assert!(rhs_kdv(&f, &p).unwrap().max_abs() < 1e-15);
        }
    }

    #[test]
    fn rhs_linearization() {
        let p = PhysicalParams::gravity(0.7, 9.81).unwrap();
        let (h, c0) = (p.h(), p.c0());
        let k = 3.0;
        for &eps in &[1e-4, 1e-6] {
            let f = SpectralField::from_fn(grid(64), |x| eps * (k * x).cos()).unwrap();
            let g = rhs_gkdv(&f, &p).unwrap();
            let expect = SpectralField::from_fn(grid(64), |x| {
                c0 / h * (k * h).sinh() * eps * (k * x).sin()
            })
            .unwrap();
            assert!(rel_l2(&g, &expect) < 10.0 * eps);
            let kd = rhs_kdv(&f, &p).unwrap();
            let expect = SpectralField::from_fn(grid(64), |x| {
                c0 * (k + h * h * k.powi(3) / 6.0) * eps * (k * x).sin()
            })
            .unwrap();
            assert!(rel_l2(&kd, &expect) < 10.0 * eps);
        }
    }

    #[test]
    fn zero_stays_zero() {
        let p = PhysicalParams::unit_speed(1.0).unwrap();
        let s = EvolutionState::new(SpectralField::zeros(grid(32)), p, Equation::Gkdv, 0.01).unwrap();
        let (end, summary) = evolve(s, 1.0, &mut []).unwrap();
        assert_eq!(end.field.max_abs(), 0.0);
        assert_eq!(summary.steps, 100);
        assert!((end.t - 1.0).abs() < 1e-12);
    }

    #[test]
    fn linear_phase_is_exact() {
        let p = PhysicalParams::unit_speed(0.8).unwrap();
        let k = 4.0;
        let f = SpectralField::from_fn(grid(64), |x| 0.1 * (k * x).cos()).unwrap();
        let s = EvolutionState::new(f, p, Equation::Gkdv, 0.013)
            .unwrap()
            .with_nonlinear(false)
            .with_filter(FilterSpec::off())
            .unwrap();
        let t = 5.0;
        let (end, _) = evolve(s, t, &mut []).unwrap();
        let w = p.c0() / p.h() * (k * p.h()).sinh();
        let expect = SpectralField::from_fn(grid(64), |x| 0.1 * (k * x - w * t).cos()).unwrap();
        assert!(end.field.sub(&expect).unwrap().max_abs() < 1e-8 * 0.1);
    }

    #[test]
    fn mean_mode_is_invariant() {
        let p = PhysicalParams::unit_speed(0.3).unwrap();
        let f = SpectralField::from_fn(grid(32), |x| 0.2 + 0.1 * x.cos() + 0.05 * (2.0 * x).sin())
            .unwrap();
        let s0 = EvolutionState::new(f, p, Equation::Gkdv, 0.01).unwrap();
        let mut s = s0.clone();
        let mut st = Stepper::new(&s).unwrap();
        for _ in 0..200 {
            s = st.step(&s).unwrap();
        }
        assert_eq!(s.field.coeffs()[0], s0.field.coeffs()[0]);
    }

    #[test]
    fn forward_then_backward_returns() {
        let p = PhysicalParams::unit_speed(0.5).unwrap();
        let f = SpectralField::from_fn(grid(32), |x| 0.1 * x.cos() + 0.05 * (3.0 * x).sin()).unwrap();
        for eq in [Equation::Gkdv, Equation::Kdv] {
            let s = EvolutionState::new(f.clone(), p, eq, 1e-3)
                .unwrap()
                .with_filter(FilterSpec::off())
                .unwrap();
            let fwd = step(&s).unwrap();
            let back = step(&fwd.clone().with_dt(-1e-3).unwrap()).unwrap();
            assert!(rel_l2(&back.field, &s.field) < 1e-10);
        }
    }

    #[test]
    fn band_guard_rejects_deep_grids() {
        let p = PhysicalParams::unit_speed(2.0).unwrap();
        let f = SpectralField::zeros(grid(64));
        assert!(matches!(
            EvolutionState::new(f.clone(), p, Equation::Gkdv, 0.01),
            Err(Error::BandLimit { .. })
        ));
        assert!(EvolutionState::new(f, p, Equation::Kdv, 0.01).is_ok());
    }

    #[test]
    fn stability_guard_trips() {
        let p = PhysicalParams::unit_speed(1.0).unwrap();
        let f = SpectralField::from_fn(grid(32), |x| 5.0 * x.cos()).unwrap();
        let s = EvolutionState::new(f, p, Equation::Kdv, 1.0).unwrap();
        assert!(matches!(step(&s), Err(Error::StabilityGuard { .. })));
    }

    #[test]
    fn peak_tracker_unwraps() {
        let mut t = PeakTracker::new();
        let p = PhysicalParams::unit_speed(1.0).unwrap();
        for (i, c) in [2.8, 3.0, -3.1, -2.9].iter().enumerate() {
            let f = SpectralField::from_fn(grid(256), |x| (-((x - c) / 0.2).powi(2)).exp()
                + (-((x - c + 2.0 * PI) / 0.2).powi(2)).exp()
                + (-((x - c - 2.0 * PI) / 0.2).powi(2)).exp())
            .unwrap();
            let mut s = EvolutionState::new(f, p, Equation::Kdv, 0.1).unwrap();
            s.t = i as f64;
            t.observe(&s);
        }
        let last = *t.positions.last().unwrap();
        assert!((last - (2.0 * PI - 2.9)).abs() < 1e-2, "{:?}", t.positions);
    }
}
