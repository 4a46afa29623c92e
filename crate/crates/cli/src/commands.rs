use std::path::PathBuf;

use gkdv::dispersion::sweep;
use gkdv::evolution::{
    evolve as run_evolution, linear_multiplier, Equation, EvolutionState, FilterSpec,
    PeakTracker, Snapshot,
};
use gkdv::traveling_wave::{
    koebe_diagnostic, reconstruct_profile, residual_check, solve_a1, Mode, Recursion,
    ResidualReport, SeriesSolution, SteadyEquation,
};
use gkdv::verify::{run_criterion, CriterionOutcome, VerifyOptions, VerifyReport, CRITERIA};
use gkdv::{Error, PeriodicGrid, SpectralField};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{self, DispersionConfig, EvolveConfig, Initial, SolitonConfig, VerifyConfig};
use crate::output::{csv_string, json_string, write};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_BAD_INPUT: u8 = 2;
pub const EXIT_CONSTRUCTION: u8 = 3;
pub const EXIT_BLOW_UP: u8 = 4;

pub struct Context {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub mode: Option<Mode>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidParameter(_)
        | Error::InvalidGrid(_)
        | Error::GridMismatch
        | Error::BandLimit { .. } => EXIT_BAD_INPUT,
        Error::ResonantVelocity { .. }
        | Error::ResonantDenominator { .. }
        | Error::NoSmoothMatching(_)
        | Error::Evaluation { .. } => EXIT_CONSTRUCTION,
        Error::StabilityGuard { .. } | Error::BlowUp { .. } => EXIT_BLOW_UP,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidParameter(_) => "invalid_parameter",
        Error::InvalidGrid(_) => "invalid_grid",
        Error::GridMismatch => "grid_mismatch",
        Error::BandLimit { .. } => "band_limit",
        Error::ResonantVelocity { .. } => "resonant_velocity",
        Error::ResonantDenominator { .. } => "resonant_denominator",
        Error::NoSmoothMatching(_) => "no_smooth_matching",
        Error::Evaluation { .. } => "evaluation",
        Error::StabilityGuard { .. } => "stability_guard",
        Error::BlowUp { .. } => "blow_up",
    }
}

#[derive(Serialize)]
struct Failure<'a> {
    status: &'static str,
    kind: &'a str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    last_good_time: Option<f64>,
}

/// Report a library error as JSON (stdout and `<out>/<name>`) and map it to an exit code.
fn fail(ctx: &Context, name: &str, e: &Error) -> u8 {
    eprintln!("error: {e}");
    let last_good_time = match e {
        Error::BlowUp { last_good_time, .. } => Some(*last_good_time),
        _ => None,
    };
    let body = Failure {
        status: "error",
        kind: error_kind(e),
        message: e.to_string(),
        last_good_time,
    };
    if let Ok(s) = json_string(&body) {
        print!("{s}");
        if let Some(dir) = &ctx.out {
            if let Err(err) = write(dir, name, &s) {
                eprintln!("error: {err:#}");
            }
        }
    }
    exit_code(e)
}

fn bad_input(msg: impl std::fmt::Display) -> u8 {
    eprintln!("error: {msg}");
    EXIT_BAD_INPUT
}

/// Write `contents` to `<out>/<name>`, or to stdout when no directory was given.
fn emit(ctx: &Context, name: &str, contents: &str) -> Result<(), u8> {
    match &ctx.out {
        Some(dir) => write(dir, name, contents).map_err(|e| {
            eprintln!("error: {e:#}");
            EXIT_BAD_INPUT
        }),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn reject_mode(ctx: &Context, cmd: &str) -> Result<(), u8> {
    if ctx.mode.is_some() {
        return Err(bad_input(format!("--mode does not apply to '{cmd}'")));
    }
    Ok(())
}

pub fn dispersion(ctx: &Context) -> u8 {
    if let Err(c) = reject_mode(ctx, "dispersion") {
        return c;
    }
    let cfg: DispersionConfig = match config::load(ctx.config.as_deref()) {
        Ok(c) => c,
        Err(e) => return bad_input(format!("{e:#}")),
    };
    let n = if cfg.k_min == cfg.k_max { 1 } else { cfg.samples };
    let rows = match sweep(cfg.k_min, cfg.k_max, n, &cfg.params) {
        Ok(r) => r,
        Err(e) => return bad_input(e),
    };
    let csv = csv_string(
        &["k", "omega2", "omega_model", "phase_v", "group_v"],
        rows.iter().map(|s| {
            vec![s.k, s.omega2, s.omega_model, s.phase_velocity, s.group_velocity]
        }),
    );
    match emit(ctx, "dispersion.csv", &csv) {
        Ok(()) => EXIT_OK,
        Err(c) => c,
    }
}

#[derive(Serialize)]
struct SolitonSummary {
    status: &'static str,
    b: f64,
    h: f64,
    mode: Mode,
    shallow: bool,
    order: usize,
    /// Envelope velocity factor `A`; the profile moves at `-A c0`.
    velocity_factor: f64,
    a1: f64,
    root_count: usize,
    radius: f64,
    radius_fit_residual: f64,
    radius_flagged: bool,
    eta_at_origin: f64,
    profile_extremum: f64,
    residual: ResidualReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    koebe_max_deviation: Option<f64>,
}

pub fn soliton(ctx: &Context) -> u8 {
    let mut cfg: SolitonConfig = match config::load(ctx.config.as_deref()) {
        Ok(c) => c,
        Err(e) => return bad_input(format!("{e:#}")),
    };
    if let Some(m) = ctx.mode {
        cfg.mode = m;
    }
    if cfg.samples < 2 || !(cfg.extent.is_finite() && cfg.extent > 0.0) {
        return bad_input("profile needs samples >= 2 and extent > 0");
    }
    let rec = Recursion::new(cfg.mode, cfg.shallow);
    let sol = match SeriesSolution::build(rec, cfg.b, cfg.h, cfg.order) {
        Ok(s) => s,
        Err(e) => return fail(ctx, "soliton.json", &e),
    };
    let root = match solve_a1(&sol) {
        Ok(r) => r,
        Err(e) => return fail(ctx, "soliton.json", &e),
    };
    let sol = sol.with_a1(root.a1);
    let n = cfg.samples;
    let xs: Vec<f64> = (0..n)
        .map(|i| cfg.extent / cfg.b * (2.0 * i as f64 / (n - 1) as f64 - 1.0))
        .collect();
    let profile = match reconstruct_profile(&sol, &xs) {
        Ok(p) => p,
        Err(e) => return fail(ctx, "soliton.json", &e),
    };
    let which = cfg.residual.unwrap_or(if cfg.shallow {
        SteadyEquation::Kdv
    } else {
        SteadyEquation::Gkdv
    });
    let residual = match residual_check(&sol, which) {
        Ok(r) => r,
        Err(e) => return fail(ctx, "soliton.json", &e),
    };
    let eta_at_origin = match reconstruct_profile(&sol, &[0.0]) {
        Ok(p) => p[0].eta,
        Err(e) => return fail(ctx, "soliton.json", &e),
    };
    let profile_extremum = profile
        .iter()
        .map(|p| p.eta)
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(0.0);
    let radius = sol.radius();
    let summary = SolitonSummary {
        status: "ok",
        b: cfg.b,
        h: cfg.h,
        mode: cfg.mode,
        shallow: cfg.shallow,
        order: cfg.order,
        velocity_factor: sol.a(),
        a1: root.a1,
        root_count: root.root_count,
        radius: radius.radius,
        radius_fit_residual: radius.fit_residual,
        radius_flagged: radius.flagged,
        eta_at_origin,
        profile_extremum,
        residual,
        koebe_max_deviation: cfg.shallow.then(|| koebe_diagnostic(&sol).max_deviation),
    };
    let json = match json_string(&summary) {
        Ok(s) => s,
        Err(e) => return bad_input(format!("{e:#}")),
    };
    print!("{json}");
    if let Some(dir) = &ctx.out {
        let csv = csv_string(&["X", "eta"], profile.iter().map(|p| vec![p.x, p.eta]));
        for (name, body) in [("soliton_profile.csv", csv.as_str()), ("soliton.json", &json)] {
            if let Err(e) = write(dir, name, body) {
                return bad_input(format!("{e:#}"));
            }
        }
    }
    EXIT_OK
}

#[derive(Serialize)]
struct SnapshotFile {
    t: f64,
    file: String,
}

#[derive(Serialize)]
struct EvolveSummary {
    status: &'static str,
    equation: Equation,
    dt: f64,
    t_end: f64,
    steps: usize,
    mass_initial: f64,
    mass_final: f64,
    mass_drift: f64,
    energy_initial: f64,
    energy_final: f64,
    energy_drift: f64,
    peak_initial: f64,
    peak_final: f64,
    peak_speed: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    expected_speed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    speed_rel_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    linear_phase_error: Option<f64>,
    spectral_tail: f64,
    snapshots: Vec<SnapshotFile>,
}

struct Seed {
    field: SpectralField,
    expected_speed: Option<f64>,
}

fn initial_field(cfg: &EvolveConfig, mode: Option<Mode>, grid: PeriodicGrid) -> Result<Seed, Error> {
    let p = &cfg.params;
    match &cfg.initial {
        Initial::Zero => Ok(Seed {
            field: SpectralField::zeros(grid),
            expected_speed: None,
        }),
        Initial::Mode {
            amplitude,
            index,
            phase,
        } => {
            if *index > grid.nyquist() {
                return Err(Error::InvalidParameter(format!(
                    "mode index {index} exceeds the Nyquist index {}",
                    grid.nyquist()
                )));
            }
            let k = grid.wavenumber(*index);
            Ok(Seed {
                field: SpectralField::from_fn(grid, |x| amplitude * (k * x + phase).cos())?,
                expected_speed: None,
            })
        }
        Initial::Soliton {
            b,
            mode: m,
            shallow,
            order,
            shift,
            filtered,
        } => {
            let mode = mode.or(*m).unwrap_or_default();
            let rec = Recursion::new(mode, *shallow);
            let sol = SeriesSolution::solved(rec, *b, p.h(), *order)?;
            let xs: Vec<f64> = grid.points().iter().map(|x| x - shift).collect();
            let prof = reconstruct_profile(&sol, &xs)?;
            let field = SpectralField::from_values(grid, prof.into_iter().map(|s| s.eta).collect())?;
            let field = if *filtered {
                FilterSpec::on().apply(&field)
            } else {
                field
            };
            let bh = b * p.h();
            let expected_speed = match (cfg.equation, rec) {
                (Equation::Kdv, Recursion::ShallowDerived) => Some(p.c0() * (1.0 - bh * bh / 6.0)),
                (Equation::Gkdv, Recursion::SteadyDerived) => Some(sol.lab_speed(p.c0())),
                _ => None,
            };
            Ok(Seed {
                field,
                expected_speed,
            })
        }
    }
}

pub fn evolve(ctx: &Context) -> u8 {
    let cfg: EvolveConfig = match config::load(ctx.config.as_deref()) {
        Ok(c) => c,
        Err(e) => return bad_input(format!("{e:#}")),
    };
    if !(cfg.t_end.is_finite() && cfg.t_end > 0.0) {
        return bad_input(format!("t_end must be finite and > 0, got {}", cfg.t_end));
    }
    let mut times = cfg.snapshots.clone();
    if times.iter().any(|t| !(t.is_finite() && *t > 0.0 && *t <= cfg.t_end)) {
        return bad_input("snapshot times must lie in (0, t_end]");
    }
    times.push(cfg.t_end);
    times.sort_by(f64::total_cmp);
    times.dedup();

    let grid = match PeriodicGrid::new(cfg.grid.half_length, cfg.grid.n, cfg.grid.offset) {
        Ok(g) => g,
        Err(e) => return bad_input(e),
    };
    let seed = match initial_field(&cfg, ctx.mode, grid) {
        Ok(s) => s,
        Err(e) => return fail(ctx, "evolve.json", &e),
    };
    let filter = cfg.filter.unwrap_or(FilterSpec::default_for(cfg.equation));
    let state = EvolutionState::new(seed.field.clone(), cfg.params, cfg.equation, cfg.dt)
        .and_then(|s| s.with_filter(filter))
        .and_then(|s| s.with_dealias(cfg.dealias))
        .map(|s| s.with_nonlinear(cfg.nonlinear));
    let mut state = match state {
        Ok(s) => s,
        Err(e) => return fail(ctx, "evolve.json", &e),
    };
    if cfg.dt < 0.0 {
        return bad_input("dt must be positive");
    }

    let first = Snapshot::of(&state);
    let l1 = state.field.values().iter().map(|v| v.abs()).sum::<f64>() * grid.dx();
    let mut tracker = PeakTracker::new();
    let mut snapshots = Vec::new();
    let mut first_segment = true;
    for (i, &t) in times.iter().enumerate() {
        let duration = t - state.t;
        if duration > 0.0 {
            let result = if first_segment {
                run_evolution(state.clone(), duration, &mut [&mut tracker])
            } else {
                // The tracker already holds the current state; skip the duplicate start sample.
                let mut skip = SkipFirst {
                    inner: &mut tracker,
                    seen: false,
                };
                run_evolution(state.clone(), duration, &mut [&mut skip])
            };
            state = match result {
                Ok((s, _)) => s,
                Err(e) => return fail(ctx, "evolve.json", &e),
            };
            first_segment = false;
        }
        let file = format!("snapshot_{i:03}.csv");
        if let Some(dir) = &ctx.out {
            let csv = csv_string(
                &["x", "eta"],
                grid.points()
                    .into_iter()
                    .zip(state.field.values())
                    .map(|(x, v)| vec![x, *v]),
            );
            if let Err(e) = write(dir, &file, &csv) {
                return bad_input(format!("{e:#}"));
            }
        }
        snapshots.push(SnapshotFile { t, file });
    }

    let last = Snapshot::of(&state);
    let mass_ref = first.mass.abs().max(l1);
    let peak_speed = tracker.speed();
    let linear_phase_error = match (&cfg.initial, cfg.nonlinear) {
        (Initial::Mode { amplitude, index, phase }, false) => {
            let k = grid.wavenumber(*index);
            let w = -linear_multiplier(cfg.equation, k, &cfg.params).im;
            let t = state.t;
            let exact = grid
                .points()
                .into_iter()
                .map(|x| amplitude * (k * x + phase - w * t).cos());
            Some(
                exact
                    .zip(state.field.values())
                    .map(|(e, v)| (e - v).abs())
                    .fold(0.0, f64::max),
            )
        }
        _ => None,
    };
    let summary = EvolveSummary {
        status: "ok",
        equation: cfg.equation,
        dt: cfg.dt,
        t_end: state.t,
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
        peak_initial: tracker.positions.first().copied().unwrap_or(first.peak_position),
        peak_final: tracker.positions.last().copied().unwrap_or(last.peak_position),
        peak_speed,
        expected_speed: seed.expected_speed,
        speed_rel_error: seed
            .expected_speed
            .map(|v| (peak_speed - v).abs() / v.abs()),
        linear_phase_error,
        spectral_tail: last.spectral_tail,
        snapshots,
    };
    let json = match json_string(&summary) {
        Ok(s) => s,
        Err(e) => return bad_input(format!("{e:#}")),
    };
    print!("{json}");
    if let Some(dir) = &ctx.out {
        if let Err(e) = write(dir, "evolve.json", &json) {
            return bad_input(format!("{e:#}"));
        }
    }
    EXIT_OK
}

struct SkipFirst<'a> {
    inner: &'a mut PeakTracker,
    seen: bool,
}

impl gkdv::evolution::Observer for SkipFirst<'_> {
    fn observe(&mut self, state: &EvolutionState) {
        if self.seen {
            self.inner.observe(state);
        }
        self.seen = true;
    }
}

pub fn verify(ctx: &Context, list: bool) -> u8 {
    if list {
        for c in CRITERIA {
            println!("{:>2} {}: {}", c.id, c.name, c.summary);
        }
        return EXIT_OK;
    }
    if let Err(c) = reject_mode(ctx, "verify") {
        return c;
    }
    let cfg: VerifyConfig = match config::load(ctx.config.as_deref()) {
        Ok(c) => c,
        Err(e) => return bad_input(format!("{e:#}")),
    };
    let defaults = VerifyOptions::default();
    let opts = VerifyOptions {
        demand_printed_kdv: cfg.demand_printed_kdv,
        seed: cfg.seed.unwrap_or(defaults.seed),
    };
    let ids: Vec<u32> = cfg
        .criteria
        .unwrap_or_else(|| CRITERIA.iter().map(|c| c.id).collect());
    if let Some(bad) = ids.iter().find(|id| !CRITERIA.iter().any(|c| c.id == **id)) {
        return bad_input(format!("unknown criterion id {bad}"));
    }
    let outcomes: Vec<CriterionOutcome> = ids.par_iter().map(|&id| run_criterion(id, &opts)).collect();
    for o in &outcomes {
        eprintln!(
            "{:>2} {} {}: {}",
            o.id,
            if o.pass { "PASS" } else { "FAIL" },
            o.name,
            o.detail
        );
    }
    let report = VerifyReport::new(outcomes);
    let json = match json_string(&report) {
        Ok(s) => s,
        Err(e) => return bad_input(format!("{e:#}")),
    };
    print!("{json}");
    if let Some(dir) = &ctx.out {
        if let Err(e) = write(dir, "verify.json", &json) {
            return bad_input(format!("{e:#}"));
        }
    }
    if report.all_pass {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    }
}
