//! Acceptance catalog: each criterion runs a self-contained experiment and
//! reports PASS/FAIL with the measured quantities.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dispersion::omega_squared;
use crate::error::Result;
use crate::evolution::{evolve, rhs_gkdv, rhs_kdv, Equation, EvolutionState, FilterSpec, PeakTracker};
use crate::field::SpectralField;
use crate::grid::PeriodicGrid;
use crate::params::PhysicalParams;
use crate::spectral_ops::{apply_cos_h_dx, apply_sin_h_dx, derivative};
use crate::traveling_wave::{
    koebe_diagnostic, reconstruct_profile, recursion_shallow_printed, residual_check,
    velocity_constraint, Recursion, SeriesSolution, SteadyEquation,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriterionInfo {
    pub id: u32,
    pub name: &'static str,
    pub summary: &'static str,
}

pub const CRITERIA: [CriterionInfo; 11] = [
    CriterionInfo {
        id: 1,
        name: "printed_shallow_closed_form",
        summary: "printed shallow recursion equals k/2^(k-1) for k <= 30 (1e-12 rel)",
    },
    CriterionInfo {
        id: 2,
        name: "printed_soliton_reproduction",
        summary: "printed shallow pipeline: a1 = -2B^2h^3, R = 2B^2h^3 (2%), eta = (B^2h^3/2)sech^2(BX/2) (1e-10)",
    },
    CriterionInfo {
        id: 3,
        name: "steady_equation_arbitration",
        summary: "derived shallow profile solves the steady weakly dispersive equation (1e-8); printed profile fails with O(1) residual",
    },
    CriterionInfo {
        id: 4,
        name: "sech2_shape",
        summary: "both modes fit c*sech^2(BX/2) with R^2 >= 1-1e-10; half-width 2 arccosh(sqrt 2)/B (0.1%)",
    },
    CriterionInfo {
        id: 5,
        name: "koebe",
        summary: "normalized shallow generating-function coefficients equal n (1e-12) for n <= 30",
    },
    CriterionInfo {
        id: 6,
        name: "dispersion_limits",
        summary: "acoustic limit at kh = 0.01 (1e-3); capillary limit for kh <= 0.05 (1%)",
    },
    CriterionInfo {
        id: 7,
        name: "operator_fidelity",
        summary: "sin(h d), cos(h d) match a 9-term Taylor oracle (1e-8 rel) on 100 random fields with kh <= 2",
    },
    CriterionInfo {
        id: 8,
        name: "shallow_limit_convergence",
        summary: "full vs shallow derived coefficient gap scales as (Bh)^2, slope 2 +- 0.2",
    },
    CriterionInfo {
        id: 9,
        name: "evolution_conservation_accuracy",
        summary: "mass drift <= 1e-10 over 1e4 steps; RK4 order 4 +- 0.3; linear phase exact to 1e-8",
    },
    CriterionInfo {
        id: 10,
        name: "soliton_transit",
        summary: "KdV depression soliton: L2 error <= 1e-3, speed within 0.5%; full profile under gKdV: shape within 1%",
    },
    CriterionInfo {
        id: 11,
        name: "gkdv_to_kdv_limit",
        summary: "|rhs_gkdv - rhs_kdv| / |rhs_kdv| scales as h^2, order 2 +- 0.2",
    },
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyOptions {
    /// Also require the printed soliton to solve the steady weakly dispersive equation.
    pub demand_printed_kdv: bool,
    /// Seed for the random operator-fidelity fields.
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            demand_printed_kdv: false,
            seed: 0x5eed_0007,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub metrics: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub all_pass: bool,
    pub criteria: Vec<CriterionOutcome>,
}

impl VerifyReport {
    pub fn new(criteria: Vec<CriterionOutcome>) -> Self {
        Self {
            all_pass: criteria.iter().all(|c| c.pass),
            criteria,
        }
    }
}

/// Run every criterion in order.
pub fn run_all(opts: &VerifyOptions) -> VerifyReport {
    VerifyReport::new(CRITERIA.iter().map(|c| run_criterion(c.id, opts)).collect())
}

pub fn run_criterion(id: u32, opts: &VerifyOptions) -> CriterionOutcome {
    let info = CRITERIA
        .iter()
        .find(|c| c.id == id)
        .copied()
        .unwrap_or(CriterionInfo {
            id,
            name: "unknown",
            summary: "",
        });
    let mut m = Metrics::default();
    let result = match id {
        1 => c1(&mut m),
        2 => c2(&mut m),
        3 => c3(&mut m, opts),
        4 => c4(&mut m),
        5 => c5(&mut m),
        6 => c6(&mut m),
        7 => c7(&mut m, opts),
        8 => c8(&mut m),
        9 => c9(&mut m),
        10 => c10(&mut m),
        11 => c11(&mut m),
        _ => Ok((false, format!("no criterion with id {id}"))),
    };
    let (pass, detail) = result.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionOutcome {
        id,
        name: info.name,
        pass,
        detail,
        metrics: m.0,
    }
}

#[derive(Default)]
struct Metrics(BTreeMap<String, f64>);

impl Metrics {
    fn set(&mut self, k: &str, v: f64) -> f64 {
        self.0.insert(k.to_string(), v);
        v
    }
}

type Verdict = Result<(bool, String)>;

fn sech2(x: f64) -> f64 {
    1.0 / x.cosh().powi(2)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn profile_grid(b: f64, extent: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| -extent / b + 2.0 * extent / b * i as f64 / (n - 1) as f64)
        .collect()
}

fn c1(m: &mut Metrics) -> Verdict {
    let c = recursion_shallow_printed(1.0, 1.0, 30)?;
    let r = c.scale();
    let err = (1..=30)
        .map(|k| rel(c.beta(k), k as f64 * (r / 2.0).powi(k as i32 - 1)))
        .fold(0.0, f64::max);
    m.set("max_rel_error", err);
    Ok((err <= 1e-12, format!("max relative deviation {err:.3e}")))
}

fn c2(m: &mut Metrics) -> Verdict {
    let (b, h) = (1.0f64, 1.0f64);
    let s = b * b * h.powi(3);
    let sol = SeriesSolution::solved(Recursion::ShallowPrinted, b, h, 200)?;
    let a1 = sol.a1().unwrap_or(f64::NAN);
    let a1_err = m.set("a1_rel_error", rel(a1, -2.0 * s));
    m.set("a1", a1);
    let radius = m.set("radius", sol.radius().radius);
    let r_err = m.set("radius_rel_error", rel(radius, 2.0 * s));
    let xs = profile_grid(b, 20.0, 801);
    let prof = reconstruct_profile(&sol, &xs)?;
    let (mut dev_pos, mut dev_neg) = (0.0f64, 0.0f64);
    for p in &prof {
        let f = s / 2.0 * sech2(b * p.x / 2.0);
        dev_pos = dev_pos.max((p.eta - f).abs());
        dev_neg = dev_neg.max((p.eta + f).abs());
    }
    m.set("profile_max_dev_positive_sech2", dev_pos);
    m.set("profile_max_dev_negative_sech2", dev_neg);
    m.set("eta_at_0", prof[prof.len() / 2].eta);
    let ok_a1 = a1_err <= 1e-8;
    let ok_r = r_err <= 0.02;
    let ok_profile = dev_pos <= 1e-10;
    let mut detail = format!(
        "a1 = {a1:.12} (rel err {a1_err:.2e}), R = {radius:.8} (rel err {r_err:.2e}); "
    );
    if ok_profile {
        detail.push_str(&format!("profile matches +(B^2h^3/2)sech^2 to {dev_pos:.2e}"));
    } else {
        detail.push_str(&format!(
            "profile misses +(B^2h^3/2)sech^2(BX/2) by {dev_pos:.3e}; it equals the depression \
             -(B^2h^3/2)sech^2(BX/2) to {dev_neg:.2e} (sum k(-v)^k = -v/(1+v)^2 with a1 < 0)"
        ));
    }
    Ok((ok_a1 && ok_r && ok_profile, detail))
}

const PRINTED_RESIDUAL_MIN: f64 = 1e-2;

fn c3(m: &mut Metrics, opts: &VerifyOptions) -> Verdict {
    let derived = SeriesSolution::solved(Recursion::ShallowDerived, 1.0, 1.0, 60)?;
    let rd = residual_check(&derived, SteadyEquation::Kdv)?;
    let printed = SeriesSolution::solved(Recursion::ShallowPrinted, 1.0, 1.0, 60)?;
    let rp = residual_check(&printed, SteadyEquation::Kdv)?;
    m.set("derived_sup_scaled", rd.sup_scaled);
    m.set("derived_tail_bound", rd.tail_bound);
    m.set("printed_sup_scaled", rp.sup_scaled);
    let derived_ok = rd.pass && rd.sup_scaled <= 1e-8;
    let printed_fails = !rp.pass && rp.sup_scaled >= PRINTED_RESIDUAL_MIN;
    let mut detail = format!(
        "derived residual {:.2e} ({}), printed residual {:.3e} ({}): printed coefficients \
         differ from the steady equation's by 2^(k-1), giving amplitude -B^2h^3/2 instead of -B^2h^3/4",
        rd.sup_scaled,
        if rd.pass { "PASS" } else { "FAIL" },
        rp.sup_scaled,
        if rp.pass { "PASS" } else { "FAIL" },
    );
    if opts.demand_printed_kdv {
        detail.push_str(
            "; demanded: printed soliton must solve the steady weakly dispersive equation \
             -> documented discrepancy (printed recursion vs steady equation)",
        );
        return Ok((derived_ok && rp.pass, detail));
    }
    Ok((derived_ok && printed_fails, detail))
}

fn c4(m: &mut Metrics) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for (label, rec) in [
        ("paper_printed", Recursion::ShallowPrinted),
        ("steady_derived", Recursion::ShallowDerived),
    ] {
        for &(b, h) in &[(1.0, 1.0), (0.5, 1.2)] {
            let sol = SeriesSolution::solved(rec, b, h, 200)?;
            let xs = profile_grid(b, 20.0, 801);
            let prof = reconstruct_profile(&sol, &xs)?;
            let basis: Vec<f64> = prof.iter().map(|p| sech2(b * p.x / 2.0)).collect();
            let c = prof.iter().zip(&basis).map(|(p, s)| p.eta * s).sum::<f64>()
                / basis.iter().map(|s| s * s).sum::<f64>();
            let mean = prof.iter().map(|p| p.eta).sum::<f64>() / prof.len() as f64;
            let ss_res: f64 = prof.iter().zip(&basis).map(|(p, s)| (p.eta - c * s).powi(2)).sum();
            let ss_tot: f64 = prof.iter().map(|p| (p.eta - mean).powi(2)).sum();
            let r2 = 1.0 - ss_res / ss_tot;
            let hw = half_width(&sol)?;
            let hw_exact = 2.0 * 2f64.sqrt().acosh() / b;
            let hw_err = rel(hw, hw_exact);
            let tag = format!("{label}_B{b}");
            m.set(&format!("{tag}_one_minus_r2"), 1.0 - r2);
            m.set(&format!("{tag}_half_width_rel_error"), hw_err);
            m.set(&format!("{tag}_amplitude"), c);
            pass &= r2 >= 1.0 - 1e-10 && hw_err <= 1e-3;
            parts.push(format!("{tag}: 1-R^2 = {:.1e}, half-width err {hw_err:.1e}", 1.0 - r2));
        }
    }
    Ok((pass, parts.join("; ")))
}

/// `X > 0` where `|eta(X)| = |eta(0)|/2`, by bisection on the series.
fn half_width(sol: &SeriesSolution) -> Result<f64> {
    let eta = |x: f64| -> Result<f64> { Ok(reconstruct_profile(sol, &[x])?[0].eta) };
    let target = eta(0.0)?.abs() / 2.0;
    let (mut lo, mut hi) = (0.0, 20.0 / sol.b());
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if eta(mid)?.abs() > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn c5(m: &mut Metrics) -> Verdict {
    let mut worst = 0.0f64;
    for rec in [Recursion::ShallowPrinted, Recursion::ShallowDerived] {
        let sol = SeriesSolution::build(rec, 1.0, 1.0, 30)?;
        worst = worst.max(koebe_diagnostic(&sol).max_deviation);
    }
    m.set("max_deviation", worst);
    Ok((worst <= 1e-12, format!("max |c_n - n| = {worst:.2e}")))
}

fn c6(m: &mut Metrics) -> Verdict {
    let p = PhysicalParams::gravity(1.0, 9.81)?;
    let k = 0.01 / p.h();
    let acoustic = m.set(
        "acoustic_deviation",
        (omega_squared(k, &p)? / (p.c0() * p.c0() * k * k) - 1.0).abs(),
    );
    let cap = PhysicalParams::new(1.0, 0.0, 1000.0, 0.072)?;
    let mut capillary = 0.0f64;
    for kh in [0.005, 0.01, 0.02, 0.05] {
        let k = kh / cap.h();
        let w = cap.h() * cap.sigma() / cap.rho() * k.powi(4);
        capillary = capillary.max((omega_squared(k, &cap)? / w - 1.0).abs());
    }
    m.set("capillary_deviation", capillary);
    Ok((
        acoustic <= 1e-3 && capillary <= 1e-2,
        format!("acoustic {acoustic:.2e}, capillary {capillary:.2e}"),
    ))
}

fn taylor(field: &SpectralField, h: f64, odd: bool, terms: usize) -> Result<SpectralField> {
    let mut acc = SpectralField::zeros(*field.grid());
    let mut power = field.clone();
    let mut fact = 1.0;
    let (mut p, mut used) = (0usize, 0usize);
    while used < terms {
        if (p % 2 == 1) == odd {
            let sign = if (p / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
            acc = acc.lincomb(1.0, &power, sign / fact)?;
            used += 1;
        }
        p += 1;
        fact *= p as f64;
        power = derivative(&power, 1)?.scale(h);
    }
    Ok(acc)
}

fn c7(m: &mut Metrics, opts: &VerifyOptions) -> Verdict {
    let grid = PeriodicGrid::centered(PI, 64)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let h: f64 = rng.random_range(0.05..0.5);
        let jmax = ((2.0 / h).floor() as usize).min(grid.nyquist() - 1);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.modes()];
        for c in coeffs.iter_mut().take(jmax + 1).skip(1) {
            *c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
        coeffs[0] = Complex64::new(rng.random_range(-1.0..1.0), 0.0);
        let f = SpectralField::from_coeffs(grid, coeffs)?;
        // sin(h d) in real form: i sinh(kh) on e^{ikx} is the odd Taylor part of (h d).
        let s = apply_sin_h_dx(&f, h)?;
        let s_ref = taylor(&f, h, true, 9)?;
        let c = apply_cos_h_dx(&f, h)?;
        let c_ref = taylor(&f, h, false, 9)?;
        let es = s.sub(&s_ref)?.l2_norm() / s_ref.l2_norm();
        let ec = c.sub(&c_ref)?.l2_norm() / c_ref.l2_norm();
        worst = worst.max(es).max(ec);
    }
    m.set("max_rel_error", worst);
    Ok((worst <= 1e-8, format!("worst relative deviation over 100 fields {worst:.2e}")))
}

fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn c8(m: &mut Metrics) -> Verdict {
    let bhs = [0.2, 0.1, 0.05, 0.025];
    let mut pass = true;
    let mut slopes = Vec::new();
    for k in 2..=6usize {
        let gaps: Vec<f64> = bhs
            .iter()
            .map(|&bh| -> Result<f64> {
                let full = SeriesSolution::build(Recursion::SteadyDerived, bh, 1.0, k)?;
                let shallow = SeriesSolution::build(Recursion::ShallowDerived, bh, 1.0, k)?;
                Ok(rel(full.coefficients().alpha(k), shallow.coefficients().alpha(k)))
            })
            .collect::<Result<_>>()?;
        let s = loglog_slope(&bhs, &gaps);
        m.set(&format!("slope_k{k}"), s);
        pass &= (s - 2.0).abs() <= 0.2;
        slopes.push(format!("k={k}: {s:.3}"));
    }
    Ok((pass, format!("log-log slopes {}", slopes.join(", "))))
}

fn soliton_field(rec: Recursion, b: f64, h: f64, grid: PeriodicGrid) -> Result<SpectralField> {
    let sol = SeriesSolution::solved(rec, b, h, 200)?;
    let prof = reconstruct_profile(&sol, &grid.points())?;
    SpectralField::from_values(grid, prof.into_iter().map(|p| p.eta).collect())
}

fn c9(m: &mut Metrics) -> Verdict {
    let params = PhysicalParams::unit_speed(1.0)?;
    let grid = PeriodicGrid::centered(40.0, 512)?;
    let f = soliton_field(Recursion::ShallowDerived, 1.0, 1.0, grid)?;
    let s = EvolutionState::new(f, params, Equation::Kdv, 0.01)?;
    let (end, summary) = evolve(s, 100.0, &mut [])?;
    let drift = m.set("mass_drift", summary.mass_drift);
    m.set("steps", end.steps as f64);

    let grid = PeriodicGrid::centered(20.0, 128)?;
    let f = soliton_field(Recursion::ShallowDerived, 1.0, 1.0, grid)?.scale(4.0);
    let run = |dt: f64| -> Result<SpectralField> {
        let s = EvolutionState::new(f.clone(), params, Equation::Kdv, dt)?;
        Ok(evolve(s, 2.0, &mut [])?.0.field)
    };
    let u = [run(0.05)?, run(0.025)?, run(0.0125)?];
    let e1 = u[0].sub(&u[1])?.l2_norm();
    let e2 = u[1].sub(&u[2])?.l2_norm();
    let order = m.set("rk4_order", (e1 / e2).log2());

    let p = PhysicalParams::unit_speed(0.8)?;
    let grid = PeriodicGrid::centered(PI, 64)?;
    let k = 4.0;
    let f = SpectralField::from_fn(grid, |x| (k * x).cos() + 0.5 * (2.0 * x).sin())?;
    let s = EvolutionState::new(f, p, Equation::Gkdv, 0.013)?
        .with_nonlinear(false)
        .with_filter(FilterSpec::off())?;
    let t = 5.0;
    let (end, _) = evolve(s, t, &mut [])?;
    let w = |k: f64| p.c0() / p.h() * (k * p.h()).sinh();
    let exact = SpectralField::from_fn(grid, |x| {
        (k * x - w(k) * t).cos() + 0.5 * (2.0 * x - w(2.0) * t).sin()
    })?;
    let phase = m.set("phase_error", end.field.sub(&exact)?.max_abs());
    Ok((
        drift <= 1e-10 && (order - 4.0).abs() <= 0.3 && phase <= 1e-8,
        format!("mass drift {drift:.2e}, RK4 order {order:.3}, linear phase error {phase:.2e}"),
    ))
}

fn c10(m: &mut Metrics) -> Verdict {
    let (b, h) = (1.0, 1.0);
    let params = PhysicalParams::unit_speed(h)?;
    let grid = PeriodicGrid::centered(40.0, 512)?;
    let f = soliton_field(Recursion::ShallowDerived, b, h, grid)?;
    let speed = params.c0() * (1.0 - (b * h).powi(2) / 6.0);
    let s = EvolutionState::new(f.clone(), params, Equation::Kdv, 0.01)?;
    let mut tracker = PeakTracker::new();
    let (end, _) = evolve(s, grid.period() / speed, &mut [&mut tracker])?;
    let kdv_err = m.set("kdv_l2_error", end.field.sub(&f)?.l2_norm() / f.l2_norm());
    let kdv_speed_err = m.set("kdv_speed_rel_error", rel(tracker.speed(), speed));

    let (b, h) = (0.2, 1.0);
    let params = PhysicalParams::unit_speed(h)?;
    let grid = PeriodicGrid::centered(200.0, 1024)?;
    let filter = FilterSpec::on();
    let f = filter.apply(&soliton_field(Recursion::SteadyDerived, b, h, grid)?);
    let lab = -velocity_constraint(b, h)? * params.c0();
    let s = EvolutionState::new(f.clone(), params, Equation::Gkdv, 0.05)?.with_filter(filter)?;
    let mut tracker = PeakTracker::new();
    let (end, _) = evolve(s, grid.period() / lab, &mut [&mut tracker])?;
    let shift = tracker.positions[0] - tracker.positions.last().unwrap();
    let aligned = end
        .field
        .apply_multiplier(|_, k| Complex64::from_polar(1.0, -k * shift));
    let gkdv_err = m.set("gkdv_shape_error", aligned.sub(&f)?.l2_norm() / f.l2_norm());
    m.set("gkdv_speed_rel_error", rel(tracker.speed(), lab));
    Ok((
        kdv_err <= 1e-3 && kdv_speed_err <= 5e-3 && gkdv_err <= 1e-2,
        format!(
            "KdV L2 error {kdv_err:.2e}, speed error {kdv_speed_err:.2e}; gKdV shape error {gkdv_err:.2e}"
        ),
    ))
}

fn c11(m: &mut Metrics) -> Verdict {
    let grid = PeriodicGrid::centered(PI, 64)?;
    let hs = [0.03, 0.015, 0.0075, 0.00375];
    let mut ratios = Vec::new();
    for &h in &hs {
        let p = PhysicalParams::unit_speed(h)?;
        let f = SpectralField::from_fn(grid, |x| {
            h * (x.cos() + 0.5 * (2.0 * x).sin() + 0.3 * (3.0 * x + 0.4).cos())
        })?;
        let g = rhs_gkdv(&f, &p)?;
        let k = rhs_kdv(&f, &p)?;
        ratios.push(g.sub(&k)?.l2_norm() / k.l2_norm());
    }
    let order = m.set("order", loglog_slope(&hs, &ratios));
    Ok(((order - 2.0).abs() <= 0.2, format!("measured order {order:.3}")))
}
