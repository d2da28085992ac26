//! The check registry.
//!
//! Each entry names one identity, its default tolerance and refinement
//! count, and the function that measures it. Parameter keys shared across
//! checks: `m`, `x`, `tau`, `spin`, `p_min`, `p_max`, `grid`, `eps_span`,
//! `step`, `lattice_k`, `samples`.

use std::f64::consts::SQRT_2;
use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use toa_core::convergence::{fit_order, RefinementStudy};
use toa_core::dirac::{basis, dual_eigen_residual, momentum_eigen_residual, u_spinor, v_spinor, xi_spinor, zeta_spinor, EventKinematics, MomentumKinematics, Spin};
use toa_core::flow::{drift_study, integrate_flow, ArrivalTime, DualFlowState, GradientMode};
use toa_core::fock::{build_ladder_ops, build_t_quantized, car_residual, event_statistics, field_car_check, quadratic_form_t, vacuum, ModeSet, MomentumLattice, Species};
use toa_core::grid::{
    build_h_dual_position, build_h_momentum, build_t_dirac_momentum, build_t_dual_momentum, build_t_dual_position, bump_probe, commutator_residual, generic_spinor, Grid1D, GridSpinorField, PROBE_MARGIN,
};
use toa_core::linalg::{C64, I};
use toa_core::shift::{action_and_densities, discrete_elementary_solution, shift_equation_residual, shift_evolve, ArrivalBranch, ShiftField, ShiftForm};
use toa_core::spectral::{derivative_identity_check, eigen_relation_residual, f_vector_check, reflected_minus_residual, Branch, DiffMode, ToaEigenfunction};

use crate::error::{LabError, LabResult};
use crate::params::Params;
use crate::report::{CheckSpec, OrderBand};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Strict,
    #[default]
    Default,
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Strict => "strict",
            Profile::Default => "default",
        })
    }
}

/// What a check measured, before the pass decision.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub residual: f64,
    pub residuals: Vec<f64>,
    pub order: Option<f64>,
    pub order_band: Option<OrderBand>,
    /// Conditions beyond `residual ≤ tolerance`; a false entry fails the check.
    pub requirements: Vec<(String, bool)>,
    pub notes: Vec<String>,
}

type CheckFn = fn(&CheckSpec, &Params, &mut ChaCha8Rng) -> LabResult<Outcome>;

pub struct CheckDef {
    pub id: &'static str,
    /// The identity certified, as formula text.
    pub anchor: &'static str,
    default_tolerance: f64,
    pub refinements: usize,
    pub run: CheckFn,
}

impl CheckDef {
    /// Strict divides every non-zero tolerance by ten.
    pub fn tolerance(&self, profile: Profile) -> f64 {
        match profile {
            Profile::Default => self.default_tolerance,
            Profile::Strict => self.default_tolerance * 0.1,
        }
    }
}

impl fmt::Debug for CheckDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CheckDef").field("id", &self.id).field("anchor", &self.anchor).finish()
    }
}

pub const DEFAULT_SUITE: [&str; 14] = [
    "clifford",
    "car",
    "spinors",
    "eigenfunction-plus",
    "eigenfunction-minus",
    "derivative-identity",
    "f-vector",
    "commutators",
    "energy-shift",
    "action",
    "flow",
    "fock-compare",
    "fock-vacuum",
    "field-car",
];

static REGISTRY: [CheckDef; 14] = [
    CheckDef { id: "clifford", anchor: "{γ^μ, γ^ν} = 2η^{μν}, α₁ = γ⁰γ¹, β = γ⁰", default_tolerance: 0.0, refinements: 1, run: clifford },
    CheckDef { id: "car", anchor: "{a_i, a_j†} = δ_ij, {a_i, a_j} = 0 (Jordan-Wigner)", default_tolerance: 0.0, refinements: 1, run: car },
    CheckDef { id: "spinors", anchor: "(α₁p+βm)u = E_p u, (α₁x+βτ)ζ = T_x ζ, (α₁x−βτ)ξ = T_x ξ, ζ†(x,s)ξ(−x,s′) = 0", default_tolerance: 1e-12, refinements: 1, run: spinors },
    CheckDef { id: "eigenfunction-plus", anchor: "T̂_Dirac φ_{xs} = −(xE_p/p) φ_{xs}, φ_{xs} = f u(p,s) e^{−ipx}/√2π", default_tolerance: 1e-11, refinements: 3, run: eigenfunction_plus },
    CheckDef { id: "eigenfunction-minus", anchor: "T̂_Dirac φ_{−xs} = +(xE_p/p) φ_{−xs}, φ_{−xs} = f v(p,s) e^{+ipx}/√2π", default_tolerance: 1e-11, refinements: 3, run: eigenfunction_minus },
    CheckDef { id: "derivative-identity", anchor: "∂_p √(|p|/E_p) and the ∂u/∂p = c α₁β u prefactor", default_tolerance: 1e-9, refinements: 3, run: derivative_identity },
    CheckDef { id: "f-vector", anchor: "F = [(1/2p − m²/2pE²) + i x m/2E² α₁β ... ] f u = 0", default_tolerance: 1e-12, refinements: 1, run: f_vector },
    CheckDef { id: "commutators", anchor: "[Ĥ, T̂_Dirac] = i, [T̂_dual, Ĥ_dual] = −i", default_tolerance: 1e-2, refinements: 3, run: commutators },
    CheckDef { id: "energy-shift", anchor: "−i ∂_ε φ = T̂ φ, φ(ε+Δ) = e^{iT̂Δ} φ(ε)", default_tolerance: 1e-10, refinements: 3, run: energy_shift },
    CheckDef { id: "action", anchor: "δS = 0 on solutions, ∂_ε ∫ T° dp = 0", default_tolerance: 1e-6, refinements: 4, run: action },
    CheckDef { id: "flow", anchor: "dq/dε = ∂T/∂k, dk/dε = −∂T/∂q, T(q,k) = −qE/k conserved", default_tolerance: 1e-8, refinements: 3, run: flow },
    CheckDef { id: "fock-compare", anchor: "∫ φ†T̂φ dp = σ Σ_{x,s} (a†a + b†b − 1) T_x", default_tolerance: 1e-10, refinements: 1, run: fock_compare },
    CheckDef { id: "fock-vacuum", anchor: "⟨0|T̂|0⟩ = −Σ_{x,s} T_x", default_tolerance: 0.0, refinements: 1, run: fock_vacuum },
    CheckDef { id: "field-car", anchor: "{φ(p_j), π(p_l)} = (i/Δp) δ_jl", default_tolerance: 1e-12, refinements: 1, run: field_car },
];

pub fn registry() -> &'static [CheckDef] {
    &REGISTRY
}

pub fn find(id: &str) -> LabResult<&'static CheckDef> {
    REGISTRY.iter().find(|d| d.id == id).ok_or_else(|| LabError::UnknownCheck(id.to_string()))
}

fn clifford(_: &CheckSpec, _: &Params, _: &mut ChaCha8Rng) -> LabResult<Outcome> {
    let b = basis();
    let mut residuals = vec![b.clifford_residual()];
    residuals.extend(b.auxiliary_residuals());
    Ok(Outcome {
        residual: residuals.iter().copied().fold(0.0, f64::max),
        residuals,
        notes: vec!["γ-algebra plus α₁, β, σ₁ auxiliary relations".into()],
        ..Outcome::default()
    })
}

fn lattice(params: &Params, default_n: usize) -> LabResult<MomentumLattice> {
    let n = params.usize("grid", default_n)?;
    let p0 = params.f64("p_min", 0.5)?;
    let dp = params.f64("dp", 0.3)?;
    Ok(MomentumLattice::new(p0, dp, n)?)
}

fn car(_: &CheckSpec, params: &Params, _: &mut ChaCha8Rng) -> LabResult<Outcome> {
    let lat = lattice(params, 5)?;
    let ks = params.i64_list("lattice_k", &[1, 2])?;
    let tau = params.f64("tau", 0.5)?;
    let modes = ModeSet::lattice(&ks, &Spin::BOTH, &Species::BOTH, &lat, tau, false)?;
    let r = car_residual(&build_ladder_ops(&modes)?);
    Ok(Outcome { residual: r, residuals: vec![r], notes: vec![format!("{} modes, Fock dimension {}", modes.len(), modes.fock_dim())], ..Outcome::default() })
}

/// `n` log-spaced values in `[10^lo, 10^hi]` with a random cyclic offset.
fn log_samples(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let shift: f64 = rng.random();
    let mut v: Vec<f64> = (0..n).map(|i| 10f64.powf(lo + (hi - lo) * ((i as f64 + shift) / n as f64))).collect();
    // decorrelate the axes
    for i in (1..n).rev() {
        v.swap(i, rng.random_range(0..=i));
    }
    v
}

fn spinors(_: &CheckSpec, params: &Params, rng: &mut ChaCha8Rng) -> LabResult<Outcome> {
    let n = params.usize("samples", 100)?;
    let lo = params.f64("log10_min", -1.0)?;
    let hi = params.f64("log10_max", 1.0)?;
    let (ms, ps, xs) = (log_samples(rng, n, lo, hi), log_samples(rng, n, lo, hi), log_samples(rng, n, lo, hi));
    let taus = log_samples(rng, n, lo, hi);
    let mut worst = [0.0f64; 7];
    for i in 0..n {
        let k = MomentumKinematics::new(ms[i], ps[i])?;
        let x = if rng.random::<bool>() { xs[i] } else { -xs[i] };
        let tau = if rng.random::<bool>() { taus[i] } else { -taus[i] };
        let e = EventKinematics::new(x, tau)?;
        for s in Spin::BOTH {
            let (ru, rv) = momentum_eigen_residual(&k, s);
            let (rz, rx) = dual_eigen_residual(&e, s)?;
            let overlap = Spin::BOTH.iter().map(|&s2| Ok(zeta_spinor(&e, s)?.dot(&xi_spinor(&e.mirrored(), s2)?).norm())).collect::<LabResult<Vec<f64>>>()?;
            let vals = [
                (u_spinor(&k, s).norm_sqr() - 1.0).abs(),
                (v_spinor(&k, s).norm_sqr() - 1.0).abs(),
                ru,
                rv,
                rz,
                rx,
                overlap.into_iter().fold(0.0, f64::max),
            ];
            for (w, v) in worst.iter_mut().zip(vals) {
                *w = w.max(v);
            }
        }
    }
    Ok(Outcome {
        residual: worst.iter().copied().fold(0.0, f64::max),
        residuals: worst.to_vec(),
        notes: vec!["residuals: u†u−1, v†v−1, u eigen, v eigen, ζ eigen, ξ eigen, ζ†ξ(−x) overlap".into()],
        ..Outcome::default()
    })
}

/// Order farthest from `target` across studies; NaN if any study has none.
fn worst_order(orders: &[f64], target: f64) -> f64 {
    orders.iter().copied().fold(target, |w, o| if o.is_nan() || w.is_nan() { f64::NAN } else if (o - target).abs() > (w - target).abs() { o } else { w })
}

fn eigenfunction(spec: &CheckSpec, params: &Params, branch: Branch) -> LabResult<Outcome> {
    let masses = params.f64_or_list("m", &[0.5, 1.0, 2.0])?;
    let xs = params.f64_or_list("x", &[0.5, 1.0, 2.0])?;
    let spins = params.spins("spin", &Spin::BOTH)?;
    let p_min = params.f64("p_min", 0.5)?;
    let p_max = params.f64("p_max", 4.0)?;
    let n0 = params.usize("grid", 101)?;
    let mut analytic: f64 = 0.0;
    let mut reflected: f64 = 0.0;
    let mut levels = vec![0.0f64; spec.refinements];
    let mut steps = vec![];
    let mut orders = vec![];
    for &m in &masses {
        let mut grids = vec![Grid1D::momentum(p_min, p_max, n0, m)?];
        for _ in 1..spec.refinements {
            let g = grids.last().expect("non-empty").refined()?;
            grids.push(g);
        }
        steps = grids.iter().map(Grid1D::spacing).collect();
        let finest = *grids.last().expect("non-empty");
        for &x in &xs {
            for &s in &spins {
                let f = ToaEigenfunction::new(branch, x, s, m)?;
                analytic = analytic.max(eigen_relation_residual(&f, &finest, DiffMode::Analytic)?.max());
                if branch == Branch::Minus {
                    reflected = reflected.max(reflected_minus_residual(&f, &finest)?.max());
                }
                let errs = grids.iter().map(|g| Ok(eigen_relation_residual(&f, g, DiffMode::FiniteDifference)?.max())).collect::<LabResult<Vec<f64>>>()?;
                for (l, e) in levels.iter_mut().zip(&errs) {
                    *l = l.max(*e);
                }
                orders.push(fit_order(&steps, &errs));
            }
        }
    }
    let mut notes = vec![format!("analytic residual on the finest grid; difference-mode order is the worst of {} (m, x, s) fits", orders.len())];
    if branch == Branch::Minus {
        notes.push(format!("diagnostic: f v(−p,s) e^{{−ipx}} has residual {reflected:e} against +(xE_p/p)"));
    }
    Ok(Outcome {
        residual: analytic,
        residuals: levels,
        order: Some(worst_order(&orders, 2.0)),
        order_band: Some(OrderBand { target: 2.0, band: 0.3 }),
        notes,
        ..Outcome::default()
    })
}

fn eigenfunction_plus(spec: &CheckSpec, params: &Params, _: &mut ChaCha8Rng) -> LabResult<Outcome> {
    eigenfunction(spec, params, Branch::Plus)
}

fn eigenfunction_minus(spec: &CheckSpec, params: &Params, _: &mut ChaCha8Rng) -> LabResult<Outcome> {
    eigenfunction(spec, params, Branch::Minus)
}

fn single_spin(params: &Params) -> LabResult<Spin> {
    Ok(params.spins("spin", &[Spin::Up])?[0])
}

fn derivative_identity(_: &CheckSpec, params: &Params, _: &mut ChaCha8Rng) -> LabResult<Outcome> {
    let m = params.f64("m", 2.0)?;
    let p = params.f64("p", 1.0)?;
    let d = derivative_identity_check(m, p, single_spin(params)?)?;
    let mut notes = vec![format!("measured ∂u/∂p prefactor {} (noise floor {:e})", d.measured_prefactor, d.noise_floor)];
    match d.selected {
        Some(sel) => notes.push(format!("prefactor oracle selected {} with margin {:e}", sel.label(), d.margin)),
        None => notes.push(format!("prefactor oracle selected neither candidate uniquely (margin {})", d.margin)),
    }
    Ok(Outcome {
        residual: d.amplitude_residual,
        residuals: vec![d.amplitude_residual, d.candidate_linear, d.candidate_quadratic, d.measured_prefactor],
        requirements: vec![("exactly one prefactor consistent".into(), d.selected.is_some()), ("margin ≥ 10".into(), d.margin >= 10.0)],
        notes,
        ..Outcome::default()
    })
}

fn f_vector(_: &CheckSpec, params: &Params, _: &mut ChaCha8Rng) -> LabResult<Outcome> {
    let m = params.f64("m", 2.0)?;
    let p = params.f64("p", 1.0)?;
    let c = f_vector_check(m, p, single_spin(params)?)?;
    let mut notes = vec![format!("alternate assembly norm {:e}", c.alternate_norm)];
    if c.degenerate {
        notes.push("m = 1: both prefactors coincide".into());
    }
    Ok(Outcome {
        residual: c.printed_norm,
        residuals: vec![c.printed_norm, c.alternate_norm],
        requirements: vec![("exactly one assembly vanishes".into(), c.pass())],
        notes,
        ..Outcome::default()
    })
}

fn refinement_study(g0: Grid1D, levels: usize, mut residual: impl FnMut(&Grid1D) -> LabResult<f64>) -> LabResult<RefinementStudy> {
    let mut g = g0;
    let mut steps = vec![];
    let mut errs = vec![];
    for i in 0..levels {
        if i > 0 {
            g = g.refined()?;
        }
        steps.push(g.spacing());
        errs.push(residual(&g)?);
    }
    Ok(RefinementStudy::new(steps, errs))
}

/// Bump centred on the grid, kept `PROBE_MARGIN + 1` points from the ends.
fn centered_probe(g: &Grid1D) -> GridSpinorField {
    let (lo, hi) = (g.lower(), g.upper());
    let half = (0.375 * (hi - lo)).min(0.5 * (hi - lo) - (PROBE_MARGIN + 1) as f64 * g.spacing());
    bump_probe(*g, 0.5 * (lo + hi), half, generic_spinor())
}

fn commutators(spec: &CheckSpec, params: &Params, _: &mut ChaCha8Rng) -> LabResult<Outcome> {
    let m = params.f64("m", 1.0)?;
    let tau = params.f64("tau", 0.7)?;
    let lo = params.f64("p_min", 0.5)?;
    let hi = params.f64("p_max", 4.5)?;
    let n0 = params.usize("grid", 41)?;
    let momentum = refinement_study(Grid1D::momentum(lo, hi, n0, m)?, spec.refinements, |g| {
        Ok(commutator_residual(&build_h_momentum(g, m)?, &build_t_dirac_momentum(g, m)?, I, &centered_probe(g))?)
    })?;
    let dual = refinement_study(Grid1D::position(lo, hi, n0, lo)?, spec.refinements, |g| {
        Ok(commutator_residual(&build_t_dual_position(g, tau)?, &build_h_dual_position(g, tau)?, -I, &centered_probe(g))?)
    })?;
    let mut residuals = momentum.residuals.clone();
    residuals.extend(&dual.residuals);
    Ok(Outcome {
        residual: momentum.finest().max(dual.finest()),
        residuals,
        order: Some(worst_order(&[momentum.order, dual.order], 2.0)),
        order_band: Some(OrderBand { target: 2.0, band: 0.3 }),
        notes: vec![format!("orders: momentum {}, dual {}", momentum.order, dual.order), "residuals: momentum levels then dual levels".into()],
        ..Outcome::default()
    })
}

fn max_diff(a: &GridSpinorField, b: &GridSpinorField) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (*x - *y).max_abs()).fold(0.0, f64::max)
}

fn shift_grids(n: usize, h: f64, p_min: f64) -> LabResult<(Grid1D, Grid1D)> {
    let span = h * (n - 1) as f64;
    Ok((Grid1D::energy(-0.5 * span, 0.5 * span, n)?, Grid1D::momentum(p_min, p_min + span, n, 1.0)?))
}

fn energy_shift(spec: &CheckSpec, params: &Params, _: &mut ChaCha8Rng) -> LabResult<Outcome> {
    let x = params.f64("x", 1.0)?;
    let tau = params.f64("tau", 0.6)?;
    let n0 = params.usize("grid", 51)?;
    let h0 = params.f64("step", 0.08)?;
    let e = EventKinematics::new(x, tau)?;
    let spin = single_spin(params)?;

    let mut steps = vec![];
    let mut errs = vec![];
    let (mut n, mut h) = (n0, h0);
    for _ in 0..spec.refinements {
        let (ge, gp) = shift_grids(n, h, 0.5)?;
        let f = ShiftField::elementary(ShiftForm::CNumberTau, ArrivalBranch::Negative, &e, spin, ge, gp)?;
        steps.push(h);
        errs.push(shift_equation_residual(&f, tau)?);
        n = 2 * n - 1;
        h *= 0.5;
    }
    let pde = RefinementStudy::new(steps, errs);

    // ζ at one position-grid node is an exact eigenvector of the dual generator
    let gx = Grid1D::position(0.5, 2.5, 21, 1.0)?;
    let t_x = build_t_dual_position(&gx, tau)?;
    let j = 7;
    let ej = EventKinematics::new(gx.point(j), tau)?;
    let zeta = zeta_spinor(&ej, spin)?;
    let delta = 1.7;
    let probe = GridSpinorField::from_fn(gx, |p| if p == gx.point(j) { zeta } else { toa_core::dirac::Spinor4::ZERO });
    let evolved = shift_evolve(&probe, &t_x, delta)?;
    let want = probe.map(|_, s| *s * C64::from_polar(1.0, -ej.arrival() * delta));
    let phase = max_diff(&evolved, &want);

    let gp = Grid1D::momentum(0.5, 3.5, 41, 1.0)?;
    let t_p = build_t_dual_momentum(&gp, tau)?;
    let probe = bump_probe(gp, 2.0, 1.2, generic_spinor());
    let two = shift_evolve(&shift_evolve(&probe, &t_p, 0.3)?, &t_p, 0.45)?;
    let semigroup = max_diff(&two, &shift_evolve(&probe, &t_p, 0.75)?);

    let mut residuals = pde.residuals.clone();
    residuals.extend([phase, semigroup]);
    Ok(Outcome {
        residual: phase.max(semigroup),
        residuals,
        order: Some(pde.order),
        order_band: Some(OrderBand { target: 2.0, band: 0.3 }),
        notes: vec![format!("phase {phase:e}, semigroup {semigroup:e}; order from the shift-equation residual")],
        ..Outcome::default()
    })
}

fn action(spec: &CheckSpec, params: &Params, _: &mut ChaCha8Rng) -> LabResult<Outcome> {
    let x = params.f64("x", 1.0)?;
    let tau = params.f64("tau", 0.5)?;
    let spin = single_spin(params)?;

    let (ge, gp) = shift_grids(81, 0.025, 0.5)?;
    let e = EventKinematics::new(x, tau)?;
    let f = ShiftField::elementary(ShiftForm::CNumberTau, ArrivalBranch::Negative, &e, spin, ge, gp)?;
    let d = action_and_densities(&f, tau)?;
    let drift = d.charge_drift();
    let mid = d.charge.len() / 2;

    let (ge, gp) = shift_grids(41, 0.05, 0.5)?;
    let on_shell = discrete_elementary_solution(&EventKinematics::new(1.1, tau)?, spin, ge, gp)?;
    let eta = ShiftField::from_fn(ge, gp, |eps, p| {
        let r2 = (eps / 0.5).powi(2) + ((p - 1.5) / 0.5).powi(2);
        Ok(if r2 < 1.0 { generic_spinor() * (1.0 - r2).powi(4) } else { toa_core::dirac::Spinor4::ZERO })
    })?;
    let a0 = action_and_densities(&on_shell, tau)?.action;
    let deltas: Vec<f64> = (0..spec.refinements).map(|i| 10f64.powi(-(i as i32) - 1)).collect();
    let changes = deltas
        .iter()
        .map(|dl| Ok((action_and_densities(&on_shell.add_scaled(C64::new(*dl, 0.0), &eta)?, tau)?.action - a0).norm()))
        .collect::<LabResult<Vec<f64>>>()?;
    let exponent = fit_order(&deltas, &changes);

    let mut residuals = vec![drift];
    residuals.extend(&changes);
    Ok(Outcome {
        residual: drift,
        residuals,
        order: Some(exponent),
        order_band: Some(OrderBand { target: 2.0, band: 0.2 }),
        notes: vec![
            format!("∫T°dp = {} and ∫φ†T̂φdp = {} at mid ε", d.charge[mid].re, d.generator_expectation[mid].re),
            format!("order is the action-change exponent over δ = {deltas:?}"),
        ],
        ..Outcome::default()
    })
}

fn flow(spec: &CheckSpec, params: &Params, _: &mut ChaCha8Rng) -> LabResult<Outcome> {
    let m = params.f64("m", 1.0)?;
    let span = params.f64("eps_span", 10.0)?;
    let h = params.f64("step", 1e-3)?;
    let q0 = params.f64("q0", 1.0)?;
    let k0 = params.f64("k0", 1.0)?;
    let tf = ArrivalTime::new(m, 1e-3)?;
    let state = DualFlowState::new(0.0, vec![q0], vec![k0])?;
    let fine = integrate_flow(&state, &tf, span, h, GradientMode::Analytic)?;
    let coarse: Vec<f64> = (0..spec.refinements).map(|i| 0.1 * 0.5f64.powi(i as i32)).collect();
    let study = drift_study(&state, &tf, span, &coarse, GradientMode::Analytic)?;
    let mut requirements = vec![];
    let mut notes = vec![format!("T₀ = {}", fine.initial_value)];
    if (m, q0, k0) == (1.0, 1.0, 1.0) {
        requirements.push(("T₀ = −√2".into(), (fine.initial_value + SQRT_2).abs() <= 4.0 * f64::EPSILON));
    }
    notes.push(format!("order from steps {coarse:?}"));
    let mut residuals = vec![fine.relative_drift()];
    residuals.extend(&study.residuals);
    Ok(Outcome {
        residual: fine.relative_drift(),
        residuals,
        order: Some(study.order),
        order_band: Some(OrderBand { target: 4.0, band: 0.3 }),
        requirements,
        notes,
    })
}

fn fock_compare(_: &CheckSpec, params: &Params, _: &mut ChaCha8Rng) -> LabResult<Outcome> {
    let tau = params.f64("tau", 0.5)?;
    let small_lat = MomentumLattice::new(0.5, 0.3, 3)?;
    let small = ModeSet::lattice(&[1], &[Spin::Up], &Species::BOTH, &small_lat, tau, false)?;
    let lat = lattice(params, 5)?;
    let ks = params.i64_list("lattice_k", &[1, 2])?;
    let large = ModeSet::lattice(&ks, &Spin::BOTH, &Species::BOTH, &lat, tau, false)?;
    let a = quadratic_form_t(&small, &small_lat)?;
    let b = quadratic_form_t(&large, &lat)?;
    let consistent = a.sigma_determined && b.sigma_determined && a.sigma == b.sigma;
    Ok(Outcome {
        residual: a.residual.max(b.residual),
        residuals: vec![a.residual, b.residual, a.residual_other_sign, b.residual_other_sign],
        requirements: vec![("σ consistent across mode sets".into(), consistent)],
        notes: vec![format!("σ = {}", if a.sigma < 0.0 { "−1" } else { "+1" }), format!("mode sets: {} modes (N_p = 3), {} modes (N_p = {})", small.len(), large.len(), lat.len())],
        ..Outcome::default()
    })
}

fn fock_vacuum(_: &CheckSpec, params: &Params, _: &mut ChaCha8Rng) -> LabResult<Outcome> {
    let tau = params.f64("tau", 0.5)?;
    let lat = lattice(params, 5)?;
    let ks = params.i64_list("lattice_k", &[1, 2])?;
    let modes = ModeSet::lattice(&ks, &Spin::BOTH, &Species::BOTH, &lat, tau, false)?;
    let t = build_t_quantized(&modes)?;
    let (mean, var) = event_statistics(&vacuum(&modes), &t)?;
    let zero_point: f64 = -modes.event_labels().iter().map(|(_, _, t)| t).sum::<f64>();
    let r = (mean - zero_point).abs();
    Ok(Outcome {
        residual: r,
        residuals: vec![r, var],
        requirements: vec![("vacuum variance 0".into(), var == 0.0)],
        notes: vec![format!("⟨T⟩ = {mean}, −ΣT_x = {zero_point}")],
        ..Outcome::default()
    })
}

fn field_car(_: &CheckSpec, params: &Params, _: &mut ChaCha8Rng) -> LabResult<Outcome> {
    let tau = params.f64("tau", 0.6)?;
    let lat = lattice(params, 2)?;
    let modes = ModeSet::complete_lattice(&lat, tau)?;
    let r = field_car_check(&modes, &lat)?;
    Ok(Outcome {
        residual: r.residual.max(r.phi_phi_residual),
        residuals: vec![r.residual, r.phi_phi_residual],
        requirements: vec![("complete conjugate lattice".into(), r.complete)],
        notes: vec![format!("{} lattice, {} modes", r.label, modes.len())],
        ..Outcome::default()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_matches_default_suite() {
        let ids: Vec<&str> = registry().iter().map(|d| d.id).collect();
        assert_eq!(ids, DEFAULT_SUITE);
        assert!(find("flow").is_ok());
        assert!(find("nope").is_err());
        for d in registry() {
            assert!(!d.anchor.is_empty());
            assert!(d.tolerance(Profile::Strict) <= d.tolerance(Profile::Default));
        }
    }

    #[test]
    fn worst_order_picks_the_outlier() {
        assert_eq!(worst_order(&[2.1, 1.6, 2.2], 2.0), 1.6);
        assert!(worst_order(&[2.0, f64::NAN], 2.0).is_nan());
        assert_eq!(worst_order(&[], 2.0), 2.0);
    }
}
