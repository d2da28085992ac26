//! Data emitters behind the `flow`, `shift` and `fock` subcommands.

use serde::Serialize;
use toa_core::dirac::{EventKinematics, Spin};
use toa_core::flow::{integrate_flow, ArrivalTime, DualFlowState, GradientMode};
use toa_core::fock::{basis_state, build_t_quantized, event_statistics, ModeSet, MomentumLattice, Species};
use toa_core::grid::Grid1D;
use toa_core::shift::{shift_equation_residual, ShiftField, ShiftForm};

use crate::error::{LabError, LabResult};

/// CSV trajectory `eps,q,k,T,relative_drift` of the arrival-time flow.
pub fn flow_csv(mass: f64, q0: f64, k0: f64, eps_span: f64, step: f64, mode: GradientMode) -> LabResult<String> {
    let tf = ArrivalTime::new(mass, 1e-3)?;
    let traj = integrate_flow(&DualFlowState::new(0.0, vec![q0], vec![k0])?, &tf, eps_span, step, mode)?;
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(["eps", "q", "k", "T", "relative_drift"])?;
    let scale = traj.initial_value.abs().max(f64::MIN_POSITIVE);
    for (s, t) in traj.states.iter().zip(&traj.values) {
        w.write_record([s.eps, s.q[0], s.k[0], *t, (t - traj.initial_value).abs() / scale].map(|v| v.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| LabError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is ASCII"))
}

/// Conjugate-lattice mode set at `x_k` for the given spins and species.
pub fn lattice_modes(ks: &[i64], spins: &[Spin], species: &[Species], n_p: usize, dp: f64, tau: f64) -> LabResult<(ModeSet, MomentumLattice)> {
    let lat = MomentumLattice::new(0.5, dp, n_p)?;
    Ok((ModeSet::lattice(ks, spins, species, &lat, tau, false)?, lat))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeRow {
    pub index: usize,
    pub species: Species,
    pub x: f64,
    pub spin: Spin,
    pub tau: f64,
    pub arrival: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FockSummary {
    pub fock_dim: usize,
    pub modes: Vec<ModeRow>,
    /// Eigenvalues of the quantized arrival time, indexed by occupation bits.
    pub spectrum: Vec<f64>,
    /// The same values in ascending order.
    pub sorted_spectrum: Vec<f64>,
}

pub fn fock_summary(modes: &ModeSet) -> LabResult<FockSummary> {
    let rows = modes
        .modes()
        .iter()
        .enumerate()
        .map(|(index, m)| ModeRow { index, species: m.species, x: m.x, spin: m.spin, tau: m.tau, arrival: m.arrival() })
        .collect();
    let spectrum = build_t_quantized(modes)?.real_diagonal();
    let mut sorted_spectrum = spectrum.clone();
    sorted_spectrum.sort_by(f64::total_cmp);
    Ok(FockSummary { fock_dim: modes.fock_dim(), modes: rows, spectrum, sorted_spectrum })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EventStats {
    pub mean: f64,
    pub variance: f64,
}

/// Statistics of the quantized arrival time in the basis state with the
/// listed modes occupied.
pub fn fock_stats(modes: &ModeSet, occupied: &[usize]) -> LabResult<EventStats> {
    if let Some(i) = occupied.iter().find(|i| **i >= modes.len()) {
        return Err(LabError::Parameter { key: "occupied".into(), reason: format!("mode {i} out of range 0..{}", modes.len()) });
    }
    let (mean, variance) = event_statistics(&basis_state(modes, occupied), &build_t_quantized(modes)?)?;
    Ok(EventStats { mean, variance })
}

/// One elementary energy-shift mode sampled on an `(ε, p)` grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftExport {
    pub species: Species,
    pub x: f64,
    pub tau: f64,
    pub spin: Spin,
    pub form: ShiftForm,
    pub eps_grid: Grid1D,
    pub p_grid: Grid1D,
    /// Row-major over `(ε, p, component)`, each entry `re, im`.
    pub values: Vec<f64>,
    /// Largest difference residual of the energy-shift equation on the interior.
    pub equation_residual: f64,
}

pub fn shift_export(species: Species, e: &EventKinematics, spin: Spin, form: ShiftForm, eps_grid: Grid1D, p_grid: Grid1D) -> LabResult<ShiftExport> {
    let field = ShiftField::elementary(form, species.branch(), e, spin, eps_grid, p_grid)?;
    let values = field.values().iter().flat_map(|s| s.0.iter().flat_map(|c| [c.re, c.im])).collect();
    Ok(ShiftExport {
        species,
        x: e.x(),
        tau: e.tau(),
        spin,
        form,
        eps_grid,
        p_grid,
        values,
        equation_residual: shift_equation_residual(&field, e.tau())?,
    })
}
