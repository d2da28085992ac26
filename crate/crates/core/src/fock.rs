//! Finite fermionic Fock space over event modes.
//!
//! Occupation basis index `n = Σ nᵢ 2ⁱ` with mode `i` in canonical order:
//! electron events first, then positron events, each sorted by `x` and then
//! spin. Ladder operators carry the parity string of all lower modes, so
//! `aᵢ|n⟩ = (−1)^{Σ_{l<i} n_l} |n − eᵢ⟩`.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dirac::{xi_spinor, zeta_spinor, EventKinematics, Spin, Spinor4};
use crate::error::{Error, Result};
use crate::grid::{Axis, Grid1D};
use crate::linalg::{ComplexMatrix, C64, I, ONE, ZERO};
pub use crate::shift::Species;

/// Largest supported mode count (Fock dimension `2¹⁴`).
pub const MODE_CAP: usize = 14;

/// Relative tolerance for a position to count as a conjugate-lattice point.
const LATTICE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeLabel {
    pub species: Species,
    pub x: f64,
    pub spin: Spin,
    pub tau: f64,
}

impl ModeLabel {
    pub fn new(species: Species, x: f64, spin: Spin, tau: f64) -> Result<Self> {
        EventKinematics::new(x, tau)?;
        Ok(ModeLabel { species, x, spin, tau })
    }

    pub fn kinematics(&self) -> EventKinematics {
        EventKinematics::new(self.x, self.tau).expect("validated at construction")
    }

    /// `T_x = √(x² + τ²)`.
    pub fn arrival(&self) -> f64 {
        self.x.hypot(self.tau)
    }

    fn canonical_cmp(&self, other: &ModeLabel) -> Ordering {
        self.species.cmp(&other.species).then(self.x.total_cmp(&other.x)).then(self.spin.cmp(&other.spin))
    }

    fn same_slot(&self, other: &ModeLabel) -> bool {
        self.canonical_cmp(other) == Ordering::Equal
    }

    /// Event spinor: `ζ(x,s)` for electrons, `ξ(x,s)` for positrons.
    pub fn spinor(&self) -> Spinor4 {
        let e = self.kinematics();
        match self.species {
            Species::ElectronEvent => zeta_spinor(&e, self.spin),
            Species::PositronEvent => xi_spinor(&e, self.spin),
        }
        .expect("τ + T_x > 0 for x ≠ 0")
    }

    /// Plane-wave sign: `e^{−ipx}` for electrons, `e^{+ipx}` for positrons.
    fn wave_sign(&self) -> f64 {
        match self.species {
            Species::ElectronEvent => -1.0,
            Species::PositronEvent => 1.0,
        }
    }

    /// Generator eigenvalue of the mode function: `−T_x` or `+T_x`.
    pub fn generator_eigenvalue(&self) -> f64 {
        self.wave_sign() * self.arrival()
    }

    /// `spinor · e^{∓ipx}/√(2π)`.
    pub fn mode_function(&self, p: f64) -> Spinor4 {
        self.spinor() * C64::from_polar(1.0 / (2.0 * PI).sqrt(), self.wave_sign() * p * self.x)
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.species {
            Species::ElectronEvent => "e",
            Species::PositronEvent => "p",
        };
        write!(f, "{tag}(x={}, s={})", self.x, self.spin)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSet {
    modes: Vec<ModeLabel>,
}

impl ModeSet {
    pub fn new(mut modes: Vec<ModeLabel>) -> Result<Self> {
        if modes.len() > MODE_CAP {
            return Err(Error::ModeCapExceeded { modes: modes.len(), cap: MODE_CAP });
        }
        modes.sort_by(ModeLabel::canonical_cmp);
        if let Some(w) = modes.windows(2).find(|w| w[0].same_slot(&w[1])) {
            return Err(Error::DuplicateMode(w[0].to_string()));
        }
        Ok(ModeSet { modes })
    }

    pub fn empty() -> Self {
        ModeSet { modes: vec![] }
    }

    /// Modes at `x_k = 2πk/(N_pΔp)` for each `k`, spin and species.
    /// With `mirror_positrons` the positron modes sit at `−x_k`.
    pub fn lattice(ks: &[i64], spins: &[Spin], species: &[Species], p_grid: &MomentumLattice, tau: f64, mirror_positrons: bool) -> Result<Self> {
        let mut modes = vec![];
        for &k in ks {
            if k == 0 {
                return Err(Error::InvalidParameter("lattice index k = 0 puts a mode at the origin".into()));
            }
            let x = lattice_position(k, p_grid);
            for &sp in species {
                let xs = if sp == Species::PositronEvent && mirror_positrons { -x } else { x };
                for &s in spins {
                    modes.push(ModeLabel::new(sp, xs, s, tau)?);
                }
            }
        }
        Self::new(modes)
    }

    /// Electrons at `k = 1..=N_p` and positrons at `−x_k`, both spins: a mode
    /// set that resolves every momentum grid point.
    pub fn complete_lattice(p_grid: &MomentumLattice, tau: f64) -> Result<Self> {
        let ks: Vec<i64> = (1..=p_grid.len() as i64).collect();
        Self::lattice(&ks, &Spin::BOTH, &Species::BOTH, p_grid, tau, true)
    }

    pub fn modes(&self) -> &[ModeLabel] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn fock_dim(&self) -> usize {
        1 << self.modes.len()
    }

    pub fn index_of(&self, species: Species, x: f64, spin: Spin) -> Option<usize> {
        self.modes.iter().position(|m| m.species == species && m.x == x && m.spin == spin)
    }

    /// Distinct `(x, s)` labels in first-seen canonical order.
    pub fn event_labels(&self) -> Vec<(f64, Spin, f64)> {
        let mut out: Vec<(f64, Spin, f64)> = vec![];
        for m in &self.modes {
            if !out.iter().any(|(x, s, _)| *x == m.x && *s == m.spin) {
                out.push((m.x, m.spin, m.arrival()));
            }
        }
        out
    }
}

/// Uniform momentum points `p_j = p₀ + jΔp`, `j = 0..N_p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumLattice {
    p0: f64,
    dp: f64,
    n: usize,
}

impl MomentumLattice {
    pub fn new(p0: f64, dp: f64, n: usize) -> Result<Self> {
        if n == 0 || dp <= 0.0 || !p0.is_finite() || !dp.is_finite() {
            return Err(Error::InvalidGrid(format!("momentum lattice needs N_p ≥ 1 and Δp > 0, got {n}, {dp}")));
        }
        Ok(MomentumLattice { p0, dp, n })
    }

    pub fn from_grid(grid: &Grid1D) -> Result<Self> {
        if grid.axis() != Axis::Momentum {
            return Err(Error::InvalidGrid("mode integrals run over a momentum grid".into()));
        }
        Self::new(grid.lower(), grid.spacing(), grid.len())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spacing(&self) -> f64 {
        self.dp
    }

    pub fn point(&self, j: usize) -> f64 {
        self.p0 + j as f64 * self.dp
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|j| self.point(j))
    }
}

pub fn lattice_position(k: i64, p_grid: &MomentumLattice) -> f64 {
    2.0 * PI * k as f64 / (p_grid.len() as f64 * p_grid.spacing())
}

/// `k` with `x = 2πk/(N_pΔp)`, or `OffLattice`.
pub fn lattice_index(x: f64, p_grid: &MomentumLattice) -> Result<i64> {
    let k = x * p_grid.len() as f64 * p_grid.spacing() / (2.0 * PI);
    let r = k.round();
    if r == 0.0 || (k - r).abs() > LATTICE_TOL * k.abs().max(1.0) {
        return Err(Error::OffLattice { x });
    }
    Ok(r as i64)
}

fn parity_below(bits: usize, i: usize) -> f64 {
    if (bits & ((1usize << i) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `aᵢ|bits⟩ = sign|bits'⟩`.
pub fn annihilate(bits: usize, i: usize) -> Option<(f64, usize)> {
    (bits >> i & 1 == 1).then(|| (parity_below(bits, i), bits ^ (1 << i)))
}

/// `aᵢ†|bits⟩ = sign|bits'⟩`.
pub fn create(bits: usize, i: usize) -> Option<(f64, usize)> {
    (bits >> i & 1 == 0).then(|| (parity_below(bits, i), bits | (1 << i)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    matrix: ComplexMatrix,
}

impl FockOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch { expected: matrix.rows(), found: matrix.cols() });
        }
        if !matrix.is_finite() {
            return Err(Error::NonFinite("Fock operator"));
        }
        Ok(FockOperator { matrix })
    }

    pub fn zeros(dim: usize) -> Self {
        FockOperator { matrix: ComplexMatrix::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> Self {
        FockOperator { matrix: ComplexMatrix::identity(dim) }
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let c: Vec<C64> = d.iter().map(|v| C64::new(*v, 0.0)).collect();
        FockOperator { matrix: ComplexMatrix::from_diagonal(&c) }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn adjoint(&self) -> Self {
        FockOperator { matrix: self.matrix.adjoint() }
    }

    pub fn is_diagonal(&self) -> bool {
        self.matrix.is_diagonal()
    }

    pub fn real_diagonal(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn apply(&self, state: &[C64]) -> Result<Vec<C64>> {
        self.matrix.mul_vec(state)
    }

    pub fn anticommutator(&self, other: &FockOperator) -> FockOperator {
        FockOperator { matrix: self.matrix.anticommutator(&other.matrix) }
    }

    /// `max |A − σB|`.
    pub fn distance_scaled(&self, other: &FockOperator, sigma: f64) -> f64 {
        (&self.matrix - &other.matrix.scale_real(sigma)).max_abs()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.matrix - &self.matrix.adjoint()).max_abs()
    }
}

fn ladder_matrix(dim: usize, f: impl Fn(usize) -> Option<(f64, usize)>) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(dim, dim);
    for col in 0..dim {
        if let Some((sign, row)) = f(col) {
            m[(row, col)] = C64::new(sign, 0.0);
        }
    }
    m
}

/// One annihilator per mode; creators are their adjoints.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderOps {
    pub modes: ModeSet,
    pub annihilators: Vec<FockOperator>,
    pub creators: Vec<FockOperator>,
}

pub fn build_ladder_ops(modes: &ModeSet) -> Result<LadderOps> {
    if modes.len() > MODE_CAP {
        return Err(Error::ModeCapExceeded { modes: modes.len(), cap: MODE_CAP });
    }
    let dim = modes.fock_dim();
    let annihilators: Vec<FockOperator> = (0..modes.len()).map(|i| FockOperator { matrix: ladder_matrix(dim, |b| annihilate(b, i)) }).collect();
    let creators = (0..modes.len()).map(|i| FockOperator { matrix: ladder_matrix(dim, |b| create(b, i)) }).collect();
    Ok(LadderOps { modes: modes.clone(), annihilators, creators })
}

/// `max_{i,j} (‖{cᵢ, c†ⱼ} − δᵢⱼI‖, ‖{cᵢ, cⱼ}‖)`.
pub fn car_residual(ops: &LadderOps) -> f64 {
    let n = ops.annihilators.len();
    let dim = ops.modes.fock_dim();
    let id = ComplexMatrix::identity(dim);
    let zero = ComplexMatrix::zeros(dim, dim);
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mixed = ops.annihilators[i].anticommutator(&ops.creators[j]);
            let target = if i == j { &id } else { &zero };
            worst = worst.max((&mixed.matrix - target).max_abs());
            let pure = ops.annihilators[i].anticommutator(&ops.annihilators[j]);
            worst = worst.max(pure.matrix.max_abs());
        }
    }
    worst
}

/// `Σ_{(x,s)} [a†a + b†b − 1] T_x`; the `−1` is counted once per distinct
/// `(x, s)` label present.
pub fn build_t_quantized(modes: &ModeSet) -> Result<FockOperator> {
    if modes.len() > MODE_CAP {
        return Err(Error::ModeCapExceeded { modes: modes.len(), cap: MODE_CAP });
    }
    let zero_point: f64 = modes.event_labels().iter().map(|(_, _, t)| t).sum();
    let diag: Vec<f64> = (0..modes.fock_dim())
        .map(|bits| {
            let occupied: f64 = modes.modes().iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, m)| m.arrival()).sum();
            occupied - zero_point
        })
        .collect();
    Ok(FockOperator::from_diagonal(&diag))
}

/// Rejects off-lattice positions and mode pairs whose discrete overlaps do
/// not vanish.
pub fn validate_lattice_modes(modes: &ModeSet, p_grid: &MomentumLattice) -> Result<Vec<i64>> {
    let n_p = p_grid.len() as i64;
    let ks = modes.modes().iter().map(|m| lattice_index(m.x, p_grid)).collect::<Result<Vec<_>>>()?;
    let ms = modes.modes();
    for a in 0..ms.len() {
        for b in a + 1..ms.len() {
            let (ma, mb) = (&ms[a], &ms[b]);
            if ma.spin != mb.spin {
                continue;
            }
            let aliased = if ma.species == mb.species {
                (ks[a] - ks[b]).rem_euclid(n_p) == 0
            } else {
                (ks[a] + ks[b]).rem_euclid(n_p) == 0 && ma.x != -mb.x
            };
            if aliased {
                return Err(Error::AliasedModes(format!("{ma} and {mb} on N_p = {n_p}")));
            }
        }
    }
    Ok(ks)
}

/// `M_norm = N_pΔp/2π`.
pub fn lattice_norm(p_grid: &MomentumLattice) -> f64 {
    p_grid.len() as f64 * p_grid.spacing() / (2.0 * PI)
}

/// `Gᵢⱼ = (1/M_norm) Σ_p φᵢ(p)†φⱼ(p) Δp`.
pub fn mode_gram(modes: &ModeSet, p_grid: &MomentumLattice) -> ComplexMatrix {
    let ms = modes.modes();
    let samples: Vec<Vec<Spinor4>> = ms.iter().map(|m| p_grid.points().map(|p| m.mode_function(p)).collect()).collect();
    let w = p_grid.spacing() / lattice_norm(p_grid);
    ComplexMatrix::from_fn(ms.len(), ms.len(), |i, j| samples[i].iter().zip(&samples[j]).map(|(a, b)| a.dot(b)).sum::<C64>() * w)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    pub t_quad: FockOperator,
    pub t_quantized: FockOperator,
    /// Sign with the smaller `‖T_quad − σT‖_∞`.
    pub sigma: f64,
    /// False when both signs fit equally well.
    pub sigma_determined: bool,
    pub residual: f64,
    pub residual_other_sign: f64,
    /// `max |G − I|` of the mode Gram matrix.
    pub gram_defect: f64,
}

/// Field operator built from annihilators of electron modes and creators of
/// positron modes. Returns `(O, O†)` per mode.
fn field_ladder(species: Species, bits: usize, i: usize, dagger: bool) -> Option<(f64, usize)> {
    match (species, dagger) {
        (Species::ElectronEvent, false) | (Species::PositronEvent, true) => annihilate(bits, i),
        (Species::ElectronEvent, true) | (Species::PositronEvent, false) => create(bits, i),
    }
}

/// Charge `(1/M_norm) Σ_j φ†(p_j)(T̂φ)(p_j)Δp` of the operator-valued field
/// `φ = Σ a φ_{xs} + Σ b† φ_{−xs}`, compared with the number-operator form.
pub fn quadratic_form_t(modes: &ModeSet, p_grid: &MomentumLattice) -> Result<QuadraticForm> {
    validate_lattice_modes(modes, p_grid)?;
    let gram = mode_gram(modes, p_grid);
    let n = modes.len();
    let dim = modes.fock_dim();
    let ms = modes.modes();
    let mut t = ComplexMatrix::zeros(dim, dim);
    for col in 0..dim {
        for (jp, mj) in ms.iter().enumerate() {
            let Some((s1, mid)) = field_ladder(mj.species, col, jp, false) else { continue };
            let lambda = mj.generator_eigenvalue();
            for (ip, mi) in ms.iter().enumerate() {
                let g = gram[(ip, jp)];
                if g == ZERO {
                    continue;
                }
                if let Some((s2, row)) = field_ladder(mi.species, mid, ip, true) {
                    t[(row, col)] += g * (lambda * s1 * s2);
                }
            }
        }
    }
    let t_quad = FockOperator::new(t)?;
    let t_quantized = build_t_quantized(modes)?;
    let plus = t_quad.distance_scaled(&t_quantized, 1.0);
    let minus = t_quad.distance_scaled(&t_quantized, -1.0);
    let (sigma, residual, residual_other_sign) = if minus <= plus { (-1.0, minus, plus) } else { (1.0, plus, minus) };
    let gram_defect = (&gram - &ComplexMatrix::identity(n)).max_abs();
    Ok(QuadraticForm { t_quad, t_quantized, sigma, sigma_determined: plus != minus, residual, residual_other_sign, gram_defect })
}

/// Spinor component `a` of the field at grid point `p`, mode functions
/// scaled by `1/√M_norm`.
pub fn field_operator(modes: &ModeSet, p_grid: &MomentumLattice, p: f64, component: usize) -> Result<FockOperator> {
    if component >= 4 {
        return Err(Error::InvalidParameter(format!("spinor component {component} out of range")));
    }
    let dim = modes.fock_dim();
    let scale = 1.0 / lattice_norm(p_grid).sqrt();
    let mut m = ComplexMatrix::zeros(dim, dim);
    for (i, mode) in modes.modes().iter().enumerate() {
        let c = mode.mode_function(p)[component] * scale;
        for col in 0..dim {
            if let Some((s, row)) = field_ladder(mode.species, col, i, false) {
                m[(row, col)] += c * s;
            }
        }
    }
    FockOperator::new(m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldCar {
    /// `max ‖{φ_a(p_j), π_b(p_l)} − (i/Δp)δ_{ab}δ_{jl}I‖_∞`, `π = iφ†`.
    pub residual: f64,
    /// `max ‖{φ_a(p_j), φ_b(p_l)}‖_∞`.
    pub phi_phi_residual: f64,
    pub complete: bool,
    pub label: String,
}

/// Whether electrons cover every residue of `k mod N_p` with positrons at
/// the mirrored positions, for both spins.
pub fn is_complete_lattice(modes: &ModeSet, p_grid: &MomentumLattice) -> bool {
    let n_p = p_grid.len() as i64;
    (0..n_p).all(|r| {
        Spin::BOTH.iter().all(|&s| {
            modes.modes().iter().any(|e| {
                e.species == Species::ElectronEvent
                    && e.spin == s
                    && lattice_index(e.x, p_grid).map(|k| k.rem_euclid(n_p) == r).unwrap_or(false)
                    && modes.index_of(Species::PositronEvent, -e.x, s).is_some()
            })
        })
    })
}

pub fn field_car_check(modes: &ModeSet, p_grid: &MomentumLattice) -> Result<FieldCar> {
    for m in modes.modes() {
        lattice_index(m.x, p_grid)?;
    }
    let dim = modes.fock_dim();
    let mut phis = vec![];
    for p in p_grid.points() {
        for a in 0..4 {
            phis.push(field_operator(modes, p_grid, p, a)?);
        }
    }
    let pis: Vec<FockOperator> = phis.iter().map(|f| FockOperator { matrix: f.adjoint().matrix.scale(I) }).collect();
    let id = ComplexMatrix::identity(dim);
    let delta = I / p_grid.spacing();
    let mut residual: f64 = 0.0;
    let mut phi_phi_residual: f64 = 0.0;
    for (u, phi) in phis.iter().enumerate() {
        for (v, pi) in pis.iter().enumerate() {
            let ac = phi.anticommutator(pi);
            let target = if u == v { id.scale(delta) } else { ComplexMatrix::zeros(dim, dim) };
            residual = residual.max((&ac.matrix - &target).max_abs());
            phi_phi_residual = phi_phi_residual.max(phi.anticommutator(&phis[v]).matrix.max_abs());
        }
    }
    let complete = is_complete_lattice(modes, p_grid);
    let label = if complete { "complete" } else { "incomplete basis" }.to_string();
    Ok(FieldCar { residual, phi_phi_residual, complete, label })
}

pub fn vacuum(modes: &ModeSet) -> Vec<C64> {
    basis_state(modes, &[])
}

/// Occupation-basis vector with the given modes filled.
pub fn basis_state(modes: &ModeSet, occupied: &[usize]) -> Vec<C64> {
    let mut v = vec![ZERO; modes.fock_dim()];
    let bits = occupied.iter().fold(0usize, |b, i| b | (1 << i));
    v[bits] = ONE;
    v
}

/// `(⟨T⟩, ⟨T²⟩ − ⟨T⟩²)` in the normalised state.
pub fn event_statistics(state: &[C64], t_op: &FockOperator) -> Result<(f64, f64)> {
    if state.len() != t_op.dim() {
        return Err(Error::DimensionMismatch { expected: t_op.dim(), found: state.len() });
    }
    let norm: f64 = state.iter().map(|z| z.norm_sqr()).sum();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::ZeroNormState);
    }
    let t_psi = t_op.apply(state)?;
    let mean = state.iter().zip(&t_psi).map(|(a, b)| a.conj() * b).sum::<C64>().re / norm;
    let second = t_psi.iter().map(|z| z.norm_sqr()).sum::<f64>() / norm;
    Ok((mean, (second - mean * mean).max(0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> MomentumLattice {
        MomentumLattice::new(0.5, 0.3, n).unwrap()
    }

    #[test]
    fn single_mode_ladder() {
        let modes = ModeSet::new(vec![ModeLabel::new(Species::ElectronEvent, 1.0, Spin::Up, 0.0).unwrap()]).unwrap();
        let ops = build_ladder_ops(&modes).unwrap();
        let a = ops.annihilators[0].matrix();
        assert_eq!(a.as_slice(), &[ZERO, ONE, ZERO, ZERO]);
        assert_eq!(car_residual(&ops), 0.0);
        assert_eq!(ops.creators[0], ops.annihilators[0].adjoint());
    }

    #[test]
    fn eight_mode_car_is_exact() {
        let g = grid(5);
        let modes = ModeSet::lattice(&[1, 2], &Spin::BOTH, &Species::BOTH, &g, 0.5, false).unwrap();
        assert_eq!(modes.len(), 8);
        assert_eq!(car_residual(&build_ladder_ops(&modes).unwrap()), 0.0);
    }

    #[test]
    fn canonical_order_and_validation() {
        let e = |x| ModeLabel::new(Species::ElectronEvent, x, Spin::Down, 0.0).unwrap();
        let p = ModeLabel::new(Species::PositronEvent, -3.0, Spin::Up, 0.0).unwrap();
        let set = ModeSet::new(vec![p, e(2.0), e(-1.0)]).unwrap();
        assert_eq!(set.modes()[0].x, -1.0);
        assert_eq!(set.modes()[2].species, Species::PositronEvent);
        assert!(matches!(ModeSet::new(vec![e(1.0), e(1.0)]), Err(Error::DuplicateMode(_))));
        let many: Vec<ModeLabel> = (1..=15).map(|k| e(k as f64)).collect();
        assert!(matches!(ModeSet::new(many), Err(Error::ModeCapExceeded { .. })));
        assert!(ModeLabel::new(Species::ElectronEvent, 0.0, Spin::Up, 1.0).is_err());
    }

    #[test]
    fn quantized_arrival_time_spectrum() {
        // T_1 = 1.25 from x = 1, τ = 0.75
        let m = |sp, s| ModeLabel::new(sp, 1.0, s, 0.75).unwrap();
        let set = ModeSet::new(vec![
            m(Species::ElectronEvent, Spin::Up),
            m(Species::ElectronEvent, Spin::Down),
            m(Species::PositronEvent, Spin::Up),
            m(Species::PositronEvent, Spin::Down),
        ])
        .unwrap();
        let t = build_t_quantized(&set).unwrap();
        assert!(t.is_diagonal());
        let d = t.real_diagonal();
        assert_eq!(d[0], -2.5);
        assert_eq!(d[15], 2.5);
        assert_eq!(d[1], 1.25 - 2.5);
        for (bits, v) in d.iter().enumerate() {
            assert_eq!(*v, 1.25 * bits.count_ones() as f64 - 2.5);
        }
        assert_eq!(t.hermiticity_defect(), 0.0);
    }

    #[test]
    fn quantized_arrival_time_is_additive() {
        let a = ModeSet::new(vec![
            ModeLabel::new(Species::ElectronEvent, 1.0, Spin::Up, 0.3).unwrap(),
            ModeLabel::new(Species::ElectronEvent, 2.0, Spin::Up, 0.3).unwrap(),
        ])
        .unwrap();
        let b = ModeSet::new(vec![
            ModeLabel::new(Species::PositronEvent, 3.0, Spin::Down, 0.3).unwrap(),
            ModeLabel::new(Species::PositronEvent, 4.0, Spin::Down, 0.3).unwrap(),
        ])
        .unwrap();
        let union = ModeSet::new(a.modes().iter().chain(b.modes()).copied().collect()).unwrap();
        let ta = build_t_quantized(&a).unwrap();
        let tb = build_t_quantized(&b).unwrap();
        let id = ComplexMatrix::identity(4);
        let sum = &tb.matrix().kron(&id) + &id.kron(ta.matrix());
        assert!((&sum - build_t_quantized(&union).unwrap().matrix()).max_abs() <= 1e-14);
    }

    #[test]
    fn two_mode_quadratic_form() {
        let g = grid(3);
        let modes = ModeSet::lattice(&[1], &[Spin::Up], &Species::BOTH, &g, 0.8, false).unwrap();
        let q = quadratic_form_t(&modes, &g).unwrap();
        assert!(q.residual <= 1e-10, "{}", q.residual);
        assert!(q.sigma_determined);
        assert_eq!(q.sigma, -1.0);
        assert!(q.gram_defect <= 1e-12);
    }

    #[test]
    fn eight_mode_quadratic_form() {
        let g = grid(5);
        let modes = ModeSet::lattice(&[1, 2], &Spin::BOTH, &Species::BOTH, &g, 0.4, false).unwrap();
        let q = quadratic_form_t(&modes, &g).unwrap();
        assert!(q.residual <= 1e-10);
        assert_eq!(q.sigma, -1.0);
    }

    #[test]
    fn empty_quadratic_form_vanishes() {
        let q = quadratic_form_t(&ModeSet::empty(), &grid(4)).unwrap();
        assert_eq!(q.t_quad.matrix().max_abs(), 0.0);
        assert!(!q.sigma_determined);
    }

    #[test]
    fn off_lattice_and_aliased_sets_are_rejected() {
        let g = grid(3);
        let off = ModeSet::new(vec![ModeLabel::new(Species::ElectronEvent, 1.234, Spin::Up, 0.0).unwrap()]).unwrap();
        assert!(matches!(quadratic_form_t(&off, &g), Err(Error::OffLattice { .. })));
        let aliased = ModeSet::lattice(&[1, 4], &[Spin::Up], &[Species::ElectronEvent], &g, 0.0, false).unwrap();
        assert!(matches!(quadratic_form_t(&aliased, &g), Err(Error::AliasedModes(_))));
        let g4 = grid(4);
        let cross = ModeSet::lattice(&[2], &[Spin::Up], &Species::BOTH, &g4, 0.0, false).unwrap();
        assert!(matches!(quadratic_form_t(&cross, &g4), Err(Error::AliasedModes(_))));
    }

    #[test]
    fn complete_lattice_field_car_is_exact() {
        let g = grid(2);
        let modes = ModeSet::complete_lattice(&g, 0.6).unwrap();
        assert_eq!(modes.len(), 8);
        let r = field_car_check(&modes, &g).unwrap();
        assert!(r.complete);
        assert!(r.residual <= 1e-12, "{}", r.residual);
        assert_eq!(r.phi_phi_residual, 0.0);
    }

    #[test]
    fn incomplete_set_is_flagged() {
        let g = grid(2);
        let modes = ModeSet::lattice(&[1], &[Spin::Up], &[Species::ElectronEvent], &g, 0.6, false).unwrap();
        let r = field_car_check(&modes, &g).unwrap();
        assert!(!r.complete);
        assert_eq!(r.label, "incomplete basis");
        assert!(r.residual > 0.1);
    }

    #[test]
    fn lattice_from_grid() {
        let g = Grid1D::momentum(0.5, 1.1, 3, 1.0).unwrap();
        let l = MomentumLattice::from_grid(&g).unwrap();
        assert_eq!(l.len(), 3);
        assert!((l.spacing() - 0.3).abs() < 1e-15);
        assert!(MomentumLattice::from_grid(&Grid1D::energy(0.0, 1.0, 3).unwrap()).is_err());
        assert!(MomentumLattice::new(0.0, 0.0, 2).is_err());
    }

    #[test]
    fn statistics() {
        let set = ModeSet::new(vec![
            ModeLabel::new(Species::ElectronEvent, 1.0, Spin::Up, 0.0).unwrap(),
            ModeLabel::new(Species::PositronEvent, 2.0, Spin::Up, 0.0).unwrap(),
        ])
        .unwrap();
        let t = build_t_quantized(&set).unwrap();
        let (mean, var) = event_statistics(&vacuum(&set), &t).unwrap();
        assert_eq!((mean, var), (-3.0, 0.0));
        let mut psi = vacuum(&set);
        psi[1] = ONE;
        let s = 1.0 / 2f64.sqrt();
        let psi: Vec<C64> = psi.iter().map(|z| z * s).collect();
        let (mean, var) = event_statistics(&psi, &t).unwrap();
        assert!((mean - (-3.0 + 0.5)).abs() < 1e-15);
        assert!((var - 0.25).abs() < 1e-15);
        assert_eq!(event_statistics(&[ZERO; 4], &t), Err(Error::ZeroNormState));
        let (_, var) = event_statistics(&basis_state(&set, &[0, 1]), &t).unwrap();
        assert_eq!(var, 0.0);
    }
}
