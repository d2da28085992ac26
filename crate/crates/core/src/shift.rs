//! The energy-shift equation `−i∂φ/∂ε = T̂φ`, its elementary solutions,
//! propagation in `ε` and the c-number action and density functionals.
//!
//! Fields live on a rectangular `(ε, p)` grid stored ε-major. With the proper
//! time a c-number the generator is `T̂ = −(α₁x̂ + βτ)`, `x̂ = i∂_p`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dirac::{basis, xi_spinor, zeta_spinor, EventKinematics, Spin, Spinor4};
use crate::error::{Error, Result};
use crate::grid::{Axis, Grid1D, GridOperator, GridSpinorField};
use crate::linalg::{expm, C64, I, ZERO};

/// Whether the `p`-independent amplitude `(x²/(x²+τ²))^{1/4}` is carried.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShiftForm {
    WithAmplitude,
    CNumberTau,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ArrivalBranch {
    /// `ζ(x,s)e^{−i(εT_x + px)}`, generator eigenvalue `−T_x`.
    Negative,
    /// `ξ(x,s)e^{+i(εT_x + px)}`, generator eigenvalue `+T_x`.
    Positive,
}

impl ArrivalBranch {
    pub fn sign(self) -> f64 {
        match self {
            ArrivalBranch::Negative => -1.0,
            ArrivalBranch::Positive => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Species {
    ElectronEvent,
    PositronEvent,
}

impl Species {
    pub const BOTH: [Species; 2] = [Species::ElectronEvent, Species::PositronEvent];

    pub fn branch(self) -> ArrivalBranch {
        match self {
            Species::ElectronEvent => ArrivalBranch::Negative,
            Species::PositronEvent => ArrivalBranch::Positive,
        }
    }
}

fn inv_sqrt_2pi() -> f64 {
    1.0 / (2.0 * PI).sqrt()
}

fn branch_spinor(branch: ArrivalBranch, e: &EventKinematics, s: Spin) -> Result<Spinor4> {
    match branch {
        ArrivalBranch::Negative => zeta_spinor(e, s),
        ArrivalBranch::Positive => xi_spinor(e, s),
    }
}

pub fn elementary_solution(form: ShiftForm, branch: ArrivalBranch, e: &EventKinematics, s: Spin, eps: f64, p: f64) -> Result<Spinor4> {
    let amp = match form {
        ShiftForm::WithAmplitude => (e.x() * e.x() / (e.arrival() * e.arrival())).powf(0.25),
        ShiftForm::CNumberTau => 1.0,
    };
    let spinor = branch_spinor(branch, e, s)?;
    let phase = branch.sign() * (eps * e.arrival() + p * e.x());
    Ok(spinor * C64::from_polar(amp * inv_sqrt_2pi(), phase))
}

/// `‖−i∂_εφ − T̂φ‖` for an elementary solution with both derivatives taken
/// from the closed form.
pub fn elementary_generator_residual(form: ShiftForm, branch: ArrivalBranch, e: &EventKinematics, s: Spin, eps: f64, p: f64) -> Result<f64> {
    let phi = elementary_solution(form, branch, e, s, eps, p)?;
    let sign = branch.sign();
    // ∂_ε φ = i·sign·T φ, i∂_p φ = −sign·x φ
    let lhs = phi * (-I * I * sign * e.arrival());
    let x_phi = phi * (-sign * e.x());
    let b = basis();
    let t_phi = (x_phi.transform(&b.alpha1) + phi.transform(&b.beta) * e.tau()) * (-1.0);
    Ok((lhs - t_phi).norm())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftField {
    eps_grid: Grid1D,
    p_grid: Grid1D,
    values: Vec<Spinor4>,
}

impl ShiftField {
    pub fn new(eps_grid: Grid1D, p_grid: Grid1D, values: Vec<Spinor4>) -> Result<Self> {
        check_axes(&eps_grid, &p_grid)?;
        let n = eps_grid.len() * p_grid.len();
        if values.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: values.len() });
        }
        Ok(ShiftField { eps_grid, p_grid, values })
    }

    pub fn from_fn(eps_grid: Grid1D, p_grid: Grid1D, f: impl Fn(f64, f64) -> Result<Spinor4>) -> Result<Self> {
        check_axes(&eps_grid, &p_grid)?;
        let mut values = Vec::with_capacity(eps_grid.len() * p_grid.len());
        for eps in eps_grid.points() {
            for p in p_grid.points() {
                values.push(f(eps, p)?);
            }
        }
        Ok(ShiftField { eps_grid, p_grid, values })
    }

    pub fn zeros(eps_grid: Grid1D, p_grid: Grid1D) -> Result<Self> {
        Self::from_fn(eps_grid, p_grid, |_, _| Ok(Spinor4::ZERO))
    }

    pub fn elementary(form: ShiftForm, branch: ArrivalBranch, e: &EventKinematics, s: Spin, eps_grid: Grid1D, p_grid: Grid1D) -> Result<Self> {
        Self::from_fn(eps_grid, p_grid, |eps, p| elementary_solution(form, branch, e, s, eps, p))
    }

    pub fn eps_grid(&self) -> &Grid1D {
        &self.eps_grid
    }

    pub fn p_grid(&self) -> &Grid1D {
        &self.p_grid
    }

    pub fn values(&self) -> &[Spinor4] {
        &self.values
    }

    pub fn get(&self, i_eps: usize, j_p: usize) -> Spinor4 {
        self.values[i_eps * self.p_grid.len() + j_p]
    }

    /// Momentum profile at one `ε`.
    pub fn slice(&self, i_eps: usize) -> GridSpinorField {
        let n = self.p_grid.len();
        GridSpinorField::new(self.p_grid, self.values[i_eps * n..(i_eps + 1) * n].to_vec()).expect("slice length matches grid")
    }

    /// `self + c·other` on the same grids.
    pub fn add_scaled(&self, c: C64, other: &ShiftField) -> Result<ShiftField> {
        if self.eps_grid != other.eps_grid || self.p_grid != other.p_grid {
            return Err(Error::InvalidGrid("fields live on different grids".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| *a + *b * c).collect();
        Ok(ShiftField { eps_grid: self.eps_grid, p_grid: self.p_grid, values })
    }

    /// `(∂_εφ, ∂_pφ)` by central differences at an interior point.
    fn central_derivatives(&self, i: usize, j: usize) -> (Spinor4, Spinor4) {
        let he = self.eps_grid.spacing();
        let hp = self.p_grid.spacing();
        let de = (self.get(i + 1, j) - self.get(i - 1, j)) * (1.0 / (2.0 * he));
        let dp = (self.get(i, j + 1) - self.get(i, j - 1)) * (1.0 / (2.0 * hp));
        (de, dp)
    }

    fn require_interior(&self) -> Result<()> {
        for g in [&self.eps_grid, &self.p_grid] {
            if g.len() < 3 {
                return Err(Error::GridTooSmall { min: 3, got: g.len() });
            }
        }
        Ok(())
    }
}

fn check_axes(eps_grid: &Grid1D, p_grid: &Grid1D) -> Result<()> {
    if eps_grid.axis() != Axis::Energy || p_grid.axis() != Axis::Momentum {
        return Err(Error::InvalidGrid("shift fields need an energy axis and a momentum axis".into()));
    }
    Ok(())
}

/// `max ‖−i∂_εφ + (α₁x̂ + βτ)φ‖` over interior points, central differences
/// in both directions.
pub fn shift_equation_residual(field: &ShiftField, tau: f64) -> Result<f64> {
    field.require_interior()?;
    let b = basis();
    let mut worst: f64 = 0.0;
    for i in 1..field.eps_grid.len() - 1 {
        for j in 1..field.p_grid.len() - 1 {
            let (de, dp) = field.central_derivatives(i, j);
            let x_phi = dp * I;
            let r = de * (-I) + x_phi.transform(&b.alpha1) + field.get(i, j).transform(&b.beta) * tau;
            worst = worst.max(r.norm());
        }
    }
    Ok(worst)
}

/// `e^{iT̂Δε}`.
pub fn shift_propagator(t_op: &GridOperator, delta_eps: f64) -> Result<GridOperator> {
    if !delta_eps.is_finite() || !t_op.matrix().is_finite() {
        return Err(Error::NonFinite("shift generator"));
    }
    let u = expm(&t_op.matrix().scale(C64::new(0.0, delta_eps)))?;
    GridOperator::new(*t_op.grid(), u)
}

pub fn shift_evolve(initial: &GridSpinorField, t_op: &GridOperator, delta_eps: f64) -> Result<GridSpinorField> {
    if initial.grid().len() * 4 != t_op.dim() {
        return Err(Error::DimensionMismatch { expected: t_op.dim(), found: initial.grid().len() * 4 });
    }
    shift_propagator(t_op, delta_eps)?.apply(initial)
}

/// Trapezoid weights over `len` equally spaced points.
fn trapezoid_weight(k: usize, len: usize, h: f64) -> f64 {
    if k == 0 || k + 1 == len {
        0.5 * h
    } else {
        h
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionDensities {
    /// Interior `ε` values (edges dropped).
    pub eps: Vec<f64>,
    /// Interior momenta.
    pub momenta: Vec<f64>,
    /// Trapezoid integral of the Lagrange density over the interior block.
    pub action: C64,
    /// `Γ = φ†[i∂_ε − α₁x̂ − βτ]φ`, ε-major over the interior block.
    pub lagrange: Vec<C64>,
    /// `T° = φ†(α₁x̂ + βτ)φ`, ε-major over the interior block.
    pub time_density: Vec<C64>,
    /// `∫T° dp` per interior `ε`.
    pub charge: Vec<C64>,
    /// `∫φ†T̂φ dp = −∫T° dp` per interior `ε`.
    pub generator_expectation: Vec<C64>,
    /// `∫|φ|² dp` per interior `ε`.
    pub norm: Vec<f64>,
    /// `max |∂Γ/∂(∂_εφ) − iφ†|`, the derivative taken by perturbing the
    /// velocity slot of the density.
    pub momentum_residual: f64,
}

impl ActionDensities {
    /// `max_ε |Q(ε) − Q(ε₀)|`.
    pub fn charge_drift(&self) -> f64 {
        let q0 = self.charge.first().copied().unwrap_or(ZERO);
        self.charge.iter().map(|q| (q - q0).norm()).fold(0.0, f64::max)
    }
}

/// `φ†[iφ_ε − α₁x̂φ − βτφ]` from the point value and its derivatives.
fn lagrange_density(phi: &Spinor4, phi_eps: &Spinor4, phi_p: &Spinor4, tau: f64) -> C64 {
    let b = basis();
    let x_phi = *phi_p * I;
    let inner = *phi_eps * I - x_phi.transform(&b.alpha1) - phi.transform(&b.beta) * tau;
    phi.dot(&inner)
}

pub fn action_and_densities(field: &ShiftField, tau: f64) -> Result<ActionDensities> {
    field.require_interior()?;
    let b = basis();
    let (ne, np) = (field.eps_grid.len(), field.p_grid.len());
    let (he, hp) = (field.eps_grid.spacing(), field.p_grid.spacing());
    let (ie, ip) = (ne - 2, np - 2);
    let eps: Vec<f64> = (1..ne - 1).map(|i| field.eps_grid.point(i)).collect();
    let momenta: Vec<f64> = (1..np - 1).map(|j| field.p_grid.point(j)).collect();
    let mut lagrange = Vec::with_capacity(ie * ip);
    let mut time_density = Vec::with_capacity(ie * ip);
    let mut charge = Vec::with_capacity(ie);
    let mut norm = Vec::with_capacity(ie);
    let mut action = ZERO;
    let mut momentum_residual: f64 = 0.0;
    for (a, i) in (1..ne - 1).enumerate() {
        let mut q = ZERO;
        let mut nrm = 0.0;
        for (c, j) in (1..np - 1).enumerate() {
            let phi = field.get(i, j);
            let (de, dp) = field.central_derivatives(i, j);
            let gamma = lagrange_density(&phi, &de, &dp, tau);
            let x_phi = dp * I;
            let t_circ = phi.dot(&(x_phi.transform(&b.alpha1) + phi.transform(&b.beta) * tau));
            let wp = trapezoid_weight(c, ip, hp);
            action += gamma * (wp * trapezoid_weight(a, ie, he));
            q += t_circ * wp;
            nrm += phi.norm_sqr() * wp;
            lagrange.push(gamma);
            time_density.push(t_circ);
            for k in 0..4 {
                let mut bumped = de;
                bumped.0[k] += C64::new(1.0, 0.0);
                let pi_k = lagrange_density(&phi, &bumped, &dp, tau) - gamma;
                momentum_residual = momentum_residual.max((pi_k - I * phi[k].conj()).norm());
            }
        }
        charge.push(q);
        norm.push(nrm);
    }
    let generator_expectation = charge.iter().map(|q| -q).collect();
    Ok(ActionDensities { eps, momenta, action, lagrange, time_density, charge, generator_expectation, norm, momentum_residual })
}

/// Elementary solution that satisfies the central-difference equations
/// exactly: the plane-wave numbers seen by the stencils are
/// `x_h = sin(x h_p)/h_p` and `sin(ω h_ε)/h_ε = √(x_h² + τ²)`.
pub fn discrete_mode(species: Species, e: &EventKinematics, s: Spin, eps_grid: Grid1D, p_grid: Grid1D) -> Result<ShiftField> {
    check_axes(&eps_grid, &p_grid)?;
    let (hp, he) = (p_grid.spacing(), eps_grid.spacing());
    let x_h = (e.x() * hp).sin() / hp;
    let discrete = EventKinematics::new(x_h, e.tau())?;
    let arg = discrete.arrival() * he;
    if arg >= 1.0 {
        return Err(Error::InvalidParameter(format!("energy step {he} too coarse for T = {}", discrete.arrival())));
    }
    let omega = arg.asin() / he;
    let branch = species.branch();
    let spinor = branch_spinor(branch, &discrete, s)?;
    ShiftField::from_fn(eps_grid, p_grid, |eps, p| {
        Ok(spinor * C64::from_polar(inv_sqrt_2pi(), branch.sign() * (omega * eps + e.x() * p)))
    })
}

/// Electron-event case of [`discrete_mode`].
pub fn discrete_elementary_solution(e: &EventKinematics, s: Spin, eps_grid: Grid1D, p_grid: Grid1D) -> Result<ShiftField> {
    discrete_mode(Species::ElectronEvent, e, s, eps_grid, p_grid)
}

/// c-number coefficient of one event mode in a superposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeAmplitude {
    pub species: Species,
    pub x: f64,
    pub spin: Spin,
    pub coefficient: C64,
}

impl ModeAmplitude {
    pub fn new(species: Species, x: f64, spin: Spin, coefficient: C64) -> Result<Self> {
        if x == 0.0 || !x.is_finite() {
            return Err(Error::InvalidKinematics(format!("mode position {x} must be finite and nonzero")));
        }
        Ok(ModeAmplitude { species, x, spin, coefficient })
    }
}

/// `Σ c·φ_mode` with electron modes on the negative-arrival branch and
/// positron modes on the positive-arrival branch.
pub fn superpose(modes: &[ModeAmplitude], tau: f64, form: ShiftForm, eps_grid: Grid1D, p_grid: Grid1D) -> Result<ShiftField> {
    superpose_with(modes, tau, eps_grid, p_grid, |m, e| ShiftField::elementary(form, m.species.branch(), e, m.spin, eps_grid, p_grid))
}

/// [`superpose`] built from [`discrete_mode`] solutions.
pub fn superpose_discrete(modes: &[ModeAmplitude], tau: f64, eps_grid: Grid1D, p_grid: Grid1D) -> Result<ShiftField> {
    superpose_with(modes, tau, eps_grid, p_grid, |m, e| discrete_mode(m.species, e, m.spin, eps_grid, p_grid))
}

fn superpose_with(
    modes: &[ModeAmplitude],
    tau: f64,
    eps_grid: Grid1D,
    p_grid: Grid1D,
    build: impl Fn(&ModeAmplitude, &EventKinematics) -> Result<ShiftField>,
) -> Result<ShiftField> {
    let mut out = ShiftField::zeros(eps_grid, p_grid)?;
    for m in modes {
        let e = EventKinematics::new(m.x, tau)?;
        out = out.add_scaled(m.coefficient, &build(m, &e)?)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convergence::fit_order;
    use crate::grid::{build_t_dual_momentum, build_t_dual_position, generic_spinor, bump_probe};

    fn ev(x: f64, tau: f64) -> EventKinematics {
        EventKinematics::new(x, tau).unwrap()
    }

    fn grids(n: usize, h: f64) -> (Grid1D, Grid1D) {
        let span = h * (n - 1) as f64;
        (Grid1D::energy(-0.5 * span, 0.5 * span, n).unwrap(), Grid1D::momentum(0.5, 0.5 + span, n, 1.0).unwrap())
    }

    #[test]
    fn reference_value_massless() {
        let v = elementary_solution(ShiftForm::CNumberTau, ArrivalBranch::Negative, &ev(1.0, 0.0), Spin::Up, 1.0, 1.0).unwrap();
        let c = C64::from_polar(1.0 / (2.0 * PI).sqrt() / 2f64.sqrt(), -2.0);
        let want = [c, ZERO, c, ZERO];
        for a in 0..4 {
            assert!((v[a] - want[a]).norm() < 1e-15);
        }
    }

    #[test]
    fn zero_energy_parameter_gives_static_phase() {
        let e = ev(0.8, 0.3);
        for branch in [ArrivalBranch::Negative, ArrivalBranch::Positive] {
            let v = elementary_solution(ShiftForm::CNumberTau, branch, &e, Spin::Down, 0.0, 1.7).unwrap();
            let spinor = branch_spinor(branch, &e, Spin::Down).unwrap();
            let want = spinor * C64::from_polar(1.0 / (2.0 * PI).sqrt(), branch.sign() * 1.7 * 0.8);
            assert!((v - want).max_abs() < 1e-15);
        }
    }

    #[test]
    fn analytic_generator_relation_is_exact() {
        for branch in [ArrivalBranch::Negative, ArrivalBranch::Positive] {
            for form in [ShiftForm::CNumberTau, ShiftForm::WithAmplitude] {
                for s in Spin::BOTH {
                    let r = elementary_generator_residual(form, branch, &ev(1.3, -0.7), s, 0.4, 2.2).unwrap();
                    assert!(r < 1e-14);
                }
            }
        }
    }

    #[test]
    fn amplitude_form_carries_constant_factor() {
        let e = ev(1.0, 2.0);
        let a = elementary_solution(ShiftForm::WithAmplitude, ArrivalBranch::Positive, &e, Spin::Up, 0.3, 1.0).unwrap();
        let b = elementary_solution(ShiftForm::CNumberTau, ArrivalBranch::Positive, &e, Spin::Up, 0.3, 1.0).unwrap();
        assert!((a - b * 5f64.powf(-0.25)).max_abs() < 1e-15);
    }

    #[test]
    fn pde_residual_converges_at_second_order() {
        let e = ev(1.0, 0.6);
        let mut steps = vec![];
        let mut errs = vec![];
        for (n, h) in [(51, 0.08), (101, 0.04), (201, 0.02)] {
            let (ge, gp) = grids(n, h);
            let f = ShiftField::elementary(ShiftForm::CNumberTau, ArrivalBranch::Negative, &e, Spin::Up, ge, gp).unwrap();
            steps.push(h);
            errs.push(shift_equation_residual(&f, 0.6).unwrap());
        }
        assert!(errs[2] <= 5e-3, "{errs:?}");
        assert!((errs[1] / errs[2] - 4.0).abs() < 0.8);
        assert!((fit_order(&steps, &errs) - 2.0).abs() < 0.3);
        let (ge, gp) = grids(11, 0.1);
        assert_eq!(shift_equation_residual(&ShiftField::zeros(ge, gp).unwrap(), 0.6).unwrap(), 0.0);
    }

    #[test]
    fn propagation_is_identity_at_zero_and_composes() {
        let g = Grid1D::momentum(0.5, 3.5, 41, 1.0).unwrap();
        let t = build_t_dual_momentum(&g, 0.7).unwrap();
        let probe = bump_probe(g, 2.0, 1.2, generic_spinor());
        let same = shift_evolve(&probe, &t, 0.0).unwrap();
        assert_eq!(same, probe);
        let two_step = shift_evolve(&shift_evolve(&probe, &t, 0.3).unwrap(), &t, 0.45).unwrap();
        let one_step = shift_evolve(&probe, &t, 0.75).unwrap();
        let diff = two_step.values().iter().zip(one_step.values()).map(|(a, b)| (*a - *b).max_abs()).fold(0.0, f64::max);
        assert!(diff <= 1e-10, "{diff}");
    }

    #[test]
    fn eigen_probe_picks_up_a_pure_phase() {
        let gx = Grid1D::position(0.5, 2.5, 21, 1.0).unwrap();
        let tau = 0.75;
        let t = build_t_dual_position(&gx, tau).unwrap();
        let j = 7;
        let x = gx.point(j);
        let e = ev(x, tau);
        let zeta = zeta_spinor(&e, Spin::Down).unwrap();
        let mut values = vec![Spinor4::ZERO; gx.len()];
        values[j] = zeta;
        let probe = GridSpinorField::new(gx, values).unwrap();
        let delta = 1.7;
        let out = shift_evolve(&probe, &t, delta).unwrap();
        let phase = C64::from_polar(1.0, -e.arrival() * delta);
        for (k, s) in out.values().iter().enumerate() {
            let want = if k == j { zeta * phase } else { Spinor4::ZERO };
            assert!((*s - want).max_abs() <= 1e-10);
        }
    }

    #[test]
    fn charge_is_conserved_and_matches_eigenvalue() {
        let (ge, gp) = grids(81, 0.025);
        let e = ev(1.0, 0.5);
        let f = ShiftField::elementary(ShiftForm::CNumberTau, ArrivalBranch::Negative, &e, Spin::Up, ge, gp).unwrap();
        let d = action_and_densities(&f, 0.5).unwrap();
        assert!(d.charge_drift() <= 1e-6);
        let h2 = gp.spacing().powi(2);
        for (q, n) in d.generator_expectation.iter().zip(&d.norm) {
            assert!((q + e.arrival() * n).norm() <= h2 * n);
        }
        assert!(d.momentum_residual <= 1e-15);
    }

    #[test]
    fn mixed_superposition_keeps_charge_constant() {
        // Electron events at x and positron events at −x have vanishing
        // spinor overlaps, so every ε-dependent cross term cancels.
        let (ge, gp) = grids(61, 0.03);
        let c = [C64::new(0.6, 0.1), C64::new(-0.2, 0.7), C64::new(0.3, 0.0), C64::new(0.0, -0.4)];
        let modes = [
            ModeAmplitude::new(Species::ElectronEvent, 1.2, Spin::Up, c[0]).unwrap(),
            ModeAmplitude::new(Species::PositronEvent, -1.2, Spin::Down, c[1]).unwrap(),
            ModeAmplitude::new(Species::ElectronEvent, 1.2, Spin::Down, c[2]).unwrap(),
            ModeAmplitude::new(Species::PositronEvent, -1.2, Spin::Up, c[3]).unwrap(),
        ];
        let f = superpose_discrete(&modes, 0.4, ge, gp).unwrap();
        assert!(action_and_densities(&f, 0.4).unwrap().charge_drift() <= 1e-6);
        assert!(shift_equation_residual(&f, 0.4).unwrap() < 1e-13);
        // The closed-form modes satisfy the difference equations only to O(h²).
        let g = superpose(&modes, 0.4, ShiftForm::CNumberTau, ge, gp).unwrap();
        let r = shift_equation_residual(&g, 0.4).unwrap();
        assert!(r > 1e-6 && r < 1e-2);
    }

    #[test]
    fn zero_field_has_zero_action() {
        let (ge, gp) = grids(9, 0.1);
        let d = action_and_densities(&ShiftField::zeros(ge, gp).unwrap(), 1.0).unwrap();
        assert_eq!(d.action, ZERO);
        assert!(d.lagrange.iter().chain(&d.time_density).all(|z| *z == ZERO));
    }

    #[test]
    fn discrete_solution_is_stationary_to_second_order_in_perturbation() {
        let (ge, gp) = grids(41, 0.05);
        let e = ev(1.1, 0.4);
        let on_shell = discrete_elementary_solution(&e, Spin::Up, ge, gp).unwrap();
        assert!(shift_equation_residual(&on_shell, 0.4).unwrap() < 1e-13);
        let eta = ShiftField::from_fn(ge, gp, |eps, p| {
            let r2 = (eps / 0.5).powi(2) + ((p - 1.5) / 0.5).powi(2);
            Ok(if r2 < 1.0 { generic_spinor() * (1.0 - r2).powi(4) } else { Spinor4::ZERO })
        })
        .unwrap();
        let a0 = action_and_densities(&on_shell, 0.4).unwrap().action;
        let deltas = [1e-1, 1e-2, 1e-3, 1e-4];
        let changes: Vec<f64> = deltas
            .iter()
            .map(|d| (action_and_densities(&on_shell.add_scaled(C64::new(*d, 0.0), &eta).unwrap(), 0.4).unwrap().action - a0).norm())
            .collect();
        let order = fit_order(&deltas, &changes);
        assert!((order - 2.0).abs() <= 0.2, "{changes:?}");
    }

    #[test]
    fn axes_are_validated() {
        let gp = Grid1D::momentum(0.5, 1.0, 5, 1.0).unwrap();
        assert!(ShiftField::zeros(gp, gp).is_err());
        assert!(ModeAmplitude::new(Species::ElectronEvent, 0.0, Spin::Up, ZERO).is_err());
    }
}
