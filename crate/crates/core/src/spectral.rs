//! Momentum-space eigenfunctions of the relativistic arrival-time operator
//! and the pointwise checks of the eigenvalue relation.
//!
//! Branch `Plus` is `f(p)·u(p,s)·e^{−ipx}/√(2π)` with local eigenvalue
//! `−xE_p/p`; branch `Minus` is `f(p)·v(p,s)·e^{+ipx}/√(2π)` with claimed
//! eigenvalue `+xE_p/p`. Here `f(p) = (p²/(p²+m²))^{1/4} = √(|p|/E_p)`.
//!
//! The eigenvalue depends on `p`, so every check is a local relation at each
//! grid point rather than a matrix eigenproblem.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dirac::{basis, u_spinor, v_spinor, xi_spinor, zeta_spinor, EventKinematics, MomentumKinematics, Spin, Spinor4};
use crate::error::{Error, Result};
use crate::grid::{build_t_dirac_momentum, Axis, Grid1D, GridSpinorField};
use crate::linalg::{C64, I};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    /// `u(p,s)e^{−ipx}`, eigenvalue `−T_x`.
    Plus,
    /// `v(p,s)e^{+ipx}`, eigenvalue `+T_x`.
    Minus,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Plus, Branch::Minus];

    /// Sign of the stated eigenvalue in units of `xE_p/p`.
    pub fn eigen_sign(self) -> f64 {
        match self {
            Branch::Plus => -1.0,
            Branch::Minus => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiffMode {
    /// Closed-form product-rule derivative.
    Analytic,
    /// Grid sampling plus the finite-difference operator.
    FiniteDifference,
}

/// `(value, d/dp)` of a spinor-valued function.
type Jet = (Spinor4, Spinor4);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToaEigenfunction {
    pub branch: Branch,
    pub x: f64,
    pub spin: Spin,
    pub mass: f64,
}

fn inv_sqrt_2pi() -> f64 {
    1.0 / (2.0 * PI).sqrt()
}

/// `(f, f′)` for `f = (p²/(p²+m²))^{1/4}`.
pub fn amplitude_factor(mass: f64, p: f64) -> (f64, f64) {
    let e2 = p * p + mass * mass;
    let f = (p * p / e2).powf(0.25);
    (f, f * mass * mass / (2.0 * p * e2))
}

/// Derivative of `u(p,s)` (or `v` when `swapped`) by differentiating the
/// normalisation and the lower-block ratio directly.
fn spinor_jet(k: &MomentumKinematics, s: Spin, swapped: bool) -> Jet {
    let (m, p, e) = (k.mass(), k.momentum(), k.energy());
    let n = ((m + e) / (2.0 * e)).sqrt();
    let dn = -m * p / (4.0 * n * e.powi(3));
    let g = p / (m + e);
    let dg = m / (e * (m + e));
    let sign = s.sigma1_sign();
    let eta = s.eta();
    let block = |big: f64, small: f64| {
        let b = [eta[0] * big, eta[1] * big];
        let sm = [eta[0] * (sign * small), eta[1] * (sign * small)];
        if swapped {
            Spinor4([sm[0], sm[1], b[0], b[1]])
        } else {
            Spinor4([b[0], b[1], sm[0], sm[1]])
        }
    };
    let value = block(n, n * g);
    let deriv = block(dn, dn * g + n * dg);
    (value, deriv)
}

impl ToaEigenfunction {
    pub fn new(branch: Branch, x: f64, spin: Spin, mass: f64) -> Result<Self> {
        if !(x.is_finite() && mass.is_finite()) {
            return Err(Error::NonFinite("eigenfunction parameters"));
        }
        if mass < 0.0 {
            return Err(Error::InvalidKinematics(format!("mass {mass} is negative")));
        }
        Ok(ToaEigenfunction { branch, x, spin, mass })
    }

    fn kinematics(&self, p: f64) -> Result<MomentumKinematics> {
        MomentumKinematics::new(self.mass, p)
    }

    /// `φ(p)`.
    pub fn eval(&self, p: f64) -> Result<Spinor4> {
        let k = self.kinematics(p)?;
        let (f, _) = amplitude_factor(self.mass, p);
        let (spinor, phase) = match self.branch {
            Branch::Plus => (u_spinor(&k, self.spin), -p * self.x),
            Branch::Minus => (v_spinor(&k, self.spin), p * self.x),
        };
        Ok(spinor * (C64::from_polar(f * inv_sqrt_2pi(), phase)))
    }

    /// `(φ(p), φ′(p))` from the closed form.
    pub fn jet(&self, p: f64) -> Result<Jet> {
        let k = self.kinematics(p)?;
        let (f, df) = amplitude_factor(self.mass, p);
        let (w, dw, kappa) = match self.branch {
            Branch::Plus => {
                let (w, dw) = spinor_jet(&k, self.spin, false);
                (w, dw, -self.x)
            }
            Branch::Minus => {
                let (w, dw) = spinor_jet(&k, self.spin, true);
                (w, dw, self.x)
            }
        };
        Ok(plane_wave_jet(f, df, w, dw, kappa, p))
    }

    /// Stated local eigenvalue `∓xE_p/p`.
    pub fn local_eigenvalue(&self, p: f64) -> Result<f64> {
        let k = self.kinematics(p)?;
        Ok(self.branch.eigen_sign() * self.x * k.energy() / p)
    }

    /// The same function written with event spinors and `τ = xm/p`.
    pub fn eval_dual_form(&self, p: f64) -> Result<Spinor4> {
        let tau = self.x * self.mass / p;
        let e = EventKinematics::new(self.x, tau)?;
        let amp = (self.x * self.x / (self.x * self.x + tau * tau)).powf(0.25);
        let (spinor, phase) = match self.branch {
            Branch::Plus => (zeta_spinor(&e, self.spin)?, -p * self.x),
            Branch::Minus => (xi_spinor(&e, self.spin)?, p * self.x),
        };
        Ok(spinor * C64::from_polar(amp * inv_sqrt_2pi(), phase))
    }

    /// Diagnostic companion of the minus branch, `f·v(−p,s)e^{−ipx}`, and
    /// its derivative. It satisfies the relation with eigenvalue `+xE_p/p`.
    pub fn reflected_minus_jet(&self, p: f64) -> Result<Jet> {
        let k = self.kinematics(-p)?;
        let (f, df) = amplitude_factor(self.mass, p);
        let (w, dw_at_minus_p) = spinor_jet(&k, self.spin, true);
        Ok(plane_wave_jet(f, df, w, dw_at_minus_p * (-1.0), -self.x, p))
    }
}

/// `(f w e^{iκp}, (f′w + f w′ + iκ f w) e^{iκp}) / √(2π)`.
fn plane_wave_jet(f: f64, df: f64, w: Spinor4, dw: Spinor4, kappa: f64, p: f64) -> Jet {
    let phase = C64::from_polar(inv_sqrt_2pi(), kappa * p);
    let value = w * (phase * f);
    let deriv = (w * df + dw * f + w * (I * kappa * f)) * phase;
    (value, deriv)
}

/// `T̂φ` at one point from `(φ, φ′)`:
/// `−i(α₁ + (m/p)β)φ′ + i(m/2p²)βφ`.
pub fn apply_t_dirac_local(mass: f64, p: f64, jet: &Jet) -> Spinor4 {
    let b = basis();
    let (phi, dphi) = jet;
    let kinetic = (dphi.transform(&b.alpha1) + dphi.transform(&b.beta) * (mass / p)) * (-I);
    let shift = phi.transform(&b.beta) * (I * (mass / (2.0 * p * p)));
    kinetic + shift
}

pub fn sample_eigenfunction(f: &ToaEigenfunction, grid_p: &Grid1D) -> Result<GridSpinorField> {
    if grid_p.axis() != Axis::Momentum {
        return Err(Error::InvalidGrid("eigenfunctions are sampled on a momentum grid".into()));
    }
    let values = grid_p.points().map(|p| f.eval(p)).collect::<Result<Vec<_>>>()?;
    GridSpinorField::new(*grid_p, values)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualProfile {
    pub momenta: Vec<f64>,
    pub residuals: Vec<f64>,
}

impl ResidualProfile {
    pub fn max(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// `‖(T̂φ)(p) − λ(p)φ(p)‖ / ‖φ(p)‖` at every interior grid point, where
/// `λ` is the branch's stated eigenvalue.
pub fn eigen_relation_residual(f: &ToaEigenfunction, grid_p: &Grid1D, mode: DiffMode) -> Result<ResidualProfile> {
    if grid_p.axis() != Axis::Momentum {
        return Err(Error::InvalidGrid("the arrival-time operator acts on a momentum grid".into()));
    }
    let n = grid_p.len();
    let interior: Vec<usize> = (1..n - 1).collect();
    let mut momenta = Vec::with_capacity(interior.len());
    let mut residuals = Vec::with_capacity(interior.len());
    match mode {
        DiffMode::Analytic => {
            for &j in &interior {
                let p = grid_p.point(j);
                let jet = f.jet(p)?;
                let lhs = apply_t_dirac_local(f.mass, p, &jet);
                let r = lhs - jet.0 * f.local_eigenvalue(p)?;
                momenta.push(p);
                residuals.push(r.norm() / jet.0.norm());
            }
        }
        DiffMode::FiniteDifference => {
            let field = sample_eigenfunction(f, grid_p)?;
            let t_phi = build_t_dirac_momentum(grid_p, f.mass)?.apply(&field)?;
            for &j in &interior {
                let p = grid_p.point(j);
                let phi = field.values()[j];
                let r = t_phi.values()[j] - phi * f.local_eigenvalue(p)?;
                momenta.push(p);
                residuals.push(r.norm() / phi.norm());
            }
        }
    }
    Ok(ResidualProfile { momenta, residuals })
}

/// Same as the analytic mode of [`eigen_relation_residual`] but for the
/// reflected minus-branch function with eigenvalue `+xE_p/p`.
pub fn reflected_minus_residual(f: &ToaEigenfunction, grid_p: &Grid1D) -> Result<ResidualProfile> {
    let n = grid_p.len();
    let mut momenta = vec![];
    let mut residuals = vec![];
    for j in 1..n - 1 {
        let p = grid_p.point(j);
        let jet = f.reflected_minus_jet(p)?;
        let lambda = f.x * MomentumKinematics::new(f.mass, p)?.energy() / p;
        let r = apply_t_dirac_local(f.mass, p, &jet) - jet.0 * lambda;
        momenta.push(p);
        residuals.push(r.norm() / jet.0.norm());
    }
    Ok(ResidualProfile { momenta, residuals })
}

/// Candidate prefactors `c` in `∂u/∂p = c·α₁β·u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Prefactor {
    /// `m/2E_p²`
    MassOverTwoEnergySq,
    /// `m²/2E_p²`, the form stated alongside the amplitude identity.
    MassSqOverTwoEnergySq,
}

impl Prefactor {
    pub fn label(self) -> &'static str {
        match self {
            Prefactor::MassOverTwoEnergySq => "m/2E^2",
            Prefactor::MassSqOverTwoEnergySq => "m^2/2E^2",
        }
    }

    pub fn value(self, mass: f64, p: f64) -> f64 {
        let e2 = p * p + mass * mass;
        match self {
            Prefactor::MassOverTwoEnergySq => mass / (2.0 * e2),
            Prefactor::MassSqOverTwoEnergySq => mass * mass / (2.0 * e2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeIdentity {
    pub mass: f64,
    pub momentum: f64,
    /// `|f′_FD − (m²/2E²)(1/p)f|`.
    pub amplitude_residual: f64,
    /// Least-squares `c` in `∂u/∂p ≈ c·α₁β·u`.
    pub measured_prefactor: f64,
    pub candidate_linear: f64,
    pub candidate_quadratic: f64,
    pub noise_floor: f64,
    /// `Some` only when exactly one candidate is within `10 ×` the noise
    /// floor of the measurement.
    pub selected: Option<Prefactor>,
    /// Distance to the rejected candidate over the noise floor.
    pub margin: f64,
}

/// Richardson-extrapolated central difference and an error estimate.
fn richardson<T: Richardson + Copy>(
    f: impl Fn(f64) -> T,
    x: f64,
    h: f64,
    quotient: impl Fn(T, T, f64) -> T,
    dist: impl Fn(T, T) -> f64,
) -> (T, f64) {
    let d = |h: f64| quotient(f(x + h), f(x - h), h);
    let (d1, d2, d3) = (d(h), d(h / 2.0), d(h / 4.0));
    let coarse = d2.richardson(d1);
    let fine = d3.richardson(d2);
    (fine, dist(coarse, fine))
}

/// `(4·fine − coarse)/3`.
trait Richardson {
    fn richardson(self, coarse: Self) -> Self;
}

impl Richardson for f64 {
    fn richardson(self, coarse: f64) -> f64 {
        (4.0 * self - coarse) / 3.0
    }
}

impl Richardson for Spinor4 {
    fn richardson(self, coarse: Spinor4) -> Spinor4 {
        (self * 4.0 - coarse) * (1.0 / 3.0)
    }
}

const FD_STEP: f64 = 1e-3;

pub fn derivative_identity_check(mass: f64, p: f64, spin: Spin) -> Result<DerivativeIdentity> {
    let k = MomentumKinematics::new(mass, p)?;
    if p.abs() <= 4.0 * FD_STEP {
        return Err(Error::InvalidKinematics(format!("p = {p} is too close to 0 for the difference stencil")));
    }
    let e2 = k.energy().powi(2);

    let (df_fd, _) = richardson(
        |q| amplitude_factor(mass, q).0,
        p,
        FD_STEP,
        |a: f64, b: f64, h| (a - b) / (2.0 * h),
        |a, b| (a - b).abs(),
    );
    let f = amplitude_factor(mass, p).0;
    let amplitude_residual = (df_fd - mass * mass / (2.0 * e2) / p * f).abs();

    let u_at = |q: f64| u_spinor(&MomentumKinematics::new(mass, q).expect("step keeps p away from 0"), spin);
    let (du_fd, fd_err) = richardson(
        u_at,
        p,
        FD_STEP,
        |a: Spinor4, b: Spinor4, h| (a - b) * (1.0 / (2.0 * h)),
        |a, b| (a - b).norm(),
    );
    let w = u_spinor(&k, spin).transform(&basis().alpha1_beta());
    let c = (w.dot(&du_fd) / w.norm_sqr()).re;
    let fit_residual = (du_fd - w * c).norm() / w.norm();
    let noise_floor = fd_err.max(fit_residual).max(f64::EPSILON);

    let candidate_linear = Prefactor::MassOverTwoEnergySq.value(mass, p);
    let candidate_quadratic = Prefactor::MassSqOverTwoEnergySq.value(mass, p);
    let d_lin = (c - candidate_linear).abs();
    let d_quad = (c - candidate_quadratic).abs();
    let ok_lin = d_lin <= 10.0 * noise_floor;
    let ok_quad = d_quad <= 10.0 * noise_floor;
    let (selected, margin) = match (ok_lin, ok_quad) {
        (true, false) => (Some(Prefactor::MassOverTwoEnergySq), d_quad / noise_floor),
        (false, true) => (Some(Prefactor::MassSqOverTwoEnergySq), d_lin / noise_floor),
        _ => (None, d_lin.max(d_quad) / noise_floor),
    };
    Ok(DerivativeIdentity {
        mass,
        momentum: p,
        amplitude_residual,
        measured_prefactor: c,
        candidate_linear,
        candidate_quadratic,
        noise_floor,
        selected,
        margin,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FVectorCheck {
    /// `‖F‖` with the coefficients as stated.
    pub printed_norm: f64,
    /// `‖F‖` with the `α₁β` coefficient rebuilt from `m²/2E²`.
    pub alternate_norm: f64,
    /// The two assemblies coincide (`m = 1` or `m = 0`).
    pub degenerate: bool,
    pub tolerance: f64,
}

impl FVectorCheck {
    pub fn printed_vanishes(&self) -> bool {
        self.printed_norm <= self.tolerance
    }

    pub fn alternate_vanishes(&self) -> bool {
        self.alternate_norm <= self.tolerance
    }

    /// Exactly one assembly vanishes, or the two coincide and both vanish.
    pub fn pass(&self) -> bool {
        if self.degenerate {
            self.printed_vanishes() && self.alternate_vanishes()
        } else {
            self.printed_vanishes() != self.alternate_vanishes()
        }
    }
}

/// Residual vector left after cancelling the eigenvalue term:
/// `F = (m/2p²·β − m²/(2E p²) + c·E/p·α₁β)·(η ; σ₁p/(E+m)η)` with the
/// stated `c·E = m/2E` and the alternate `c·E = m²/2E`.
pub fn f_vector_check(mass: f64, p: f64, spin: Spin) -> Result<FVectorCheck> {
    let k = MomentumKinematics::new(mass, p)?;
    let e = k.energy();
    let b = basis();
    let eta = spin.eta();
    let ratio = spin.sigma1_sign() * p / (e + mass);
    let w = Spinor4([eta[0], eta[1], eta[0] * ratio, eta[1] * ratio]);
    let assemble = |c_times_e: f64| {
        w.transform(&b.beta) * (mass / (2.0 * p * p)) - w * (mass * mass / (2.0 * e * p * p))
            + w.transform(&b.alpha1_beta()) * (c_times_e / p)
    };
    let printed = assemble(mass / (2.0 * e));
    let alternate = assemble(mass * mass / (2.0 * e));
    Ok(FVectorCheck {
        printed_norm: printed.norm(),
        alternate_norm: alternate.norm(),
        degenerate: mass == 1.0 || mass == 0.0,
        tolerance: 1e-12,
    })
}

/// Amplitude-factor invariant `f = √(|p|/E_p)`.
pub fn amplitude_matches_ratio(mass: f64, p: f64) -> f64 {
    let e = p.hypot(mass);
    (amplitude_factor(mass, p).0 - (p.abs() / e).sqrt()).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convergence::fit_order;
    use proptest::prelude::*;

    fn grid(n: usize, mass: f64) -> Grid1D {
        Grid1D::momentum(0.5, 4.0, n, mass).unwrap()
    }

    /// Plain central difference of `eval`, Richardson-combined.
    fn fd_derivative(f: &ToaEigenfunction, p: f64) -> Spinor4 {
        let d = |h: f64| (f.eval(p + h).unwrap() - f.eval(p - h).unwrap()) * (1.0 / (2.0 * h));
        let h = 1e-3;
        (d(h / 2.0) * 4.0 - d(h)) * (1.0 / 3.0)
    }

    #[test]
    fn massless_amplitude_is_one() {
        for p in [0.1, 1.0, 7.0] {
            assert_eq!(amplitude_factor(0.0, p), (1.0, 0.0));
        }
    }

    #[test]
    fn reference_value_at_m4_p3() {
        let f = ToaEigenfunction::new(Branch::Plus, 1.0, Spin::Up, 4.0).unwrap();
        let got = f.eval(3.0).unwrap();
        let amp = (3.0f64 / 5.0).sqrt() / (2.0 * PI).sqrt();
        let phase = C64::new(3.0f64.cos(), -(3.0f64.sin()));
        let want = [3.0 / 10f64.sqrt(), 0.0, 1.0 / 10f64.sqrt(), 0.0];
        for a in 0..4 {
            assert!((got[a] - phase * (amp * want[a])).norm() < 1e-15);
        }
    }

    #[test]
    fn norm_over_symmetric_grid() {
        let g = Grid1D::new(Axis::Momentum, -4.95, 4.95, 100, 0.04).unwrap();
        let massless = ToaEigenfunction::new(Branch::Plus, 1.3, Spin::Down, 0.0).unwrap();
        let field = sample_eigenfunction(&massless, &g).unwrap();
        let extent = g.len() as f64 * g.spacing();
        assert!((field.norm_sqr() - extent / (2.0 * PI)).abs() < 1e-12);
        // massive case weights each point by |p|/E
        let massive = ToaEigenfunction::new(Branch::Minus, 1.3, Spin::Up, 2.0).unwrap();
        let field = sample_eigenfunction(&massive, &g).unwrap();
        let want: f64 = g.points().map(|p| p.abs() / p.hypot(2.0)).sum::<f64>() * g.spacing() / (2.0 * PI);
        assert!((field.norm_sqr() - want).abs() < 1e-12);
    }

    #[test]
    fn closed_form_derivative_matches_difference_quotient() {
        for branch in Branch::BOTH {
            for spin in Spin::BOTH {
                let f = ToaEigenfunction::new(branch, 0.7, spin, 1.6).unwrap();
                for p in [0.6, 1.0, 2.5] {
                    let (_, d) = f.jet(p).unwrap();
                    assert!((d - fd_derivative(&f, p)).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn plus_branch_analytic_residual_is_at_rounding_level() {
        let f = ToaEigenfunction::new(Branch::Plus, 1.0, Spin::Up, 1.0).unwrap();
        let r = eigen_relation_residual(&f, &grid(2001, 1.0), DiffMode::Analytic).unwrap();
        assert_eq!(r.residuals.len(), 1999);
        assert!(r.max() <= 1e-11, "{}", r.max());
    }

    #[test]
    fn plus_branch_difference_residual_converges_at_second_order() {
        let f = ToaEigenfunction::new(Branch::Plus, 1.0, Spin::Down, 1.0).unwrap();
        let mut steps = vec![];
        let mut errs = vec![];
        for n in [101, 201, 401] {
            let g = grid(n, 1.0);
            steps.push(g.spacing());
            errs.push(eigen_relation_residual(&f, &g, DiffMode::FiniteDifference).unwrap().max());
        }
        let ratio = errs[1] / errs[2];
        assert!((ratio - 4.0).abs() < 0.8, "{errs:?}");
        assert!((fit_order(&steps, &errs) - 2.0).abs() < 0.3);
    }

    #[test]
    fn minus_branch_as_written_holds_only_when_massless() {
        let g = grid(201, 2.0);
        let massless = ToaEigenfunction::new(Branch::Minus, 1.0, Spin::Up, 0.0).unwrap();
        assert!(eigen_relation_residual(&massless, &g, DiffMode::Analytic).unwrap().max() <= 1e-12);
        let massive = ToaEigenfunction::new(Branch::Minus, 1.0, Spin::Up, 2.0).unwrap();
        assert!(eigen_relation_residual(&massive, &g, DiffMode::Analytic).unwrap().max() > 1.0);
        assert!(reflected_minus_residual(&massive, &g).unwrap().max() <= 1e-11);
    }

    #[test]
    fn dual_form_reproduces_momentum_form() {
        for branch in Branch::BOTH {
            for spin in Spin::BOTH {
                for (m, x) in [(0.5, 0.5), (1.0, 2.0), (2.0, 1.0)] {
                    let f = ToaEigenfunction::new(branch, x, spin, m).unwrap();
                    for p in [0.5, 1.3, 4.0] {
                        let d = f.eval(p).unwrap() - f.eval_dual_form(p).unwrap();
                        assert!(d.max_abs() <= 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn derivative_identity_at_degenerate_mass() {
        let d = derivative_identity_check(1.0, 1.0, Spin::Up).unwrap();
        assert!(d.amplitude_residual <= 1e-9);
        assert_eq!(d.candidate_linear, 0.25);
        assert_eq!(d.candidate_quadratic, 0.25);
        assert_eq!(d.selected, None);
    }

    #[test]
    fn derivative_identity_discriminates_at_m2() {
        let d = derivative_identity_check(2.0, 1.0, Spin::Up).unwrap();
        assert!(d.amplitude_residual <= 1e-9);
        assert!((d.candidate_linear - 0.2).abs() < 1e-15);
        assert!((d.candidate_quadratic - 0.4).abs() < 1e-15);
        assert_eq!(d.selected, Some(Prefactor::MassOverTwoEnergySq));
        assert!(d.margin >= 10.0);
        assert!(d.noise_floor < 1e-9);
    }

    #[test]
    fn f_vector_assemblies() {
        let c = f_vector_check(2.0, 1.0, Spin::Up).unwrap();
        assert!(c.printed_vanishes() && !c.alternate_vanishes() && c.pass());
        let c = f_vector_check(1.0, 1.0, Spin::Up).unwrap();
        assert!(c.degenerate && c.pass());
        let c = f_vector_check(0.0, 1.0, Spin::Down).unwrap();
        assert_eq!((c.printed_norm, c.alternate_norm), (0.0, 0.0));
    }

    #[test]
    fn sampling_needs_a_momentum_grid() {
        let f = ToaEigenfunction::new(Branch::Plus, 1.0, Spin::Up, 1.0).unwrap();
        let gx = Grid1D::position(0.5, 1.0, 5, 1.0).unwrap();
        assert!(sample_eigenfunction(&f, &gx).is_err());
        assert!(ToaEigenfunction::new(Branch::Plus, 1.0, Spin::Up, -1.0).is_err());
    }

    proptest! {
        #[test]
        fn amplitude_is_sqrt_p_over_e(m in 0.01f64..10.0, p in 0.01f64..10.0) {
            let (f, _) = amplitude_factor(m, p);
            prop_assert!(f > 0.0 && f < 1.0);
            prop_assert!(amplitude_matches_ratio(m, p) < 1e-14);
        }

        #[test]
        fn plus_branch_holds_pointwise(m in 0.1f64..3.0, x in -2.0f64..2.0, p in 0.3f64..5.0) {
            let f = ToaEigenfunction::new(Branch::Plus, x, Spin::Down, m).unwrap();
            let jet = f.jet(p).unwrap();
            let r = apply_t_dirac_local(m, p, &jet) - jet.0 * f.local_eigenvalue(p).unwrap();
            prop_assert!(r.norm() / jet.0.norm() < 1e-11);
        }

        #[test]
        fn printed_f_vector_vanishes(m in 0.0f64..5.0, p in 0.1f64..5.0) {
            for s in Spin::BOTH {
                prop_assert!(f_vector_check(m, p, s).unwrap().printed_norm < 1e-12);
            }
        }
    }
}
