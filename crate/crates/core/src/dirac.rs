//! Dirac matrices in the standard representation, particle spinors `u`, `v`
//! and their event-space duals `ζ`, `ξ`.
//!
//! Momentum is fixed along the x axis, so only `α₁ = γ⁰γ¹` and `β = γ⁰`
//! enter the dynamics. The two-component matrix called `σ₁` here is
//! `diag(1, −1)`; with it `α₁` is block off-diagonal and `β = diag(I, −I)`.
//!
//! The event-space spinors follow from the particle spinors by the
//! substitution `(p, m, E_p) → (x, τ, T_x)`:
//!
//! ```text
//! u(p, s) = √((m + E)/2E) · ( η_s ; σ₁ p/(m + E) η_s )
//! ζ(x, s) = √((τ + T)/2T) · ( η_s ; σ₁ x/(τ + T) η_s )
//! ```
//!
//! and `v`, `ξ` swap the two blocks.

use std::fmt;
use std::ops::{Add, Index, Mul, Sub};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, I, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Up, Spin::Down];

    /// Projection `s = ±½`.
    pub fn value(self) -> f64 {
        match self {
            Spin::Up => 0.5,
            Spin::Down => -0.5,
        }
    }

    pub fn eta(self) -> [C64; 2] {
        match self {
            Spin::Up => [ONE, ZERO],
            Spin::Down => [ZERO, ONE],
        }
    }

    /// Diagonal entry of `σ₁ = diag(1, −1)` acting on `η_s`.
    pub(crate) fn sigma1_sign(self) -> f64 {
        match self {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spin::Up => "up",
            Spin::Down => "down",
        })
    }
}

/// The fixed family of Dirac matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracBasis {
    pub gamma: [ComplexMatrix; 4],
    pub alpha1: ComplexMatrix,
    pub beta: ComplexMatrix,
    pub sigma1: ComplexMatrix,
    pub eta_up: [C64; 2],
    pub eta_down: [C64; 2],
}

/// Minkowski metric `diag(1, −1, −1, −1)`.
pub fn metric(mu: usize, nu: usize) -> f64 {
    match (mu, nu) {
        (0, 0) => 1.0,
        (a, b) if a == b => -1.0,
        _ => 0.0,
    }
}

fn block(tl: &ComplexMatrix, tr: &ComplexMatrix, bl: &ComplexMatrix, br: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(4, 4, |i, j| {
        let m = match (i < 2, j < 2) {
            (true, true) => tl,
            (true, false) => tr,
            (false, true) => bl,
            (false, false) => br,
        };
        m[(i % 2, j % 2)]
    })
}

pub fn build_dirac_basis() -> DiracBasis {
    let id = ComplexMatrix::identity(2);
    let zero = ComplexMatrix::zeros(2, 2);
    let sigma1 = ComplexMatrix::from_real_rows(&[[1.0, 0.0], [0.0, -1.0]]);
    // The remaining two Pauli matrices complete the Clifford algebra in 3+1 D.
    let sigma_b = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]);
    let sigma_c = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 1) => -I,
        (1, 0) => I,
        _ => ZERO,
    });

    let beta = block(&id, &zero, &zero, &(-&id));
    let spatial = |s: &ComplexMatrix| block(&zero, s, &(-s), &zero);
    let gamma = [beta.clone(), spatial(&sigma1), spatial(&sigma_b), spatial(&sigma_c)];
    let alpha1 = &gamma[0] * &gamma[1];

    DiracBasis { gamma, alpha1, beta, sigma1, eta_up: Spin::Up.eta(), eta_down: Spin::Down.eta() }
}

/// Shared instance of the standard basis.
pub fn basis() -> &'static DiracBasis {
    static BASIS: OnceLock<DiracBasis> = OnceLock::new();
    BASIS.get_or_init(build_dirac_basis)
}

impl DiracBasis {
    /// `max_{μν} ‖γ^μγ^ν + γ^νγ^μ − 2g^{μν}I‖_∞`.
    pub fn clifford_residual(&self) -> f64 {
        let id = ComplexMatrix::identity(4);
        let mut worst: f64 = 0.0;
        for mu in 0..4 {
            for nu in 0..4 {
                let ac = self.gamma[mu].anticommutator(&self.gamma[nu]);
                let r = &ac - &id.scale_real(2.0 * metric(mu, nu));
                worst = worst.max(r.max_abs());
            }
        }
        worst
    }

    /// Residuals of `α₁² = I`, `β² = I`, `{α₁, β} = 0`, `σ₁² = I` and
    /// orthonormality of `η_s`, in that order.
    pub fn auxiliary_residuals(&self) -> [f64; 5] {
        let id4 = ComplexMatrix::identity(4);
        let id2 = ComplexMatrix::identity(2);
        let dot = |a: &[C64; 2], b: &[C64; 2]| a[0].conj() * b[0] + a[1].conj() * b[1];
        let eta = (dot(&self.eta_up, &self.eta_up) - ONE)
            .norm()
            .max((dot(&self.eta_down, &self.eta_down) - ONE).norm())
            .max(dot(&self.eta_up, &self.eta_down).norm());
        [
            (&(&self.alpha1 * &self.alpha1) - &id4).max_abs(),
            (&(&self.beta * &self.beta) - &id4).max_abs(),
            self.alpha1.anticommutator(&self.beta).max_abs(),
            (&(&self.sigma1 * &self.sigma1) - &id2).max_abs(),
            eta,
        ]
    }

    /// `α₁β`, the matrix appearing in the momentum derivative of `u`.
    pub fn alpha1_beta(&self) -> ComplexMatrix {
        &self.alpha1 * &self.beta
    }
}

/// A four-component spinor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spinor4(pub [C64; 4]);

impl Spinor4 {
    pub const ZERO: Spinor4 = Spinor4([ZERO; 4]);

    pub fn new(c: [C64; 4]) -> Self {
        Spinor4(c)
    }

    pub fn from_real(c: [f64; 4]) -> Self {
        Spinor4(c.map(|x| C64::new(x, 0.0)))
    }

    /// `⟨self, other⟩ = self† other`.
    pub fn dot(&self, other: &Spinor4) -> C64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: C64) -> Spinor4 {
        Spinor4(self.0.map(|z| z * c))
    }

    pub fn scale_real(&self, c: f64) -> Spinor4 {
        Spinor4(self.0.map(|z| z * c))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.is_finite())
    }

    /// Matrix action `m · self` for a 4×4 matrix.
    pub fn transform(&self, m: &ComplexMatrix) -> Spinor4 {
        assert_eq!((m.rows(), m.cols()), (4, 4), "spinor transform needs a 4x4 matrix");
        let mut out = [ZERO; 4];
        for (i, o) in out.iter_mut().enumerate() {
            *o = m.row(i).iter().zip(&self.0).map(|(a, b)| a * b).sum();
        }
        Spinor4(out)
    }
}

impl Index<usize> for Spinor4 {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl Add for Spinor4 {
    type Output = Spinor4;
    fn add(self, rhs: Spinor4) -> Spinor4 {
        Spinor4([0, 1, 2, 3].map(|i| self.0[i] + rhs.0[i]))
    }
}

impl Sub for Spinor4 {
    type Output = Spinor4;
    fn sub(self, rhs: Spinor4) -> Spinor4 {
        Spinor4([0, 1, 2, 3].map(|i| self.0[i] - rhs.0[i]))
    }
}

impl Mul<C64> for Spinor4 {
    type Output = Spinor4;
    fn mul(self, rhs: C64) -> Spinor4 {
        self.scale(rhs)
    }
}

impl Mul<f64> for Spinor4 {
    type Output = Spinor4;
    fn mul(self, rhs: f64) -> Spinor4 {
        self.scale_real(rhs)
    }
}

/// Rest mass, momentum and energy of a free particle, `E_p = √(p² + m²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumKinematics {
    mass: f64,
    momentum: f64,
    energy: f64,
}

impl MomentumKinematics {
    /// `m ≥ 0`; `p = 0` is excluded.
    pub fn new(mass: f64, momentum: f64) -> Result<Self> {
        if !(mass.is_finite() && momentum.is_finite()) {
            return Err(Error::InvalidKinematics(format!("non-finite m = {mass}, p = {momentum}")));
        }
        if mass < 0.0 {
            return Err(Error::InvalidKinematics(format!("negative mass {mass}")));
        }
        if momentum == 0.0 {
            return Err(Error::InvalidKinematics("momentum must be nonzero".into()));
        }
        Ok(MomentumKinematics { mass, momentum, energy: momentum.hypot(mass) })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn momentum(&self) -> f64 {
        self.momentum
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// Event package at position `x` with `τ = xm/p`. `T_x` is the positive
    /// root, equal to `xE_p/p` when `x/p > 0`.
    pub fn to_event(&self, x: f64) -> Result<EventKinematics> {
        EventKinematics::new(x, x * self.mass / self.momentum)
    }
}

/// Position interval, proper time and arrival time, `T_x = √(x² + τ²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventKinematics {
    x: f64,
    tau: f64,
    arrival: f64,
}

impl EventKinematics {
    pub fn new(x: f64, tau: f64) -> Result<Self> {
        if !(x.is_finite() && tau.is_finite()) {
            return Err(Error::InvalidKinematics(format!("non-finite x = {x}, tau = {tau}")));
        }
        if x == 0.0 {
            return Err(Error::InvalidKinematics("position interval must be nonzero".into()));
        }
        Ok(EventKinematics { x, tau, arrival: x.hypot(tau) })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn arrival(&self) -> f64 {
        self.arrival
    }

    /// Same proper time, mirrored position.
    pub fn mirrored(&self) -> EventKinematics {
        EventKinematics { x: -self.x, ..*self }
    }
}

/// Shared shape of all four spinors: `√((a + c)/2c)·(η ; σ₁ b/(a + c) η)`,
/// with the blocks swapped for the antiparticle/positron-event form.
fn shaped_spinor(a: f64, b: f64, c: f64, s: Spin, swapped: bool) -> Result<Spinor4> {
    // c = √(a² + b²), so for a < 0 the sum a + c cancels; b²/(c − a) does not.
    let denom = if a >= 0.0 { a + c } else { b * b / (c - a) };
    if denom <= 0.0 || !denom.is_finite() {
        return Err(Error::InvalidKinematics(format!("normalisation denominator {denom} is not positive")));
    }
    let norm = (denom / (2.0 * c)).sqrt();
    let eta = s.eta();
    let lower = s.sigma1_sign() * b / denom;
    let big = [eta[0] * norm, eta[1] * norm];
    let small = [eta[0] * (norm * lower), eta[1] * (norm * lower)];
    Ok(if swapped {
        Spinor4([small[0], small[1], big[0], big[1]])
    } else {
        Spinor4([big[0], big[1], small[0], small[1]])
    })
}

pub fn u_spinor(k: &MomentumKinematics, s: Spin) -> Spinor4 {
    shaped_spinor(k.mass, k.momentum, k.energy, s, false).expect("m + E_p > 0 for valid kinematics")
}

pub fn v_spinor(k: &MomentumKinematics, s: Spin) -> Spinor4 {
    shaped_spinor(k.mass, k.momentum, k.energy, s, true).expect("m + E_p > 0 for valid kinematics")
}

/// Electron-event spinor. Fails only when `τ + T_x ≤ 0`.
pub fn zeta_spinor(e: &EventKinematics, s: Spin) -> Result<Spinor4> {
    shaped_spinor(e.tau, e.x, e.arrival, s, false)
}

/// Positron-event spinor. Fails only when `τ + T_x ≤ 0`.
pub fn xi_spinor(e: &EventKinematics, s: Spin) -> Result<Spinor4> {
    shaped_spinor(e.tau, e.x, e.arrival, s, true)
}

/// `α₁a + βb` for scalars `a`, `b`.
pub fn alpha_beta_combination(a: f64, b: f64) -> ComplexMatrix {
    let basis = basis();
    &basis.alpha1.scale_real(a) + &basis.beta.scale_real(b)
}

/// `(‖(α₁p + βm)u − E_p u‖, ‖(−α₁p + βm)v + E_p v‖)`.
pub fn momentum_eigen_residual(k: &MomentumKinematics, s: Spin) -> (f64, f64) {
    let (m, p, e) = (k.mass, k.momentum, k.energy);
    let u = u_spinor(k, s);
    let v = v_spinor(k, s);
    let ru = u.transform(&alpha_beta_combination(p, m)) - u * e;
    let rv = v.transform(&alpha_beta_combination(-p, m)) + v * e;
    (ru.norm(), rv.norm())
}

/// `(‖(α₁x + βτ)ζ − T_x ζ‖, ‖(α₁x − βτ)ξ − T_x ξ‖)`.
pub fn dual_eigen_residual(e: &EventKinematics, s: Spin) -> Result<(f64, f64)> {
    let zeta = zeta_spinor(e, s)?;
    let xi = xi_spinor(e, s)?;
    let rz = zeta.transform(&alpha_beta_combination(e.x, e.tau)) - zeta * e.arrival;
    let rx = xi.transform(&alpha_beta_combination(e.x, -e.tau)) - xi * e.arrival;
    Ok((rz.norm(), rx.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clifford_algebra_is_exact() {
        let b = build_dirac_basis();
        assert_eq!(b.clifford_residual(), 0.0);
        assert_eq!(b.auxiliary_residuals(), [0.0; 5]);
        assert_eq!(b.beta, b.gamma[0]);
    }

    #[test]
    fn alpha1_has_sigma1_off_diagonal_blocks() {
        let a = &basis().alpha1;
        let want = ComplexMatrix::from_real_rows(&[
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, -1.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, -1.0, 0.0, 0.0],
        ]);
        assert_eq!(*a, want);
    }

    #[test]
    fn u_spinor_reference_value() {
        let k = MomentumKinematics::new(4.0, 3.0).unwrap();
        assert_eq!(k.energy(), 5.0);
        let u = u_spinor(&k, Spin::Up);
        let want = [3.0 / 10f64.sqrt(), 0.0, 1.0 / 10f64.sqrt(), 0.0];
        for i in 0..4 {
            assert!((u[i] - C64::new(want[i], 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn massless_zeta_reference_value() {
        let e = EventKinematics::new(1.0, 0.0).unwrap();
        let z = zeta_spinor(&e, Spin::Up).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let want = Spinor4::from_real([h, 0.0, h, 0.0]);
        assert!((z - want).max_abs() < 1e-16);
        let (rz, rx) = dual_eigen_residual(&e, Spin::Up).unwrap();
        assert_eq!((rz, rx), (0.0, 0.0));
    }

    #[test]
    fn zeta_equals_u_under_dual_substitution() {
        let k = MomentumKinematics::new(4.0, 3.0).unwrap();
        let e = k.to_event(1.0).unwrap();
        assert!((e.tau() - 4.0 / 3.0).abs() < 1e-15);
        assert!((e.arrival() - 5.0 / 3.0).abs() < 1e-15);
        for s in Spin::BOTH {
            assert!((zeta_spinor(&e, s).unwrap() - u_spinor(&k, s)).max_abs() < 1e-15);
            assert!((xi_spinor(&e, s).unwrap() - v_spinor(&k, s)).max_abs() < 1e-15);
        }
        let (rz, rx) = dual_eigen_residual(&e, Spin::Down).unwrap();
        assert!(rz <= 1e-14 && rx <= 1e-14);
    }

    #[test]
    fn invalid_kinematics_rejected() {
        assert!(MomentumKinematics::new(1.0, 0.0).is_err());
        assert!(MomentumKinematics::new(-1.0, 1.0).is_err());
        assert!(EventKinematics::new(0.0, 1.0).is_err());
        assert!(EventKinematics::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn negative_tau_at_tiny_x_stays_regular() {
        // τ + T_x > 0 whenever x ≠ 0
        let e = EventKinematics::new(1e-3, -2.0).unwrap();
        let z = zeta_spinor(&e, Spin::Up).unwrap();
        assert!((z.norm() - 1.0).abs() < 1e-9);
    }
}
