//! Classical flows in the energy parameter generated by a time function:
//! `dq/dε = ∂T/∂k`, `dk/dε = −∂T/∂q`, integrated with fixed-step RK4.

use serde::{Deserialize, Serialize};

use crate::convergence::RefinementStudy;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualFlowState {
    pub eps: f64,
    pub q: Vec<f64>,
    pub k: Vec<f64>,
}

impl DualFlowState {
    pub fn new(eps: f64, q: Vec<f64>, k: Vec<f64>) -> Result<Self> {
        if q.is_empty() || q.len() != k.len() {
            return Err(Error::DimensionMismatch { expected: q.len().max(1), found: k.len() });
        }
        let s = DualFlowState { eps, q, k };
        if !s.is_finite() {
            return Err(Error::NonFinite("flow state"));
        }
        Ok(s)
    }

    pub fn dof(&self) -> usize {
        self.q.len()
    }

    pub fn is_finite(&self) -> bool {
        self.eps.is_finite() && self.q.iter().chain(&self.k).all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GradientMode {
    /// Use the time function's own gradients when it has them.
    Analytic,
    /// Central differences of the value.
    FiniteDifference,
}

pub trait TimeFunction {
    fn value(&self, q: &[f64], k: &[f64]) -> Result<f64>;

    /// `(∂T/∂q, ∂T/∂k)` when known in closed form.
    fn gradient(&self, _q: &[f64], _k: &[f64]) -> Option<Result<(Vec<f64>, Vec<f64>)>> {
        None
    }

    /// Phase-space states the flow must not enter.
    fn admissible(&self, _eps: f64, _q: &[f64], _k: &[f64]) -> Result<()> {
        Ok(())
    }
}

fn fd_step(v: f64) -> f64 {
    1e-6 * v.abs().max(1.0)
}

/// Central-difference gradient of `T`.
pub fn fd_gradient(tf: &dyn TimeFunction, q: &[f64], k: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let partial = |vars: &[f64], i: usize, is_q: bool| -> Result<f64> {
        let h = fd_step(vars[i]);
        let mut plus = vars.to_vec();
        let mut minus = vars.to_vec();
        plus[i] += h;
        minus[i] -= h;
        let (tp, tm) = if is_q { (tf.value(&plus, k)?, tf.value(&minus, k)?) } else { (tf.value(q, &plus)?, tf.value(q, &minus)?) };
        Ok((tp - tm) / (2.0 * h))
    };
    let gq = (0..q.len()).map(|i| partial(q, i, true)).collect::<Result<Vec<_>>>()?;
    let gk = (0..k.len()).map(|i| partial(k, i, false)).collect::<Result<Vec<_>>>()?;
    Ok((gq, gk))
}

pub fn gradient(tf: &dyn TimeFunction, q: &[f64], k: &[f64], mode: GradientMode) -> Result<(Vec<f64>, Vec<f64>)> {
    let g = match mode {
        GradientMode::Analytic => tf.gradient(q, k).unwrap_or_else(|| fd_gradient(tf, q, k))?,
        GradientMode::FiniteDifference => fd_gradient(tf, q, k)?,
    };
    if g.0.iter().chain(&g.1).any(|v| !v.is_finite()) {
        return Err(Error::GradientFailure { q: q.to_vec(), k: k.to_vec(), reason: "non-finite gradient".into() });
    }
    Ok(g)
}

/// `T = −qE/k`, `E = √(k² + m²)`, one degree of freedom. States with
/// `|k| < band` are rejected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrivalTime {
    pub mass: f64,
    pub band: f64,
}

impl ArrivalTime {
    pub fn new(mass: f64, band: f64) -> Result<Self> {
        if !(mass >= 0.0 && band > 0.0 && mass.is_finite() && band.is_finite()) {
            return Err(Error::InvalidParameter(format!("arrival time needs m ≥ 0 and band > 0, got m = {mass}, band = {band}")));
        }
        Ok(ArrivalTime { mass, band })
    }

    fn check(&self, q: &[f64], k: &[f64]) -> Result<(f64, f64)> {
        if q.len() != 1 || k.len() != 1 {
            return Err(Error::GradientFailure { q: q.to_vec(), k: k.to_vec(), reason: "arrival time has one degree of freedom".into() });
        }
        if k[0].abs() < self.band {
            return Err(Error::GradientFailure { q: q.to_vec(), k: k.to_vec(), reason: format!("|k| < {}", self.band) });
        }
        Ok((q[0], k[0]))
    }
}

impl TimeFunction for ArrivalTime {
    fn value(&self, q: &[f64], k: &[f64]) -> Result<f64> {
        let (q, k) = self.check(q, k)?;
        Ok(-q * k.hypot(self.mass) / k)
    }

    fn gradient(&self, q: &[f64], k: &[f64]) -> Option<Result<(Vec<f64>, Vec<f64>)>> {
        Some(self.check(q, k).map(|(q, k)| {
            let e = k.hypot(self.mass);
            (vec![-e / k], vec![q * self.mass * self.mass / (e * k * k)])
        }))
    }

    fn admissible(&self, eps: f64, _q: &[f64], k: &[f64]) -> Result<()> {
        match k.iter().find(|v| v.abs() < self.band) {
            Some(&k) => Err(Error::ExclusionBandCrossed { eps, k, band: self.band }),
            None => Ok(()),
        }
    }
}

/// `T = Σ qᵢkᵢ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bilinear;

impl TimeFunction for Bilinear {
    fn value(&self, q: &[f64], k: &[f64]) -> Result<f64> {
        Ok(q.iter().zip(k).map(|(a, b)| a * b).sum())
    }

    fn gradient(&self, q: &[f64], k: &[f64]) -> Option<Result<(Vec<f64>, Vec<f64>)>> {
        Some(Ok((k.to_vec(), q.to_vec())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constant(pub f64);

impl TimeFunction for Constant {
    fn value(&self, _q: &[f64], _k: &[f64]) -> Result<f64> {
        Ok(self.0)
    }
}

/// `(dq/dε, dk/dε)`.
pub fn flow_velocity(tf: &dyn TimeFunction, state: &DualFlowState, mode: GradientMode) -> Result<(Vec<f64>, Vec<f64>)> {
    tf.admissible(state.eps, &state.q, &state.k)?;
    let (gq, gk) = gradient(tf, &state.q, &state.k, mode)?;
    Ok((gk, gq.into_iter().map(|v| -v).collect()))
}

fn shifted(state: &DualFlowState, dq: &[f64], dk: &[f64], h: f64) -> DualFlowState {
    DualFlowState {
        eps: state.eps + h,
        q: state.q.iter().zip(dq).map(|(a, b)| a + h * b).collect(),
        k: state.k.iter().zip(dk).map(|(a, b)| a + h * b).collect(),
    }
}

/// One classical RK4 step.
pub fn dual_flow_step(state: &DualFlowState, tf: &dyn TimeFunction, h_eps: f64, mode: GradientMode) -> Result<DualFlowState> {
    if !(h_eps > 0.0 && h_eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("step {h_eps} must be positive")));
    }
    let (q1, k1) = flow_velocity(tf, state, mode)?;
    let (q2, k2) = flow_velocity(tf, &shifted(state, &q1, &k1, 0.5 * h_eps), mode)?;
    let (q3, k3) = flow_velocity(tf, &shifted(state, &q2, &k2, 0.5 * h_eps), mode)?;
    let (q4, k4) = flow_velocity(tf, &shifted(state, &q3, &k3, h_eps), mode)?;
    let combine = |x: &[f64], a: &[f64], b: &[f64], c: &[f64], d: &[f64]| -> Vec<f64> {
        (0..x.len()).map(|i| x[i] + h_eps / 6.0 * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i])).collect()
    };
    let next = DualFlowState {
        eps: state.eps + h_eps,
        q: combine(&state.q, &q1, &q2, &q3, &q4),
        k: combine(&state.k, &k1, &k2, &k3, &k4),
    };
    if !next.is_finite() {
        return Err(Error::NonFinite("flow state"));
    }
    tf.admissible(next.eps, &next.q, &next.k)?;
    Ok(next)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowTrajectory {
    pub states: Vec<DualFlowState>,
    /// `T` along the trajectory.
    pub values: Vec<f64>,
    /// Step actually used, `span / ceil(span / h)`.
    pub step: f64,
    pub initial_value: f64,
    /// `max |T(ε) − T(0)|`.
    pub max_drift: f64,
}

impl FlowTrajectory {
    pub fn relative_drift(&self) -> f64 {
        self.max_drift / self.initial_value.abs().max(f64::MIN_POSITIVE)
    }
}

pub fn integrate_flow(state0: &DualFlowState, tf: &dyn TimeFunction, eps_span: f64, h_eps: f64, mode: GradientMode) -> Result<FlowTrajectory> {
    if !(eps_span > 0.0 && eps_span.is_finite() && h_eps > 0.0 && h_eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("span {eps_span} and step {h_eps} must be positive")));
    }
    let n = (eps_span / h_eps - 1e-9).ceil().max(1.0) as usize;
    let step = eps_span / n as f64;
    let initial_value = tf.value(&state0.q, &state0.k)?;
    let mut states = Vec::with_capacity(n + 1);
    let mut values = Vec::with_capacity(n + 1);
    states.push(state0.clone());
    values.push(initial_value);
    let mut current = state0.clone();
    for i in 0..n {
        current = dual_flow_step(&current, tf, step, mode)?;
        current.eps = state0.eps + (i + 1) as f64 * step;
        values.push(tf.value(&current.q, &current.k)?);
        states.push(current.clone());
    }
    let max_drift = values.iter().map(|v| (v - initial_value).abs()).fold(0.0, f64::max);
    Ok(FlowTrajectory { states, values, step, initial_value, max_drift })
}

/// Drift of `T` for each step size and the fitted order.
pub fn drift_study(state0: &DualFlowState, tf: &dyn TimeFunction, eps_span: f64, steps: &[f64], mode: GradientMode) -> Result<RefinementStudy> {
    let drifts = steps.iter().map(|h| integrate_flow(state0, tf, eps_span, *h, mode).map(|t| t.max_drift)).collect::<Result<Vec<_>>>()?;
    Ok(RefinementStudy::new(steps.to_vec(), drifts))
}
