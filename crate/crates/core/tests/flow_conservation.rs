use proptest::prelude::*;
use toa_core::flow::{integrate_flow, ArrivalTime, DualFlowState, GradientMode, TimeFunction};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn arrival_time_is_conserved(q in -3.0f64..3.0, k in 0.5f64..3.0, m in 0.0f64..2.0, flip in any::<bool>()) {
        let k = if flip { -k } else { k };
        let tf = ArrivalTime::new(m, 1e-3).unwrap();
        // |d ln k/dε| = E/k², so the step resolves the fastest initial scale
        let h = 0.02 * k * k / (k * k + m * m).sqrt();
        let traj = integrate_flow(&DualFlowState::new(0.0, vec![q], vec![k]).unwrap(), &tf, 2.0, h, GradientMode::Analytic).unwrap();
        let scale = traj.initial_value.abs().max(1.0);
        prop_assert!(traj.max_drift / scale <= 1e-8);
    }

    #[test]
    fn momentum_never_enters_the_band(q in -3.0f64..3.0, k in 0.5f64..3.0) {
        // dk/dε = E/k keeps |k| growing away from zero
        let tf = ArrivalTime::new(1.0, 1e-3).unwrap();
        let traj = integrate_flow(&DualFlowState::new(0.0, vec![q], vec![k]).unwrap(), &tf, 1.0, 1e-2, GradientMode::Analytic).unwrap();
        prop_assert!(traj.states.windows(2).all(|w| w[1].k[0] > w[0].k[0]));
    }
}

#[test]
fn massless_flow_is_linear_in_q() {
    // m = 0: T = −q sgn(k), dq/dε = 0·…, so q is fixed and k drifts at unit rate
    let tf = ArrivalTime::new(0.0, 1e-3).unwrap();
    let traj = integrate_flow(&DualFlowState::new(0.0, vec![2.0], vec![1.0]).unwrap(), &tf, 1.0, 0.1, GradientMode::Analytic).unwrap();
    let last = traj.states.last().unwrap();
    assert!((last.q[0] - 2.0).abs() <= 1e-14);
    assert!((last.k[0] - 2.0).abs() <= 1e-12);
    assert_eq!(tf.value(&[2.0], &[1.0]).unwrap(), -2.0);
}
