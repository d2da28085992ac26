use nalgebra::DMatrix;
use proptest::prelude::*;
use toa_core::dirac::Spin;
use toa_core::fock::{build_ladder_ops, build_t_quantized, car_residual, quadratic_form_t, ModeLabel, ModeSet, MomentumLattice, Species};
use toa_core::linalg::C64;

fn mode_set() -> impl Strategy<Value = ModeSet> {
    proptest::collection::btree_set((0usize..2, 1i32..6, 0usize..2), 0..6).prop_map(|labels| {
        let modes = labels
            .into_iter()
            .map(|(sp, k, s)| {
                let species = Species::BOTH[sp];
                ModeLabel::new(species, 0.7 * k as f64, Spin::BOTH[s], 0.3).unwrap()
            })
            .collect();
        ModeSet::new(modes).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn car_is_exact_for_any_mode_set(modes in mode_set()) {
        prop_assert_eq!(car_residual(&build_ladder_ops(&modes).unwrap()), 0.0);
    }

    #[test]
    fn spectrum_counts_occupied_arrival_times(modes in mode_set()) {
        let t = build_t_quantized(&modes).unwrap();
        prop_assert!(t.is_diagonal());
        let labels = modes.event_labels();
        let zero_point: f64 = labels.iter().map(|l| l.2).sum();
        for (bits, v) in t.real_diagonal().into_iter().enumerate() {
            let filled: f64 = modes.modes().iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, m)| m.arrival()).sum();
            prop_assert!((v - (filled - zero_point)).abs() <= 1e-12);
        }
    }
}

#[test]
fn quadratic_form_spectrum_matches_an_independent_eigensolver() {
    let lat = MomentumLattice::new(0.4, 0.25, 5).unwrap();
    let modes = ModeSet::lattice(&[1, 2], &Spin::BOTH, &Species::BOTH, &lat, 0.9, false).unwrap();
    let q = quadratic_form_t(&modes, &lat).unwrap();
    let m = q.t_quad.matrix();
    let na = DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)]);
    let mut ours: Vec<f64> = na.symmetric_eigen().eigenvalues.iter().copied().collect();
    let mut want: Vec<f64> = q.t_quantized.real_diagonal().iter().map(|v| q.sigma * v).collect();
    ours.sort_by(f64::total_cmp);
    want.sort_by(f64::total_cmp);
    for (a, b) in ours.iter().zip(&want) {
        assert!((a - b).abs() <= 1e-10, "{a} vs {b}");
    }
    assert!(q.t_quad.hermiticity_defect() <= 1e-13);
}

#[test]
fn ladder_products_are_number_operators() {
    let modes = ModeSet::new(vec![
        ModeLabel::new(Species::ElectronEvent, 1.0, Spin::Up, 0.0).unwrap(),
        ModeLabel::new(Species::ElectronEvent, 2.0, Spin::Up, 0.0).unwrap(),
        ModeLabel::new(Species::PositronEvent, 1.0, Spin::Up, 0.0).unwrap(),
    ])
    .unwrap();
    let ops = build_ladder_ops(&modes).unwrap();
    for i in 0..3 {
        let n = ops.creators[i].matrix() * ops.annihilators[i].matrix();
        for b in 0..8 {
            let want = if b >> i & 1 == 1 { 1.0 } else { 0.0 };
            assert_eq!(n[(b, b)], C64::new(want, 0.0));
        }
        assert!(n.is_diagonal());
    }
}
