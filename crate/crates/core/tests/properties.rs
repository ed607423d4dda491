//! Randomized invariants of the measures and channels.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use ort_core::channels::{apply_dephasing, DephasingKernel};
use ort_core::fock::{apply_phase_shift, make_fock};
use ort_core::measures::{decomposition_objective, metrological_power, ort_pure};
use ort_core::rank2::{cat_mixture, ort_rank2_coherent, two_fock};
use ort_core::spec::{Family, StateSpec};
use ort_core::{DensityMatrix, Decomposition, StateVector};
use proptest::prelude::*;

fn state(amps: &[(f64, f64)]) -> StateVector {
    // pad with empty levels so that truncation checks never trigger
    let mut v: Vec<C64> = amps.iter().map(|&(r, t)| C64::from_polar(r, t)).collect();
    v.extend([C64::new(0.0, 0.0); 3]);
    StateVector::from_unnormalized(v).unwrap()
}

fn amplitudes() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.05..1.0f64, -PI..PI), 1..6)
}

fn mixture(states: &[StateVector], weights: &[f64]) -> DensityMatrix {
    let total: f64 = weights.iter().sum();
    let parts: Vec<(f64, &StateVector)> = weights.iter().map(|w| w / total).zip(states).collect();
    DensityMatrix::from_mixture(&parts).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pure_measure_is_phase_invariant(a in amplitudes(), phi in -PI..PI) {
        let psi = state(&a);
        let shifted = StateVector::new(
            psi.amps().iter().enumerate().map(|(n, z)| z * C64::from_polar(1.0, -(n as f64) * phi)).collect(),
        ).unwrap();
        prop_assert!((ort_pure(&psi).unwrap() - ort_pure(&shifted).unwrap()).abs() < 1e-10);
        let m0 = metrological_power(&psi.outer()).unwrap().value;
        let m1 = metrological_power(&apply_phase_shift(&psi.outer(), phi)).unwrap().value;
        prop_assert!((m0 - m1).abs() < 1e-9);
    }

    #[test]
    fn metrological_power_bounded_by_measure_for_pure_states(a in amplitudes()) {
        let psi = state(&a);
        let m = metrological_power(&psi.outer()).unwrap().value;
        prop_assert!(m <= ort_pure(&psi).unwrap() + 1e-9);
    }

    #[test]
    fn any_decomposition_bounds_metrological_power(
        a in amplitudes(), b in amplitudes(), w in 0.05..0.95f64,
    ) {
        let states = [state(&a), state(&b)];
        let dim = states.iter().map(StateVector::dim).max().unwrap();
        let states: Vec<StateVector> = states.iter().map(|s| s.padded(dim)).collect();
        let rho = mixture(&states, &[w, 1.0 - w]);
        let d = Decomposition::new(vec![(w, states[0].clone()), (1.0 - w, states[1].clone())]).unwrap();
        let upper = decomposition_objective(&rho, &d).unwrap().value;
        prop_assert!(metrological_power(&rho).unwrap().value <= upper + 1e-9);
    }

    #[test]
    fn dephasing_never_increases_metrological_power(
        a in amplitudes(), b in amplitudes(), w in 0.0..1.0f64, gt in 0.0..3.0f64, w0t in -PI..PI,
    ) {
        let states = [state(&a), state(&b)];
        let dim = states.iter().map(StateVector::dim).max().unwrap();
        let states: Vec<StateVector> = states.iter().map(|s| s.padded(dim)).collect();
        let rho = mixture(&states, &[w + 1e-3, 1.0 - w]);
        let k = DephasingKernel::lorentzian(gt, w0t).unwrap();
        let before = metrological_power(&rho).unwrap().value;
        let after = metrological_power(&apply_dephasing(&rho, &k)).unwrap().value;
        prop_assert!(after <= before + 1e-9);
    }

    #[test]
    fn two_fock_measure_decreases_under_dephasing(
        n in 0usize..8, p in 0.0..1.0f64, f in 0.0..1.0f64, gt in 0.0..3.0f64,
    ) {
        let before = ort_rank2_coherent(&two_fock(n, p, f).unwrap()).unwrap().value;
        let after = ort_rank2_coherent(&two_fock(n, p, f * (-gt).exp()).unwrap()).unwrap().value;
        prop_assert!(after <= before + 1e-12);
    }

    #[test]
    fn two_point_channel_rescales_cat_coherence(
        alpha in 0.2..1.5f64, p in 0.0..1.0f64, f in 0.0..1.0f64, ratio in 0.0..1.0f64,
    ) {
        let with = |f: f64| StateSpec::Rank2 { family: Family::Cat { alpha }, p, f, chi: 0.0 }.density_matrix().unwrap();
        let k = DephasingKernel::two_point(ratio).unwrap();
        let out = apply_dephasing(&with(f), &k);
        prop_assert!(out.max_deviation(&with(f * ratio)) < 1e-12);
        // and the closed form follows the rescaled coherence down
        let before = ort_rank2_coherent(&cat_mixture(alpha, p, f).unwrap()).unwrap().value;
        let after = ort_rank2_coherent(&cat_mixture(alpha, p, f * ratio).unwrap()).unwrap().value;
        prop_assert!(after <= before + 1e-12);
    }
}

#[test]
fn total_dephasing_leaves_populations() {
    let dim = 6;
    let psi = StateVector::from_unnormalized(vec![
        C64::new(0.6, 0.0),
        C64::new(0.0, 0.5),
        C64::new(0.3, 0.3),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
    ])
    .unwrap();
    let out = apply_dephasing(&psi.outer(), &DephasingKernel::Total);
    let fock: Vec<StateVector> = (0..dim).map(|k| make_fock(k, dim).unwrap()).collect();
    let parts: Vec<(f64, &StateVector)> =
        (0..dim).map(|k| (out.get(k, k).re, &fock[k])).filter(|(w, _)| *w > 0.0).collect();
    assert!(out.max_deviation(&DensityMatrix::from_mixture(&parts).unwrap()) < 1e-14);
}
