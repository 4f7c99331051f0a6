use llrk_core::dynprobe::{
    classify_basin, find_equilibria, linearization_probe, manifold_intercept, order_estimate, relative_error,
    relative_error_complex, spectral_abscissa, BasinOutcome, ClassifyOptions, Stability, EQUILIBRIUM_RESIDUAL,
};
use llrk_core::odemodel::{example, ExampleSpec};
use llrk_core::{DenseMatrix, Error, Scheme, Trajectory};
use proptest::prelude::*;

fn unit_square() -> Vec<Vec<f64>> {
    let ticks = [0.0, 0.25, 0.5, 0.75, 1.0];
    ticks.iter().flat_map(|&a| ticks.iter().map(move |&b| vec![a, b])).collect()
}

#[test]
fn bistable_system_has_two_attractors_and_a_saddle() {
    let sys = example(&ExampleSpec::new(1).unwrap()).unwrap();
    let eq = find_equilibria(&sys, &unit_square(), EQUILIBRIUM_RESIDUAL).unwrap();
    assert_eq!(eq.points.len(), 3);
    assert_eq!(eq.stable().count(), 2);
    assert_eq!(eq.unstable().count(), 1);
    let (_, saddle) = eq.unstable().next().unwrap();
    assert!((saddle.point[0] - saddle.point[1]).abs() < 1e-10);
    // all three sit on the symmetry diagonal, the saddle between the attractors
    assert!(eq.points.iter().all(|e| (e.point[0] - e.point[1]).abs() < 1e-10));
    assert_eq!(eq.points[1].stability, Stability::Unstable);
    assert!(eq.points[0].point[0] < eq.points[1].point[0] && eq.points[1].point[0] < eq.points[2].point[0]);
}

#[test]
fn basins_and_intercept_at_coarse_step() {
    let sys = example(&ExampleSpec::new(1).unwrap()).unwrap();
    let eq = find_equilibria(&sys, &unit_square(), EQUILIBRIUM_RESIDUAL).unwrap();
    let scheme = Scheme::llrk4();
    let opts = ClassifyOptions::new(0.25);
    let low = classify_basin(&sys, &scheme, &[0.0, 0.0], &eq, opts).unwrap();
    let high = classify_basin(&sys, &scheme, &[0.0, 1.0], &eq, opts).unwrap();
    assert!(matches!(low, BasinOutcome::Attractor(_)));
    assert!(matches!(high, BasinOutcome::Attractor(_)));
    assert_ne!(low, high);
    let b = manifold_intercept(&sys, &scheme, &eq, (0.0, 1.0), 1e-9, opts).unwrap();
    assert!(b.xi_h > 0.5 && b.xi_h < 0.7, "{}", b.xi_h);
    assert!(b.bracket_width <= 1e-9);
    assert_eq!(manifold_intercept(&sys, &scheme, &eq, (0.0, 0.3), 1e-9, opts).unwrap_err(), Error::SameBasin);
}

#[test]
fn brusselator_focus_is_unstable() {
    let sys = example(&ExampleSpec::new(6).unwrap()).unwrap();
    let eq = find_equilibria(&sys, &[vec![1.2, 2.8]], EQUILIBRIUM_RESIDUAL).unwrap();
    assert_eq!(eq.points.len(), 1);
    assert_eq!(eq.points[0].point, vec![1.0, 3.0]);
    // trace b - 1 - a² = 1
    assert_eq!(eq.points[0].stability, Stability::Unstable);
    assert!((eq.points[0].spectral_abscissa - 0.5).abs() < 1e-12);
}

#[test]
fn spectral_abscissa_oracles() {
    let diag = DenseMatrix::from_diag(&[-1.0, -0.25, -7.0]);
    assert!((spectral_abscissa(&diag).unwrap() + 0.25).abs() < 1e-10);
    let big = DenseMatrix::from_diag(&[-3.0, -2.0, 0.5, -1.0, -0.1]);
    assert!((spectral_abscissa(&big).unwrap() - 0.5).abs() < 1e-8);
    let rot = DenseMatrix::from_rows(&[[-0.2, 5.0], [-5.0, -0.2]]);
    assert!((spectral_abscissa(&rot).unwrap() + 0.2).abs() < 1e-12);
}

#[test]
fn linearization_ratios_bounded_at_saddle() {
    let sys = example(&ExampleSpec::new(1).unwrap()).unwrap();
    let eq = find_equilibria(&sys, &unit_square(), EQUILIBRIUM_RESIDUAL).unwrap();
    let (_, saddle) = eq.unstable().next().unwrap();
    let v = [1.0 / 5f64.sqrt(), 2.0 / 5f64.sqrt()];
    for scheme in [Scheme::ll2(), Scheme::llrk4()] {
        let r = linearization_probe(&sys, &scheme, &saddle.point, 0.5, &v, &[1e-2, 1e-3, 1e-4]).unwrap();
        let max = r.iter().cloned().fold(f64::MIN, f64::max);
        let min = r.iter().cloned().fold(f64::MAX, f64::min);
        assert!(min > 0.0 && max / min <= 4.0, "{scheme}: {r:?}");
    }
}

fn traj(states: Vec<Vec<f64>>) -> Trajectory {
    Trajectory { times: (0..states.len()).map(|k| k as f64).collect(), states, max_kappa: None }
}

#[test]
fn relative_error_measures() {
    let z = traj(vec![vec![1.0, 0.0], vec![2.0, -4.0]]);
    let y = traj(vec![vec![1.1, 5.0], vec![2.0, -3.0]]);
    // the zero reference entry is skipped
    assert!((relative_error(&z, &y).unwrap() - 0.25).abs() < 1e-15);
    let zc = traj(vec![vec![3.0, 4.0]]);
    let yc = traj(vec![vec![3.0, 3.0]]);
    assert!((relative_error_complex(&zc, &yc).unwrap() - 0.2).abs() < 1e-15);
    assert_eq!(relative_error(&z, &zc).unwrap_err(), Error::GridMismatch);
}

proptest! {
    #[test]
    fn order_estimate_recovers_power_law(p in 1.0f64..6.0, c in 0.1f64..10.0, xi in -1.0f64..1.0, k in 1i32..5) {
        let h = 0.5f64.powi(k);
        let at = |s: f64| xi + c * s.powf(p);
        let r = order_estimate(at(h), at(h / 2.0), at(h / 4.0)).unwrap();
        prop_assert!((r - p).abs() < 1e-6);
    }
}

#[test]
fn order_estimate_rejects_flat_sequences() {
    assert_eq!(order_estimate(1.0, 1.0, 1.0), Err(Error::DegenerateDifferences));
    assert_eq!(order_estimate(1.0, 2.0, 1.0), Err(Error::DegenerateDifferences));
}
