mod common;

use common::{expm_taylor, random_matrix, rng};
use llrk_core::densela::{expm_pade, expm_pade_scaled, pade_coeffs, stability_value, PadeOrder};
use llrk_core::{DenseMatrix, Error};
use num_complex::Complex64;
use proptest::prelude::*;

fn rel_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    a.sub(b).max_abs() / b.max_abs().max(1.0)
}

#[test]
fn pade_matches_taylor_oracle() {
    let mut r = rng(11);
    for k in 0..60 {
        let n = 2 + k % 5;
        let scale = [0.1, 1.0, 5.0, 20.0][k % 4];
        let m = random_matrix(&mut r, n, scale);
        let e = expm_pade(&m, PadeOrder::default()).unwrap();
        let oracle = expm_taylor(&m);
        assert!(rel_diff(&e, &oracle) <= 1e-9, "case {k}: {}", rel_diff(&e, &oracle));
    }
}

#[test]
fn diagonal_exponential_is_entrywise() {
    let m = DenseMatrix::from_diag(&[-3.0, 0.5, 2.0]);
    let e = expm_pade(&m, PadeOrder::default()).unwrap();
    for (i, v) in [-3.0f64, 0.5, 2.0].iter().enumerate() {
        assert!((e[(i, i)] - v.exp()).abs() <= 1e-13 * v.exp().max(1.0));
    }
    assert_eq!(e[(0, 1)], 0.0);
}

#[test]
fn rotation_generator_gives_rotation() {
    let theta = 2.5f64;
    let m = DenseMatrix::from_rows(&[[0.0, -theta], [theta, 0.0]]);
    let e = expm_pade(&m, PadeOrder::default()).unwrap();
    let expected = DenseMatrix::from_rows(&[[theta.cos(), -theta.sin()], [theta.sin(), theta.cos()]]);
    assert!(e.sub(&expected).max_abs() < 1e-13);
}

#[test]
fn scaling_exponent_follows_norm() {
    let m = DenseMatrix::from_rows(&[[0.0, 3.0], [-1.0, 0.0]]);
    let (_, d) = expm_pade_scaled(&m, 1.0, PadeOrder::default()).unwrap();
    // ‖M‖∞ = 3 needs 2^-κ·3 ≤ 1/2, so κ = 3
    assert_eq!(d.kappa, 3);
    let (_, d) = expm_pade_scaled(&m, 1e-3, PadeOrder::default()).unwrap();
    assert_eq!(d.kappa, 0);
}

#[test]
fn non_finite_matrix_rejected() {
    let m = DenseMatrix::from_rows(&[[f64::NAN, 0.0], [0.0, 1.0]]);
    assert_eq!(expm_pade(&m, PadeOrder::default()), Err(Error::NonFiniteMatrix));
}

/// Coefficients of `D(w) e^w - N(w)` vanish through degree `p + q` and not beyond.
#[test]
fn pade_coefficients_match_exponential_series() {
    let fact = |k: usize| (1..=k).map(|v| v as f64).product::<f64>();
    for (p, q) in [(1, 1), (2, 2), (6, 6), (2, 3), (2, 4), (2, 0), (0, 3), (3, 1)] {
        let order = PadeOrder::new(p, q).unwrap();
        let (num, den) = pade_coeffs(order);
        assert_eq!(num.len(), p as usize + 1);
        assert_eq!(den.len(), q as usize + 1);
        assert_eq!(num[0], 1.0);
        assert_eq!(den[0], 1.0);
        let top = (p + q + 1) as usize;
        for k in 0..=top {
            let conv: f64 = (0..=k.min(q as usize)).map(|j| den[j] / fact(k - j)).sum();
            let n_k = num.get(k).copied().unwrap_or(0.0);
            if k < top {
                assert!((conv - n_k).abs() < 1e-14, "({p},{q}) degree {k}: {conv} vs {n_k}");
            } else {
                assert!((conv - n_k).abs() > 1e-3 / fact(k), "({p},{q}) exceeds its order");
            }
        }
    }
}

#[test]
fn invalid_pade_order() {
    assert_eq!(PadeOrder::new(0, 0), Err(Error::InvalidPadeOrder { p: 0, q: 0 }));
    assert!(PadeOrder::new(2, 2).unwrap().a_stable());
    assert!(!PadeOrder::new(2, 2).unwrap().l_stable());
    assert!(PadeOrder::new(2, 4).unwrap().l_stable());
    assert!(!PadeOrder::new(2, 0).unwrap().a_stable());
    assert!(!PadeOrder::new(2, 5).unwrap().a_stable());
}

fn grid_max(order: PadeOrder, extent: f64, n: usize) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let re = -extent * i as f64 / (n - 1) as f64;
            let im = -extent + 2.0 * extent * j as f64 / (n - 1) as f64;
            worst = worst.max(stability_value(Complex64::new(re, im), order).unwrap().norm());
        }
    }
    worst
}

#[test]
fn a_stable_pairs_bounded_on_left_half_plane() {
    for (p, q) in [(1, 1), (2, 2), (6, 6), (2, 3), (2, 4)] {
        let order = PadeOrder::new(p, q).unwrap();
        for extent in [10.0, 1e3, 1e6] {
            let m = grid_max(order, extent, 61);
            assert!(m <= 1.0 + 1e-12, "({p},{q}) extent {extent}: {m}");
        }
    }
}

#[test]
fn l_stable_pairs_damp_far_left() {
    for (p, q) in [(2, 3), (2, 4)] {
        let r = stability_value(Complex64::new(-1e6, 0.0), PadeOrder::new(p, q).unwrap()).unwrap();
        assert!(r.norm() <= 1e-6, "({p},{q}): {}", r.norm());
    }
}

#[test]
fn taylor_pair_is_not_a_stable() {
    let order = PadeOrder::new(2, 0).unwrap();
    let worst =
        (1..=50).map(|k| stability_value(Complex64::new(0.0, k as f64), order).unwrap().norm()).fold(0.0, f64::max);
    assert!(worst > 1.0);
}

#[test]
fn stability_value_is_scalar_expm() {
    for z in [-0.3, -4.0, 1.5, -40.0] {
        let order = PadeOrder::default();
        let m = DenseMatrix::from_rows(&[[z]]);
        let e = expm_pade(&m, order).unwrap()[(0, 0)];
        let r = stability_value(Complex64::new(z, 0.0), order).unwrap();
        assert!((e - r.re).abs() <= 1e-12 * e.abs().max(1e-300), "{z}: {e} vs {}", r.re);
        assert!((r.re - z.exp()).abs() <= 1e-13 * z.exp());
    }
}

fn small_matrix() -> impl Strategy<Value = DenseMatrix> {
    (2usize..5)
        .prop_flat_map(|n| (Just(n), prop::collection::vec(-3.0f64..3.0, n * n)))
        .prop_map(|(n, v)| DenseMatrix::from_row_major(n, n, v).unwrap())
}

proptest! {
    #[test]
    fn semigroup(m in small_matrix()) {
        let order = PadeOrder::default();
        let e1 = expm_pade(&m, order).unwrap();
        let e2 = expm_pade(&m.scaled(2.0), order).unwrap();
        prop_assert!(rel_diff(&e1.matmul(&e1), &e2) <= 1e-10);
    }

    #[test]
    fn inverse_is_negated_exponent(m in small_matrix()) {
        let order = PadeOrder::default();
        let prod = expm_pade(&m, order).unwrap().matmul(&expm_pade(&m.scaled(-1.0), order).unwrap());
        let scale = expm_pade(&m, order).unwrap().norm_inf() * expm_pade(&m.scaled(-1.0), order).unwrap().norm_inf();
        prop_assert!(prod.sub(&DenseMatrix::identity(m.rows())).max_abs() <= 1e-13 * scale.max(1.0));
    }

    #[test]
    fn a_stable_bound_at_random_points(re in -1e6f64..0.0, im in -1e6f64..1e6, k in 0usize..5) {
        let (p, q) = [(1, 1), (2, 2), (6, 6), (2, 3), (2, 4)][k];
        let r = stability_value(Complex64::new(re, im), PadeOrder::new(p, q).unwrap()).unwrap();
        prop_assert!(r.norm() <= 1.0 + 1e-12);
    }
}
