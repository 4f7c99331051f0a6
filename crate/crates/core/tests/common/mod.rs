#![allow(dead_code)]

use llrk_core::{DenseMatrix, OdeSystem};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> DenseMatrix {
    DenseMatrix::from_fn(n, n, |_, _| rng.gen_range(-scale..scale))
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-scale..scale)).collect()
}

/// Truncated Taylor series of `exp(m)` after scaling to norm ≤ 1/4, then squaring.
pub fn expm_taylor(m: &DenseMatrix) -> DenseMatrix {
    let n = m.rows();
    let mut s = 0;
    while m.norm_inf() * 0.5f64.powi(s) > 0.25 {
        s += 1;
    }
    let a = m.scaled(0.5f64.powi(s));
    let mut sum = DenseMatrix::identity(n);
    let mut term = DenseMatrix::identity(n);
    for k in 1..=30 {
        term = term.matmul(&a).scaled(1.0 / k as f64);
        sum = sum.add(&term);
    }
    for _ in 0..s {
        sum = sum.matmul(&sum);
    }
    sum
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Adaptive Simpson quadrature of a vector-valued integrand.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> Vec<f64>, a: f64, b: f64, tol: f64) -> Vec<f64> {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, &fa, &fm, &fb);
    recurse(f, a, b, fa, fm, fb, whole, tol, 40)
}

fn simpson(a: f64, b: f64, fa: &[f64], fm: &[f64], fb: &[f64]) -> Vec<f64> {
    let w = (b - a) / 6.0;
    (0..fa.len()).map(|i| w * (fa[i] + 4.0 * fm[i] + fb[i])).collect()
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    f: &dyn Fn(f64) -> Vec<f64>,
    a: f64,
    b: f64,
    fa: Vec<f64>,
    fm: Vec<f64>,
    fb: Vec<f64>,
    whole: Vec<f64>,
    tol: f64,
    depth: u32,
) -> Vec<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, &fa, &flm, &fm);
    let right = simpson(m, b, &fm, &frm, &fb);
    let err = (0..whole.len()).map(|i| (left[i] + right[i] - whole[i]).abs()).fold(0.0, f64::max);
    if depth == 0 || err <= 15.0 * tol {
        return (0..whole.len()).map(|i| left[i] + right[i] + (left[i] + right[i] - whole[i]) / 15.0).collect();
    }
    let mut l = recurse(f, a, m, fa, flm, fm.clone(), left, 0.5 * tol, depth - 1);
    let r = recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    for (x, y) in l.iter_mut().zip(r) {
        *x += y;
    }
    l
}

/// `x' = A x + B tanh(x) + c` with analytic Jacobian.
pub fn random_nonlinear(rng: &mut ChaCha8Rng, n: usize) -> OdeSystem {
    let a = random_matrix(rng, n, 1.0);
    let b = random_vec(rng, n, 0.5);
    let c = random_vec(rng, n, 1.0);
    let (a2, b2) = (a.clone(), b.clone());
    OdeSystem::autonomous(n, "random-nonlinear", move |_, x| {
        let ax = a.mat_vec(x);
        (0..x.len()).map(|i| ax[i] + b[i] * x[i].tanh() + c[i]).collect()
    })
    .with_jacobian(move |_, x| {
        let mut j = a2.clone();
        for i in 0..x.len() {
            let s = 1.0 / x[i].cosh();
            j[(i, i)] += b2[i] * s * s;
        }
        j
    })
}

/// `x' = A x + a`, autonomous affine.
pub fn affine(a: DenseMatrix, shift: Vec<f64>) -> OdeSystem {
    let jac = a.clone();
    OdeSystem::autonomous(shift.len(), "affine", move |_, x| {
        a.mat_vec(x).iter().zip(&shift).map(|(p, q)| p + q).collect()
    })
    .with_jacobian(move |_, _| jac.clone())
}
