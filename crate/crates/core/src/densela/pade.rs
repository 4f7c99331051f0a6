//! Diagonal and off-diagonal Padé approximants of the exponential, the
//! scaling-and-squaring matrix exponential built on them, and the scalar
//! stability function of schemes that use it.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::matrix::{DenseMatrix, Lu};
use crate::error::{Error, Result};

/// Threshold on `‖2^{-κ} M‖_∞` below which the rational approximant is applied.
pub const SCALED_NORM_BOUND: f64 = 0.5;

/// Denominators whose reciprocal 1-norm condition falls below this are rejected.
pub const RCOND_THRESHOLD: f64 = 1e-14;

/// Degrees `(p, q)` of the numerator and denominator of a Padé approximant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PadeOrder {
    p: u32,
    q: u32,
}

impl PadeOrder {
    pub fn new(p: u32, q: u32) -> Result<Self> {
        if p + q == 0 {
            return Err(Error::InvalidPadeOrder { p, q });
        }
        Ok(Self { p, q })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// `p ≤ q ≤ p + 2`.
    pub fn a_stable(&self) -> bool {
        self.p <= self.q && self.q <= self.p + 2
    }

    /// `q = p + 1` or `q = p + 2`.
    pub fn l_stable(&self) -> bool {
        self.q == self.p + 1 || self.q == self.p + 2
    }
}

impl Default for PadeOrder {
    fn default() -> Self {
        Self { p: 6, q: 6 }
    }
}

impl fmt::Display for PadeOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.p, self.q)
    }
}

impl FromStr for PadeOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("expected `p,q`, got `{s}`"));
        let (p, q) = s.split_once(',').ok_or_else(bad)?;
        let p = p.trim().parse().map_err(|_| bad())?;
        let q = q.trim().parse().map_err(|_| bad())?;
        Self::new(p, q)
    }
}

/// Outcome of the scaling rule: the exponent `κ` and `‖2^{-κ} M h‖_∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingDecision {
    pub kappa: u32,
    pub scaled_norm: f64,
}

/// Numerator and denominator coefficients (ascending powers) of the
/// `(p, q)` Padé approximant of `e^z`. The denominator is `N_{q,p}(-z)`.
pub fn pade_coeffs(order: PadeOrder) -> (Vec<f64>, Vec<f64>) {
    let numerator = numerator_coeffs(order.p, order.q);
    let denominator = numerator_coeffs(order.q, order.p)
        .into_iter()
        .enumerate()
        .map(|(j, c)| if j % 2 == 1 { -c } else { c })
        .collect();
    (numerator, denominator)
}

// c_j = p! (p+q-j)! / ((p+q)! j! (p-j)!)
fn numerator_coeffs(p: u32, q: u32) -> Vec<f64> {
    let mut coeffs = Vec::with_capacity(p as usize + 1);
    let mut c = 1.0;
    coeffs.push(c);
    for j in 0..p {
        c *= f64::from(p - j) / (f64::from(p + q - j) * f64::from(j + 1));
        coeffs.push(c);
    }
    coeffs
}

/// Smallest `κ ≥ 0` with `‖2^{-κ} m · step‖_∞ ≤ 1/2`.
pub fn scaling_exponent(m: &DenseMatrix, step: f64) -> ScalingDecision {
    scaling_for_norm(m.norm_inf() * step.abs())
}

fn scaling_for_norm(norm: f64) -> ScalingDecision {
    let mut kappa = 0;
    let mut scaled = norm;
    // halving is exact, so the loop finds the minimal exponent
    while scaled > SCALED_NORM_BOUND && kappa < 2100 {
        scaled *= 0.5;
        kappa += 1;
    }
    ScalingDecision { kappa, scaled_norm: scaled }
}

fn horner_matrix(coeffs: &[f64], x: &DenseMatrix) -> DenseMatrix {
    let n = x.rows();
    let mut acc = DenseMatrix::zeros(n, n);
    acc.add_identity(*coeffs.last().expect("non-empty coefficients"));
    for &c in coeffs.iter().rev().skip(1) {
        acc = acc.matmul(x);
        acc.add_identity(c);
    }
    acc
}

/// `e^{m · step}` by `(p, q)` Padé approximation with scaling and squaring.
///
/// Returns the scaling decision alongside the exponential.
pub fn expm_pade_scaled(m: &DenseMatrix, step: f64, order: PadeOrder) -> Result<(DenseMatrix, ScalingDecision)> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    if !m.is_finite() || !step.is_finite() {
        return Err(Error::NonFiniteMatrix);
    }
    let decision = scaling_exponent(m, step);
    let x = m.scaled(step * 0.5f64.powi(decision.kappa as i32));
    let (num_c, den_c) = pade_coeffs(order);
    let numerator = horner_matrix(&num_c, &x);
    let denominator = horner_matrix(&den_c, &x);

    let n = m.rows();
    let lu = Lu::factor(&denominator).map_err(|_| Error::SingularDenominator { rcond: 0.0 })?;
    let inverse = lu.inverse()?;
    let rcond = 1.0 / (denominator.norm_1() * inverse.norm_1());
    if !(rcond >= RCOND_THRESHOLD) {
        return Err(Error::SingularDenominator { rcond });
    }
    let mut result = lu.solve(&numerator)?;
    for _ in 0..decision.kappa {
        result = result.matmul(&result);
    }
    debug_assert_eq!(result.rows(), n);
    if !result.is_finite() {
        return Err(Error::NonFiniteMatrix);
    }
    Ok((result, decision))
}

/// `e^m` by `(p, q)` Padé approximation with scaling and squaring.
pub fn expm_pade(m: &DenseMatrix, order: PadeOrder) -> Result<DenseMatrix> {
    expm_pade_scaled(m, 1.0, order).map(|(e, _)| e)
}

fn horner_complex(coeffs: &[f64], w: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * w + c)
}

/// `N_{p,q}(w) / D_{p,q}(w)` without any scaling.
pub fn pade_rational(w: Complex64, order: PadeOrder) -> Result<Complex64> {
    let (num_c, den_c) = pade_coeffs(order);
    let den = horner_complex(&den_c, w);
    if den == Complex64::new(0.0, 0.0) {
        return Err(Error::SingularDenominator { rcond: 0.0 });
    }
    Ok(horner_complex(&num_c, w) / den)
}

/// Scalar stability function `R(z) = (N(2^{-κ}z)/D(2^{-κ}z))^{2^κ}` of the
/// scaled-and-squared Padé exponential, with `κ` chosen from `|z|` by the
/// same rule as [`expm_pade`].
///
/// For `κ > 0` the power is taken in log-polar form. This keeps `|R|`
/// exactly at one when `|N| = |D|`, which repeated complex squaring would
/// not.
pub fn stability_value(z: Complex64, order: PadeOrder) -> Result<Complex64> {
    let decision = scaling_for_norm(z.norm());
    let w = z * 0.5f64.powi(decision.kappa as i32);
    let (num_c, den_c) = pade_coeffs(order);
    let num = horner_complex(&num_c, w);
    let den = horner_complex(&den_c, w);
    if den == Complex64::new(0.0, 0.0) {
        return Err(Error::SingularDenominator { rcond: 0.0 });
    }
    if decision.kappa == 0 {
        return Ok(num / den);
    }
    if num == Complex64::new(0.0, 0.0) {
        return Ok(num);
    }
    let power = 2f64.powi(decision.kappa as i32);
    let log_modulus = power * (num.norm().ln() - den.norm().ln());
    let phase = power * (num / den).arg();
    Ok(Complex64::from_polar(log_modulus.exp(), phase))
}
