//! Local linearization kernel.
//!
//! The LL increment over a step `δ` from `(t_n, y_n)` is
//!
//! ```text
//! φ(δ) = ∫₀^δ exp(J (δ - u)) (f + f_t u) du,    J = f_x(t_n, y_n)
//! ```
//!
//! and is read off the last column of `exp(D δ)` for the block matrix
//!
//! ```text
//!     ┌             ┐                      ┌        ┐
//! D = │ J  f_t  f   │  (non-autonomous)  D = │ J   f  │  (autonomous)
//!     │ 0   0   1   │                      │ 0   0  │
//!     │ 0   0   0   │                      └        ┘
//!     └             ┘
//! ```
//!
//! taking its first `d` entries.

use crate::densela::{expm_pade_scaled, DenseMatrix, PadeOrder};
use crate::error::{Error, Result};
use crate::odemodel::OdeSystem;

/// Below this value of `δ‖J‖_∞` the θ functions are taken from their series.
pub const THETA_SERIES_THRESHOLD: f64 = 1e-8;

/// Field, Jacobian and time derivative frozen at `(t_n, y_n)`.
#[derive(Debug, Clone)]
pub struct LocalLinearization {
    pub t: f64,
    pub y: Vec<f64>,
    pub f: Vec<f64>,
    pub jacobian: DenseMatrix,
    pub f_t: Vec<f64>,
    pub autonomous: bool,
}

impl LocalLinearization {
    pub fn new(sys: &OdeSystem, t: f64, y: &[f64]) -> Result<Self> {
        if y.len() != sys.dim() {
            return Err(Error::DimensionMismatch { expected: sys.dim(), got: y.len() });
        }
        Ok(Self {
            t,
            y: y.to_vec(),
            f: sys.field(t, y)?,
            jacobian: sys.jacobian(t, y)?,
            f_t: sys.time_derivative(t, y)?,
            autonomous: sys.is_autonomous(),
        })
    }

    pub fn dim(&self) -> usize {
        self.y.len()
    }

    pub fn augmented(&self) -> AugmentedMatrix {
        let d = self.dim();
        let size = if self.autonomous { d + 1 } else { d + 2 };
        let mut m = DenseMatrix::zeros(size, size);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = self.jacobian[(i, j)];
            }
            m[(i, size - 1)] = self.f[i];
        }
        if !self.autonomous {
            for i in 0..d {
                m[(i, d)] = self.f_t[i];
            }
            m[(d, d + 1)] = 1.0;
        }
        AugmentedMatrix { matrix: m, d, autonomous: self.autonomous }
    }

    /// `φ(δ)` by the augmented exponential; also returns the scaling exponent.
    pub fn phi(&self, delta: f64, order: PadeOrder) -> Result<(Vec<f64>, u32)> {
        check_delta(delta)?;
        if delta == 0.0 {
            return Ok((vec![0.0; self.dim()], 0));
        }
        let aug = self.augmented();
        let (e, decision) = expm_pade_scaled(&aug.matrix, delta, order)?;
        Ok((aug.extract(&e), decision.kappa))
    }

    /// `φ(h/2)` and `φ(h)` from a single exponential `A ≈ exp(D h/2)`.
    pub fn phi_pair(&self, h: f64, order: PadeOrder) -> Result<PhiCache> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
        }
        let aug = self.augmented();
        let (a, decision) = expm_pade_scaled(&aug.matrix, 0.5 * h, order)?;
        let half_step = aug.extract(&a);
        let full_step = aug.extract(&a.matmul(&a));
        Ok(PhiCache { half_step, full_step, exp_half: a, kappa: decision.kappa })
    }

    /// `φ(δ) = δ θ₁(δJ) f + δ² θ₂(δJ) f_t` with `θ₁(z) = (e^z - 1)/z`,
    /// `θ₂(z) = (e^z - 1 - z)/z²`.
    pub fn phi_theta(&self, delta: f64, order: PadeOrder) -> Result<Vec<f64>> {
        check_delta(delta)?;
        let d = self.dim();
        if delta == 0.0 {
            return Ok(vec![0.0; d]);
        }
        let m = self.jacobian.scaled(delta);
        let has_ft = self.f_t.iter().any(|&v| v != 0.0);
        let (theta1_f, theta2_ft) = if m.norm_inf() < THETA_SERIES_THRESHOLD {
            (
                theta_series(&m, &self.f, &[1.0, 1.0 / 2.0, 1.0 / 6.0, 1.0 / 24.0]),
                theta_series(&m, &self.f_t, &[1.0 / 2.0, 1.0 / 6.0, 1.0 / 24.0, 1.0 / 120.0]),
            )
        } else {
            let theta2_ft = if has_ft { theta2_apply(&m, &self.f_t, order)? } else { vec![0.0; d] };
            (theta1_apply(&m, &self.f, order)?, theta2_ft)
        };
        Ok(theta1_f.iter().zip(&theta2_ft).map(|(a, b)| delta * a + delta * delta * b).collect())
    }

    /// Remainder field `q(s, ξ) = f(s, y + φ + ξ) - J φ - f_t (s - t_n) - f`
    /// with `phi_at = φ(s - t_n)`.
    pub fn aux_field(&self, sys: &OdeSystem, s: f64, xi: &[f64], phi_at: &[f64]) -> Result<Vec<f64>> {
        let d = self.dim();
        if xi.len() != d || phi_at.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: xi.len().min(phi_at.len()) });
        }
        let point: Vec<f64> = (0..d).map(|i| self.y[i] + phi_at[i] + xi[i]).collect();
        let mut out = sys.field(s, &point)?;
        let j_phi = self.jacobian.mat_vec(phi_at);
        let ds = s - self.t;
        for i in 0..d {
            out[i] -= j_phi[i] + self.f_t[i] * ds + self.f[i];
        }
        Ok(out)
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta >= 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("increment length must be finite and non-negative, got {delta}")))
    }
}

// Σ_k c_k M^k v
fn theta_series(m: &DenseMatrix, v: &[f64], coeffs: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = v.iter().map(|x| coeffs[0] * x).collect();
    let mut power = v.to_vec();
    for &c in &coeffs[1..] {
        power = m.mat_vec(&power);
        for (o, p) in out.iter_mut().zip(&power) {
            *o += c * p;
        }
    }
    out
}

// top-right column of exp([[M, v], [0, 0]]) is θ₁(M) v
fn theta1_apply(m: &DenseMatrix, v: &[f64], order: PadeOrder) -> Result<Vec<f64>> {
    let d = v.len();
    let mut aug = DenseMatrix::zeros(d + 1, d + 1);
    for i in 0..d {
        for j in 0..d {
            aug[(i, j)] = m[(i, j)];
        }
        aug[(i, d)] = v[i];
    }
    let (e, _) = expm_pade_scaled(&aug, 1.0, order)?;
    Ok((0..d).map(|i| e[(i, d)]).collect())
}

// top-right column of exp([[M, v, 0], [0, 0, 1], [0, 0, 0]]) is θ₂(M) v
fn theta2_apply(m: &DenseMatrix, v: &[f64], order: PadeOrder) -> Result<Vec<f64>> {
    let d = v.len();
    let mut aug = DenseMatrix::zeros(d + 2, d + 2);
    for i in 0..d {
        for j in 0..d {
            aug[(i, j)] = m[(i, j)];
        }
        aug[(i, d)] = v[i];
    }
    aug[(d, d + 1)] = 1.0;
    let (e, _) = expm_pade_scaled(&aug, 1.0, order)?;
    Ok((0..d).map(|i| e[(i, d + 1)]).collect())
}

/// The block matrix whose exponential carries `φ` in its last column.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedMatrix {
    pub matrix: DenseMatrix,
    pub d: usize,
    pub autonomous: bool,
}

impl AugmentedMatrix {
    /// `L E r`: the first `d` entries of the last column of `e`.
    pub fn extract(&self, e: &DenseMatrix) -> Vec<f64> {
        let last = e.cols() - 1;
        (0..self.d).map(|i| e[(i, last)]).collect()
    }
}

/// `φ(h/2)`, `φ(h)` and the half-step exponential they were read from.
#[derive(Debug, Clone)]
pub struct PhiCache {
    pub half_step: Vec<f64>,
    pub full_step: Vec<f64>,
    pub exp_half: DenseMatrix,
    pub kappa: u32,
}

pub fn build_augmented(sys: &OdeSystem, t: f64, y: &[f64]) -> Result<AugmentedMatrix> {
    Ok(LocalLinearization::new(sys, t, y)?.augmented())
}

/// LL increment `φ(t, y; δ)`; exactly zero for `δ = 0`.
pub fn phi(sys: &OdeSystem, t: f64, y: &[f64], delta: f64, order: PadeOrder) -> Result<Vec<f64>> {
    check_delta(delta)?;
    if delta == 0.0 {
        return Ok(vec![0.0; sys.dim()]);
    }
    Ok(LocalLinearization::new(sys, t, y)?.phi(delta, order)?.0)
}

/// LL increment through the θ-function representation.
pub fn phi_theta(sys: &OdeSystem, t: f64, y: &[f64], delta: f64, order: PadeOrder) -> Result<Vec<f64>> {
    check_delta(delta)?;
    LocalLinearization::new(sys, t, y)?.phi_theta(delta, order)
}

pub fn phi_pair(sys: &OdeSystem, t: f64, y: &[f64], h: f64, order: PadeOrder) -> Result<PhiCache> {
    LocalLinearization::new(sys, t, y)?.phi_pair(h, order)
}

/// One order-2 local linearization step `y + φ(t, y; h)`.
pub fn ll2_step(sys: &OdeSystem, t: f64, y: &[f64], h: f64, order: PadeOrder) -> Result<Vec<f64>> {
    Ok(ll2_step_with_kappa(sys, t, y, h, order)?.0)
}

pub(crate) fn ll2_step_with_kappa(
    sys: &OdeSystem,
    t: f64,
    y: &[f64],
    h: f64,
    order: PadeOrder,
) -> Result<(Vec<f64>, u32)> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
    }
    let lin = LocalLinearization::new(sys, t, y)?;
    let (inc, kappa) = lin.phi(h, order)?;
    Ok((y.iter().zip(&inc).map(|(a, b)| a + b).collect(), kappa))
}
