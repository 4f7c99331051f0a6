use std::fmt;
use std::sync::Arc;

use crate::densela::DenseMatrix;
use crate::error::{Error, Result};

type FieldFn = dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync;
type JacobianFn = dyn Fn(f64, &[f64]) -> DenseMatrix + Send + Sync;

/// An ODE `x' = f(t, x)` together with optional analytic derivatives.
///
/// Missing Jacobians fall back to central differences. For non-autonomous
/// systems without an analytic `f_t`, the time derivative is differenced too.
#[derive(Clone)]
pub struct OdeSystem {
    dim: usize,
    label: String,
    autonomous: bool,
    field: Arc<FieldFn>,
    jacobian: Option<Arc<JacobianFn>>,
    time_derivative: Option<Arc<FieldFn>>,
}

impl OdeSystem {
    /// Autonomous system; `f` is still called with `t` but must ignore it.
    pub fn autonomous<F>(dim: usize, label: impl Into<String>, field: F) -> Self
    where
        F: Fn(f64, &[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self {
            dim,
            label: label.into(),
            autonomous: true,
            field: Arc::new(field),
            jacobian: None,
            time_derivative: None,
        }
    }

    pub fn non_autonomous<F>(dim: usize, label: impl Into<String>, field: F) -> Self
    where
        F: Fn(f64, &[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self { autonomous: false, ..Self::autonomous(dim, label, field) }
    }

    pub fn with_jacobian<J>(mut self, jacobian: J) -> Self
    where
        J: Fn(f64, &[f64]) -> DenseMatrix + Send + Sync + 'static,
    {
        self.jacobian = Some(Arc::new(jacobian));
        self
    }

    /// Ignored for autonomous systems, whose `f_t` is identically zero.
    pub fn with_time_derivative<G>(mut self, time_derivative: G) -> Self
    where
        G: Fn(f64, &[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        self.time_derivative = Some(Arc::new(time_derivative));
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_autonomous(&self) -> bool {
        self.autonomous
    }

    pub fn has_analytic_jacobian(&self) -> bool {
        self.jacobian.is_some()
    }

    fn check_state(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok(())
    }

    fn non_finite(&self, t: f64) -> Error {
        Error::NonFiniteField { system: self.label.clone(), t }
    }

    pub fn field(&self, t: f64, x: &[f64]) -> Result<Vec<f64>> {
        self.check_state(x)?;
        let v = (self.field)(t, x);
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: v.len() });
        }
        if v.iter().any(|c| !c.is_finite()) {
            return Err(self.non_finite(t));
        }
        Ok(v)
    }

    /// Analytic Jacobian when available, central differences otherwise.
    pub fn jacobian(&self, t: f64, x: &[f64]) -> Result<DenseMatrix> {
        match &self.jacobian {
            Some(jac) => {
                self.check_state(x)?;
                let j = jac(t, x);
                if j.rows() != self.dim || j.cols() != self.dim {
                    return Err(Error::DimensionMismatch { expected: self.dim, got: j.rows() });
                }
                if !j.is_finite() {
                    return Err(self.non_finite(t));
                }
                Ok(j)
            }
            None => jacobian_fd(self, t, x),
        }
    }

    /// `∂f/∂t`; the zero vector for autonomous systems.
    pub fn time_derivative(&self, t: f64, x: &[f64]) -> Result<Vec<f64>> {
        self.check_state(x)?;
        if self.autonomous {
            return Ok(vec![0.0; self.dim]);
        }
        match &self.time_derivative {
            Some(ft) => {
                let v = ft(t, x);
                if v.len() != self.dim {
                    return Err(Error::DimensionMismatch { expected: self.dim, got: v.len() });
                }
                if v.iter().any(|c| !c.is_finite()) {
                    return Err(self.non_finite(t));
                }
                Ok(v)
            }
            None => {
                let eps = fd_step(t);
                let plus = self.field(t + eps, x)?;
                let minus = self.field(t - eps, x)?;
                Ok(plus.iter().zip(&minus).map(|(a, b)| (a - b) / (2.0 * eps)).collect())
            }
        }
    }
}

impl fmt::Debug for OdeSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OdeSystem")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("autonomous", &self.autonomous)
            .field("analytic_jacobian", &self.jacobian.is_some())
            .finish()
    }
}

fn fd_step(x: f64) -> f64 {
    1e-7f64.max(1e-7 * x.abs())
}

/// Central-difference Jacobian with per-column step `max(1e-7, 1e-7 |x_j|)`.
pub fn jacobian_fd(sys: &OdeSystem, t: f64, x: &[f64]) -> Result<DenseMatrix> {
    sys.check_state(x)?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(sys.non_finite(t));
    }
    sys.field(t, x)?;
    let d = sys.dim;
    let mut jac = DenseMatrix::zeros(d, d);
    let mut probe = x.to_vec();
    for j in 0..d {
        let eps = fd_step(x[j]);
        probe[j] = x[j] + eps;
        let plus = sys.field(t, &probe)?;
        probe[j] = x[j] - eps;
        let minus = sys.field(t, &probe)?;
        probe[j] = x[j];
        for i in 0..d {
            jac[(i, j)] = (plus[i] - minus[i]) / (2.0 * eps);
        }
    }
    Ok(jac)
}

/// Strictly increasing sequence of time nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    nodes: Vec<f64>,
}

impl TimeGrid {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidArgument("time grid needs at least one node".into()));
        }
        if nodes.iter().any(|t| !t.is_finite()) || nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("time grid must be finite and strictly increasing".into()));
        }
        Ok(Self { nodes })
    }

    /// `steps` equal intervals on `[t0, t_end]`; the last node is exactly `t_end`.
    pub fn uniform(t0: f64, t_end: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Self::new(vec![t0]);
        }
        if !(t_end > t0) {
            return Err(Error::InvalidArgument(format!("empty interval [{t0}, {t_end}]")));
        }
        let h = (t_end - t0) / steps as f64;
        let mut nodes: Vec<f64> = (0..steps).map(|n| t0 + n as f64 * h).collect();
        nodes.push(t_end);
        Self::new(nodes)
    }

    /// Nodes `t0 + n h` for `n = 0..=steps`.
    pub fn with_step(t0: f64, h: f64, steps: usize) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
        }
        Self::new((0..=steps).map(|n| t0 + n as f64 * h).collect())
    }

    /// Each interval split into `refine` equal parts.
    pub fn refined(&self, refine: usize) -> Result<Self> {
        if refine == 0 {
            return Err(Error::InvalidArgument("refinement factor must be positive".into()));
        }
        let mut nodes = Vec::with_capacity((self.nodes.len() - 1) * refine + 1);
        for w in self.nodes.windows(2) {
            let h = (w[1] - w[0]) / refine as f64;
            nodes.extend((0..refine).map(|k| w[0] + k as f64 * h));
        }
        nodes.push(*self.nodes.last().unwrap());
        Self::new(nodes)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn steps(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn max_step(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fd_jacobian_of_linear_field() {
        let a = DenseMatrix::from_rows(&[[1.0, -2.0], [0.5, 3.0]]);
        let a2 = a.clone();
        let sys = OdeSystem::autonomous(2, "linear", move |_, x| a2.mat_vec(x));
        let j = jacobian_fd(&sys, 0.0, &[0.3, -1.2]).unwrap();
        assert!(j.sub(&a).max_abs() <= 1e-6 * a.norm_inf());
    }

    #[test]
    fn fd_jacobian_of_constant_field_is_zero() {
        let sys = OdeSystem::autonomous(3, "const", |_, _| vec![1.0, 2.0, 3.0]);
        let j = jacobian_fd(&sys, 0.0, &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(j.max_abs(), 0.0);
    }

    #[test]
    fn non_finite_field_is_reported() {
        let sys = OdeSystem::autonomous(1, "pole", |_, x| vec![1.0 / x[0]]);
        assert!(matches!(sys.field(0.0, &[0.0]), Err(Error::NonFiniteField { .. })));
        assert!(matches!(jacobian_fd(&sys, 0.0, &[0.0]), Err(Error::NonFiniteField { .. })));
    }

    #[test]
    fn autonomous_time_derivative_is_zero() {
        let sys = OdeSystem::autonomous(2, "rot", |_, x| vec![x[1], -x[0]]).with_time_derivative(|_, _| vec![9.0, 9.0]);
        assert_eq!(sys.time_derivative(1.0, &[1.0, 2.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn differenced_time_derivative() {
        let sys = OdeSystem::non_autonomous(1, "t2", |t, _| vec![t * t]);
        let ft = sys.time_derivative(1.5, &[0.0]).unwrap();
        assert!((ft[0] - 3.0).abs() < 1e-8);
    }

    #[test]
    fn dimension_checked() {
        let sys = OdeSystem::autonomous(2, "x", |_, x| x.to_vec());
        assert!(matches!(sys.field(0.0, &[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn grids() {
        let g = TimeGrid::uniform(0.0, 1.0, 4).unwrap();
        assert_eq!(g.nodes(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(g.refined(2).unwrap().len(), 9);
        assert!(TimeGrid::new(vec![0.0, 0.0]).is_err());
        assert!(TimeGrid::new(vec![]).is_err());
        assert_eq!(TimeGrid::uniform(0.0, 1.0, 0).unwrap().len(), 1);
    }
}
