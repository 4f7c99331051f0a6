//! Local Linearization-Runge-Kutta steppers.
//!
//! A step is `y + φ(h) + ρ`, where `φ` is the LL increment and `ρ` is an
//! explicit RK approximation, started from zero, of the remainder ODE
//! `v' = q(s, v)` with
//!
//! ```text
//! q(s, ξ) = f(s, y + φ(s - t) + ξ) - J φ(s - t) - f_t (s - t) - f
//! ```
//!
//! and `f`, `J`, `f_t` frozen at `(t, y)`.

use crate::densela::PadeOrder;
use crate::error::{Error, Result};
use crate::llcore::LocalLinearization;
use crate::odemodel::{OdeSystem, TimeGrid};
use crate::rkbase::ButcherTableau;

/// Result of one LLRK step with its intermediate quantities.
#[derive(Debug, Clone)]
pub struct LlrkStepReport {
    pub next_state: Vec<f64>,
    pub stages: Vec<Vec<f64>>,
    pub kappa_used: u32,
    /// `(c, φ(c h))` for every distinct node offset, plus `c = 1`.
    pub phi_values: Vec<(f64, Vec<f64>)>,
}

/// Remainder vector field at `(s, ξ)` given `phi_at = φ(t_n, y_n; s - t_n)`.
pub fn aux_field(sys: &OdeSystem, t_n: f64, y_n: &[f64], s: f64, xi: &[f64], phi_at: &[f64]) -> Result<Vec<f64>> {
    if s < t_n {
        return Err(Error::InvalidArgument(format!("aux field evaluated before the step start ({s} < {t_n})")));
    }
    LocalLinearization::new(sys, t_n, y_n)?.aux_field(sys, s, xi, phi_at)
}

fn check_step(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("step must be positive, got {h}")))
    }
}

/// Generic LLRK step for any explicit tableau.
///
/// `φ` is evaluated once per distinct node offset; stages follow
/// `k_i = q(t + c_i h, h Σ_j a_ij k_j)`.
pub fn llrk_step(
    sys: &OdeSystem,
    tableau: &ButcherTableau,
    t: f64,
    y: &[f64],
    h: f64,
    order: PadeOrder,
) -> Result<LlrkStepReport> {
    check_step(h)?;
    if !tableau.is_explicit() {
        return Err(Error::InvalidArgument("tableau is not explicit".into()));
    }
    let lin = LocalLinearization::new(sys, t, y)?;
    let d = y.len();
    let mut phi_values: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut kappa_used = 0;
    let mut phi_at = |c: f64, cache: &mut Vec<(f64, Vec<f64>)>| -> Result<usize> {
        if let Some(pos) = cache.iter().position(|(off, _)| *off == c) {
            return Ok(pos);
        }
        let (v, kappa) = lin.phi(c * h, order)?;
        kappa_used = kappa_used.max(kappa);
        cache.push((c, v));
        Ok(cache.len() - 1)
    };

    let s = tableau.stages();
    let mut stages: Vec<Vec<f64>> = Vec::with_capacity(s);
    for i in 0..s {
        let c = tableau.c[i];
        let mut xi = vec![0.0; d];
        for (j, kj) in stages.iter().enumerate() {
            let a = tableau.a[(i, j)];
            if a != 0.0 {
                for (x, k) in xi.iter_mut().zip(kj) {
                    *x += h * a * k;
                }
            }
        }
        let pos = phi_at(c, &mut phi_values)?;
        let k = lin.aux_field(sys, t + c * h, &xi, &phi_values[pos].1)?;
        stages.push(k);
    }
    let full = phi_at(1.0, &mut phi_values)?;
    let mut next_state: Vec<f64> = y.iter().zip(&phi_values[full].1).map(|(a, b)| a + b).collect();
    for (bj, kj) in tableau.b.iter().zip(&stages) {
        if *bj != 0.0 {
            for (n, k) in next_state.iter_mut().zip(kj) {
                *n += h * bj * k;
            }
        }
    }
    Ok(LlrkStepReport { next_state, stages, kappa_used, phi_values })
}

/// Order-4 LLRK step on the classical RK4 nodes `c = (0, 1/2, 1/2, 1)`.
///
/// Needs a single exponential `A ≈ exp(D h/2)`: `φ(h/2)` is read from `A`
/// and `φ(h)` from `A²`. Stages chain as `k_i = q(t + c_i h, c_i h k_{i-1})`
/// with `k_1 = 0`, and `ρ = h/6 (2 k_2 + 2 k_3 + k_4)`.
pub fn llrk4_step(sys: &OdeSystem, t: f64, y: &[f64], h: f64, order: PadeOrder) -> Result<LlrkStepReport> {
    check_step(h)?;
    let lin = LocalLinearization::new(sys, t, y)?;
    let d = y.len();
    let cache = lin.phi_pair(h, order)?;
    let half = 0.5 * h;

    let k1 = vec![0.0; d];
    let xi2: Vec<f64> = k1.iter().map(|k| half * k).collect();
    let k2 = lin.aux_field(sys, t + half, &xi2, &cache.half_step)?;
    let xi3: Vec<f64> = k2.iter().map(|k| half * k).collect();
    let k3 = lin.aux_field(sys, t + half, &xi3, &cache.half_step)?;
    let xi4: Vec<f64> = k3.iter().map(|k| h * k).collect();
    let k4 = lin.aux_field(sys, t + h, &xi4, &cache.full_step)?;

    let next_state =
        (0..d).map(|i| y[i] + cache.full_step[i] + h / 6.0 * (2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect();
    Ok(LlrkStepReport {
        next_state,
        stages: vec![k1, k2, k3, k4],
        kappa_used: cache.kappa,
        phi_values: vec![(0.0, vec![0.0; d]), (0.5, cache.half_step), (1.0, cache.full_step)],
    })
}

/// Output of a single step of any scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutput {
    pub state: Vec<f64>,
    /// Largest scaling exponent used by the step's exponentials, if any.
    pub kappa: Option<u32>,
}

/// A one-step map `(t, y, h) ↦ y_next`.
pub trait Stepper: Sync {
    fn step(&self, sys: &OdeSystem, t: f64, y: &[f64], h: f64) -> Result<StepOutput>;

    fn name(&self) -> String;
}

/// States of a one-step integration on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub max_kappa: Option<u32>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, Vec::len)
    }

    pub fn last(&self) -> &[f64] {
        self.states.last().expect("trajectory is never empty")
    }
}

/// Folds `stepper` over the grid starting from `y0` at the first node.
pub fn integrate(sys: &OdeSystem, stepper: &dyn Stepper, grid: &TimeGrid, y0: &[f64]) -> Result<Trajectory> {
    if y0.len() != sys.dim() {
        return Err(Error::DimensionMismatch { expected: sys.dim(), got: y0.len() });
    }
    let nodes = grid.nodes();
    let mut states = Vec::with_capacity(nodes.len());
    states.push(y0.to_vec());
    let mut max_kappa: Option<u32> = None;
    for (n, w) in nodes.windows(2).enumerate() {
        let out = stepper.step(sys, w[0], &states[n], w[1] - w[0]).map_err(|e| Error::StepFailure {
            index: n,
            t: w[0],
            source: Box::new(e),
        })?;
        if let Some(k) = out.kappa {
            max_kappa = Some(max_kappa.map_or(k, |m| m.max(k)));
        }
        states.push(out.state);
    }
    Ok(Trajectory { times: nodes.to_vec(), states, max_kappa })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densela::DenseMatrix;
    use crate::llcore::ll2_step;
    use crate::odemodel::{example, ExampleSpec};
    use crate::rkbase::tableau_registry;

    fn rk4() -> ButcherTableau {
        tableau_registry("rk4").unwrap().tableau
    }

    fn linear_2d() -> OdeSystem {
        let a = DenseMatrix::from_rows(&[[-1.0, 2.0], [-0.5, -3.0]]);
        let j = a.clone();
        OdeSystem::autonomous(2, "affine", move |_, x| {
            let mut v = a.mat_vec(x);
            v[0] += 1.0;
            v[1] -= 2.0;
            v
        })
        .with_jacobian(move |_, _| j.clone())
    }

    fn logistic() -> OdeSystem {
        OdeSystem::autonomous(1, "logistic", |_, x| vec![x[0] * (1.0 - x[0])])
            .with_jacobian(|_, x| DenseMatrix::from_rows(&[[1.0 - 2.0 * x[0]]]))
    }

    #[test]
    fn aux_field_is_linear_part_for_affine_fields() {
        let sys = linear_2d();
        let y = [0.3, -0.7];
        let lin = LocalLinearization::new(&sys, 0.0, &y).unwrap();
        let (phi, _) = lin.phi(0.2, PadeOrder::default()).unwrap();
        let xi = [0.05, -0.02];
        let q = aux_field(&sys, 0.0, &y, 0.2, &xi, &phi).unwrap();
        let expected = lin.jacobian.mat_vec(&xi);
        for i in 0..2 {
            assert!((q[i] - expected[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn aux_field_rejects_time_before_step() {
        let sys = linear_2d();
        assert!(aux_field(&sys, 1.0, &[0.0, 0.0], 0.5, &[0.0, 0.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn stages_vanish_on_linear_systems() {
        let sys = linear_2d();
        let y = [0.3, -0.7];
        let h = 0.4;
        let gen = llrk_step(&sys, &rk4(), 0.0, &y, h, PadeOrder::default()).unwrap();
        let special = llrk4_step(&sys, 0.0, &y, h, PadeOrder::default()).unwrap();
        let ll2 = ll2_step(&sys, 0.0, &y, h, PadeOrder::default()).unwrap();
        for report in [&gen, &special] {
            for k in &report.stages {
                assert!(k.iter().all(|v| v.abs() < 1e-14), "{k:?}");
            }
            for (a, b) in report.next_state.iter().zip(&ll2) {
                assert!((a - b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn first_stage_is_exactly_zero() {
        let sys = example(&ExampleSpec::new(6).unwrap()).unwrap();
        let report = llrk_step(&sys, &rk4(), 0.0, &[1.5, 3.0], 0.1, PadeOrder::default()).unwrap();
        assert_eq!(report.stages[0], vec![0.0, 0.0]);
        // offsets 0, 1/2 and 1 only
        assert_eq!(report.phi_values.len(), 3);
    }

    #[test]
    fn equilibrium_is_fixed() {
        let sys = example(&ExampleSpec::new(6).unwrap()).unwrap();
        for h in [0.1, 1.0, 10.0] {
            let r = llrk4_step(&sys, 0.0, &[1.0, 3.0], h, PadeOrder::default()).unwrap();
            assert_eq!(r.next_state, vec![1.0, 3.0]);
            let r =
                llrk_step(&sys, &tableau_registry("dp5").unwrap().tableau, 0.0, &[1.0, 3.0], h, PadeOrder::default())
                    .unwrap();
            assert_eq!(r.next_state, vec![1.0, 3.0]);
        }
    }

    #[test]
    fn logistic_step_matches_generic_and_closed_form() {
        let sys = logistic();
        let h = 0.1;
        let special = llrk4_step(&sys, 0.0, &[0.5], h, PadeOrder::default()).unwrap();
        let gen = llrk_step(&sys, &rk4(), 0.0, &[0.5], h, PadeOrder::default()).unwrap();
        assert!((special.next_state[0] - gen.next_state[0]).abs() < 1e-12);
        let exact = 1.0 / (1.0 + (-h).exp());
        // local error of an order-4 step is O(h^5)
        assert!((special.next_state[0] - exact).abs() < 1e-6);
    }

    #[test]
    fn single_node_integration() {
        let grid = TimeGrid::new(vec![0.0]).unwrap();
        let stepper = FnStepper(|sys: &OdeSystem, t, y: &[f64], h| {
            llrk4_step(sys, t, y, h, PadeOrder::default()).map(|r| r.next_state)
        });
        let traj = integrate(&logistic(), &stepper, &grid, &[0.25]).unwrap();
        assert_eq!(traj.states, vec![vec![0.25]]);
    }

    #[test]
    fn step_failure_carries_index() {
        let sys = OdeSystem::autonomous(1, "blowup", |_, x| vec![if x[0] > 2.5 { f64::NAN } else { 1.0 }]);
        let stepper = FnStepper(|sys: &OdeSystem, t, y: &[f64], h| ll2_step(sys, t, y, h, PadeOrder::default()));
        let grid = TimeGrid::uniform(0.0, 5.0, 5).unwrap();
        match integrate(&sys, &stepper, &grid, &[0.0]) {
            Err(Error::StepFailure { index, .. }) => assert_eq!(index, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    struct FnStepper<F>(F);

    impl<F> Stepper for FnStepper<F>
    where
        F: Fn(&OdeSystem, f64, &[f64], f64) -> Result<Vec<f64>> + Sync,
    {
        fn step(&self, sys: &OdeSystem, t: f64, y: &[f64], h: f64) -> Result<StepOutput> {
            Ok(StepOutput { state: (self.0)(sys, t, y, h)?, kappa: None })
        }

        fn name(&self) -> String {
            "fn".into()
        }
    }
}
