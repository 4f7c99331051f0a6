//! Structural probes at equilibria: a step started at an equilibrium must
//! stay there, and the step's linearization must be the exact linear flow.

use llrk_core::dynprobe::{find_equilibria, linearization_probe, EquilibriumSet, EQUILIBRIUM_RESIDUAL};
use llrk_core::odemodel::{example, ExampleSpec};
use llrk_core::{PadeOrder, Scheme, Stepper};

use crate::error::BenchResult;
use crate::output::{Cell, Table};
use crate::table1::unit_square_seeds;

/// Bound on `‖step(ξ) - ξ‖_∞` at an equilibrium.
pub const PRESERVATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeConfig {
    pub spec: ExampleSpec,
    pub scheme: String,
    pub pade: PadeOrder,
    pub steps: Vec<f64>,
    pub linearization_step: f64,
    pub eps: Vec<f64>,
}

impl ProbeConfig {
    pub fn new(spec: ExampleSpec, scheme: &str) -> Self {
        Self {
            spec,
            scheme: scheme.into(),
            pade: PadeOrder::default(),
            steps: vec![0.1, 1.0, 10.0],
            linearization_step: 0.5,
            eps: vec![1e-2, 1e-3, 1e-4],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub equilibria: EquilibriumSet,
    /// `‖f(ξ)‖_∞` per equilibrium.
    pub residuals: Vec<f64>,
    /// `(equilibrium index, h, ‖step(ξ) - ξ‖_∞)`.
    pub preservation: Vec<(usize, f64, f64)>,
    /// `(equilibrium index, ε, ratio)`.
    pub linearization: Vec<(usize, f64, f64)>,
}

impl ProbeReport {
    pub fn max_deviation(&self) -> f64 {
        self.preservation.iter().map(|p| p.2).fold(0.0, f64::max)
    }

    /// Largest deviation over equilibria whose residual is exactly zero.
    /// Elsewhere the residual itself is amplified by the stiff remainder
    /// stages, so the deviation measures rounding rather than the scheme.
    pub fn max_deviation_exact(&self) -> f64 {
        self.preservation.iter().filter(|p| self.residuals[p.0] == 0.0).map(|p| p.2).fold(0.0, f64::max)
    }

    /// `max/min` of the linearization ratios at one equilibrium.
    pub fn ratio_spread(&self, eq: usize) -> Option<f64> {
        let r: Vec<f64> = self.linearization.iter().filter(|l| l.0 == eq).map(|l| l.2).collect();
        let max = r.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = r.iter().cloned().fold(f64::INFINITY, f64::min);
        (!r.is_empty() && min > 0.0).then(|| max / min)
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(&["probe", "equilibrium", "h", "eps", "value"]);
        for (k, r) in self.residuals.iter().enumerate() {
            t.push(vec!["residual".into(), k.into(), Cell::Empty, Cell::Empty, (*r).into()]);
        }
        for &(k, h, d) in &self.preservation {
            t.push(vec!["preservation".into(), k.into(), h.into(), Cell::Empty, d.into()]);
        }
        for &(k, e, r) in &self.linearization {
            t.push(vec!["linearization".into(), k.into(), Cell::Empty, e.into(), r.into()]);
        }
        t.summary.push(("max_preservation_deviation".into(), self.max_deviation().into()));
        t.summary.push(("max_preservation_deviation_exact".into(), self.max_deviation_exact().into()));
        t
    }
}

fn seeds(spec: &ExampleSpec) -> Vec<Vec<f64>> {
    let d = spec.initial_state.len();
    let mut s = vec![spec.initial_state.clone(), vec![1.001; d]];
    if spec.id == 1 {
        s.extend(unit_square_seeds());
    }
    s
}

/// Generic probing direction `(1, 2, …, d)/‖·‖`.
pub fn probe_direction(d: usize) -> Vec<f64> {
    let norm = (1..=d).map(|k| (k * k) as f64).sum::<f64>().sqrt();
    (1..=d).map(|k| k as f64 / norm).collect()
}

pub fn run_probe(cfg: &ProbeConfig) -> BenchResult<ProbeReport> {
    let sys = example(&cfg.spec)?;
    let scheme = Scheme::parse(&cfg.scheme, cfg.pade)?;
    let equilibria = find_equilibria(&sys, &seeds(&cfg.spec), EQUILIBRIUM_RESIDUAL)?;
    let v = probe_direction(sys.dim());
    let mut residuals = Vec::new();
    let mut preservation = Vec::new();
    let mut linearization = Vec::new();
    for (k, e) in equilibria.points.iter().enumerate() {
        residuals.push(sys.field(0.0, &e.point)?.iter().fold(0.0, |m: f64, v| m.max(v.abs())));
        for &h in &cfg.steps {
            let next = scheme.step(&sys, 0.0, &e.point, h)?.state;
            let dev = next.iter().zip(&e.point).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            preservation.push((k, h, dev));
        }
        let ratios = linearization_probe(&sys, &scheme, &e.point, cfg.linearization_step, &v, &cfg.eps)?;
        linearization.extend(cfg.eps.iter().zip(ratios).map(|(&eps, r)| (k, eps, r)));
    }
    Ok(ProbeReport { equilibria, residuals, preservation, linearization })
}
