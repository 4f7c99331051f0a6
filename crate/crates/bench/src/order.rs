//! Empirical global convergence order: maximum error over the grid against
//! a reference, for a sequence of step sizes, and the fitted log-log slope.

use llrk_core::odemodel::{example, ExampleSpec};
use llrk_core::{integrate, PadeOrder, Scheme, TimeGrid};

use crate::error::{BenchError, BenchResult};
use crate::output::Table;
use crate::reference::reference_solution;

#[derive(Debug, Clone, PartialEq)]
pub struct OrderConfig {
    pub spec: ExampleSpec,
    pub scheme: String,
    pub pade: PadeOrder,
    pub steps: Vec<f64>,
    pub refine: usize,
}

impl OrderConfig {
    pub fn new(spec: ExampleSpec, scheme: &str) -> Self {
        Self {
            spec,
            scheme: scheme.into(),
            pade: PadeOrder::default(),
            steps: vec![0.04, 0.02, 0.01, 0.005, 0.0025],
            refine: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderStudy {
    pub scheme: String,
    /// `(h, number of steps, max-norm error over all grid nodes)`.
    pub rows: Vec<(f64, usize, f64)>,
    pub slope: f64,
}

impl OrderStudy {
    pub fn table(&self) -> Table {
        let mut t = Table::new(&["h", "steps", "max_error"]);
        for &(h, n, e) in &self.rows {
            t.push(vec![h.into(), n.into(), e.into()]);
        }
        t.summary.push(("scheme".into(), self.scheme.as_str().into()));
        t.summary.push(("slope".into(), self.slope.into()));
        t
    }
}

/// Least-squares slope of `ln e` against `ln h`.
pub fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|&(h, e)| (h.ln(), e.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

pub fn convergence_order(cfg: &OrderConfig) -> BenchResult<OrderStudy> {
    if cfg.steps.len() < 2 {
        return Err(BenchError::Invalid("need at least two step sizes".into()));
    }
    let sys = example(&cfg.spec)?;
    let scheme = Scheme::parse(&cfg.scheme, cfg.pade)?;
    let (t0, t_end) = cfg.spec.horizon;
    let mut rows = Vec::with_capacity(cfg.steps.len());
    for &h in &cfg.steps {
        let n = ((t_end - t0) / h).round() as usize;
        if n == 0 {
            return Err(BenchError::Invalid(format!("step {h} exceeds the horizon")));
        }
        let grid = TimeGrid::uniform(t0, t_end, n)?;
        let z = reference_solution(&sys, &grid, &cfg.spec.initial_state, cfg.refine)?;
        let y = integrate(&sys, &scheme, &grid, &cfg.spec.initial_state)?;
        let err = z
            .states
            .iter()
            .zip(&y.states)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(p, q)| (p - q).abs()))
            .fold(0.0, f64::max);
        rows.push(((t_end - t0) / n as f64, n, err));
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|&(h, _, e)| (h, e)).collect();
    Ok(OrderStudy { scheme: cfg.scheme.clone(), rows, slope: fit_slope(&pts) })
}
