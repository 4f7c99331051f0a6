//! Phase-portrait data for planar examples: trajectory fans, equilibria,
//! basin labels and, for the bistable system, the separatrix intercept.

use llrk_core::dynprobe::{
    classify_basin, find_equilibria, manifold_intercept, BasinOutcome, BisectionResult, ClassifyOptions,
    EquilibriumSet, Stability, EQUILIBRIUM_RESIDUAL,
};
use llrk_core::odemodel::{example, ExampleSpec};
use llrk_core::{integrate, PadeOrder, Scheme, TimeGrid, Trajectory};

use crate::error::{BenchError, BenchResult};
use crate::output::{Cell, Table};
use crate::table1::unit_square_seeds;

#[derive(Debug, Clone, PartialEq)]
pub struct PortraitConfig {
    pub spec: ExampleSpec,
    pub scheme: String,
    pub pade: PadeOrder,
    pub h: f64,
    /// Defaults to covering the example's horizon.
    pub steps: Option<usize>,
    /// Defaults to twelve points on the unit square's boundary for the
    /// bistable system and to the example's initial state otherwise.
    pub initial: Option<Vec<Vec<f64>>>,
    pub intercept_tol: f64,
}

impl PortraitConfig {
    pub fn new(spec: ExampleSpec, scheme: &str, h: f64) -> Self {
        Self {
            spec,
            scheme: scheme.into(),
            pade: PadeOrder::default(),
            h,
            steps: None,
            initial: None,
            intercept_tol: 1e-10,
        }
    }
}

/// Twelve points spaced by 1/3 around the boundary of the unit square.
pub fn boundary_points() -> Vec<Vec<f64>> {
    let s = [0.0, 1.0 / 3.0, 2.0 / 3.0];
    let mut pts = Vec::with_capacity(12);
    pts.extend(s.iter().map(|&a| vec![a, 0.0]));
    pts.extend(s.iter().map(|&a| vec![1.0, a]));
    pts.extend(s.iter().map(|&a| vec![1.0 - a, 1.0]));
    pts.extend(s.iter().map(|&a| vec![0.0, 1.0 - a]));
    pts
}

#[derive(Debug, Clone, PartialEq)]
pub struct Portrait {
    pub equilibria: EquilibriumSet,
    pub trajectories: Vec<Trajectory>,
    pub basins: Vec<Option<BasinOutcome>>,
    pub intercept: Option<BisectionResult>,
}

impl Portrait {
    pub fn table(&self) -> Table {
        let mut t = Table::new(&["kind", "id", "t", "x1", "x2"]);
        for (k, traj) in self.trajectories.iter().enumerate() {
            for (time, x) in traj.times.iter().zip(&traj.states) {
                t.push(vec!["trajectory".into(), k.into(), (*time).into(), x[0].into(), x[1].into()]);
            }
        }
        for (k, e) in self.equilibria.points.iter().enumerate() {
            let kind = match e.stability {
                Stability::Stable => "equilibrium-stable",
                Stability::Unstable => "equilibrium-unstable",
                Stability::Marginal => "equilibrium-marginal",
            };
            t.push(vec![kind.into(), k.into(), Cell::Empty, e.point[0].into(), e.point[1].into()]);
        }
        if let Some(b) = &self.intercept {
            t.push(vec!["intercept".into(), 0usize.into(), Cell::Empty, 0.0.into(), b.xi_h.into()]);
        }
        for (k, b) in self.basins.iter().enumerate() {
            let label: Cell = match b {
                Some(BasinOutcome::Attractor(i)) => (*i).into(),
                Some(BasinOutcome::Undecided) => "undecided".into(),
                None => Cell::Empty,
            };
            t.summary.push((format!("basin_{k}"), label));
        }
        t
    }
}

fn equilibrium_seeds(spec: &ExampleSpec, initial: &[Vec<f64>]) -> Vec<Vec<f64>> {
    if spec.id == 1 {
        return unit_square_seeds();
    }
    let mut seeds = initial.to_vec();
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in initial {
        for i in 0..2 {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    for i in 0..5 {
        for j in 0..5 {
            let a = lo[0] - 1.0 + (hi[0] - lo[0] + 2.0) * i as f64 / 4.0;
            let b = lo[1] - 1.0 + (hi[1] - lo[1] + 2.0) * j as f64 / 4.0;
            seeds.push(vec![a, b]);
        }
    }
    seeds
}

pub fn portrait(cfg: &PortraitConfig) -> BenchResult<Portrait> {
    let sys = example(&cfg.spec)?;
    if sys.dim() != 2 {
        return Err(BenchError::Invalid(format!("example {} is not planar", cfg.spec.id)));
    }
    let scheme = Scheme::parse(&cfg.scheme, cfg.pade)?;
    let initial = match &cfg.initial {
        Some(pts) => pts.clone(),
        None if cfg.spec.id == 1 => boundary_points(),
        None => vec![cfg.spec.initial_state.clone()],
    };
    let (t0, t_end) = cfg.spec.horizon;
    let steps = cfg.steps.unwrap_or_else(|| (((t_end - t0) / cfg.h).round() as usize).max(1));
    let grid = TimeGrid::with_step(t0, cfg.h, steps)?;
    let trajectories = initial.iter().map(|x0| integrate(&sys, &scheme, &grid, x0)).collect::<Result<Vec<_>, _>>()?;
    let equilibria = find_equilibria(&sys, &equilibrium_seeds(&cfg.spec, &initial), EQUILIBRIUM_RESIDUAL)?;
    let opts = ClassifyOptions::new(cfg.h);
    let basins = if equilibria.stable().next().is_some() {
        initial
            .iter()
            .map(|x0| classify_basin(&sys, &scheme, x0, &equilibria, opts).map(Some))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        vec![None; initial.len()]
    };
    let intercept = if equilibria.stable().count() == 2 {
        manifold_intercept(&sys, &scheme, &equilibria, (0.0, 1.0), cfg.intercept_tol, opts).ok()
    } else {
        None
    };
    Ok(Portrait { equilibria, trajectories, basins, intercept })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_distinct_boundary_points() {
        let pts = boundary_points();
        assert_eq!(pts.len(), 12);
        for (i, a) in pts.iter().enumerate() {
            assert!(a[0] == 0.0 || a[0] == 1.0 || a[1] == 0.0 || a[1] == 1.0);
            assert!(pts[i + 1..].iter().all(|b| b != a));
        }
    }

    #[test]
    fn non_planar_example_rejected() {
        let cfg = PortraitConfig::new(ExampleSpec::new(4).unwrap(), "llrk4", 0.1);
        assert!(portrait(&cfg).is_err());
    }
}
