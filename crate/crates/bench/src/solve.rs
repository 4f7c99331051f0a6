use std::time::{Duration, Instant};

use llrk_core::dynprobe::{relative_error, relative_error_complex};
use llrk_core::{integrate, Trajectory};

use crate::config::RunConfig;
use crate::error::BenchResult;
use crate::output::Table;
use crate::reference::reference_solution;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub trajectory: Trajectory,
    /// Present only when a reference was computed on the same grid.
    pub relative_error: Option<f64>,
    pub steps: usize,
    pub max_kappa: Option<u32>,
    pub wall_time: Duration,
}

impl SolveReport {
    pub fn table(&self) -> Table {
        let d = self.trajectory.dim();
        let names: Vec<String> = std::iter::once("t".to_string()).chain((1..=d).map(|i| format!("x{i}"))).collect();
        let cols: Vec<&str> = names.iter().map(String::as_str).collect();
        let mut t = Table::new(&cols);
        for (time, x) in self.trajectory.times.iter().zip(&self.trajectory.states) {
            t.push(std::iter::once((*time).into()).chain(x.iter().map(|&v| v.into())).collect());
        }
        t.summary.push(("steps".into(), self.steps.into()));
        t.summary.push(("max_kappa".into(), self.max_kappa.into()));
        t.summary.push(("re".into(), self.relative_error.into()));
        t
    }
}

/// Integrates the configured example; with `with_reference`, also computes
/// the relative error against a refined reference on the same grid.
pub fn solve(cfg: &RunConfig, with_reference: bool) -> BenchResult<SolveReport> {
    let (spec, sys) = cfg.system()?;
    let scheme = cfg.scheme()?;
    let grid = cfg.grid(&spec)?;
    let start = Instant::now();
    let trajectory = integrate(&sys, &scheme, &grid, &spec.initial_state)?;
    let wall_time = start.elapsed();
    let relative_error = if with_reference {
        let z = reference_solution(&sys, &grid, &spec.initial_state, cfg.refine)?;
        Some(if spec.is_realified() {
            relative_error_complex(&z, &trajectory)?
        } else {
            relative_error(&z, &trajectory)?
        })
    } else {
        None
    };
    Ok(SolveReport { steps: grid.steps(), max_kappa: trajectory.max_kappa, trajectory, relative_error, wall_time })
}
