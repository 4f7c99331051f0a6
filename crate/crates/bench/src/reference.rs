//! Reference trajectories from Dormand-Prince 5 on a refined grid.

use llrk_core::rkbase::{rk_step, tableau_registry, ButcherTableau};
use llrk_core::{OdeSystem, TimeGrid, Trajectory};

use crate::error::{BenchError, BenchResult};

/// Agreement required between the runs at `refine` and `refine / 2`.
pub const REFERENCE_TOL: f64 = 1e-10;

/// Largest subdivision factor tried.
pub const REFINE_CAP: usize = 1 << 14;

/// Per-component floor, as a fraction of the component's largest magnitude,
/// applied to the denominator of the self-check so that sign changes do not
/// demand absolute accuracy at zero crossings.
pub const RELATIVE_FLOOR: f64 = 1e-3;

fn dp5_at_nodes(
    sys: &OdeSystem,
    tab: &ButcherTableau,
    grid: &TimeGrid,
    y0: &[f64],
    refine: usize,
) -> Option<Vec<Vec<f64>>> {
    let nodes = grid.nodes();
    let mut out = Vec::with_capacity(nodes.len());
    let mut y = y0.to_vec();
    out.push(y.clone());
    for w in nodes.windows(2) {
        let h = (w[1] - w[0]) / refine as f64;
        for k in 0..refine {
            y = rk_step(sys, tab, w[0] + k as f64 * h, &y, h).ok()?;
        }
        out.push(y.clone());
    }
    Some(out)
}

/// Largest change between two runs, relative to `max(|fine|, floor)` per
/// component.
pub fn self_check_gap(fine: &[Vec<f64>], coarse: &[Vec<f64>]) -> f64 {
    let d = fine.first().map_or(0, Vec::len);
    let floors: Vec<f64> =
        (0..d).map(|i| RELATIVE_FLOOR * fine.iter().fold(0.0f64, |m, s| m.max(s[i].abs()))).collect();
    let mut worst: f64 = 0.0;
    for (a, b) in fine.iter().zip(coarse) {
        for i in 0..d {
            let scale = a[i].abs().max(floors[i]);
            if scale > 0.0 {
                worst = worst.max((a[i] - b[i]).abs() / scale);
            } else if a[i] != b[i] {
                worst = f64::INFINITY;
            }
        }
    }
    if worst.is_nan() {
        f64::INFINITY
    } else {
        worst
    }
}

/// Integrates with DP5, splitting every grid interval into `refine` equal
/// substeps, and doubles `refine` until two consecutive runs agree to
/// [`REFERENCE_TOL`] at every grid node.
pub fn reference_solution(sys: &OdeSystem, grid: &TimeGrid, y0: &[f64], refine: usize) -> BenchResult<Trajectory> {
    if refine < 2 {
        return Err(BenchError::Invalid(format!("refine must be at least 2, got {refine}")));
    }
    if y0.len() != sys.dim() {
        return Err(llrk_core::Error::DimensionMismatch { expected: sys.dim(), got: y0.len() }.into());
    }
    let tab = tableau_registry("dp5")?.tableau;
    let mut r = refine;
    let mut coarse = dp5_at_nodes(sys, &tab, grid, y0, r / 2);
    let mut worst = f64::INFINITY;
    while r <= REFINE_CAP {
        let fine = dp5_at_nodes(sys, &tab, grid, y0, r);
        if let (Some(f), Some(c)) = (&fine, &coarse) {
            worst = self_check_gap(f, c);
            if worst <= REFERENCE_TOL {
                return Ok(Trajectory { times: grid.nodes().to_vec(), states: fine.unwrap(), max_kappa: None });
            }
        }
        coarse = fine;
        r *= 2;
    }
    Err(BenchError::ReferenceUnconverged { refine: r / 2, worst })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decay_matches_closed_form() {
        let sys = OdeSystem::autonomous(1, "decay", |_, x| vec![-x[0]]);
        let grid = TimeGrid::uniform(0.0, 1.0, 10).unwrap();
        let r = reference_solution(&sys, &grid, &[1.0], 2).unwrap();
        for (t, s) in r.times.iter().zip(&r.states) {
            assert!((s[0] - (-t).exp()).abs() <= 1e-10);
        }
    }

    #[test]
    fn refine_one_rejected() {
        let sys = OdeSystem::autonomous(1, "decay", |_, x| vec![-x[0]]);
        let grid = TimeGrid::uniform(0.0, 1.0, 10).unwrap();
        assert!(matches!(reference_solution(&sys, &grid, &[1.0], 1), Err(BenchError::Invalid(_))));
    }

    #[test]
    fn gap_uses_component_floor() {
        let fine = vec![vec![1.0, 0.0], vec![-1.0, 1e-9]];
        let coarse = vec![vec![1.0, 1e-12], vec![-1.0, 1e-9]];
        // floor for the second component is 1e-12, so the zero entry differs by one floor
        assert!((self_check_gap(&fine, &coarse) - 1.0).abs() < 1e-12);
    }
}
