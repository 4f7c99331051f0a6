//! Probes of the dynamics reproduced by a one-step scheme: equilibria,
//! basins of attraction, the separatrix intercept on the `x₂` axis,
//! convergence-order estimates and the linearization check at equilibria.

use crate::densela::{expm_pade_scaled, DenseMatrix, Lu, PadeOrder};
use crate::error::{Error, Result};
use crate::llrk::{Stepper, Trajectory};
use crate::odemodel::OdeSystem;

/// Residual bound for a point to count as an equilibrium.
pub const EQUILIBRIUM_RESIDUAL: f64 = 1e-12;

/// Eigenvalue real parts within this distance of zero are reported as marginal.
pub const MARGINAL_BAND: f64 = 1e-10;

/// Reference values below this magnitude are left out of the relative error.
pub const RELATIVE_ERROR_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Equilibrium {
    pub point: Vec<f64>,
    pub stability: Stability,
    /// Largest real part of the Jacobian spectrum.
    pub spectral_abscissa: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EquilibriumSet {
    pub points: Vec<Equilibrium>,
    /// Seeds from which Newton's method did not converge.
    pub failed_seeds: Vec<Vec<f64>>,
}

impl EquilibriumSet {
    pub fn stable(&self) -> impl Iterator<Item = (usize, &Equilibrium)> {
        self.points.iter().enumerate().filter(|(_, e)| e.stability == Stability::Stable)
    }

    pub fn unstable(&self) -> impl Iterator<Item = (usize, &Equilibrium)> {
        self.points.iter().enumerate().filter(|(_, e)| e.stability == Stability::Unstable)
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn newton(sys: &OdeSystem, seed: &[f64], tol: f64) -> Option<Vec<f64>> {
    let mut x = seed.to_vec();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut polish = 0;
    for _ in 0..100 {
        let f = sys.field(0.0, &x).ok()?;
        let r = inf_norm(&f);
        if r <= tol {
            // a few extra iterations push the residual down to rounding level
            if best.as_ref().is_none_or(|b| r < b.0) {
                best = Some((r, x.clone()));
            }
            polish += 1;
            if r == 0.0 || polish > 4 {
                break;
            }
        }
        let j = sys.jacobian(0.0, &x).ok()?;
        let dx = Lu::factor(&j).ok()?.solve_vec(&f).ok()?;
        for (xi, d) in x.iter_mut().zip(&dx) {
            *xi -= d;
        }
        if x.iter().any(|v| !v.is_finite()) {
            break;
        }
    }
    best.map(|b| b.1)
}

/// Newton iteration from each seed; converged roots within `1e-8` of each
/// other are merged.
pub fn find_equilibria(sys: &OdeSystem, seeds: &[Vec<f64>], tol: f64) -> Result<EquilibriumSet> {
    let mut set = EquilibriumSet::default();
    for seed in seeds {
        if seed.len() != sys.dim() {
            return Err(Error::DimensionMismatch { expected: sys.dim(), got: seed.len() });
        }
        if seed.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite seed {seed:?}")));
        }
        let Some(root) = newton(sys, seed, tol) else {
            set.failed_seeds.push(seed.clone());
            continue;
        };
        let duplicate = set.points.iter().any(|e| e.point.iter().zip(&root).all(|(a, b)| (a - b).abs() <= 1e-8));
        if duplicate {
            continue;
        }
        let alpha = spectral_abscissa(&sys.jacobian(0.0, &root)?)?;
        let stability = if alpha < -MARGINAL_BAND {
            Stability::Stable
        } else if alpha > MARGINAL_BAND {
            Stability::Unstable
        } else {
            Stability::Marginal
        };
        set.points.push(Equilibrium { point: root, stability, spectral_abscissa: alpha });
    }
    // deterministic order regardless of seed order
    set.points.sort_by(|a, b| a.point.partial_cmp(&b.point).unwrap_or(std::cmp::Ordering::Equal));
    Ok(set)
}

/// Largest real part of the eigenvalues of `j`.
///
/// Dimensions up to three use the characteristic polynomial; larger ones use
/// the spectral radius of `exp(τ j)`, estimated through normalized repeated
/// squaring, since `ρ(exp(τ j)) = exp(τ α(j))`.
pub fn spectral_abscissa(j: &DenseMatrix) -> Result<f64> {
    if !j.is_square() {
        return Err(Error::NotSquare { rows: j.rows(), cols: j.cols() });
    }
    match j.rows() {
        0 => Err(Error::InvalidArgument("empty matrix".into())),
        1 => Ok(j[(0, 0)]),
        2 => {
            let tr = j[(0, 0)] + j[(1, 1)];
            let det = j[(0, 0)] * j[(1, 1)] - j[(0, 1)] * j[(1, 0)];
            let disc = tr * tr - 4.0 * det;
            Ok(if disc >= 0.0 { 0.5 * (tr + disc.sqrt()) } else { 0.5 * tr })
        }
        3 => Ok(cubic_abscissa(j)),
        _ => gelfand_abscissa(j),
    }
}

fn cubic_abscissa(j: &DenseMatrix) -> f64 {
    let m = |a: usize, b: usize| j[(a, b)];
    let c2 = m(0, 0) + m(1, 1) + m(2, 2);
    let c1 = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0) + m(1, 1) * m(2, 2)
        - m(1, 2) * m(2, 1);
    let c0 = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
        + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    // λ³ - c2 λ² + c1 λ - c0
    let p = |x: f64| ((x - c2) * x + c1) * x - c0;
    let bound = 1.0 + c2.abs().max(c1.abs()).max(c0.abs());
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if p(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = 0.5 * (lo + hi);
    // deflate: (λ - r)(λ² + b λ + c)
    let b = r - c2;
    let c = c1 + r * b;
    let disc = b * b - 4.0 * c;
    let quad = if disc >= 0.0 { 0.5 * (-b + disc.sqrt()) } else { -0.5 * b };
    r.max(quad)
}

fn gelfand_abscissa(j: &DenseMatrix) -> Result<f64> {
    let tau = 1.0 / j.norm_inf().max(1.0);
    let (mut p, _) = expm_pade_scaled(j, tau, PadeOrder::default())?;
    let mut log_scale = 0.0;
    let squarings = 48;
    for _ in 0..squarings {
        p = p.matmul(&p);
        log_scale *= 2.0;
        let n = p.norm_inf();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NonFiniteMatrix);
        }
        p = p.scaled(1.0 / n);
        log_scale += n.ln();
    }
    Ok(log_scale / (2f64.powi(squarings) * tau))
}

/// Step size, arrival tolerance and step budget for basin classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    pub h: f64,
    pub tol: f64,
    pub max_steps: usize,
}

impl ClassifyOptions {
    pub fn new(h: f64) -> Self {
        Self { h, tol: 1e-6, max_steps: 100_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasinOutcome {
    /// Index into `EquilibriumSet::points`.
    Attractor(usize),
    Undecided,
}

/// Iterates the scheme from `x0` until it comes within `tol` (max norm) of
/// a stable equilibrium, or the step budget runs out.
pub fn classify_basin(
    sys: &OdeSystem,
    stepper: &dyn Stepper,
    x0: &[f64],
    attractors: &EquilibriumSet,
    opts: ClassifyOptions,
) -> Result<BasinOutcome> {
    let targets: Vec<(usize, &Equilibrium)> = attractors.stable().collect();
    if targets.is_empty() {
        return Err(Error::InvalidArgument("no stable equilibria to classify against".into()));
    }
    let hit = |x: &[f64]| {
        targets.iter().find(|(_, e)| e.point.iter().zip(x).all(|(a, b)| (a - b).abs() <= opts.tol)).map(|(k, _)| *k)
    };
    let mut x = x0.to_vec();
    let mut t = 0.0;
    for n in 0..=opts.max_steps {
        if let Some(k) = hit(&x) {
            return Ok(BasinOutcome::Attractor(k));
        }
        if n == opts.max_steps {
            break;
        }
        x = stepper
            .step(sys, t, &x, opts.h)
            .map_err(|e| Error::StepFailure { index: n, t, source: Box::new(e) })?
            .state;
        t += opts.h;
    }
    Ok(BasinOutcome::Undecided)
}

/// Outcome of bisecting for the separatrix crossing of the `x₂` axis.
#[derive(Debug, Clone, PartialEq)]
pub struct BisectionResult {
    pub xi_h: f64,
    pub iterations: usize,
    pub bracket_width: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Bisects `ξ` on the segment `{(0, ξ) : lo ≤ ξ ≤ hi}` of a planar system
/// until the two basins are separated by at most `tol`.
pub fn manifold_intercept(
    sys: &OdeSystem,
    stepper: &dyn Stepper,
    attractors: &EquilibriumSet,
    bracket: (f64, f64),
    tol: f64,
    opts: ClassifyOptions,
) -> Result<BisectionResult> {
    if sys.dim() != 2 {
        return Err(Error::InvalidArgument("manifold intercept needs a planar system".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("bisection tolerance must be positive".into()));
    }
    let (mut lo, mut hi) = bracket;
    let classify = |xi: f64| -> Result<usize> {
        match classify_basin(sys, stepper, &[0.0, xi], attractors, opts)? {
            BasinOutcome::Attractor(k) => Ok(k),
            BasinOutcome::Undecided => Err(Error::Unclassified { state: vec![0.0, xi] }),
        }
    };
    let lo_class = classify(lo)?;
    let hi_class = classify(hi)?;
    if lo_class == hi_class {
        return Err(Error::SameBasin);
    }
    let mut iterations = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if classify(mid)? == lo_class {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    Ok(BisectionResult { xi_h: 0.5 * (lo + hi), iterations, bracket_width: hi - lo, lo, hi })
}

/// `r_h = log₂((ξ_h - ξ_{h/2}) / (ξ_{h/2} - ξ_{h/4}))`.
pub fn order_estimate(xi_h: f64, xi_h2: f64, xi_h4: f64) -> Result<f64> {
    let num = xi_h - xi_h2;
    let den = xi_h2 - xi_h4;
    if den.abs() < 1e-15 {
        return Err(Error::DegenerateDifferences);
    }
    let ratio = num / den;
    if !(ratio > 0.0) || !ratio.is_finite() {
        return Err(Error::DegenerateDifferences);
    }
    Ok(ratio.log2())
}

fn check_same_grid(reference: &Trajectory, approx: &Trajectory) -> Result<()> {
    if reference.times != approx.times || reference.dim() != approx.dim() {
        return Err(Error::GridMismatch);
    }
    if reference.states.iter().chain(&approx.states).any(|s| s.len() != reference.dim()) {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// `max_{i,j} |z_i(t_j) - y_i(t_j)| / |z_i(t_j)|`, skipping entries with
/// `|z_i(t_j)| < 1e-12`.
pub fn relative_error(reference: &Trajectory, approx: &Trajectory) -> Result<f64> {
    check_same_grid(reference, approx)?;
    let mut worst: f64 = 0.0;
    for (z, y) in reference.states.iter().zip(&approx.states) {
        for (zi, yi) in z.iter().zip(y) {
            if zi.abs() >= RELATIVE_ERROR_FLOOR {
                worst = worst.max((zi - yi).abs() / zi.abs());
            }
        }
    }
    Ok(worst)
}

/// Relative error for realified complex trajectories: consecutive
/// `(Re, Im)` pairs are compared as complex numbers.
pub fn relative_error_complex(reference: &Trajectory, approx: &Trajectory) -> Result<f64> {
    check_same_grid(reference, approx)?;
    if !reference.dim().is_multiple_of(2) {
        return Err(Error::InvalidArgument("realified state must have even dimension".into()));
    }
    let mut worst: f64 = 0.0;
    for (z, y) in reference.states.iter().zip(&approx.states) {
        for (zc, yc) in z.chunks_exact(2).zip(y.chunks_exact(2)) {
            let modulus = zc[0].hypot(zc[1]);
            if modulus >= RELATIVE_ERROR_FLOOR {
                worst = worst.max((zc[0] - yc[0]).hypot(zc[1] - yc[1]) / modulus);
            }
        }
    }
    Ok(worst)
}

/// `‖step(ξ + εv) - ξ - exp(h f_x(ξ)) εv‖_∞ / ε²` for each `ε`.
///
/// Bounded ratios as `ε → 0` mean the scheme's linearization at `ξ` is the
/// exact flow `exp(h f_x(ξ))`.
pub fn linearization_probe(
    sys: &OdeSystem,
    stepper: &dyn Stepper,
    xi: &[f64],
    h: f64,
    v: &[f64],
    eps_list: &[f64],
) -> Result<Vec<f64>> {
    if inf_norm(&sys.field(0.0, xi)?) > EQUILIBRIUM_RESIDUAL {
        return Err(Error::InvalidArgument("probe point is not an equilibrium".into()));
    }
    if eps_list.is_empty() || eps_list.iter().any(|&e| !(e > 0.0)) || eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("perturbations must be positive and decreasing".into()));
    }
    if v.len() != xi.len() {
        return Err(Error::DimensionMismatch { expected: xi.len(), got: v.len() });
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(Error::InvalidArgument("direction must be non-zero".into()));
    }
    let dir: Vec<f64> = v.iter().map(|x| x / norm).collect();
    let (flow, _) = expm_pade_scaled(&sys.jacobian(0.0, xi)?, h, PadeOrder::default())?;
    let linear = flow.mat_vec(&dir);
    eps_list
        .iter()
        .map(|&eps| {
            let start: Vec<f64> = xi.iter().zip(&dir).map(|(a, d)| a + eps * d).collect();
            let next = stepper.step(sys, 0.0, &start, h)?.state;
            let dev = next.iter().zip(xi).zip(&linear).map(|((n, x), l)| ((n - x) - eps * l).abs()).fold(0.0, f64::max);
            Ok(dev / (eps * eps))
        })
        .collect()
}
