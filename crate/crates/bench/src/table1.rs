//! Separatrix intercepts `ξ_h` of the bistable system and their observed
//! convergence orders `r_h`, for several schemes and step sizes `h = 2^-k`.

use llrk_core::dynprobe::{find_equilibria, manifold_intercept, order_estimate, ClassifyOptions, EquilibriumSet};
use llrk_core::odemodel::{example, ExampleSpec};
use llrk_core::{OdeSystem, PadeOrder, Scheme};
use rayon::prelude::*;

use crate::error::{BenchError, BenchResult};
use crate::output::Table;

#[derive(Debug, Clone, PartialEq)]
pub struct Table1Config {
    pub spec: ExampleSpec,
    pub schemes: Vec<String>,
    /// Exponents `k` of `h = 2^-k`, in increasing order.
    pub levels: Vec<u32>,
    pub bracket: (f64, f64),
    pub tol: f64,
    pub classify_tol: f64,
    pub max_steps: usize,
    pub pade: PadeOrder,
}

impl Default for Table1Config {
    fn default() -> Self {
        Self {
            spec: ExampleSpec::new(1).expect("example 1 exists"),
            schemes: vec!["ll2".into(), "dp5".into(), "llrk4".into()],
            levels: (1..=9).collect(),
            bracket: (0.0, 1.0),
            tol: 1e-13,
            classify_tol: 1e-6,
            max_steps: 100_000,
            pade: PadeOrder::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table1Row {
    pub scheme: String,
    pub level: u32,
    pub h: f64,
    pub xi_h: Option<f64>,
    pub iterations: Option<usize>,
    pub bracket_width: Option<f64>,
    pub r_h: Option<f64>,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table1 {
    pub equilibria: EquilibriumSet,
    pub rows: Vec<Table1Row>,
}

impl Table1 {
    pub fn row(&self, scheme: &str, level: u32) -> Option<&Table1Row> {
        self.rows.iter().find(|r| r.scheme == scheme && r.level == level)
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(&["scheme", "h", "xi_h", "iterations", "bracket_width", "r_h", "status"]);
        for r in &self.rows {
            t.push(vec![
                r.scheme.as_str().into(),
                r.h.into(),
                r.xi_h.into(),
                r.iterations.into(),
                r.bracket_width.into(),
                r.r_h.into(),
                r.status.as_str().into(),
            ]);
        }
        t
    }
}

/// Seeds on a 5×5 grid over the unit square.
pub fn unit_square_seeds() -> Vec<Vec<f64>> {
    let ticks = [0.0, 0.25, 0.5, 0.75, 1.0];
    ticks.iter().flat_map(|&a| ticks.iter().map(move |&b| vec![a, b])).collect()
}

pub fn bistable_equilibria(sys: &OdeSystem) -> BenchResult<EquilibriumSet> {
    Ok(find_equilibria(sys, &unit_square_seeds(), llrk_core::dynprobe::EQUILIBRIUM_RESIDUAL)?)
}

pub fn run_table1(cfg: &Table1Config) -> BenchResult<Table1> {
    if cfg.spec.id != 1 {
        return Err(BenchError::Invalid("the intercept table is defined for example 1 only".into()));
    }
    let sys = example(&cfg.spec)?;
    let equilibria = bistable_equilibria(&sys)?;
    if equilibria.stable().count() != 2 {
        return Err(BenchError::Invalid(format!(
            "expected two stable equilibria, found {}",
            equilibria.stable().count()
        )));
    }
    let schemes: Vec<Scheme> = cfg.schemes.iter().map(|s| Scheme::parse(s, cfg.pade)).collect::<Result<_, _>>()?;
    let jobs: Vec<(usize, u32)> = (0..schemes.len()).flat_map(|s| cfg.levels.iter().map(move |&k| (s, k))).collect();
    let mut rows: Vec<Table1Row> = jobs
        .par_iter()
        .map(|&(s, k)| {
            let h = 0.5f64.powi(k as i32);
            let opts = ClassifyOptions { h, tol: cfg.classify_tol, max_steps: cfg.max_steps };
            let res = manifold_intercept(&sys, &schemes[s], &equilibria, cfg.bracket, cfg.tol, opts);
            let (xi_h, iterations, bracket_width, status) = match res {
                Ok(b) => (Some(b.xi_h), Some(b.iterations), Some(b.bracket_width), "ok".to_string()),
                Err(e) => (None, None, None, failure_label(&e)),
            };
            Table1Row {
                scheme: cfg.schemes[s].clone(),
                level: k,
                h,
                xi_h,
                iterations,
                bracket_width,
                r_h: None,
                status,
            }
        })
        .collect();
    for i in 0..rows.len() {
        let (scheme, k) = (rows[i].scheme.clone(), rows[i].level);
        let xi = |level: u32| rows.iter().find(|r| r.scheme == scheme && r.level == level).and_then(|r| r.xi_h);
        if let (Some(a), Some(b), Some(c)) = (xi(k), xi(k + 1), xi(k + 2)) {
            rows[i].r_h = order_estimate(a, b, c).ok();
        }
    }
    Ok(Table1 { equilibria, rows })
}

fn failure_label(e: &llrk_core::Error) -> String {
    use llrk_core::Error;
    match e {
        Error::SameBasin => "same-basin".into(),
        Error::Unclassified { .. } => "undecided".into(),
        Error::StepFailure { .. } => "diverged".into(),
        other => other.to_string().replace(',', ";"),
    }
}
