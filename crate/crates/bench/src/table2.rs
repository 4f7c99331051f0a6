//! Relative errors of LL-type schemes on the benchmark problems, measured
//! on uniform grids against a refined Dormand-Prince reference.

use llrk_core::dynprobe::{relative_error, relative_error_complex};
use llrk_core::odemodel::{example, ExampleSpec};
use llrk_core::{integrate, PadeOrder, Scheme, TimeGrid};
use rayon::prelude::*;

use crate::error::BenchResult;
use crate::output::Table;
use crate::reference::reference_solution;

/// Step counts per example, ids 2 through 7.
pub const DEFAULT_STEPS: [(u32, usize); 6] = [(2, 334), (3, 287), (4, 66), (5, 49), (6, 47), (7, 2285)];

#[derive(Debug, Clone, PartialEq)]
pub struct Table2Config {
    pub cases: Vec<(ExampleSpec, usize)>,
    pub schemes: Vec<String>,
    pub pade: PadeOrder,
    pub refine: usize,
}

impl Default for Table2Config {
    fn default() -> Self {
        Self {
            cases: DEFAULT_STEPS.iter().map(|&(id, n)| (ExampleSpec::new(id).expect("known example"), n)).collect(),
            schemes: vec!["ll2".into(), "llrk4".into()],
            pade: PadeOrder::default(),
            refine: 16,
        }
    }
}

impl Table2Config {
    pub fn only(mut self, ids: &[u32]) -> Self {
        self.cases.retain(|(s, _)| ids.contains(&s.id));
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table2Row {
    pub example: u32,
    pub scheme: String,
    pub steps: usize,
    pub relative_error: Option<f64>,
    pub max_kappa: Option<u32>,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table2 {
    pub rows: Vec<Table2Row>,
}

impl Table2 {
    pub fn re(&self, example: u32, scheme: &str) -> Option<f64> {
        self.rows.iter().find(|r| r.example == example && r.scheme == scheme).and_then(|r| r.relative_error)
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(&["example", "scheme", "ns", "re", "max_kappa", "status"]);
        t.notes.push("uniform grids with the step counts of the original adaptive runs".into());
        t.notes.push("re against a DP5 reference on the same grid refined until self-consistent to 1e-10".into());
        for r in &self.rows {
            t.push(vec![
                r.example.into(),
                r.scheme.as_str().into(),
                r.steps.into(),
                r.relative_error.into(),
                r.max_kappa.into(),
                r.status.as_str().into(),
            ]);
        }
        t
    }
}

fn run_case(spec: &ExampleSpec, steps: usize, cfg: &Table2Config) -> BenchResult<Vec<Table2Row>> {
    let sys = example(spec)?;
    let grid = TimeGrid::uniform(spec.horizon.0, spec.horizon.1, steps)?;
    let reference = reference_solution(&sys, &grid, &spec.initial_state, cfg.refine);
    let mut rows = Vec::with_capacity(cfg.schemes.len());
    for name in &cfg.schemes {
        let scheme = Scheme::parse(name, cfg.pade)?;
        let mut row = Table2Row {
            example: spec.id,
            scheme: name.clone(),
            steps,
            relative_error: None,
            max_kappa: None,
            status: "ok".into(),
        };
        match (&reference, integrate(&sys, &scheme, &grid, &spec.initial_state)) {
            (Err(e), _) => row.status = e.to_string().replace(',', ";"),
            (_, Err(_)) => row.status = "diverged".into(),
            (Ok(z), Ok(y)) => {
                row.max_kappa = y.max_kappa;
                row.relative_error =
                    Some(if spec.is_realified() { relative_error_complex(z, &y)? } else { relative_error(z, &y)? });
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn run_table2(cfg: &Table2Config) -> BenchResult<Table2> {
    let per_case: Vec<BenchResult<Vec<Table2Row>>> =
        cfg.cases.par_iter().map(|(spec, steps)| run_case(spec, *steps, cfg)).collect();
    let mut rows = Vec::new();
    for r in per_case {
        rows.extend(r?);
    }
    Ok(Table2 { rows })
}
