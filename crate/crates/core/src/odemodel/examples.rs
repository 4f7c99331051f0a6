//! The seven benchmark problems: a bistable system with a separatrix,
//! two complex oscillators (realified), two stiff Hilbert-matrix systems,
//! the Brusselator and a Van der Pol variant.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::system::OdeSystem;
use crate::densela::DenseMatrix;
use crate::error::{Error, Result};

/// Problem id, parameters, initial state and time horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct ExampleSpec {
    pub id: u32,
    pub params: BTreeMap<String, f64>,
    pub initial_state: Vec<f64>,
    pub horizon: (f64, f64),
}

fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

impl ExampleSpec {
    /// Default parameters, initial values and horizon for example `id`.
    pub fn new(id: u32) -> Result<Self> {
        let (p, x0, horizon) = match id {
            // no horizon is attached to this problem; 20 is long enough to settle
            1 => (params(&[("mu", 15.0), ("lambda", 57.0)]), vec![0.0, 0.5], (0.0, 20.0)),
            2 => (params(&[]), vec![-2.5, 0.0, -1.5, 0.0], (0.0, 4.0 * PI)),
            3 => (params(&[("nonlinear", 0.1)]), vec![1.0, 0.0, 1.0, 0.0], (0.0, 4.0 * PI)),
            4 => (params(&[("n", 12.0), ("alpha", 100.0)]), vec![1.0; 12], (0.0, 1.0)),
            5 => {
                (params(&[("n", 12.0), ("alpha", 100.0), ("beta", 100.0), ("gamma", 60.0)]), vec![-0.5; 12], (0.0, 1.0))
            }
            6 => (params(&[("a", 1.0), ("b", 3.0)]), vec![1.5, 3.0], (0.0, 20.0)),
            7 => (params(&[("epsilon", 1e3), ("standard_vdp", 0.0)]), vec![2.0, 0.0], (0.0, 2.0)),
            other => return Err(Error::UnknownExample(other)),
        };
        Ok(Self { id, params: p, initial_state: x0, horizon })
    }

    /// Overrides one parameter. Changing `n` on the Hilbert problems resizes
    /// the initial state to the constant vector of the new length.
    pub fn with_param(mut self, name: &str, value: f64) -> Result<Self> {
        let slot =
            self.params.get_mut(name).ok_or_else(|| Error::UnknownParameter { id: self.id, name: name.to_string() })?;
        *slot = value;
        if name == "n" {
            let n = hilbert_size(value)?;
            let fill = self.initial_state[0];
            self.initial_state = vec![fill; n];
        }
        Ok(self)
    }

    pub fn param(&self, name: &str) -> f64 {
        self.params[name]
    }

    /// Examples 2 and 3 are complex systems stored as (Re, Im) pairs.
    pub fn is_realified(&self) -> bool {
        matches!(self.id, 2 | 3)
    }
}

fn hilbert_size(value: f64) -> Result<usize> {
    if value >= 1.0 && value.fract() == 0.0 {
        Ok(value as usize)
    } else {
        Err(Error::InvalidArgument(format!("Hilbert size must be a positive integer, got {value}")))
    }
}

/// `H_ij = 1/(i + j - 1)` with 1-based indices.
pub fn hilbert(n: usize) -> DenseMatrix {
    DenseMatrix::from_fn(n, n, |i, j| 1.0 / (i + j + 1) as f64)
}

/// Builds the system described by `spec`, with analytic Jacobian.
pub fn example(spec: &ExampleSpec) -> Result<OdeSystem> {
    let sys = match spec.id {
        1 => bistable(spec.param("mu"), spec.param("lambda")),
        2 => periodic_linear(),
        3 => periodic_nonlinear(spec.param("nonlinear")),
        4 => stiff_hilbert(hilbert_size(spec.param("n"))?, spec.param("alpha")),
        5 => stiff_hilbert_nonlinear(
            hilbert_size(spec.param("n"))?,
            spec.param("alpha"),
            spec.param("beta"),
            spec.param("gamma"),
        ),
        6 => brusselator(spec.param("a"), spec.param("b")),
        7 => van_der_pol(spec.param("epsilon"), spec.param("standard_vdp") != 0.0),
        other => return Err(Error::UnknownExample(other)),
    };
    if sys.dim() != spec.initial_state.len() {
        return Err(Error::DimensionMismatch { expected: sys.dim(), got: spec.initial_state.len() });
    }
    Ok(sys)
}

fn bistable(mu: f64, lambda: f64) -> OdeSystem {
    let g = move |u: f64| u / (1.0 + u + lambda * u * u);
    let dg = move |u: f64| {
        let den = 1.0 + u + lambda * u * u;
        (1.0 - lambda * u * u) / (den * den)
    };
    OdeSystem::autonomous(2, "example1-bistable", move |_, x| {
        vec![-2.0 * x[0] + x[1] + 1.0 - mu * g(x[0]), x[0] - 2.0 * x[1] + 1.0 - mu * g(x[1])]
    })
    .with_jacobian(move |_, x| DenseMatrix::from_rows(&[[-2.0 - mu * dg(x[0]), 1.0], [1.0, -2.0 - mu * dg(x[1])]]))
}

// Layout (Re x1, Im x1, Re x2, Im x2); A = diag(i, -i).
fn periodic_linear() -> OdeSystem {
    OdeSystem::autonomous(4, "example2-periodic-linear", |_, x| vec![-x[1], x[0] + 2.0, x[3], -(x[2] + 2.0)])
        .with_jacobian(|_, _| {
            DenseMatrix::from_rows(&[
                [0.0, -1.0, 0.0, 0.0],
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
                [0.0, 0.0, -1.0, 0.0],
            ])
        })
}

fn periodic_nonlinear(c: f64) -> OdeSystem {
    OdeSystem::autonomous(4, "example3-periodic-nonlinear", move |_, x| {
        let (a1, b1, a2, b2) = (x[0], x[1], x[2], x[3]);
        vec![
            -b1 + c * (a1 * a1 - b1 * b1),
            a1 + 2.0 + 2.0 * c * a1 * b1,
            b2 + c * (a2 * a2 - b2 * b2),
            -(a2 + 2.0) + 2.0 * c * a2 * b2,
        ]
    })
    .with_jacobian(move |_, x| {
        let (a1, b1, a2, b2) = (x[0], x[1], x[2], x[3]);
        DenseMatrix::from_rows(&[
            [2.0 * c * a1, -1.0 - 2.0 * c * b1, 0.0, 0.0],
            [1.0 + 2.0 * c * b1, 2.0 * c * a1, 0.0, 0.0],
            [0.0, 0.0, 2.0 * c * a2, 1.0 - 2.0 * c * b2],
            [0.0, 0.0, -1.0 + 2.0 * c * b2, 2.0 * c * a2],
        ])
    })
}

fn stiff_hilbert(n: usize, alpha: f64) -> OdeSystem {
    let a = hilbert(n).scaled(-alpha);
    let jac = a.clone();
    OdeSystem::autonomous(n, "example4-stiff-linear", move |_, x| {
        let shifted: Vec<f64> = x.iter().map(|v| v + 1.0).collect();
        a.mat_vec(&shifted)
    })
    .with_jacobian(move |_, _| jac.clone())
}

fn stiff_hilbert_nonlinear(n: usize, alpha: f64, beta: f64, gamma: f64) -> OdeSystem {
    let a = hilbert(n).scaled(alpha);
    let jac = a.clone();
    OdeSystem::autonomous(n, "example5-stiff-nonlinear", move |_, x| {
        let shifted: Vec<f64> = x.iter().map(|v| v - 1.0).collect();
        let mut out = a.mat_vec(&shifted);
        for (o, (&xi, &si)) in out.iter_mut().zip(x.iter().zip(&shifted)) {
            *o += beta * si * si - gamma * (xi * xi * xi - 1.0);
        }
        out
    })
    .with_jacobian(move |_, x| {
        let mut j = jac.clone();
        for (i, &xi) in x.iter().enumerate() {
            j[(i, i)] += 2.0 * beta * (xi - 1.0) - 3.0 * gamma * xi * xi;
        }
        j
    })
}

fn brusselator(a: f64, b: f64) -> OdeSystem {
    OdeSystem::autonomous(2, "example6-brusselator", move |_, x| {
        let x1sq = x[0] * x[0];
        vec![a + x1sq * x[1] - (b + 1.0) * x[0], b * x[0] - x1sq * x[1]]
    })
    .with_jacobian(move |_, x| {
        let x1x2 = x[0] * x[1];
        let x1sq = x[0] * x[0];
        DenseMatrix::from_rows(&[[2.0 * x1x2 - (b + 1.0), x1sq], [b - 2.0 * x1x2, -x1sq]])
    })
}

// The default form keeps the nonlinear term as x2' = ε((1 - x2²) x1 + x2);
// `standard` switches to the classical ε((1 - x1²) x2 - x1).
fn van_der_pol(eps: f64, standard: bool) -> OdeSystem {
    if standard {
        OdeSystem::autonomous(2, "example7-van-der-pol", move |_, x| {
            vec![x[1], eps * ((1.0 - x[0] * x[0]) * x[1] - x[0])]
        })
        .with_jacobian(move |_, x| {
            DenseMatrix::from_rows(&[[0.0, 1.0], [eps * (-2.0 * x[0] * x[1] - 1.0), eps * (1.0 - x[0] * x[0])]])
        })
    } else {
        OdeSystem::autonomous(2, "example7-van-der-pol-printed", move |_, x| {
            vec![x[1], eps * ((1.0 - x[1] * x[1]) * x[0] + x[1])]
        })
        .with_jacobian(move |_, x| {
            DenseMatrix::from_rows(&[[0.0, 1.0], [eps * (1.0 - x[1] * x[1]), eps * (1.0 - 2.0 * x[0] * x[1])]])
        })
    }
}
