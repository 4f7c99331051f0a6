//! Samples `|R(z)|` of a Padé pair on a rectangle of the complex plane.

use llrk_core::densela::stability_value;
use llrk_core::PadeOrder;
use num_complex::Complex64;

use crate::error::{BenchError, BenchResult};
use crate::output::Table;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexGrid {
    pub re: (f64, f64),
    pub im: (f64, f64),
    pub n_re: usize,
    pub n_im: usize,
}

impl Default for ComplexGrid {
    fn default() -> Self {
        Self { re: (-100.0, 0.0), im: (-100.0, 100.0), n_re: 201, n_im: 201 }
    }
}

impl ComplexGrid {
    pub fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        let axis =
            |(a, b): (f64, f64), n: usize, k: usize| if n == 1 { a } else { a + (b - a) * k as f64 / (n - 1) as f64 };
        (0..self.n_re).flat_map(move |i| {
            (0..self.n_im).map(move |j| Complex64::new(axis(self.re, self.n_re, i), axis(self.im, self.n_im, j)))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub order: PadeOrder,
    pub samples: Vec<(Complex64, f64)>,
    /// Largest `|R|` over samples with `Re z ≤ 0`.
    pub max_left: f64,
    /// Largest `|R|` over samples on the imaginary axis, if any were sampled.
    pub max_imaginary_axis: Option<f64>,
    /// `|R(-10⁶)|`, the damping at the far end of the negative real axis.
    pub at_far_left: f64,
}

impl StabilityReport {
    pub fn table(&self) -> Table {
        let mut t = Table::new(&["re", "im", "abs_r"]);
        for (z, r) in &self.samples {
            t.push(vec![z.re.into(), z.im.into(), (*r).into()]);
        }
        t.summary.push(("pade".into(), self.order.to_string().replace(',', ":").into()));
        t.summary.push(("max_abs_r_left".into(), self.max_left.into()));
        t.summary.push(("max_abs_r_imaginary_axis".into(), self.max_imaginary_axis.into()));
        t.summary.push(("abs_r_at_minus_1e6".into(), self.at_far_left.into()));
        t
    }
}

pub fn stability_region(order: PadeOrder, grid: &ComplexGrid) -> BenchResult<StabilityReport> {
    if ![grid.re.0, grid.re.1, grid.im.0, grid.im.1].iter().all(|v| v.is_finite()) || grid.n_re == 0 || grid.n_im == 0 {
        return Err(BenchError::Invalid("stability grid must be finite and non-empty".into()));
    }
    let mut samples = Vec::with_capacity(grid.n_re * grid.n_im);
    let (mut max_left, mut max_axis) = (0.0f64, None::<f64>);
    for z in grid.points() {
        let r = stability_value(z, order)?.norm();
        if z.re <= 0.0 {
            max_left = max_left.max(r);
        }
        if z.re == 0.0 {
            max_axis = Some(max_axis.map_or(r, |m| m.max(r)));
        }
        samples.push((z, r));
    }
    let at_far_left = stability_value(Complex64::new(-1e6, 0.0), order)?.norm();
    Ok(StabilityReport { order, samples, max_left, max_imaginary_axis: max_axis, at_far_left })
}
