//! Explicit Runge-Kutta tableaus and the fixed-step RK map.
//!
//! Registered tableaus are checked against the full set of order
//! conditions (one per rooted tree) up to their claimed order before they
//! are handed out.

use std::fmt;

use crate::densela::DenseMatrix;
use crate::error::{Error, Result};
use crate::odemodel::OdeSystem;

/// Order conditions are accepted at this absolute tolerance.
pub const ORDER_CONDITION_TOL: f64 = 1e-14;

/// Explicit Butcher tableau `(c, A, b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ButcherTableau {
    pub c: Vec<f64>,
    pub a: DenseMatrix,
    pub b: Vec<f64>,
    pub order: u32,
}

impl ButcherTableau {
    /// Rows of `a` may be ragged: row `i` lists `a[i][0..i]`.
    pub fn new(c: Vec<f64>, a_lower: &[&[f64]], b: Vec<f64>, order: u32) -> Result<Self> {
        let s = c.len();
        if b.len() != s || a_lower.len() != s {
            return Err(Error::InvalidArgument("tableau arrays have inconsistent lengths".into()));
        }
        let mut a = DenseMatrix::zeros(s, s);
        for (i, row) in a_lower.iter().enumerate() {
            if row.len() > i {
                return Err(Error::InvalidArgument(format!(
                    "row {i} of an explicit tableau has {} entries",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                a[(i, j)] = v;
            }
        }
        Ok(Self { c, a, b, order })
    }

    pub fn stages(&self) -> usize {
        self.c.len()
    }

    pub fn is_explicit(&self) -> bool {
        let s = self.stages();
        (0..s).all(|i| (i..s).all(|j| self.a[(i, j)] == 0.0))
    }

    /// Last row of `A` equals `b` and the last node is 1.
    pub fn is_fsal(&self) -> bool {
        let s = self.stages();
        s > 0 && self.c[s - 1] == 1.0 && (0..s).all(|j| self.a[(s - 1, j)] == self.b[j])
    }

    /// Verifies `c_i = Σ_j a_ij` and every order condition up to `self.order`.
    pub fn check_order_conditions(&self, name: &str) -> Result<()> {
        for i in 0..self.stages() {
            let row_sum: f64 = (0..self.stages()).map(|j| self.a[(i, j)]).sum();
            if (row_sum - self.c[i]).abs() > ORDER_CONDITION_TOL {
                return Err(Error::OrderCondition {
                    name: name.to_string(),
                    tree: format!("row-sum {i}"),
                    got: row_sum,
                    expected: self.c[i],
                });
            }
        }
        for tree in rooted_trees(self.order as usize) {
            let got = self.elementary_weight(&tree);
            let expected = 1.0 / tree.density();
            if (got - expected).abs() > ORDER_CONDITION_TOL {
                return Err(Error::OrderCondition { name: name.to_string(), tree: tree.to_string(), got, expected });
            }
        }
        Ok(())
    }

    /// `Φ(t) = Σ_i b_i g_i(t)` with `g(t) = ∏_children A g(child)`.
    pub fn elementary_weight(&self, tree: &RootedTree) -> f64 {
        self.b.iter().zip(self.stage_weights(tree)).map(|(b, g)| b * g).sum()
    }

    fn stage_weights(&self, tree: &RootedTree) -> Vec<f64> {
        let mut g = vec![1.0; self.stages()];
        for child in &tree.children {
            let inner = self.a.mat_vec(&self.stage_weights(child));
            for (gi, v) in g.iter_mut().zip(inner) {
                *gi *= v;
            }
        }
        g
    }
}

/// Rooted tree, children kept in canonical (sorted) order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RootedTree {
    pub children: Vec<RootedTree>,
}

impl RootedTree {
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(RootedTree::size).sum::<usize>()
    }

    /// `γ(t) = |t| ∏ γ(child)`.
    pub fn density(&self) -> f64 {
        self.size() as f64 * self.children.iter().map(RootedTree::density).product::<f64>()
    }
}

impl fmt::Display for RootedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t")?;
        if !self.children.is_empty() {
            write!(f, "[")?;
            for (k, c) in self.children.iter().enumerate() {
                if k > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

/// All rooted trees with `1..=max_order` vertices.
pub fn rooted_trees(max_order: usize) -> Vec<RootedTree> {
    let mut by_order: Vec<Vec<RootedTree>> = vec![Vec::new(); max_order + 1];
    for n in 1..=max_order {
        let smaller: Vec<&RootedTree> = by_order[1..n].iter().flatten().collect();
        let mut trees = Vec::new();
        let mut current = Vec::new();
        forests(&smaller, 0, n - 1, &mut current, &mut trees);
        by_order[n] = trees;
    }
    by_order.into_iter().flatten().collect()
}

// Multisets (non-decreasing index) of trees whose sizes sum to `remaining`.
fn forests(
    pool: &[&RootedTree],
    start: usize,
    remaining: usize,
    current: &mut Vec<RootedTree>,
    out: &mut Vec<RootedTree>,
) {
    if remaining == 0 {
        let mut children = current.clone();
        children.sort();
        out.push(RootedTree { children });
        return;
    }
    for k in start..pool.len() {
        let size = pool[k].size();
        if size <= remaining {
            current.push(pool[k].clone());
            forests(pool, k, remaining - size, current, out);
            current.pop();
        }
    }
}

/// A tableau with its registry name.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedTableau {
    pub name: String,
    pub tableau: ButcherTableau,
}

fn classical_rk4() -> ButcherTableau {
    ButcherTableau::new(
        vec![0.0, 0.5, 0.5, 1.0],
        &[&[], &[0.5], &[0.0, 0.5], &[0.0, 0.0, 1.0]],
        vec![1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
        4,
    )
    .expect("rk4 tableau is well formed")
}

/// Dormand-Prince 5(4), propagating with the fifth-order weights.
fn dormand_prince5() -> ButcherTableau {
    ButcherTableau::new(
        vec![0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0],
        &[
            &[],
            &[1.0 / 5.0],
            &[3.0 / 40.0, 9.0 / 40.0],
            &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
            &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
            &[9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
            &[35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
        ],
        vec![35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0],
        5,
    )
    .expect("dp5 tableau is well formed")
}

pub const TABLEAU_NAMES: &[&str] = &["rk4", "dp5"];

/// Looks up a tableau by name and verifies its order conditions.
pub fn tableau_registry(name: &str) -> Result<NamedTableau> {
    let tableau = match name {
        "rk4" => classical_rk4(),
        "dp5" => dormand_prince5(),
        other => return Err(Error::UnknownTableau(other.to_string())),
    };
    tableau.check_order_conditions(name)?;
    Ok(NamedTableau { name: name.to_string(), tableau })
}

/// One explicit RK step `y + h Σ b_j k_j`.
pub fn rk_step(sys: &OdeSystem, tableau: &ButcherTableau, t: f64, y: &[f64], h: f64) -> Result<Vec<f64>> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
    }
    if !tableau.is_explicit() {
        return Err(Error::InvalidArgument("tableau is not explicit".into()));
    }
    let d = y.len();
    let s = tableau.stages();
    let mut k: Vec<Vec<f64>> = Vec::with_capacity(s);
    let mut stage = vec![0.0; d];
    for i in 0..s {
        stage.copy_from_slice(y);
        for (j, kj) in k.iter().enumerate() {
            let a = tableau.a[(i, j)];
            if a != 0.0 {
                for (st, kv) in stage.iter_mut().zip(kj) {
                    *st += h * a * kv;
                }
            }
        }
        k.push(sys.field(t + tableau.c[i] * h, &stage)?);
    }
    let mut next = y.to_vec();
    for (bj, kj) in tableau.b.iter().zip(&k) {
        if *bj != 0.0 {
            for (n, kv) in next.iter_mut().zip(kj) {
                *n += h * bj * kv;
            }
        }
    }
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_counts_per_order() {
        let trees = rooted_trees(5);
        let counts: Vec<usize> = (1..=5).map(|n| trees.iter().filter(|t| t.size() == n).count()).collect();
        assert_eq!(counts, vec![1, 1, 2, 4, 9]);
    }

    #[test]
    fn densities_of_small_trees() {
        let leaf = RootedTree { children: vec![] };
        let chain = RootedTree { children: vec![leaf.clone()] };
        let bushy = RootedTree { children: vec![leaf.clone(), leaf.clone()] };
        let tall = RootedTree { children: vec![chain.clone()] };
        assert_eq!(leaf.density(), 1.0);
        assert_eq!(chain.density(), 2.0);
        assert_eq!(bushy.density(), 3.0);
        assert_eq!(tall.density(), 6.0);
    }

    #[test]
    fn rk4_registry_entry() {
        let t = tableau_registry("rk4").unwrap().tableau;
        assert_eq!(t.c, vec![0.0, 0.5, 0.5, 1.0]);
        assert_eq!(t.b, vec![1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0]);
        assert!(t.is_explicit());
    }

    #[test]
    fn dp5_registry_entry() {
        let t = tableau_registry("dp5").unwrap().tableau;
        assert_eq!(t.stages(), 7);
        assert_eq!(t.order, 5);
        assert!(t.is_fsal());
    }

    #[test]
    fn unknown_tableau() {
        assert_eq!(tableau_registry("nope"), Err(Error::UnknownTableau("nope".into())));
    }

    #[test]
    fn corrupted_tableau_fails_checker() {
        let mut t = classical_rk4();
        t.b[1] += 1e-6;
        t.b[2] -= 1e-6;
        assert!(matches!(t.check_order_conditions("broken"), Err(Error::OrderCondition { .. })));
        // still consistent to order 1
        t.order = 1;
        assert!(t.check_order_conditions("broken").is_ok());
    }

    #[test]
    fn constant_field_any_tableau() {
        let sys = OdeSystem::autonomous(2, "const", |_, _| vec![1.0, -3.0]);
        for name in TABLEAU_NAMES {
            let t = tableau_registry(name).unwrap().tableau;
            let y = rk_step(&sys, &t, 0.0, &[0.0, 1.0], 0.125).unwrap();
            assert!((y[0] - 0.125).abs() < 1e-15 && (y[1] - (1.0 - 0.375)).abs() < 1e-15);
        }
    }

    #[test]
    fn rk4_on_decay_is_taylor_polynomial() {
        let sys = OdeSystem::autonomous(1, "decay", |_, x| vec![-x[0]]);
        let t = tableau_registry("rk4").unwrap().tableau;
        let z: f64 = -0.1;
        let expected = 1.0 + z + z * z / 2.0 + z.powi(3) / 6.0 + z.powi(4) / 24.0;
        let y = rk_step(&sys, &t, 0.0, &[1.0], 0.1).unwrap();
        assert!((y[0] - expected).abs() < 1e-16);
    }

    #[test]
    fn dp5_on_logistic() {
        let sys = OdeSystem::autonomous(1, "logistic", |_, x| vec![x[0] * (1.0 - x[0])]);
        let t = tableau_registry("dp5").unwrap().tableau;
        let h = 0.01;
        let y = rk_step(&sys, &t, 0.0, &[0.5], h).unwrap();
        let exact = 1.0 / (1.0 + (-h).exp());
        assert!((y[0] - exact).abs() < 1e-11);
    }
}
