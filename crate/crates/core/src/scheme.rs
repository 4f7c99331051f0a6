//! Named schemes selectable by string: `ll2`, `llrk4`, `llrk:<tableau>`,
//! `rk4` and `dp5`.

use std::fmt;

use crate::densela::PadeOrder;
use crate::error::{Error, Result};
use crate::llcore::ll2_step_with_kappa;
use crate::llrk::{llrk4_step, llrk_step, StepOutput, Stepper};
use crate::odemodel::OdeSystem;
use crate::rkbase::{rk_step, tableau_registry, NamedTableau};

#[derive(Debug, Clone, PartialEq)]
pub enum SchemeKind {
    Ll2,
    Llrk4,
    Llrk(NamedTableau),
    Rk(NamedTableau),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scheme {
    pub kind: SchemeKind,
    pub pade: PadeOrder,
}

impl Scheme {
    pub fn parse(name: &str, pade: PadeOrder) -> Result<Self> {
        let kind = match name {
            "ll2" => SchemeKind::Ll2,
            "llrk4" => SchemeKind::Llrk4,
            "rk4" | "dp5" => SchemeKind::Rk(tableau_registry(name)?),
            other => match other.strip_prefix("llrk:") {
                Some(tab) => SchemeKind::Llrk(tableau_registry(tab)?),
                None => return Err(Error::UnknownScheme(other.to_string())),
            },
        };
        Ok(Self { kind, pade })
    }

    pub fn ll2() -> Self {
        Self { kind: SchemeKind::Ll2, pade: PadeOrder::default() }
    }

    pub fn llrk4() -> Self {
        Self { kind: SchemeKind::Llrk4, pade: PadeOrder::default() }
    }

    pub fn with_pade(mut self, pade: PadeOrder) -> Self {
        self.pade = pade;
        self
    }

    /// Nominal convergence order.
    pub fn order(&self) -> u32 {
        match &self.kind {
            SchemeKind::Ll2 => 2,
            SchemeKind::Llrk4 => 4,
            SchemeKind::Llrk(t) | SchemeKind::Rk(t) => t.tableau.order,
        }
    }

    pub fn uses_exponential(&self) -> bool {
        !matches!(self.kind, SchemeKind::Rk(_))
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SchemeKind::Ll2 => write!(f, "ll2"),
            SchemeKind::Llrk4 => write!(f, "llrk4"),
            SchemeKind::Llrk(t) => write!(f, "llrk:{}", t.name),
            SchemeKind::Rk(t) => write!(f, "{}", t.name),
        }
    }
}

impl Stepper for Scheme {
    fn step(&self, sys: &OdeSystem, t: f64, y: &[f64], h: f64) -> Result<StepOutput> {
        match &self.kind {
            SchemeKind::Ll2 => {
                let (state, kappa) = ll2_step_with_kappa(sys, t, y, h, self.pade)?;
                Ok(StepOutput { state, kappa: Some(kappa) })
            }
            SchemeKind::Llrk4 => {
                let r = llrk4_step(sys, t, y, h, self.pade)?;
                Ok(StepOutput { state: r.next_state, kappa: Some(r.kappa_used) })
            }
            SchemeKind::Llrk(tab) => {
                let r = llrk_step(sys, &tab.tableau, t, y, h, self.pade)?;
                Ok(StepOutput { state: r.next_state, kappa: Some(r.kappa_used) })
            }
            SchemeKind::Rk(tab) => Ok(StepOutput { state: rk_step(sys, &tab.tableau, t, y, h)?, kappa: None }),
        }
    }

    fn name(&self) -> String {
        self.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_known_names() {
        for name in ["ll2", "llrk4", "llrk:rk4", "llrk:dp5", "rk4", "dp5"] {
            let s = Scheme::parse(name, PadeOrder::default()).unwrap();
            assert_eq!(s.to_string(), name);
        }
    }

    #[test]
    fn parse_unknown_names() {
        assert_eq!(Scheme::parse("euler", PadeOrder::default()), Err(Error::UnknownScheme("euler".into())));
        assert_eq!(Scheme::parse("llrk:foo", PadeOrder::default()), Err(Error::UnknownTableau("foo".into())));
    }

    #[test]
    fn nominal_orders() {
        let order = |s: &str| Scheme::parse(s, PadeOrder::default()).unwrap().order();
        assert_eq!(order("ll2"), 2);
        assert_eq!(order("llrk4"), 4);
        assert_eq!(order("llrk:dp5"), 5);
        assert_eq!(order("rk4"), 4);
    }
}
