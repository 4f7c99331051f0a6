//! Run configuration, read from TOML. Every field is optional.

use std::collections::BTreeMap;
use std::path::PathBuf;

use llrk_core::odemodel::{example, ExampleSpec};
use llrk_core::{OdeSystem, PadeOrder, Scheme, TimeGrid};
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, BenchResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub example: u32,
    pub params: BTreeMap<String, f64>,
    pub scheme: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    pub pade: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub refine: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            example: 1,
            params: BTreeMap::new(),
            scheme: "llrk4".into(),
            h: None,
            steps: None,
            pade: "6,6".into(),
            out: None,
            seed: 0,
            refine: 16,
        }
    }
}

/// Step count used when neither `h` nor `steps` is given.
pub const DEFAULT_STEPS: usize = 200;

pub fn parse_config(text: &str) -> BenchResult<RunConfig> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| BenchError::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn validate(&self) -> BenchResult<()> {
        self.pade_order()?;
        self.spec()?;
        Scheme::parse(&self.scheme, self.pade_order()?)?;
        if let Some(h) = self.h {
            if !(h > 0.0 && h.is_finite()) {
                return Err(BenchError::Config(format!("field `h`: step must be positive, got {h}")));
            }
        }
        if self.h.is_some() && self.steps.is_some() {
            return Err(BenchError::Config("fields `h` and `steps` are mutually exclusive".into()));
        }
        if self.steps == Some(0) {
            return Err(BenchError::Config("field `steps`: must be at least 1".into()));
        }
        if self.refine < 2 {
            return Err(BenchError::Config(format!("field `refine`: must be at least 2, got {}", self.refine)));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("RunConfig serializes")
    }

    pub fn pade_order(&self) -> BenchResult<PadeOrder> {
        self.pade.parse().map_err(|e| BenchError::Config(format!("field `pade`: {e}")))
    }

    pub fn spec(&self) -> BenchResult<ExampleSpec> {
        let mut spec = ExampleSpec::new(self.example)?;
        for (name, value) in &self.params {
            spec = spec.with_param(name, *value)?;
        }
        Ok(spec)
    }

    pub fn system(&self) -> BenchResult<(ExampleSpec, OdeSystem)> {
        let spec = self.spec()?;
        let sys = example(&spec)?;
        Ok((spec, sys))
    }

    pub fn scheme(&self) -> BenchResult<Scheme> {
        Ok(Scheme::parse(&self.scheme, self.pade_order()?)?)
    }

    /// Uniform grid over the example's horizon. With `h`, the horizon is
    /// covered by `round((T - t0) / h)` steps of exactly `h`.
    pub fn grid(&self, spec: &ExampleSpec) -> BenchResult<TimeGrid> {
        let (t0, t_end) = spec.horizon;
        let grid = match (self.h, self.steps) {
            (Some(h), _) => {
                let steps = (((t_end - t0) / h).round() as usize).max(1);
                TimeGrid::with_step(t0, h, steps)?
            }
            (None, Some(n)) => TimeGrid::uniform(t0, t_end, n)?,
            (None, None) => TimeGrid::uniform(t0, t_end, DEFAULT_STEPS)?,
        };
        Ok(grid)
    }
}
