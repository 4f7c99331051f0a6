//! Experiment harness for `llrk-core`: run configuration, reference
//! solutions, the intercept and accuracy tables, stability-region sampling,
//! phase portraits and structural probes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod order;
pub mod output;
pub mod portrait;
pub mod probe;
pub mod reference;
pub mod solve;
pub mod stability;
pub mod table1;
pub mod table2;

pub use config::{parse_config, RunConfig};
pub use error::{BenchError, BenchResult};
pub use output::{Cell, Table};
