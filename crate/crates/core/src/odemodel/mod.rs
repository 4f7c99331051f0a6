//! ODE problem representation and the benchmark problem library.

mod examples;
mod system;

pub use examples::{example, hilbert, ExampleSpec};
pub use system::{jacobian_fd, OdeSystem, TimeGrid};
