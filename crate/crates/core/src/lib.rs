//! Local Linearization (LL) and Local Linearization-Runge-Kutta (LLRK)
//! integrators for ODEs.
//!
//! Each step splits the flow into the exact solution of the local linear
//! ODE, computed as a block of a Padé scaling-and-squaring matrix
//! exponential, and an explicit Runge-Kutta solve of the remaining
//! nonlinear part. With an A-stable Padé pair (`p ≤ q ≤ p + 2`) the
//! resulting explicit schemes are A-stable, integrate linear systems
//! exactly up to the exponential's accuracy, and keep equilibria fixed.
//!
//! - [`densela`]: dense matrices, LU, the Padé exponential and stability function
//! - [`odemodel`]: ODE systems and the benchmark problems
//! - [`llcore`]: the augmented matrix, `φ`, and the order-2 LL step
//! - [`llrk`]: LLRK steppers and trajectory integration
//! - [`rkbase`]: explicit RK tableaus (RK4, Dormand-Prince 5)
//! - [`scheme`]: string-selectable schemes
//! - [`dynprobe`]: equilibria, basins, separatrix bisection, error measures

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod densela;
pub mod dynprobe;
pub mod error;
pub mod llcore;
pub mod llrk;
pub mod odemodel;
pub mod rkbase;
pub mod scheme;

pub use densela::{DenseMatrix, PadeOrder};
pub use error::{Error, Result};
pub use llrk::{integrate, Stepper, Trajectory};
pub use odemodel::{OdeSystem, TimeGrid};
pub use scheme::Scheme;
