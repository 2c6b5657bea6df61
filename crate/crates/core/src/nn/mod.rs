//! Minimal neural-network core: fully-connected MLPs with hand-written
//! reverse-mode gradients and an Adam optimizer.
//!
//! Everything is generic over the float type: training runs in `f32`, the
//! gradient test-suites instantiate the same code in `f64` where central
//! finite differences are sharp.

mod adam;
mod mlp;
mod scalar;

pub use adam::{Adam, AdamScalar};
pub use mlp::{Gradients, Mlp, Scratch};
pub use scalar::Scalar;
