//! Deterministic planar rigid-body engine.
//!
//! Bodies are convex polygons with Coulomb-friction contacts, resolved by a
//! sequential-impulse velocity solver (restitution 0) followed by a
//! non-linear Gauss-Seidel positional correction pass. Revolute and weld
//! joints connect the arm links and finger pads.
//!
//! Everything is `f64` with fixed iteration counts and fixed traversal
//! order, so identical inputs produce bit-identical states.

mod body;
mod collide;
mod joint;
mod solver;
mod world;

pub use body::{BodyId, Polygon, RigidBody2};
pub use collide::{Contact2, Manifold};
pub use joint::Joint2;
pub use world::{ContactImpulse, PhysicsError, StepTelemetry, World2, Wrench};

/// Fixed physics timestep in seconds.
pub const DT: f64 = 1e-3;
/// Contact slop: penetration below this is left alone by position correction.
pub const SLOP: f64 = 1e-4;
/// Positional correction factor per iteration.
pub const BAUMGARTE: f64 = 0.2;
/// Velocity-solver iterations per tick.
pub const VELOCITY_ITERATIONS: usize = 20;
/// Positional-correction iterations per tick.
pub const POSITION_ITERATIONS: usize = 8;
/// Contact detection margin: pairs closer than this get (speculative)
/// contact constraints so impacts are stopped before they overlap.
pub const CONTACT_MARGIN: f64 = 5e-3;
/// Hard bound on post-step penetration the solver is expected to maintain.
pub const MAX_PENETRATION: f64 = 5e-3;
/// Gravitational acceleration magnitude (m/s^2), acting along -z.
pub const GRAVITY: f64 = 9.81;
