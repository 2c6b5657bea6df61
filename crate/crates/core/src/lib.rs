//! og-core: a planar (XZ-plane) occluded-grasping simulator and
//! reinforcement-learning toolkit.
//!
//! A compliant parallel-jaw gripper on a 3-joint arm learns to push a box
//! against a bin wall to rotate it and reach an initially table-occluded
//! grasp. Training uses goal-conditioned soft actor-critic with hindsight
//! relabeling, a grasp curriculum, and automatic domain randomization.
//!
//! Modules:
//! - [`physics`]: deterministic rigid-body engine (contacts, friction, joints)
//! - [`arm`]: 3R arm kinematics, dynamics, and operational-space control
//! - [`env`]: the occluded-grasping MDP (scene, reward, observations)
//! - [`nn`] / [`sac`]: from-scratch MLPs with reverse-mode gradients and SAC+HER
//! - [`curriculum`]: boundary-expansion engines (grasp range + domain ranges)
//! - [`select`]: grasp-selection strategies over candidate sets
//! - [`eval`]: evaluation protocols, traces, sweeps, and lift verification
//! - [`train`]: the rollout/update training loop

pub mod arm;
pub mod curriculum;
pub mod env;
pub mod eval;
pub mod math;
pub mod nn;
pub mod physics;
pub mod rng;
pub mod sac;
pub mod select;
pub mod train;

pub use math::{Pose2, Vec2};
