//! The occluded-grasping MDP.
//!
//! A box rests on a table flush against a bin wall. The goal grasp is
//! attached to the object and initially intersects the table, so the policy
//! has to rotate the box (using the wall) before the end-effector can match
//! the grasp pose. The policy acts at 2 Hz through a 100 Hz operational-space
//! controller on a 1 kHz physics substrate; an episode is 40 policy steps
//! (20 simulated seconds).

mod domain;
mod grasp;
mod gym;
mod reward;
mod scene;

pub use domain::{DomainParams, OBJECT_DEPTH_PROXY};
pub use grasp::{grasp_from_id, GraspError, GraspGoal, GRASP_EDGE_INSET, GRASP_ID_MAX, GRIP_DEPTH};
pub use gym::{EnvConfig, EnvError, Info, Observation, OccludedGraspEnv, StepResult, ACTION_DIM, OBS_DIM};
pub use reward::{compute_reward, success, RewardParams, RewardTerms};
pub use scene::{Scene, SceneIds};

/// Ablation switches (composable, all default off).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct AblationFlags {
    /// Remove the bin wall from the scene.
    pub no_wall: bool,
    /// Drop the occlusion term from the reward.
    pub no_occlusion_penalty: bool,
    /// Replace the shaped reward with {-1, 0} sparse reward.
    pub sparse_reward: bool,
    /// Double the operational-space controller gains.
    pub high_gain_osc: bool,
}
