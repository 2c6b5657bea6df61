//! Environment front-end: reset/step, observations, and episode bookkeeping.

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arm::{
    forward_kinematics, inverse_kinematics, joint_limit_guard, osc_wrench, ArmModel,
    ControllerConfig, DesiredPose,
};
use crate::math::{Pose2, Rot2, Vec2};
use crate::physics::{PhysicsError, Wrench, SLOP};
use crate::rng::{stream_rng, Stream};

use super::domain::DomainParams;
use super::grasp::GraspGoal;
use super::reward::{compute_reward, success, RewardParams};
use super::scene::Scene;
use super::AblationFlags;

pub const OBS_DIM: usize = 12;
pub const ACTION_DIM: usize = 3;

/// Policy steps per episode.
pub const EPISODE_STEPS: usize = 40;
/// Controller updates per policy step (2 Hz policy, 100 Hz controller).
pub const CONTROLLER_PERIODS_PER_STEP: usize = 50;
/// Physics ticks per controller update (100 Hz control, 1 kHz physics).
pub const TICKS_PER_CONTROLLER_PERIOD: usize = 10;

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("step called before reset")]
    NotReset,
    #[error("object initially penetrates the scene: {0}")]
    InvalidScene(String),
    #[error("initial end-effector pose unreachable")]
    UnreachableStart,
    /// Solver blow-up: the episode aborts (done, not successful).
    #[error(transparent)]
    NonFiniteState(#[from] PhysicsError),
}

/// Policy observation: the goal and the three pose quantities, each as
/// (x, z, pitch).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    /// Target grasp in the object frame.
    pub goal: Pose2,
    /// End-effector pose in the world frame.
    pub ee_world: Pose2,
    /// Object pose in the world frame.
    pub object_world: Pose2,
    /// End-effector pose in the object frame (recomputed, never stale).
    pub ee_in_object: Pose2,
}

impl Observation {
    pub fn assemble(goal: Pose2, ee_world: Pose2, object_world: Pose2) -> Self {
        Observation {
            goal,
            ee_world,
            object_world,
            ee_in_object: object_world.inverse().compose(ee_world),
        }
    }

    pub fn to_array(&self) -> [f64; OBS_DIM] {
        [
            self.goal.x,
            self.goal.z,
            self.goal.pitch,
            self.ee_world.x,
            self.ee_world.z,
            self.ee_world.pitch,
            self.object_world.x,
            self.object_world.z,
            self.object_world.pitch,
            self.ee_in_object.x,
            self.ee_in_object.z,
            self.ee_in_object.pitch,
        ]
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Info {
    pub success: bool,
    pub ee_object_contact: bool,
    pub object_wall_contact: bool,
    pub occlusion_penalty_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepResult {
    pub observation: Observation,
    /// Shaped reward (always <= 0) or {-1, 0} under the sparse ablation.
    pub reward: f64,
    pub done: bool,
    pub info: Info,
}

/// Static environment configuration (domain parameters arrive per reset).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnvConfig {
    pub reward: RewardParams,
    pub ablation: AblationFlags,
    pub arm_model: ArmModel,
    pub finger_gap: f64,
    pub joint_limits: [[f64; 2]; 3],
    /// Canonical initial end-effector pose (the arm solves IK for it).
    pub ee_start: Pose2,
    /// Std-dev of the Gaussian joint-angle noise applied at reset (rad).
    pub joint_noise_std: f64,
    pub max_steps: usize,
}

impl Default for EnvConfig {
    fn default() -> Self {
        EnvConfig {
            reward: RewardParams::default(),
            ablation: AblationFlags::default(),
            arm_model: ArmModel::default(),
            finger_gap: 0.07,
            joint_limits: [[-2.9, 2.9]; 3],
            ee_start: Pose2::new(0.44, 0.24, -0.5),
            joint_noise_std: 0.02,
            max_steps: EPISODE_STEPS,
        }
    }
}

impl EnvConfig {
    pub fn controller(&self) -> ControllerConfig {
        if self.ablation.high_gain_osc {
            ControllerConfig::high_gain()
        } else {
            ControllerConfig::default_compliant()
        }
    }
}

/// The occluded-grasping MDP.
pub struct OccludedGraspEnv {
    pub cfg: EnvConfig,
    scene: Option<Scene>,
    domain: DomainParams,
    goal: GraspGoal,
    desired: DesiredPose,
    t: usize,
    wrench_buf: Vec<Wrench>,
    controller: ControllerConfig,
    /// When set, every physics tick appends a JSON state line.
    pub tick_dump: Option<Vec<String>>,
}

impl OccludedGraspEnv {
    pub fn new(cfg: EnvConfig) -> Self {
        let controller = cfg.controller();
        OccludedGraspEnv {
            cfg,
            scene: None,
            domain: DomainParams::default(),
            goal: GraspGoal { pose_in_object: Pose2::IDENTITY, grasp_id: 0.0 },
            desired: DesiredPose { target: Pose2::IDENTITY },
            t: 0,
            wrench_buf: Vec::new(),
            controller,
            tick_dump: None,
        }
    }

    pub fn domain(&self) -> &DomainParams {
        &self.domain
    }

    pub fn goal(&self) -> &GraspGoal {
        &self.goal
    }

    /// Swap the pursued goal mid-episode (per-step grasp selection).
    pub fn set_goal(&mut self, goal: GraspGoal) {
        self.goal = goal;
    }

    pub fn timestep(&self) -> usize {
        self.t
    }

    pub fn table_z(&self) -> f64 {
        self.domain.table_offset_z
    }

    pub fn scene(&self) -> Option<&Scene> {
        self.scene.as_ref()
    }

    pub fn scene_mut(&mut self) -> Option<&mut Scene> {
        self.scene.as_mut()
    }

    /// Build the scene and return the initial observation. Identical
    /// (domain, goal, seed) triples produce bit-identical episodes.
    pub fn reset(
        &mut self,
        domain: DomainParams,
        goal: GraspGoal,
        seed: u64,
    ) -> Result<Observation, EnvError> {
        self.controller = self.cfg.controller();
        let probe = crate::arm::ArmState::new(
            self.cfg.arm_model.lengths,
            self.cfg.joint_limits,
            self.cfg.finger_gap,
        );
        let probe = crate::arm::ArmState { base: super::scene::ARM_BASE, ..probe };
        let mut q = inverse_kinematics(&probe, self.cfg.ee_start, false)
            .ok_or(EnvError::UnreachableStart)?;
        let mut rng = stream_rng(seed, Stream::Env, 0);
        if self.cfg.joint_noise_std > 0.0 {
            let noise = Normal::new(0.0, self.cfg.joint_noise_std).expect("valid std");
            for qi in q.iter_mut() {
                *qi += noise.sample(&mut rng);
            }
        }

        let scene = Scene::build(
            &domain,
            &self.cfg.arm_model,
            self.cfg.finger_gap,
            q,
            !self.cfg.ablation.no_wall,
        );
        // the object must start resting, not embedded
        for c in scene.world.detect_contacts() {
            let involves_obj = c.body_a == scene.ids.object || c.body_b == scene.ids.object;
            if involves_obj && c.penetration_depth > SLOP {
                return Err(EnvError::InvalidScene(format!(
                    "object penetration {} m at reset",
                    c.penetration_depth
                )));
            }
        }

        self.domain = domain;
        self.goal = goal;
        self.t = 0;
        let arm_state = scene.arm_state(self.cfg.finger_gap, self.cfg.joint_limits);
        self.desired = DesiredPose { target: forward_kinematics(&arm_state) };
        self.scene = Some(scene);
        Ok(self.observe())
    }

    fn observe(&self) -> Observation {
        let scene = self.scene.as_ref().expect("reset first");
        let arm_state = scene.arm_state(self.cfg.finger_gap, self.cfg.joint_limits);
        let ee = forward_kinematics(&arm_state);
        Observation::assemble(self.goal.pose_in_object, ee, scene.object_pose())
    }

    /// One 0.5 s policy step: scale the action into an end-effector delta,
    /// guard it against joint limits, then run 50 controller updates of 10
    /// physics ticks each.
    pub fn step(&mut self, action: [f64; 3]) -> Result<StepResult, EnvError> {
        if self.scene.is_none() {
            return Err(EnvError::NotReset);
        }
        let ts = self.domain.action_translation_scale;
        let rs = self.domain.action_rotation_scale;
        let a: Vec<f64> = action.iter().map(|v| v.clamp(-1.0, 1.0)).collect();
        let d_local = Vec2::new(a[0] * ts, a[1] * ts);
        let d_pitch = a[2] * rs;

        {
            let scene = self.scene.as_ref().unwrap();
            let arm_state = scene.arm_state(self.cfg.finger_gap, self.cfg.joint_limits);
            let ee = forward_kinematics(&arm_state);
            let dw = Rot2::from_angle(ee.pitch).apply(d_local);
            let delta = Pose2::new(dw.x, dw.z, d_pitch);
            self.desired = joint_limit_guard(&arm_state, delta, self.desired);
        }

        let mut ee_contact = false;
        let mut wall_contact = false;
        for _ in 0..CONTROLLER_PERIODS_PER_STEP {
            let (torques, n_bodies) = {
                let scene = self.scene.as_ref().unwrap();
                let arm_state = scene.arm_state(self.cfg.finger_gap, self.cfg.joint_limits);
                let out = osc_wrench(&arm_state, &self.desired, &self.controller, &scene.model);
                (out.torques, scene.world.bodies.len())
            };
            {
                let scene = self.scene.as_mut().unwrap();
                scene.joint_torque_wrenches(torques, &mut self.wrench_buf);
                debug_assert_eq!(self.wrench_buf.len(), n_bodies);
                for _ in 0..TICKS_PER_CONTROLLER_PERIOD {
                    scene.world.step(&self.wrench_buf)?;
                    ee_contact |= scene.gripper_object_contact();
                    wall_contact |= scene.object_wall_contact();
                    if let Some(dump) = &mut self.tick_dump {
                        dump.push(scene.world.debug_state_json());
                    }
                }
            }
        }

        self.t += 1;
        let obs = self.observe();
        let terms = compute_reward(
            &self.goal,
            obs.ee_in_object,
            obs.object_world,
            self.table_z(),
            &self.cfg.reward,
            !self.cfg.ablation.no_occlusion_penalty,
        );
        let succeeded = success(&self.goal, obs.ee_in_object, &self.cfg.reward);
        let reward = if self.cfg.ablation.sparse_reward {
            if succeeded {
                0.0
            } else {
                -1.0
            }
        } else {
            terms.reward
        };
        Ok(StepResult {
            observation: obs,
            reward,
            done: self.t >= self.cfg.max_steps,
            info: Info {
                success: succeeded,
                ee_object_contact: ee_contact,
                object_wall_contact: wall_contact,
                occlusion_penalty_value: terms.occlusion,
            },
        })
    }

    /// Current desired pose held by the low-level controller.
    pub fn desired_pose(&self) -> Pose2 {
        self.desired.target
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::grasp_from_id;

    fn make_env() -> OccludedGraspEnv {
        OccludedGraspEnv::new(EnvConfig::default())
    }

    fn default_goal() -> GraspGoal {
        grasp_from_id(&DomainParams::default(), 1.5).unwrap()
    }

    #[test]
    fn reset_is_deterministic() {
        let mut e1 = make_env();
        let mut e2 = make_env();
        let o1 = e1.reset(DomainParams::default(), default_goal(), 42).unwrap();
        let o2 = e2.reset(DomainParams::default(), default_goal(), 42).unwrap();
        assert_eq!(o1, o2);
        let o3 = e1.reset(DomainParams::default(), default_goal(), 43).unwrap();
        assert_ne!(o1, o3);
    }

    #[test]
    fn flush_against_wall_is_valid() {
        let mut env = make_env();
        let domain = DomainParams { initial_distance_to_wall: 0.0, ..DomainParams::default() };
        let obs = env.reset(domain, default_goal(), 7).unwrap();
        // flush: object right face exactly at the wall, no deep penetration
        let scene = env.scene().unwrap();
        let obj = scene.object_pose();
        assert!((obj.x + 0.075 - scene.wall_x).abs() < 1e-9);
        let _ = obs;
    }

    #[test]
    fn observation_frame_consistency() {
        let mut env = make_env();
        let obs = env.reset(DomainParams::default(), default_goal(), 3).unwrap();
        let recomputed = obs.object_world.inverse().compose(obs.ee_world);
        assert!((recomputed.x - obs.ee_in_object.x).abs() < 1e-9);
        assert!((recomputed.z - obs.ee_in_object.z).abs() < 1e-9);
        assert!((recomputed.pitch - obs.ee_in_object.pitch).abs() < 1e-9);
    }

    #[test]
    fn occluded_at_reset() {
        let mut env = make_env();
        env.reset(DomainParams::default(), default_goal(), 5).unwrap();
        let obs = env.observe();
        let terms = compute_reward(
            env.goal(),
            obs.ee_in_object,
            obs.object_world,
            env.table_z(),
            &env.cfg.reward,
            true,
        );
        assert!(terms.occlusion > 0.0, "side grasp must start occluded");
    }

    #[test]
    fn step_before_reset_errors() {
        let mut env = make_env();
        assert!(matches!(env.step([0.0; 3]), Err(EnvError::NotReset)));
    }

    #[test]
    fn done_exactly_at_step_40() {
        let mut env = make_env();
        env.reset(DomainParams::default(), default_goal(), 11).unwrap();
        for t in 1..=40 {
            let r = env.step([0.0, 0.0, 0.0]).unwrap();
            assert_eq!(r.done, t == 40, "t={t}");
        }
    }

    #[test]
    fn zero_action_holds_pose() {
        let mut env = make_env();
        let obs0 = env.reset(DomainParams::default(), default_goal(), 13).unwrap();
        let desired0 = env.desired_pose();
        let r = env.step([0.0, 0.0, 0.0]).unwrap();
        // desired pose unchanged, actual EE drift < 5 mm over one policy step
        assert_eq!(env.desired_pose(), desired0);
        let drift = (r.observation.ee_world.pos() - obs0.ee_world.pos()).norm();
        assert!(drift < 5e-3, "EE drifted {drift} m under zero action");
    }

    #[test]
    fn goal_rigidly_attached_to_object() {
        // rotating the object rotates the world goal pose by exactly the same
        // amount: ^W g = ^W O compose ^O g
        let goal = default_goal();
        let obj0 = Pose2::new(0.6, 0.1, 0.0);
        let rot = Pose2::new(0.0, 0.0, 0.7);
        let obj1 = Pose2::new(obj0.x, obj0.z, obj0.pitch + 0.7);
        let g0 = obj0.compose(goal.pose_in_object);
        let g1 = obj1.compose(goal.pose_in_object);
        assert!((g1.pitch - (g0.pitch + rot.pitch)).abs() < 1e-12);
    }
}
