//! Reward: weighted grasp-pose distance plus the occlusion penalty.

use serde::{Deserialize, Serialize};

use crate::math::{angle_diff, Pose2, Vec2};

use super::grasp::GraspGoal;

/// Reward weights, success thresholds, and the marker offsets (in the grasp
/// frame) whose below-table depth forms the occlusion penalty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RewardParams {
    /// Translation weight (per meter).
    pub alpha1: f64,
    /// Rotation weight (per radian).
    pub alpha2: f64,
    /// Occlusion weight (per meter of marker depth).
    pub beta: f64,
    /// Success threshold on translation error (m), strict.
    pub eps_t: f64,
    /// Success threshold on rotation error (rad), strict.
    pub eps_theta: f64,
    /// Marker offsets in the grasp frame (fingertip and knuckle points).
    pub markers: Vec<Vec2>,
}

impl Default for RewardParams {
    fn default() -> Self {
        RewardParams {
            alpha1: 50.0,
            alpha2: 2.0,
            beta: 200.0,
            eps_t: 0.03,
            eps_theta: 10.0_f64.to_radians(),
            markers: default_markers(0.07, 0.05),
        }
    }
}

/// Fingertip and knuckle points of the gripper silhouette: two tips at the
/// frame origin level, two knuckles one finger-length behind.
pub fn default_markers(finger_gap: f64, finger_length: f64) -> Vec<Vec2> {
    vec![
        Vec2::new(0.0, finger_gap / 2.0),
        Vec2::new(0.0, -finger_gap / 2.0),
        Vec2::new(-finger_length, finger_gap / 2.0),
        Vec2::new(-finger_length, -finger_gap / 2.0),
    ]
}

impl RewardParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.alpha1 < 0.0 || self.alpha2 < 0.0 || self.beta < 0.0 {
            return Err("reward weights must be non-negative".into());
        }
        if self.eps_t <= 0.0 || self.eps_theta <= 0.0 {
            return Err("success thresholds must be positive".into());
        }
        if self.markers.len() < 3 {
            return Err("need at least 3 occlusion markers".into());
        }
        Ok(())
    }
}

/// Decomposed reward terms for one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardTerms {
    /// Weighted pose distance `alpha1*dT + alpha2*dTheta`.
    pub pose_distance: f64,
    /// Total marker depth below the table top (m).
    pub occlusion: f64,
    /// Final reward (always <= 0 for the shaped variant).
    pub reward: f64,
    pub translation_err: f64,
    pub rotation_err: f64,
}

/// Shaped reward for an end-effector pose `ee_in_object` relative to `goal`,
/// with the goal frame world pose derived from `object_world` for the
/// occlusion markers. `table_z` is the table-top height.
pub fn compute_reward(
    goal: &GraspGoal,
    ee_in_object: Pose2,
    object_world: Pose2,
    table_z: f64,
    params: &RewardParams,
    include_occlusion: bool,
) -> RewardTerms {
    let g = goal.pose_in_object;
    let translation_err = (g.pos() - ee_in_object.pos()).norm();
    let rotation_err = angle_diff(g.pitch, ee_in_object.pitch);
    let pose_distance = params.alpha1 * translation_err + params.alpha2 * rotation_err;

    let occlusion = if include_occlusion {
        let goal_world = object_world.compose(g);
        params
            .markers
            .iter()
            .map(|&m| (table_z - goal_world.transform_point(m).z).max(0.0))
            .sum()
    } else {
        0.0
    };

    let reward = -(pose_distance + params.beta * occlusion);
    RewardTerms { pose_distance, occlusion, reward, translation_err, rotation_err }
}

/// Strict-inequality success test on both pose-error components.
pub fn success(goal: &GraspGoal, ee_in_object: Pose2, params: &RewardParams) -> bool {
    let g = goal.pose_in_object;
    let dt = (g.pos() - ee_in_object.pos()).norm();
    let dtheta = angle_diff(g.pitch, ee_in_object.pitch);
    dt < params.eps_t && dtheta < params.eps_theta
}

#[cfg(test)]
mod tests {
    use super::*;

    fn goal_at(pose: Pose2) -> GraspGoal {
        GraspGoal { pose_in_object: pose, grasp_id: 1.5 }
    }

    #[test]
    fn exact_goal_no_occlusion_is_zero() {
        let params = RewardParams::default();
        let goal = goal_at(Pose2::new(-0.055, 0.0, 0.0));
        // object high above the table: markers all clear
        let obj = Pose2::new(0.0, 1.0, 0.0);
        let terms = compute_reward(&goal, goal.pose_in_object, obj, 0.0, &params, true);
        assert_eq!(terms.reward, 0.0);
        assert_eq!(terms.occlusion, 0.0);
        assert!(success(&goal, goal.pose_in_object, &params));
    }

    #[test]
    fn translation_term_arithmetic() {
        // dT = 0.1 m, dTheta = 0, no occlusion -> reward = -5.0
        let params = RewardParams::default();
        let goal = goal_at(Pose2::new(0.0, 0.0, 0.0));
        let ee = Pose2::new(0.1, 0.0, 0.0);
        let obj = Pose2::new(0.0, 1.0, 0.0);
        let terms = compute_reward(&goal, ee, obj, 0.0, &params, true);
        assert!((terms.reward - (-5.0)).abs() < 1e-12);
    }

    #[test]
    fn occlusion_term_arithmetic() {
        // one marker 0.01 m below the table, E = g -> reward = -2.0
        let params = RewardParams {
            markers: vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(0.0, 1.0),
                Vec2::new(-1.0, 1.0),
            ],
            ..RewardParams::default()
        };
        // goal frame at object origin; object at height such that the first
        // marker sits 0.01 below the table and the others far above
        let goal = goal_at(Pose2::IDENTITY);
        let obj = Pose2::new(0.0, -0.01, 0.0);
        let terms = compute_reward(&goal, goal.pose_in_object, obj, 0.0, &params, true);
        assert!((terms.occlusion - 0.01).abs() < 1e-12);
        assert!((terms.reward - (-2.0)).abs() < 1e-12);
    }

    #[test]
    fn reward_is_never_positive() {
        let params = RewardParams::default();
        let goal = goal_at(Pose2::new(-0.05, 0.01, 0.2));
        for i in 0..200 {
            let f = i as f64;
            let ee = Pose2::new((f * 0.37).sin(), (f * 0.73).cos(), f * 0.1);
            let obj = Pose2::new((f * 0.11).cos(), (f * 0.17).sin(), -f * 0.05);
            let terms = compute_reward(&goal, ee, obj, 0.07, &params, true);
            assert!(terms.reward <= 0.0);
        }
    }

    #[test]
    fn success_boundaries_are_strict() {
        let params = RewardParams::default();
        let goal = goal_at(Pose2::IDENTITY);
        // dT = 0.02, dTheta = 5 deg -> success
        assert!(success(&goal, Pose2::new(0.02, 0.0, 5.0_f64.to_radians()), &params));
        // dT = 0.03 exactly -> failure (strict)
        assert!(!success(&goal, Pose2::new(0.03, 0.0, 0.0), &params));
        // dTheta = 15 deg -> failure even with tiny dT
        assert!(!success(&goal, Pose2::new(0.01, 0.0, 15.0_f64.to_radians()), &params));
        // dTheta = 10 deg exactly -> failure (strict)
        assert!(!success(&goal, Pose2::new(0.0, 0.0, 10.0_f64.to_radians()), &params));
    }

    #[test]
    fn rotation_error_wraps_shortest_arc() {
        let params = RewardParams::default();
        let goal = goal_at(Pose2::new(0.0, 0.0, 3.1));
        let ee = Pose2::new(0.0, 0.0, -3.1);
        let terms = compute_reward(&goal, ee, Pose2::new(0.0, 1.0, 0.0), 0.0, &params, true);
        let expected = 2.0 * std::f64::consts::PI - 6.2;
        assert!((terms.rotation_err - expected).abs() < 1e-9);
    }
}
