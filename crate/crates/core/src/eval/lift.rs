//! Lift verification: close the gripper on the object (a kinematic weld,
//! standing in for finger closure) and raise the end-effector; the grasp
//! counts only if the object actually comes up with it.

use crate::arm::{osc_wrench, DesiredPose};
use crate::env::OccludedGraspEnv;
use crate::math::{Pose2, Vec2};
use crate::physics::{Joint2, Wrench};

/// Commanded vertical travel (m) and its duration in controller periods.
const LIFT_HEIGHT: f64 = 0.10;
const LIFT_PERIODS: usize = 200; // 2 s at 100 Hz
/// Required object height gain for a successful lift.
const LIFT_SUCCESS_GAIN: f64 = 0.05;
/// Slack allowed when checking that the object fits between the pads.
const GRIP_SLACK: f64 = 5e-3;

/// Clamp the fingers onto the object and lift. Returns false on any failure
/// mode: object not between the pads, no pad overlap, or the object staying
/// behind (jammed under the wall, slipping out of the weld precondition).
pub fn verify_lift(env: &mut OccludedGraspEnv) -> bool {
    let cfg = env.cfg.clone();
    let controller = cfg.controller();
    let Some(scene) = env.scene_mut() else {
        return false;
    };

    let ee = scene.ee_pose();
    let obj_body = scene.world.body(scene.ids.object).clone();
    let obj = obj_body.pose;

    // object silhouette in the end-effector frame
    let rel = ee.inverse().compose(obj);
    let (mut zmin, mut zmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in &obj_body.shape.verts {
        let p = rel.transform_point(v);
        zmin = zmin.min(p.z);
        zmax = zmax.max(p.z);
        xmin = xmin.min(p.x);
        xmax = xmax.max(p.x);
    }
    let gap = scene.finger_gap;
    let pad_reach = scene.model.finger_length;
    // closing succeeds when the object straddles the gripper centerline,
    // does not exceed the open gap, and overlaps the pad sweep region
    let fits = (zmax - zmin) <= gap + GRIP_SLACK && zmin < 0.0 && zmax > 0.0;
    let overlap = xmin < 0.0 && xmax > -pad_reach;
    if !fits || !overlap {
        return false;
    }

    // weld the object to the distal link at the current relative pose
    let link3 = scene.ids.links[2];
    let l3_pose = scene.world.body(link3).pose;
    let anchor_a = l3_pose.inv_transform_point(obj.pos());
    scene.world.add_joint(Joint2::Weld {
        a: link3,
        b: scene.ids.object,
        anchor_a,
        anchor_b: Vec2::ZERO,
        ref_angle: obj.pitch - l3_pose.pitch,
    });

    let start_height = obj.z;
    let start_target = ee;
    let mut wrench_buf: Vec<Wrench> = Vec::new();
    let limits = cfg.joint_limits;
    let gap_cfg = cfg.finger_gap;
    for k in 0..LIFT_PERIODS {
        let ramp = (k + 1) as f64 / LIFT_PERIODS as f64;
        let desired = DesiredPose {
            target: Pose2::new(
                start_target.x,
                start_target.z + LIFT_HEIGHT * ramp,
                start_target.pitch,
            ),
        };
        let state = scene.arm_state(gap_cfg, limits);
        let out = osc_wrench(&state, &desired, &controller, &scene.model);
        scene.joint_torque_wrenches(out.torques, &mut wrench_buf);
        for _ in 0..10 {
            if scene.world.step(&wrench_buf).is_err() {
                return false;
            }
        }
    }

    let lifted = scene.world.body(scene.ids.object).pose.z - start_height;
    lifted >= LIFT_SUCCESS_GAIN
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{grasp_from_id, DomainParams, EnvConfig};

    #[test]
    fn fingers_nowhere_near_object_fails() {
        let mut env = OccludedGraspEnv::new(EnvConfig::default());
        let domain = DomainParams::default();
        let goal = grasp_from_id(&domain, 1.5).unwrap();
        env.reset(domain, goal, 3).unwrap();
        // initial pose: gripper far from the box
        assert!(!verify_lift(&mut env));
    }
}
