//! Grasp parameterization: a scalar ID in [0, 4] mapped continuously onto
//! end-effector poses along the object cross-section.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::math::Pose2;

use super::domain::DomainParams;

pub const GRASP_ID_MAX: f64 = 4.0;
/// Grasp frames keep this inset (m) from the object edges.
pub const GRASP_EDGE_INSET: f64 = 0.02;
/// Fingertip depth past the grasped face (m). Deep enough that merely
/// pressing a face from outside cannot fall inside the success tolerance.
pub const GRIP_DEPTH: f64 = 0.035;

/// Target grasp pose in the object frame plus its scalar ID.
///
/// The pose is the target for the end-effector frame E (fingertip midpoint,
/// x-axis pointing from palm to fingertips), expressed in the object frame,
/// so it moves rigidly with the object.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraspGoal {
    pub pose_in_object: Pose2,
    pub grasp_id: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraspError {
    #[error("grasp id {0} outside [0, 4]")]
    OutOfRange(f64),
}

/// Continuous map from grasp ID to an object-frame grasp pose.
///
/// IDs in [0, 2] sweep the robot-facing vertical edge bottom-to-top with a
/// horizontal approach; around ID 2 the approach rotates through the upper
/// corner; IDs in [2, 4] sweep the top edge toward the object center with a
/// top-down approach. ID 1.5 is the canonical side grasp, ID 2.5 the
/// adjacent-face grasp rotated 90 degrees from it.
pub fn grasp_from_id(domain: &DomainParams, id: f64) -> Result<GraspGoal, GraspError> {
    if !(0.0..=GRASP_ID_MAX).contains(&id) {
        return Err(GraspError::OutOfRange(id));
    }
    let sx = domain.object_size_x;
    let sz = domain.object_size_z;
    let half_span_z = (sz / 2.0 - GRASP_EDGE_INSET).max(0.0);
    let side_x = -(sx / 2.0) + GRIP_DEPTH;
    let top_z = sz / 2.0 - GRIP_DEPTH.min(sz / 2.0 + 0.01);
    let top_x_start = -(sx / 2.0) + GRASP_EDGE_INSET;

    // side-face point at the end of the edge sweep, and the start of the
    // top-face sweep; the corner window [1.8, 2.2] blends between them
    let side_point = |id: f64| {
        let z = if id <= 1.5 {
            -half_span_z + (id / 1.5) * half_span_z
        } else {
            ((id - 1.5) / 0.3).min(1.0) * half_span_z
        };
        (side_x, z)
    };
    let top_point = |id: f64| {
        let t = ((id - 2.2) / 1.8).clamp(0.0, 1.0);
        (top_x_start * (1.0 - t), top_z)
    };
    let (x, z) = if id <= 1.8 {
        side_point(id)
    } else if id < 2.2 {
        let t = (id - 1.8) / 0.4;
        let (ax, az) = side_point(1.8);
        let (bx, bz) = top_point(2.2);
        (ax + t * (bx - ax), az + t * (bz - az))
    } else {
        top_point(id)
    };
    // approach rotates from horizontal (+x) to top-down (-pi/2) across the
    // corner window [1.5, 2.5]
    let pitch = if id <= 1.5 {
        0.0
    } else if id < 2.5 {
        -(id - 1.5) * std::f64::consts::FRAC_PI_2
    } else {
        -std::f64::consts::FRAC_PI_2
    };
    Ok(GraspGoal { pose_in_object: Pose2::new(x, z, pitch), grasp_id: id })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn side_grasp_anchor() {
        let d = DomainParams::default();
        let g = grasp_from_id(&d, 1.5).unwrap();
        // centered on the side edge, horizontal approach
        assert!((g.pose_in_object.x - (-0.04)).abs() < 1e-12);
        assert!(g.pose_in_object.z.abs() < 1e-12);
        assert_eq!(g.pose_in_object.pitch, 0.0);
    }

    #[test]
    fn adjacent_face_anchor_rotated_90deg() {
        let d = DomainParams::default();
        let side = grasp_from_id(&d, 1.5).unwrap();
        let top = grasp_from_id(&d, 2.5).unwrap();
        let dpitch = crate::math::angle_diff(side.pose_in_object.pitch, top.pose_in_object.pitch);
        assert!((dpitch - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        // on the top face, tips below the face by the grip depth
        assert!((top.pose_in_object.z - (0.025 - GRIP_DEPTH)).abs() < 1e-12);
    }

    #[test]
    fn continuity_along_the_whole_range() {
        let d = DomainParams::default();
        let mut id = 0.0;
        while id < 4.0 - 1e-4 {
            let a = grasp_from_id(&d, id).unwrap().pose_in_object;
            let b = grasp_from_id(&d, id + 1e-4).unwrap().pose_in_object;
            assert!(a.metric_to(b) < 1e-3, "discontinuity at id {id}");
            id += 0.01;
        }
    }

    #[test]
    fn out_of_range_rejected() {
        let d = DomainParams::default();
        assert!(grasp_from_id(&d, -0.001).is_err());
        assert!(grasp_from_id(&d, 4.001).is_err());
        assert!(grasp_from_id(&d, f64::NAN).is_err());
    }
}
