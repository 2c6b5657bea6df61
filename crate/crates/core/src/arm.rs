//! Planar 3-revolute-joint arm with a parallel-finger end-effector.
//!
//! Pure functions over value types: forward kinematics, the analytic
//! Jacobian, a torque-level operational-space controller with exact gravity
//! compensation (recursive Newton-Euler), and the Jacobian-based joint-limit
//! guard that freezes the desired pose instead of violating limits.

use serde::{Deserialize, Serialize};

use crate::math::{wrap_angle, Mat3, Pose2, Rot2, Vec2};
use crate::physics::GRAVITY;

/// Determinant threshold below which the Jacobian is treated as singular.
pub const SINGULARITY_EPS: f64 = 1e-6;
/// Joint-limit proximity (rad) at which the guard rejects a desired-pose update.
pub const LIMIT_MARGIN: f64 = 0.05;

/// Instantaneous arm state plus the fixed kinematic description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmState {
    /// Joint angles (rad).
    pub q: [f64; 3],
    /// Joint velocities (rad/s).
    pub qdot: [f64; 3],
    /// Link lengths (m), joint-to-joint; the last runs to the fingertips.
    pub link_lengths: [f64; 3],
    /// Per-joint [lo, hi] limits (rad).
    pub joint_limits: [[f64; 2]; 3],
    /// Fixed finger opening (m) during an episode.
    pub finger_gap: f64,
    /// Mount pose of the arm base in the world.
    pub base: Pose2,
}

impl ArmState {
    pub fn new(link_lengths: [f64; 3], joint_limits: [[f64; 2]; 3], finger_gap: f64) -> Self {
        for lim in &joint_limits {
            assert!(lim[0] < lim[1], "joint limits must satisfy lo < hi");
        }
        assert!(link_lengths.iter().all(|&l| l > 0.0));
        ArmState {
            q: [0.0; 3],
            qdot: [0.0; 3],
            link_lengths,
            joint_limits,
            finger_gap,
            base: Pose2::IDENTITY,
        }
    }
}

/// Operational-space PD gains. `kd` gains are derived as sqrt(kp).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControllerConfig {
    pub kp_pos: f64,
    pub kp_rot: f64,
    pub kd_pos: f64,
    pub kd_rot: f64,
    /// Component-wise clamp on the task-space wrench (N, N, N*m).
    pub max_wrench: [f64; 3],
}

impl ControllerConfig {
    pub fn from_gains(kp_pos: f64, kp_rot: f64, max_wrench: [f64; 3]) -> Self {
        assert!(kp_pos > 0.0 && kp_rot > 0.0);
        ControllerConfig {
            kp_pos,
            kp_rot,
            kd_pos: kp_pos.sqrt(),
            kd_rot: kp_rot.sqrt(),
            max_wrench,
        }
    }

    /// Compliant default: kp 300 N/m translational, 30 N*m/rad rotational.
    pub fn default_compliant() -> Self {
        ControllerConfig::from_gains(300.0, 30.0, [30.0, 30.0, 10.0])
    }

    /// Stiff ablation variant: gains doubled.
    pub fn high_gain() -> Self {
        ControllerConfig::from_gains(600.0, 60.0, [30.0, 30.0, 10.0])
    }
}

/// World-frame end-effector target held by the low-level controller.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesiredPose {
    pub target: Pose2,
}

/// World positions of the three joints plus the end-effector.
fn chain_points(state: &ArmState) -> ([Vec2; 4], [f64; 3]) {
    let mut pts = [Vec2::ZERO; 4];
    let mut angles = [0.0; 3];
    let mut p = state.base.pos();
    let mut phi = state.base.pitch;
    pts[0] = p;
    for i in 0..3 {
        phi += state.q[i];
        angles[i] = phi;
        p += Rot2::from_angle(phi).apply(Vec2::new(state.link_lengths[i], 0.0));
        pts[i + 1] = p;
    }
    (pts, angles)
}

/// World pose of the end-effector frame E (midpoint between fingertips).
pub fn forward_kinematics(state: &ArmState) -> Pose2 {
    let (pts, angles) = chain_points(state);
    Pose2::from_parts(pts[3], angles[2])
}

/// Analytic Jacobian mapping joint velocities to the end-effector's world
/// velocity `(vx, vz, omega)`. Rows are (vx, vz, omega); columns are joints.
pub fn jacobian(state: &ArmState) -> Mat3 {
    let (pts, _) = chain_points(state);
    let ee = pts[3];
    let mut m = [[0.0; 3]; 3];
    for j in 0..3 {
        let r = ee - pts[j];
        let col = r.perp();
        m[0][j] = col.x;
        m[1][j] = col.z;
        m[2][j] = 1.0;
    }
    Mat3 { m }
}

/// World-frame end-effector velocity.
pub fn ee_velocity(state: &ArmState) -> [f64; 3] {
    jacobian(state).mul_vec(state.qdot)
}

/// Inverse kinematics for a world end-effector pose; returns joint angles or
/// `None` when the wrist point is out of reach. `elbow_up` picks the branch.
pub fn inverse_kinematics(state: &ArmState, target: Pose2, elbow_up: bool) -> Option<[f64; 3]> {
    let base_inv = state.base.inverse();
    let local = base_inv.compose(target);
    let (l1, l2, l3) = (state.link_lengths[0], state.link_lengths[1], state.link_lengths[2]);
    let wrist = local.pos() - Rot2::from_angle(local.pitch).apply(Vec2::new(l3, 0.0));
    let d2 = wrist.norm_sq();
    let c2 = (d2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2);
    if !(-1.0..=1.0).contains(&c2) {
        return None;
    }
    let q2_mag = c2.acos();
    let q2 = if elbow_up { q2_mag } else { -q2_mag };
    let q1 = wrist.z.atan2(wrist.x) - (l2 * q2.sin()).atan2(l1 + l2 * q2.cos());
    let q3 = wrap_angle(local.pitch - q1 - q2);
    Some([wrap_angle(q1), wrap_angle(q2), q3])
}

/// Inertial description of the arm: slender links plus a rigid hand
/// (rod-palm and two finger pads) lumped into the distal link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmModel {
    pub lengths: [f64; 3],
    /// Masses of link 1, link 2, and the distal rod (hand parts excluded).
    pub link_masses: [f64; 3],
    /// Half-width of the link rectangles (m).
    pub link_half_width: f64,
    /// Distal rod length (m); fingers extend from its end to the fingertips.
    pub rod_length: f64,
    pub finger_length: f64,
    pub finger_thickness: f64,
    pub finger_mass: f64,
    /// Reflected motor/gearbox inertia per joint (kg m^2), added to the link
    /// body inertias; without it the wrist is unrealistically backdrivable.
    pub joint_armature: [f64; 3],
}

impl Default for ArmModel {
    fn default() -> Self {
        ArmModel {
            lengths: [0.4, 0.4, 0.2],
            link_masses: [2.0, 1.5, 1.2],
            link_half_width: 0.02,
            rod_length: 0.15,
            finger_length: 0.05,
            finger_thickness: 0.012,
            finger_mass: 0.25,
            joint_armature: [0.10, 0.05, 0.05],
        }
    }
}

/// Mass, COM offset from the proximal joint (along the link axis), and
/// inertia about the COM, for one link of the serial model.
#[derive(Debug, Clone, Copy)]
pub struct LinkInertia {
    pub mass: f64,
    pub com: Vec2,
    pub inertia: f64,
}

impl ArmModel {
    fn rect_inertia(mass: f64, len_x: f64, len_z: f64) -> f64 {
        mass * (len_x * len_x + len_z * len_z) / 12.0
    }

    pub fn link_inertia(&self, i: usize) -> LinkInertia {
        match i {
            0 | 1 => LinkInertia {
                mass: self.link_masses[i],
                com: Vec2::new(self.lengths[i] / 2.0, 0.0),
                inertia: Self::rect_inertia(
                    self.link_masses[i],
                    self.lengths[i],
                    2.0 * self.link_half_width,
                ) + self.joint_armature[i],
            },
            2 => self.hand_composite(0.07),
            _ => panic!("link index out of range"),
        }
    }

    /// Rigid composite of the distal rod plus both finger pads, for a given
    /// finger gap. Offsets are from the wrist joint.
    pub fn hand_composite(&self, finger_gap: f64) -> LinkInertia {
        let rod_m = self.link_masses[2];
        let rod_com = Vec2::new(self.rod_length / 2.0, 0.0);
        let rod_i = Self::rect_inertia(rod_m, self.rod_length, 2.0 * self.link_half_width);

        let pad_x = self.rod_length + self.finger_length / 2.0;
        let pad_z = finger_gap / 2.0 + self.finger_thickness / 2.0;
        let pad_m = self.finger_mass;
        let pad_i = Self::rect_inertia(pad_m, self.finger_length, self.finger_thickness);

        let total = rod_m + 2.0 * pad_m;
        let com = (rod_com * rod_m
            + Vec2::new(pad_x, pad_z) * pad_m
            + Vec2::new(pad_x, -pad_z) * pad_m)
            / total;
        let mut inertia = rod_i + rod_m * (rod_com - com).norm_sq();
        inertia += pad_i + pad_m * (Vec2::new(pad_x, pad_z) - com).norm_sq();
        inertia += pad_i + pad_m * (Vec2::new(pad_x, -pad_z) - com).norm_sq();
        inertia += self.joint_armature[2];
        LinkInertia { mass: total, com, inertia }
    }

    /// Recursive Newton-Euler inverse dynamics for the 3-link planar chain:
    /// joint torques realizing accelerations `qdd` at state `(q, qdot)` under
    /// gravity. `finger_gap` fixes the hand composite.
    pub fn rnea(
        &self,
        base: Pose2,
        q: [f64; 3],
        qdot: [f64; 3],
        qdd: [f64; 3],
        finger_gap: f64,
    ) -> [f64; 3] {
        let links = [
            self.link_inertia(0),
            self.link_inertia(1),
            self.hand_composite(finger_gap),
        ];

        // Forward pass: world angle, angular vel/acc, joint origin accel.
        // Gravity enters as a fictitious upward base acceleration.
        let mut phi = base.pitch;
        let mut omega = 0.0;
        let mut alpha = 0.0;
        let mut a_joint = Vec2::new(0.0, GRAVITY);
        let mut rot = [Rot2::IDENTITY; 3];
        let mut w = [0.0; 3];
        let mut acc_com = [Vec2::ZERO; 3];
        let mut al = [0.0; 3];
        let mut r_link = [Vec2::ZERO; 3];
        let mut r_com = [Vec2::ZERO; 3];
        for i in 0..3 {
            phi += q[i];
            omega += qdot[i];
            alpha += qdd[i];
            rot[i] = Rot2::from_angle(phi);
            w[i] = omega;
            al[i] = alpha;
            r_com[i] = rot[i].apply(links[i].com);
            r_link[i] = rot[i].apply(Vec2::new(self.lengths[i], 0.0));
            acc_com[i] = a_joint + alpha * r_com[i].perp() - omega * omega * r_com[i];
            a_joint = a_joint + alpha * r_link[i].perp() - omega * omega * r_link[i];
        }

        // Backward pass: accumulate force/torque from the tip inward.
        let mut f_child = Vec2::ZERO;
        let mut n_child = 0.0;
        let mut tau = [0.0; 3];
        for i in (0..3).rev() {
            let f_inertial = acc_com[i] * links[i].mass;
            let n_inertial = links[i].inertia * al[i];
            let n = n_inertial + n_child + r_com[i].cross(f_inertial) + r_link[i].cross(f_child);
            tau[i] = n;
            f_child = f_inertial + f_child;
            n_child = n;
        }
        tau
    }

    /// Torques that exactly cancel gravity at configuration `q`.
    pub fn gravity_torques(&self, state: &ArmState) -> [f64; 3] {
        self.rnea(state.base, state.q, [0.0; 3], [0.0; 3], state.finger_gap)
    }

    /// Joint-space mass matrix via unit-acceleration inverse dynamics.
    pub fn mass_matrix(&self, state: &ArmState) -> Mat3 {
        let grav = self.gravity_torques(state);
        let mut m = [[0.0; 3]; 3];
        for j in 0..3 {
            let mut qdd = [0.0; 3];
            qdd[j] = 1.0;
            let tau = self.rnea(state.base, state.q, [0.0; 3], qdd, state.finger_gap);
            for i in 0..3 {
                m[i][j] = tau[i] - grav[i];
            }
        }
        Mat3 { m }
    }

    /// Effective task-space rotational inertia at the end-effector:
    /// `1 / (J_w M^-1 J_w^T)` for the angular Jacobian row (all ones).
    pub fn rotational_task_inertia(&self, state: &ArmState) -> f64 {
        let m = self.mass_matrix(state);
        let Some(inv) = m.inverse(1e-12) else {
            return 0.0;
        };
        let s: f64 = inv.m.iter().flat_map(|r| r.iter()).sum();
        if s > 1e-9 {
            1.0 / s
        } else {
            0.0
        }
    }
}

/// Operational-space controller output.
#[derive(Debug, Clone, Copy)]
pub struct OscOutput {
    pub torques: [f64; 3],
    /// Clamped task-space wrench that was mapped through J^T.
    pub task_wrench: [f64; 3],
    /// Set when |det J| fell below [`SINGULARITY_EPS`].
    pub singular: bool,
}

/// Task-space PD to joint torques: f = Kp*err - Kd*vel, clamped, then
/// tau = J^T f plus gravity compensation of the arm links.
///
/// The rotational channel is scaled by the end-effector's task-space
/// rotational inertia (the model term of operational-space control); a raw
/// torque PD on the light planar hand is unstable under the 100 Hz
/// zero-order hold.
pub fn osc_wrench(
    state: &ArmState,
    desired: &DesiredPose,
    cfg: &ControllerConfig,
    model: &ArmModel,
) -> OscOutput {
    let ee = forward_kinematics(state);
    let jac = jacobian(state);
    let vel = jac.mul_vec(state.qdot);

    let err = [
        desired.target.x - ee.x,
        desired.target.z - ee.z,
        wrap_angle(desired.target.pitch - ee.pitch),
    ];
    let lambda_rot = model.rotational_task_inertia(state);
    let raw = [
        cfg.kp_pos * err[0] - cfg.kd_pos * vel[0],
        cfg.kp_pos * err[1] - cfg.kd_pos * vel[1],
        lambda_rot * (cfg.kp_rot * err[2] - cfg.kd_rot * vel[2]),
    ];
    let mut f = [0.0; 3];
    for i in 0..3 {
        f[i] = raw[i].clamp(-cfg.max_wrench[i], cfg.max_wrench[i]);
    }

    let mut torques = jac.transpose_mul_vec(f);
    let grav = model.gravity_torques(state);
    for i in 0..3 {
        torques[i] += grav[i];
    }
    OscOutput { torques, task_wrench: f, singular: jac.det().abs() < SINGULARITY_EPS }
}

/// Advance the desired pose by a world-frame increment unless the estimated
/// joint configuration would come within [`LIMIT_MARGIN`] of a limit (or the
/// Jacobian is near singular), in which case the previous desired pose is
/// kept.
pub fn joint_limit_guard(state: &ArmState, delta: Pose2, prev_desired: DesiredPose) -> DesiredPose {
    let jac = jacobian(state);
    let advanced = DesiredPose {
        target: Pose2::new(
            prev_desired.target.x + delta.x,
            prev_desired.target.z + delta.z,
            prev_desired.target.pitch + delta.pitch,
        ),
    };
    let Some(inv) = jac.inverse(SINGULARITY_EPS) else {
        return prev_desired;
    };
    let dq = inv.mul_vec([delta.x, delta.z, delta.pitch]);
    for i in 0..3 {
        let est = state.q[i] + dq[i];
        if est < state.joint_limits[i][0] + LIMIT_MARGIN
            || est > state.joint_limits[i][1] - LIMIT_MARGIN
        {
            return prev_desired;
        }
    }
    advanced
}
