//! Scene construction: bin (floor + wall), object, and the jointed arm.
//!
//! The arm lives in the physics world as rigid links connected by revolute
//! joints; the two finger pads are welded to the distal rod. Joint torques
//! from the controller are applied as equal-and-opposite torque couples, so
//! contact forces on the fingers push back through the whole chain.

use serde::{Deserialize, Serialize};

use crate::arm::{ArmModel, ArmState};
use crate::math::{Pose2, Rot2, Vec2};
use crate::physics::{BodyId, Joint2, Polygon, RigidBody2, World2, Wrench};

use super::domain::DomainParams;

/// Friction assigned to the object body; pair friction is the product of the
/// two bodies' coefficients, so floor/wall/finger coefficients apply directly.
const OBJECT_FRICTION: f64 = 1.0;
/// Horizontal span of the table to the left of the bin region (m).
const TABLE_LEFT_SPAN: f64 = 0.5;
/// Distance from the bin-region center to the wall's inner face (m).
const WALL_OFFSET: f64 = 0.2;
const WALL_THICKNESS: f64 = 0.04;
const WALL_HEIGHT: f64 = 0.2;
/// Arm mount position in the world.
pub const ARM_BASE: Pose2 = Pose2 { x: -0.1, z: 0.25, pitch: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SceneIds {
    pub mount: BodyId,
    pub links: [BodyId; 3],
    pub finger_pos: BodyId,
    pub finger_neg: BodyId,
    pub object: BodyId,
    pub floor: BodyId,
    pub wall: Option<BodyId>,
}

/// A built world plus the derived geometry the environment needs.
#[derive(Debug, Clone)]
pub struct Scene {
    pub world: World2,
    pub ids: SceneIds,
    pub model: ArmModel,
    pub finger_gap: f64,
    pub table_z: f64,
    /// Inner face of the wall (even when the wall is ablated away).
    pub wall_x: f64,
}

impl Scene {
    /// Build the bin scene with the object resting on the floor at
    /// `initial_distance_to_wall` from the wall, and the arm at joint
    /// configuration `q`.
    pub fn build(domain: &DomainParams, model: &ArmModel, finger_gap: f64, q: [f64; 3], with_wall: bool) -> Scene {
        let mut world = World2::new();
        let table_z = domain.table_offset_z;
        let wall_x = domain.table_offset_x + WALL_OFFSET;

        let floor = world.add_body(RigidBody2::new_static(
            Pose2::new(domain.table_offset_x - TABLE_LEFT_SPAN / 2.0 + WALL_OFFSET / 2.0, table_z - 0.025, 0.0),
            Polygon::rect((TABLE_LEFT_SPAN + WALL_OFFSET) / 2.0, 0.025),
            domain.table_friction,
        ));
        let wall = if with_wall {
            Some(world.add_body(RigidBody2::new_static(
                Pose2::new(wall_x + WALL_THICKNESS / 2.0, table_z + WALL_HEIGHT / 2.0, 0.0),
                Polygon::rect(WALL_THICKNESS / 2.0, WALL_HEIGHT / 2.0),
                domain.table_friction,
            )))
        } else {
            None
        };

        let object = world.add_body(RigidBody2::dynamic_box(
            Pose2::new(
                wall_x - domain.initial_distance_to_wall - domain.object_size_x / 2.0,
                table_z + domain.object_size_z / 2.0,
                0.0,
            ),
            domain.object_size_x / 2.0,
            domain.object_size_z / 2.0,
            domain.object_mass(),
            OBJECT_FRICTION,
        ));

        let ids = build_arm(&mut world, model, finger_gap, q, domain.gripper_friction, object, floor, wall);
        Scene { world, ids, model: *model, finger_gap, table_z, wall_x }
    }

    /// Joint angles and velocities read back from the link bodies.
    pub fn arm_state(&self, finger_gap: f64, joint_limits: [[f64; 2]; 3]) -> ArmState {
        let l1 = self.world.body(self.ids.links[0]);
        let l2 = self.world.body(self.ids.links[1]);
        let l3 = self.world.body(self.ids.links[2]);
        ArmState {
            q: [
                l1.pose.pitch - ARM_BASE.pitch,
                l2.pose.pitch - l1.pose.pitch,
                l3.pose.pitch - l2.pose.pitch,
            ],
            qdot: [l1.omega, l2.omega - l1.omega, l3.omega - l2.omega],
            link_lengths: self.model.lengths,
            joint_limits,
            finger_gap,
            base: ARM_BASE,
        }
    }

    /// End-effector pose taken directly from the distal body (fingertip
    /// midpoint).
    pub fn ee_pose(&self) -> Pose2 {
        let l3 = self.world.body(self.ids.links[2]);
        let off = self.model.lengths[2] - self.model.rod_length / 2.0;
        Pose2::from_parts(l3.pose.transform_point(Vec2::new(off, 0.0)), l3.pose.pitch)
    }

    /// Per-body wrench vector realizing joint torques as torque couples.
    pub fn joint_torque_wrenches(&self, tau: [f64; 3], buf: &mut Vec<Wrench>) {
        buf.clear();
        buf.resize(self.world.bodies.len(), Wrench::ZERO);
        buf[self.ids.links[0].0].tau = tau[0] - tau[1];
        buf[self.ids.links[1].0].tau = tau[1] - tau[2];
        buf[self.ids.links[2].0].tau = tau[2];
    }

    /// True while any finger pad (or the palm rod) touches the object.
    pub fn gripper_object_contact(&self) -> bool {
        let obj = self.ids.object;
        let hands = [self.ids.finger_pos, self.ids.finger_neg, self.ids.links[2]];
        self.world.telemetry.contacts.iter().any(|c| {
            (c.body_a == obj && hands.contains(&c.body_b))
                || (c.body_b == obj && hands.contains(&c.body_a))
        })
    }

    pub fn object_wall_contact(&self) -> bool {
        let Some(wall) = self.ids.wall else { return false };
        let obj = self.ids.object;
        self.world.telemetry.contacts.iter().any(|c| {
            (c.body_a == obj && c.body_b == wall) || (c.body_b == obj && c.body_a == wall)
        })
    }

    pub fn object_pose(&self) -> Pose2 {
        self.world.body(self.ids.object).pose
    }
}

#[allow(clippy::too_many_arguments)]
fn build_arm(
    world: &mut World2,
    model: &ArmModel,
    finger_gap: f64,
    q: [f64; 3],
    gripper_friction: f64,
    _object: BodyId,
    _floor: BodyId,
    _wall: Option<BodyId>,
) -> SceneIds {
    let mount = world.add_body(
        RigidBody2::new_static(ARM_BASE, Polygon::rect(0.03, 0.03), 0.5).non_collidable(),
    );

    // Link poses from the kinematic chain; body origins sit at the rod COMs.
    let mut phi = ARM_BASE.pitch;
    let mut joint = ARM_BASE.pos();
    let mut links = [BodyId(0); 3];
    let mut joint_world = [Vec2::ZERO; 3];
    for i in 0..3 {
        phi += q[i];
        joint_world[i] = joint;
        let rot = Rot2::from_angle(phi);
        let rod_len = if i == 2 { model.rod_length } else { model.lengths[i] };
        let com = joint + rot.apply(Vec2::new(rod_len / 2.0, 0.0));
        let mass = model.link_masses[i];
        let inertia = mass * ((rod_len).powi(2) + (2.0 * model.link_half_width).powi(2)) / 12.0
            + model.joint_armature[i];
        let mut body = RigidBody2::new_dynamic(
            Pose2::from_parts(com, phi),
            Polygon::rect(rod_len / 2.0, model.link_half_width),
            mass,
            inertia,
            if i == 2 { gripper_friction } else { 0.5 },
        );
        if i < 2 {
            body = body.non_collidable();
        }
        links[i] = world.add_body(body);
        joint += rot.apply(Vec2::new(model.lengths[i], 0.0));
    }

    // Finger pads welded to the distal rod.
    let rot3 = Rot2::from_angle(phi);
    let wrist = joint_world[2];
    let pad_x = model.rod_length + model.finger_length / 2.0;
    let pad_z = finger_gap / 2.0 + model.finger_thickness / 2.0;
    let pad_inertia = model.finger_mass
        * (model.finger_length.powi(2) + model.finger_thickness.powi(2))
        / 12.0;
    let mut fingers = [BodyId(0); 2];
    for (k, sign) in [1.0f64, -1.0].iter().enumerate() {
        let center = wrist + rot3.apply(Vec2::new(pad_x, sign * pad_z));
        fingers[k] = world.add_body(RigidBody2::new_dynamic(
            Pose2::from_parts(center, phi),
            Polygon::rect(model.finger_length / 2.0, model.finger_thickness / 2.0),
            model.finger_mass,
            pad_inertia,
            gripper_friction,
        ));
    }

    // Joints: mount -> link1 -> link2 -> link3, plus the two finger welds.
    world.add_joint(Joint2::Revolute {
        a: mount,
        b: links[0],
        anchor_a: Vec2::ZERO,
        anchor_b: Vec2::new(-model.lengths[0] / 2.0, 0.0),
    });
    world.add_joint(Joint2::Revolute {
        a: links[0],
        b: links[1],
        anchor_a: Vec2::new(model.lengths[0] / 2.0, 0.0),
        anchor_b: Vec2::new(-model.lengths[1] / 2.0, 0.0),
    });
    world.add_joint(Joint2::Revolute {
        a: links[1],
        b: links[2],
        anchor_a: Vec2::new(model.lengths[1] / 2.0, 0.0),
        anchor_b: Vec2::new(-model.rod_length / 2.0, 0.0),
    });
    for (k, sign) in [1.0f64, -1.0].iter().enumerate() {
        world.add_joint(Joint2::Weld {
            a: links[2],
            b: fingers[k],
            anchor_a: Vec2::new(pad_x - model.rod_length / 2.0, sign * pad_z),
            anchor_b: Vec2::ZERO,
            ref_angle: 0.0,
        });
    }

    SceneIds {
        mount,
        links,
        finger_pos: fingers[0],
        finger_neg: fingers[1],
        object: _object,
        floor: _floor,
        wall: _wall,
    }
}
