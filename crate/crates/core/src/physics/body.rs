//! Rigid bodies and convex polygon shapes.

use arrayvec::ArrayVec;
use serde::{Deserialize, Serialize};

use crate::math::{Pose2, Vec2};

/// Index of a body inside a [`super::World2`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BodyId(pub usize);

/// Convex polygon in body-local coordinates, counter-clockwise winding.
///
/// Capped at 8 vertices; every shape in this simulator is a rectangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    pub verts: ArrayVec<Vec2, 8>,
    /// Outward unit normal of edge i (verts[i] -> verts[i+1]).
    pub normals: ArrayVec<Vec2, 8>,
}

impl Polygon {
    /// Build a polygon from CCW vertices. Panics on fewer than 3 vertices,
    /// non-convex or clockwise input.
    pub fn new(verts: &[Vec2]) -> Self {
        assert!(verts.len() >= 3 && verts.len() <= 8, "polygon needs 3..=8 vertices");
        let mut v: ArrayVec<Vec2, 8> = ArrayVec::new();
        v.try_extend_from_slice(verts).unwrap();
        let n = v.len();
        let normals = (0..n)
            .map(|i| {
                let e = v[(i + 1) % n] - v[i];
                Vec2::new(e.z, -e.x).normalized()
            })
            .collect();
        let p = Polygon { verts: v, normals };
        assert!(p.is_convex_ccw(), "polygon must be convex with CCW winding");
        p
    }

    /// Axis-aligned rectangle centered on the body origin.
    pub fn rect(half_x: f64, half_z: f64) -> Self {
        Polygon::new(&[
            Vec2::new(-half_x, -half_z),
            Vec2::new(half_x, -half_z),
            Vec2::new(half_x, half_z),
            Vec2::new(-half_x, half_z),
        ])
    }

    /// Rectangle with an arbitrary center offset in body coordinates.
    pub fn rect_at(center: Vec2, half_x: f64, half_z: f64) -> Self {
        Polygon::new(&[
            center + Vec2::new(-half_x, -half_z),
            center + Vec2::new(half_x, -half_z),
            center + Vec2::new(half_x, half_z),
            center + Vec2::new(-half_x, half_z),
        ])
    }

    pub fn is_convex_ccw(&self) -> bool {
        let n = self.verts.len();
        for i in 0..n {
            let a = self.verts[i];
            let b = self.verts[(i + 1) % n];
            let c = self.verts[(i + 2) % n];
            if (b - a).cross(c - b) <= 0.0 {
                return false;
            }
        }
        true
    }

    pub fn area(&self) -> f64 {
        let n = self.verts.len();
        let mut sum = 0.0;
        for i in 0..n {
            sum += self.verts[i].cross(self.verts[(i + 1) % n]);
        }
        0.5 * sum
    }

    /// Second polar moment of area about the body origin (divide-free form of
    /// the standard polygon inertia formula; multiply by density for inertia).
    pub fn polar_moment(&self) -> f64 {
        let n = self.verts.len();
        let mut num = 0.0;
        for i in 0..n {
            let a = self.verts[i];
            let b = self.verts[(i + 1) % n];
            let cross = a.cross(b);
            num += cross * (a.dot(a) + a.dot(b) + b.dot(b));
        }
        num / 12.0
    }

    /// Furthest vertex along a direction (world direction, local verts).
    #[inline]
    pub fn support_local(&self, dir: Vec2) -> Vec2 {
        let mut best = self.verts[0];
        let mut best_d = best.dot(dir);
        for &v in self.verts.iter().skip(1) {
            let d = v.dot(dir);
            if d > best_d {
                best_d = d;
                best = v;
            }
        }
        best
    }
}

/// Planar rigid body.
///
/// Static bodies have zero inverse mass and ignore applied forces. Bodies
/// with `collidable = false` (arm links) never generate contacts but still
/// participate in joints.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RigidBody2 {
    pub pose: Pose2,
    pub vel: Vec2,
    /// Angular velocity (rad/s, CCW positive).
    pub omega: f64,
    pub mass: f64,
    pub inertia: f64,
    pub inv_mass: f64,
    pub inv_inertia: f64,
    pub shape: Polygon,
    pub friction: f64,
    pub is_static: bool,
    pub collidable: bool,
}

impl RigidBody2 {
    pub fn new_dynamic(pose: Pose2, shape: Polygon, mass: f64, inertia: f64, friction: f64) -> Self {
        assert!(mass > 0.0 && inertia > 0.0, "dynamic bodies need positive mass and inertia");
        assert!(friction >= 0.0);
        RigidBody2 {
            pose,
            vel: Vec2::ZERO,
            omega: 0.0,
            mass,
            inertia,
            inv_mass: 1.0 / mass,
            inv_inertia: 1.0 / inertia,
            shape,
            friction,
            is_static: false,
            collidable: true,
        }
    }

    /// Dynamic rectangle with inertia derived from uniform density.
    pub fn dynamic_box(pose: Pose2, half_x: f64, half_z: f64, mass: f64, friction: f64) -> Self {
        let inertia = mass * ((2.0 * half_x).powi(2) + (2.0 * half_z).powi(2)) / 12.0;
        RigidBody2::new_dynamic(pose, Polygon::rect(half_x, half_z), mass, inertia, friction)
    }

    pub fn new_static(pose: Pose2, shape: Polygon, friction: f64) -> Self {
        RigidBody2 {
            pose,
            vel: Vec2::ZERO,
            omega: 0.0,
            mass: 0.0,
            inertia: 0.0,
            inv_mass: 0.0,
            inv_inertia: 0.0,
            shape,
            friction,
            is_static: true,
            collidable: true,
        }
    }

    pub fn non_collidable(mut self) -> Self {
        self.collidable = false;
        self
    }

    /// Velocity of a world-space point rigidly attached to this body.
    #[inline]
    pub fn velocity_at(&self, world_point: Vec2) -> Vec2 {
        let r = world_point - self.pose.pos();
        self.vel + self.omega * r.perp()
    }

    #[inline]
    pub fn state_is_finite(&self) -> bool {
        self.pose.is_finite() && self.vel.is_finite() && self.omega.is_finite()
    }
}
