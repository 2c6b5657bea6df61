//! The simulation world and its step loop.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::math::Vec2;

use super::body::{BodyId, RigidBody2};
use super::collide::{collide_polygons, BodyCache, Contact2, Manifold};
use super::joint::Joint2;
use super::solver::{ContactConstraint, JointConstraint};
use super::{CONTACT_MARGIN, DT, GRAVITY, SLOP, VELOCITY_ITERATIONS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PhysicsError {
    /// A body's state became NaN/inf; the episode must abort.
    #[error("non-finite body state for body {0}")]
    NonFiniteState(usize),
    #[error("wrench count {got} does not match body count {want}")]
    WrenchCount { got: usize, want: usize },
}

/// External generalized force on one body for one tick: force (N) + torque (N*m).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Wrench {
    pub fx: f64,
    pub fz: f64,
    pub tau: f64,
}

impl Wrench {
    pub const ZERO: Wrench = Wrench { fx: 0.0, fz: 0.0, tau: 0.0 };

    pub fn is_finite(&self) -> bool {
        self.fx.is_finite() && self.fz.is_finite() && self.tau.is_finite()
    }
}

/// Impulses transferred through one contact point during one tick.
#[derive(Debug, Clone, Copy)]
pub struct ContactImpulse {
    pub body_a: BodyId,
    pub body_b: BodyId,
    pub point: Vec2,
    pub normal: Vec2,
    pub normal_impulse: f64,
    pub tangent_impulse: f64,
}

/// Per-tick solver observability, refreshed by every [`World2::step`].
#[derive(Debug, Clone, Default)]
pub struct StepTelemetry {
    pub contacts: Vec<ContactImpulse>,
    /// Worst penetration depth measured during the position pass (m).
    pub max_penetration: f64,
}

/// Planar rigid-body world with a fixed 1 kHz timestep.
#[derive(Debug, Clone)]
pub struct World2 {
    pub bodies: Vec<RigidBody2>,
    pub joints: Vec<Joint2>,
    pub gravity: Vec2,
    pub dt: f64,
    pub velocity_iterations: usize,
    pub position_iterations: usize,
    pub telemetry: StepTelemetry,
    manifold_buf: Vec<Manifold>,
    contact_buf: Vec<ContactConstraint>,
    joint_buf: Vec<JointConstraint>,
}

impl Default for World2 {
    fn default() -> Self {
        World2::new()
    }
}

impl World2 {
    pub fn new() -> Self {
        World2 {
            bodies: Vec::new(),
            joints: Vec::new(),
            gravity: Vec2::new(0.0, -GRAVITY),
            dt: DT,
            velocity_iterations: VELOCITY_ITERATIONS,
            position_iterations: super::POSITION_ITERATIONS,
            telemetry: StepTelemetry::default(),
            manifold_buf: Vec::new(),
            contact_buf: Vec::new(),
            joint_buf: Vec::new(),
        }
    }

    pub fn add_body(&mut self, body: RigidBody2) -> BodyId {
        self.bodies.push(body);
        BodyId(self.bodies.len() - 1)
    }

    pub fn add_joint(&mut self, joint: Joint2) {
        self.joints.push(joint);
    }

    pub fn body(&self, id: BodyId) -> &RigidBody2 {
        &self.bodies[id.0]
    }

    pub fn body_mut(&mut self, id: BodyId) -> &mut RigidBody2 {
        &mut self.bodies[id.0]
    }

    fn jointed(&self, i: usize, j: usize) -> bool {
        self.joints.iter().any(|jt| {
            let (a, b) = jt.bodies();
            (a.0 == i && b.0 == j) || (a.0 == j && b.0 == i)
        })
    }

    fn find_manifolds(&self, margin: f64, out: &mut Vec<Manifold>) {
        out.clear();
        let n = self.bodies.len();
        let caches: Vec<BodyCache> =
            self.bodies.iter().map(|b| BodyCache::build(b.pose, &b.shape, margin)).collect();
        for i in 0..n {
            for j in (i + 1)..n {
                let (bi, bj) = (&self.bodies[i], &self.bodies[j]);
                if bi.is_static && bj.is_static {
                    continue;
                }
                if !bi.collidable || !bj.collidable {
                    continue;
                }
                let (ci, cj) = (&caches[i], &caches[j]);
                if ci.aabb_lo.x > cj.aabb_hi.x
                    || cj.aabb_lo.x > ci.aabb_hi.x
                    || ci.aabb_lo.z > cj.aabb_hi.z
                    || cj.aabb_lo.z > ci.aabb_hi.z
                {
                    continue;
                }
                if self.jointed(i, j) {
                    continue;
                }
                if let Some(m) = collide_polygons(i, ci, j, cj, margin) {
                    out.push(m);
                }
            }
        }
    }

    /// Every contact with penetration above `-slop`, in deterministic
    /// `(body_a, body_b, point)` order.
    pub fn detect_contacts(&self) -> Vec<Contact2> {
        let mut manifolds = Vec::new();
        self.find_manifolds(SLOP, &mut manifolds);
        let mut contacts = Vec::new();
        for m in &manifolds {
            for p in &m.points {
                contacts.push(Contact2 {
                    body_a: BodyId(m.a),
                    body_b: BodyId(m.b),
                    point: p.point,
                    normal: m.normal,
                    penetration_depth: -p.separation,
                });
            }
        }
        contacts.sort_by(|a, b| {
            (a.body_a, a.body_b)
                .cmp(&(b.body_a, b.body_b))
                .then(a.point.x.total_cmp(&b.point.x))
                .then(a.point.z.total_cmp(&b.point.z))
        });
        contacts
    }

    /// Advance one tick under per-body external wrenches.
    ///
    /// Semi-implicit Euler with sequential-impulse contact resolution and a
    /// positional correction pass; restitution is zero.
    pub fn step(&mut self, wrenches: &[Wrench]) -> Result<(), PhysicsError> {
        if wrenches.len() != self.bodies.len() {
            return Err(PhysicsError::WrenchCount { got: wrenches.len(), want: self.bodies.len() });
        }
        let dt = self.dt;

        for (body, w) in self.bodies.iter_mut().zip(wrenches) {
            if body.is_static {
                continue;
            }
            body.vel += (self.gravity + Vec2::new(w.fx, w.fz) * body.inv_mass) * dt;
            body.omega += w.tau * body.inv_inertia * dt;
        }

        let mut manifolds = std::mem::take(&mut self.manifold_buf);
        self.find_manifolds(CONTACT_MARGIN, &mut manifolds);

        let previous = std::mem::take(&mut self.contact_buf);
        let mut contacts: Vec<ContactConstraint> =
            manifolds.iter().map(|m| ContactConstraint::from_manifold(m, &self.bodies, dt)).collect();
        for c in contacts.iter_mut() {
            c.warm_start(&previous, &mut self.bodies);
        }
        drop(previous);
        let prev_joints = std::mem::take(&mut self.joint_buf);
        let mut joints: Vec<JointConstraint> =
            self.joints.iter().map(|j| JointConstraint::from_joint(j, &self.bodies)).collect();
        if prev_joints.len() == joints.len() {
            for (j, prev) in joints.iter_mut().zip(&prev_joints) {
                j.warm_start(prev, &mut self.bodies);
            }
        }
        drop(prev_joints);

        // Gauss-Seidel sweeps; stop early once impulse changes vanish
        const CONVERGED: f64 = 1e-8;
        for _ in 0..self.velocity_iterations {
            let mut max_applied = 0.0f64;
            for j in joints.iter_mut() {
                max_applied = max_applied.max(j.solve_velocity(&mut self.bodies));
            }
            for c in contacts.iter_mut() {
                max_applied = max_applied.max(c.solve_velocity(&mut self.bodies));
            }
            if max_applied < CONVERGED {
                break;
            }
        }

        for body in self.bodies.iter_mut() {
            if body.is_static {
                continue;
            }
            body.pose.x += body.vel.x * dt;
            body.pose.z += body.vel.z * dt;
            body.pose.pitch += body.omega * dt;
        }

        let mut max_pen = 0.0f64;
        for _ in 0..self.position_iterations {
            let mut worst = 0.0f64;
            for j in &joints {
                j.solve_position(&mut self.bodies);
            }
            for c in &contacts {
                worst = worst.max(c.solve_position(&mut self.bodies));
            }
            max_pen = max_pen.max(worst);
            if worst <= SLOP {
                break;
            }
        }

        for (i, body) in self.bodies.iter().enumerate() {
            if !body.state_is_finite() {
                return Err(PhysicsError::NonFiniteState(i));
            }
        }

        self.telemetry.contacts.clear();
        for c in &contacts {
            for p in &c.points {
                if p.normal_impulse != 0.0 || p.tangent_impulse != 0.0 {
                    self.telemetry.contacts.push(ContactImpulse {
                        body_a: BodyId(c.a),
                        body_b: BodyId(c.b),
                        point: self.bodies[c.a].pose.transform_point(p.local_a),
                        normal: c.normal,
                        normal_impulse: p.normal_impulse,
                        tangent_impulse: p.tangent_impulse,
                    });
                }
            }
        }
        self.telemetry.max_penetration = max_pen;
        self.manifold_buf = manifolds;
        self.contact_buf = contacts;
        self.joint_buf = joints;
        Ok(())
    }

    /// Kinetic plus gravitational potential energy of all dynamic bodies (J).
    pub fn mechanical_energy(&self) -> f64 {
        let g = self.gravity.norm();
        self.bodies
            .iter()
            .filter(|b| !b.is_static)
            .map(|b| {
                0.5 * b.mass * b.vel.norm_sq()
                    + 0.5 * b.inertia * b.omega * b.omega
                    + b.mass * g * b.pose.z
            })
            .sum()
    }

    /// One line of JSON describing every body's state (debug dumps).
    pub fn debug_state_json(&self) -> String {
        let states: Vec<serde_json::Value> = self
            .bodies
            .iter()
            .map(|b| {
                serde_json::json!({
                    "x": b.pose.x, "z": b.pose.z, "pitch": b.pose.pitch,
                    "vx": b.vel.x, "vz": b.vel.z, "omega": b.omega,
                })
            })
            .collect();
        serde_json::Value::Array(states).to_string()
    }
}
