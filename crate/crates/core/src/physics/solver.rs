//! Sequential-impulse constraint solver internals.

use arrayvec::ArrayVec;

use crate::math::Vec2;

use super::body::RigidBody2;
use super::collide::Manifold;
use super::joint::Joint2;
use super::{BAUMGARTE, SLOP};

/// Per-point solver state for a contact constraint.
#[derive(Debug, Clone, Copy)]
pub(super) struct ContactPoint {
    pub local_a: Vec2,
    pub local_b: Vec2,
    pub r_a: Vec2,
    pub r_b: Vec2,
    pub normal_mass: f64,
    pub tangent_mass: f64,
    /// Lower bound on post-solve normal velocity (speculative: `-gap/dt`
    /// while still separated, 0 once touching).
    pub target_vn: f64,
    pub normal_impulse: f64,
    pub tangent_impulse: f64,
}

#[derive(Debug, Clone)]
pub(super) struct ContactConstraint {
    pub a: usize,
    pub b: usize,
    pub normal: Vec2,
    pub local_normal: Vec2,
    pub ref_is_a: bool,
    pub friction: f64,
    pub points: ArrayVec<ContactPoint, 2>,
}

impl ContactConstraint {
    /// Inherit accumulated impulses from last tick's matching constraint
    /// (same body pair, anchor within 1 mm) and apply them as a warm start.
    pub fn warm_start(&mut self, previous: &[ContactConstraint], bodies: &mut [RigidBody2]) {
        let Some(prev) = previous.iter().find(|c| c.a == self.a && c.b == self.b) else {
            return;
        };
        let normal = self.normal;
        let tangent = normal.perp();
        for p in self.points.iter_mut() {
            let matched = prev.points.iter().find(|q| {
                (q.local_b - p.local_b).norm_sq() < 1e-6
            });
            let Some(q) = matched else { continue };
            p.normal_impulse = q.normal_impulse;
            p.tangent_impulse = q.tangent_impulse;
            let imp = normal * p.normal_impulse + tangent * p.tangent_impulse;
            apply_impulse(bodies, self.a, self.b, p.r_a, p.r_b, imp);
        }
    }

    pub fn from_manifold(m: &Manifold, bodies: &[RigidBody2], dt: f64) -> Self {
        let ba = &bodies[m.a];
        let bb = &bodies[m.b];
        // Pair friction is the product of body coefficients, so a unit-friction
        // object takes on the table/gripper coefficient directly.
        let friction = ba.friction * bb.friction;
        let tangent = m.normal.perp();
        let mut points = ArrayVec::new();
        for p in &m.points {
            let r_a = p.point - ba.pose.pos();
            let r_b = p.point - bb.pose.pos();
            let k_n = ba.inv_mass
                + bb.inv_mass
                + ba.inv_inertia * r_a.cross(m.normal).powi(2)
                + bb.inv_inertia * r_b.cross(m.normal).powi(2);
            let k_t = ba.inv_mass
                + bb.inv_mass
                + ba.inv_inertia * r_a.cross(tangent).powi(2)
                + bb.inv_inertia * r_b.cross(tangent).powi(2);
            points.push(ContactPoint {
                local_a: p.local_a,
                local_b: p.local_b,
                r_a,
                r_b,
                normal_mass: if k_n > 0.0 { 1.0 / k_n } else { 0.0 },
                tangent_mass: if k_t > 0.0 { 1.0 / k_t } else { 0.0 },
                target_vn: if p.separation > 0.0 { -p.separation / dt } else { 0.0 },
                normal_impulse: 0.0,
                tangent_impulse: 0.0,
            });
        }
        ContactConstraint {
            a: m.a,
            b: m.b,
            normal: m.normal,
            local_normal: m.local_normal,
            ref_is_a: m.ref_is_a,
            friction,
            points,
        }
    }

    /// One Gauss-Seidel sweep over this constraint's rows. Returns the
    /// largest impulse magnitude applied (for convergence cutoff).
    pub fn solve_velocity(&mut self, bodies: &mut [RigidBody2]) -> f64 {
        let (a, b) = (self.a, self.b);
        let normal = self.normal;
        let tangent = normal.perp();
        let (im_a, ii_a, im_b, ii_b) = {
            let ba = &bodies[a];
            let bb = &bodies[b];
            (ba.inv_mass, ba.inv_inertia, bb.inv_mass, bb.inv_inertia)
        };
        let (mut va, mut wa) = (bodies[a].vel, bodies[a].omega);
        let (mut vb, mut wb) = (bodies[b].vel, bodies[b].omega);
        let mut max_applied = 0.0f64;
        for p in self.points.iter_mut() {
            // Normal row with accumulated clamping (impulses never pull).
            let rel = vb + wb * p.r_b.perp() - va - wa * p.r_a.perp();
            let vn = rel.dot(normal);
            let delta = -(vn - p.target_vn) * p.normal_mass;
            let new_total = (p.normal_impulse + delta).max(0.0);
            let applied = new_total - p.normal_impulse;
            max_applied = max_applied.max(applied.abs());
            p.normal_impulse = new_total;
            let imp = normal * applied;
            va -= imp * im_a;
            wa -= ii_a * p.r_a.cross(imp);
            vb += imp * im_b;
            wb += ii_b * p.r_b.cross(imp);

            // Friction row clamped to the Coulomb cone of the accumulated
            // normal impulse.
            let rel = vb + wb * p.r_b.perp() - va - wa * p.r_a.perp();
            let vt = rel.dot(tangent);
            let delta_t = -vt * p.tangent_mass;
            let max_t = self.friction * p.normal_impulse;
            let new_total_t = (p.tangent_impulse + delta_t).clamp(-max_t, max_t);
            let applied_t = new_total_t - p.tangent_impulse;
            max_applied = max_applied.max(applied_t.abs());
            p.tangent_impulse = new_total_t;
            let imp_t = tangent * applied_t;
            va -= imp_t * im_a;
            wa -= ii_a * p.r_a.cross(imp_t);
            vb += imp_t * im_b;
            wb += ii_b * p.r_b.cross(imp_t);
        }
        bodies[a].vel = va;
        bodies[a].omega = wa;
        bodies[b].vel = vb;
        bodies[b].omega = wb;
        max_applied
    }

    /// Positional (NGS) correction; returns the worst penetration seen.
    pub fn solve_position(&self, bodies: &mut [RigidBody2]) -> f64 {
        let (ia, ib) = (self.a, self.b);
        let mut worst = 0.0f64;
        // transforms refreshed only after an actual correction
        let mut rot_a = bodies[ia].pose.rot();
        let mut rot_b = bodies[ib].pose.rot();
        for p in &self.points {
            let (pose_a, pose_b) = (bodies[ia].pose, bodies[ib].pose);
            let pa = pose_a.pos() + rot_a.apply(p.local_a);
            let pb = pose_b.pos() + rot_b.apply(p.local_b);
            let n = if self.ref_is_a {
                rot_a.apply(self.local_normal)
            } else {
                -rot_b.apply(self.local_normal)
            };
            let separation = (pb - pa).dot(n);
            worst = worst.max(-separation);
            let c = separation + SLOP;
            if c >= 0.0 {
                continue;
            }
            let correction = (BAUMGARTE * c).max(-0.2);
            let r_a = pa - pose_a.pos();
            let r_b = pb - pose_b.pos();
            let (im_a, ii_a, im_b, ii_b) = {
                let ba = &bodies[ia];
                let bb = &bodies[ib];
                (ba.inv_mass, ba.inv_inertia, bb.inv_mass, bb.inv_inertia)
            };
            let k = im_a + im_b + ii_a * r_a.cross(n).powi(2) + ii_b * r_b.cross(n).powi(2);
            if k <= 0.0 {
                continue;
            }
            let lambda = -correction / k;
            let imp = n * lambda;
            {
                let ba = &mut bodies[ia];
                ba.pose.x -= imp.x * im_a;
                ba.pose.z -= imp.z * im_a;
                ba.pose.pitch -= ii_a * r_a.cross(imp);
            }
            {
                let bb = &mut bodies[ib];
                bb.pose.x += imp.x * im_b;
                bb.pose.z += imp.z * im_b;
                bb.pose.pitch += ii_b * r_b.cross(imp);
            }
            rot_a = bodies[ia].pose.rot();
            rot_b = bodies[ib].pose.rot();
        }
        worst
    }
}

#[inline]
fn apply_impulse(bodies: &mut [RigidBody2], a: usize, b: usize, r_a: Vec2, r_b: Vec2, imp: Vec2) {
    {
        let ba = &mut bodies[a];
        ba.vel -= imp * ba.inv_mass;
        ba.omega -= ba.inv_inertia * r_a.cross(imp);
    }
    {
        let bb = &mut bodies[b];
        bb.vel += imp * bb.inv_mass;
        bb.omega += bb.inv_inertia * r_b.cross(imp);
    }
}

/// Precomputed joint constraint rows for one tick.
#[derive(Debug, Clone)]
pub(super) struct JointConstraint {
    pub a: usize,
    pub b: usize,
    pub anchor_a: Vec2,
    pub anchor_b: Vec2,
    pub r_a: Vec2,
    pub r_b: Vec2,
    /// Inverted 2x2 effective-mass matrix of the point constraint.
    pub inv_k: [[f64; 2]; 2],
    /// Some(ref_angle, angular effective mass) for weld joints.
    pub weld: Option<(f64, f64)>,
    /// Accumulated impulses (for warm starting the next tick).
    pub impulse: Vec2,
    pub ang_impulse: f64,
}

impl JointConstraint {
    pub fn from_joint(joint: &Joint2, bodies: &[RigidBody2]) -> Self {
        let (id_a, id_b) = joint.bodies();
        let (anchor_a, anchor_b, weld_angle) = match *joint {
            Joint2::Revolute { anchor_a, anchor_b, .. } => (anchor_a, anchor_b, None),
            Joint2::Weld { anchor_a, anchor_b, ref_angle, .. } => {
                (anchor_a, anchor_b, Some(ref_angle))
            }
        };
        let ba = &bodies[id_a.0];
        let bb = &bodies[id_b.0];
        let r_a = ba.pose.rot().apply(anchor_a);
        let r_b = bb.pose.rot().apply(anchor_b);
        let im = ba.inv_mass + bb.inv_mass;
        let (iia, iib) = (ba.inv_inertia, bb.inv_inertia);
        let k11 = im + iia * r_a.z * r_a.z + iib * r_b.z * r_b.z;
        let k12 = -iia * r_a.x * r_a.z - iib * r_b.x * r_b.z;
        let k22 = im + iia * r_a.x * r_a.x + iib * r_b.x * r_b.x;
        let det = k11 * k22 - k12 * k12;
        let inv_k = if det.abs() > 1e-12 {
            let d = 1.0 / det;
            [[k22 * d, -k12 * d], [-k12 * d, k11 * d]]
        } else {
            [[0.0; 2]; 2]
        };
        let weld = weld_angle.map(|ang| {
            let ki = iia + iib;
            (ang, if ki > 0.0 { 1.0 / ki } else { 0.0 })
        });
        JointConstraint {
            a: id_a.0,
            b: id_b.0,
            anchor_a,
            anchor_b,
            r_a,
            r_b,
            inv_k,
            weld,
            impulse: Vec2::ZERO,
            ang_impulse: 0.0,
        }
    }

    /// Re-apply last tick's accumulated impulses as the starting guess.
    pub fn warm_start(&mut self, prev: &JointConstraint, bodies: &mut [RigidBody2]) {
        if prev.a != self.a || prev.b != self.b {
            return;
        }
        self.impulse = prev.impulse;
        self.ang_impulse = prev.ang_impulse;
        if self.weld.is_some() && self.ang_impulse != 0.0 {
            bodies[self.a].omega -= bodies[self.a].inv_inertia * self.ang_impulse;
            bodies[self.b].omega += bodies[self.b].inv_inertia * self.ang_impulse;
        }
        apply_impulse(bodies, self.a, self.b, self.r_a, self.r_b, self.impulse);
    }

    pub fn solve_velocity(&mut self, bodies: &mut [RigidBody2]) -> f64 {
        let (a, b) = (self.a, self.b);
        let (im_a, ii_a, im_b, ii_b) = {
            let ba = &bodies[a];
            let bb = &bodies[b];
            (ba.inv_mass, ba.inv_inertia, bb.inv_mass, bb.inv_inertia)
        };
        let (mut va, mut wa) = (bodies[a].vel, bodies[a].omega);
        let (mut vb, mut wb) = (bodies[b].vel, bodies[b].omega);
        let mut max_applied = 0.0f64;
        if let Some((_, ang_mass)) = self.weld {
            let lambda = -(wb - wa) * ang_mass;
            max_applied = lambda.abs();
            self.ang_impulse += lambda;
            wa -= ii_a * lambda;
            wb += ii_b * lambda;
        }
        let cdot = vb + wb * self.r_b.perp() - va - wa * self.r_a.perp();
        let px = -(self.inv_k[0][0] * cdot.x + self.inv_k[0][1] * cdot.z);
        let pz = -(self.inv_k[1][0] * cdot.x + self.inv_k[1][1] * cdot.z);
        let imp = Vec2::new(px, pz);
        self.impulse += imp;
        max_applied = max_applied.max(imp.norm_sq().sqrt());
        va -= imp * im_a;
        wa -= ii_a * self.r_a.cross(imp);
        vb += imp * im_b;
        wb += ii_b * self.r_b.cross(imp);
        bodies[a].vel = va;
        bodies[a].omega = wa;
        bodies[b].vel = vb;
        bodies[b].omega = wb;
        max_applied
    }

    pub fn solve_position(&self, bodies: &mut [RigidBody2]) {
        let (a, b) = (self.a, self.b);
        if let Some((ref_angle, _)) = self.weld {
            let c = bodies[b].pose.pitch - bodies[a].pose.pitch - ref_angle;
            let ki = bodies[a].inv_inertia + bodies[b].inv_inertia;
            if ki > 0.0 {
                let lambda = -BAUMGARTE * c / ki;
                bodies[a].pose.pitch -= bodies[a].inv_inertia * lambda;
                bodies[b].pose.pitch += bodies[b].inv_inertia * lambda;
            }
        }
        let (pose_a, pose_b) = (bodies[a].pose, bodies[b].pose);
        let r_a = pose_a.rot().apply(self.anchor_a);
        let r_b = pose_b.rot().apply(self.anchor_b);
        let c = pose_b.pos() + r_b - pose_a.pos() - r_a;
        let err = c * BAUMGARTE;
        let im = bodies[a].inv_mass + bodies[b].inv_mass;
        let (iia, iib) = (bodies[a].inv_inertia, bodies[b].inv_inertia);
        let k11 = im + iia * r_a.z * r_a.z + iib * r_b.z * r_b.z;
        let k12 = -iia * r_a.x * r_a.z - iib * r_b.x * r_b.z;
        let k22 = im + iia * r_a.x * r_a.x + iib * r_b.x * r_b.x;
        let det = k11 * k22 - k12 * k12;
        if det.abs() <= 1e-12 {
            return;
        }
        let d = 1.0 / det;
        let px = -(k22 * err.x - k12 * err.z) * d;
        let pz = -(-k12 * err.x + k11 * err.z) * d;
        let imp = Vec2::new(px, pz);
        {
            let ba = &mut bodies[a];
            ba.pose.x -= imp.x * ba.inv_mass;
            ba.pose.z -= imp.z * ba.inv_mass;
            ba.pose.pitch -= ba.inv_inertia * r_a.cross(imp);
        }
        {
            let bb = &mut bodies[b];
            bb.pose.x += imp.x * bb.inv_mass;
            bb.pose.z += imp.z * bb.inv_mass;
            bb.pose.pitch += bb.inv_inertia * r_b.cross(imp);
        }
    }
}
