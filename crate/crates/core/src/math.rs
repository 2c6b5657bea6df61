//! Planar (XZ-plane) vector, pose, and small-matrix math.
//!
//! Conventions: x is horizontal, z is vertical (gravity acts along -z).
//! Angles are pitch about the out-of-plane axis, positive counter-clockwise,
//! in radians.

use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

/// 2D vector in the XZ plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub z: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, z: 0.0 };

    #[inline]
    pub const fn new(x: f64, z: f64) -> Self {
        Vec2 { x, z }
    }

    #[inline]
    pub fn dot(self, rhs: Vec2) -> f64 {
        self.x * rhs.x + self.z * rhs.z
    }

    /// Scalar cross product: out-of-plane component of `self × rhs`.
    #[inline]
    pub fn cross(self, rhs: Vec2) -> f64 {
        self.x * rhs.z - self.z * rhs.x
    }

    /// Perpendicular vector rotated +90 degrees: `(-z, x)`.
    #[inline]
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.z, self.x)
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Unit vector; returns `(0, 0)` for a zero-length input.
    #[inline]
    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        if n > 0.0 {
            self / n
        } else {
            Vec2::ZERO
        }
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.z.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.z + rhs.z)
    }
}

impl AddAssign for Vec2 {
    #[inline]
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.z += rhs.z;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.z - rhs.z)
    }
}

impl SubAssign for Vec2 {
    #[inline]
    fn sub_assign(&mut self, rhs: Vec2) {
        self.x -= rhs.x;
        self.z -= rhs.z;
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.z * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    #[inline]
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn div(self, s: f64) -> Vec2 {
        Vec2::new(self.x / s, self.z / s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.z)
    }
}

/// 2D rotation stored as cached cosine/sine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rot2 {
    pub cos: f64,
    pub sin: f64,
}

impl Rot2 {
    pub const IDENTITY: Rot2 = Rot2 { cos: 1.0, sin: 0.0 };

    #[inline]
    pub fn from_angle(angle: f64) -> Self {
        let (sin, cos) = angle.sin_cos();
        Rot2 { cos, sin }
    }

    #[inline]
    pub fn apply(self, v: Vec2) -> Vec2 {
        Vec2::new(self.cos * v.x - self.sin * v.z, self.sin * v.x + self.cos * v.z)
    }

    #[inline]
    pub fn apply_inv(self, v: Vec2) -> Vec2 {
        Vec2::new(self.cos * v.x + self.sin * v.z, -self.sin * v.x + self.cos * v.z)
    }
}

/// SE(2) pose: translation `(x, z)` in meters, `pitch` in radians.
///
/// Used for world/object/end-effector frames. Composition follows the usual
/// homogeneous-transform convention: `a.compose(b)` maps b-frame coordinates
/// through a.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose2 {
    pub x: f64,
    pub z: f64,
    pub pitch: f64,
}

impl Pose2 {
    pub const IDENTITY: Pose2 = Pose2 { x: 0.0, z: 0.0, pitch: 0.0 };

    #[inline]
    pub const fn new(x: f64, z: f64, pitch: f64) -> Self {
        Pose2 { x, z, pitch }
    }

    #[inline]
    pub fn from_parts(pos: Vec2, pitch: f64) -> Self {
        Pose2 { x: pos.x, z: pos.z, pitch }
    }

    #[inline]
    pub fn pos(self) -> Vec2 {
        Vec2::new(self.x, self.z)
    }

    #[inline]
    pub fn rot(self) -> Rot2 {
        Rot2::from_angle(self.pitch)
    }

    /// `self ∘ other`: interpret `other` in this pose's frame.
    #[inline]
    pub fn compose(self, other: Pose2) -> Pose2 {
        let p = self.pos() + self.rot().apply(other.pos());
        Pose2::from_parts(p, self.pitch + other.pitch)
    }

    /// Inverse transform: `self.inverse().compose(self) == identity`.
    #[inline]
    pub fn inverse(self) -> Pose2 {
        let r = self.rot();
        let p = r.apply_inv(-self.pos());
        Pose2::from_parts(p, -self.pitch)
    }

    /// Map a point from this pose's local frame to the parent frame.
    #[inline]
    pub fn transform_point(self, local: Vec2) -> Vec2 {
        self.pos() + self.rot().apply(local)
    }

    /// Map a point from the parent frame into this pose's local frame.
    #[inline]
    pub fn inv_transform_point(self, world: Vec2) -> Vec2 {
        self.rot().apply_inv(world - self.pos())
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.z.is_finite() && self.pitch.is_finite()
    }

    /// Translation distance plus wrapped absolute angle difference, as a
    /// crude metric for continuity checks.
    pub fn metric_to(self, other: Pose2) -> f64 {
        (self.pos() - other.pos()).norm() + angle_diff(self.pitch, other.pitch)
    }
}

/// Wrap an angle to `(-pi, pi]`. In-range values pass through bit-exactly.
#[inline]
pub fn wrap_angle(a: f64) -> f64 {
    if a > -std::f64::consts::PI && a <= std::f64::consts::PI {
        return a;
    }
    let mut w = a.rem_euclid(2.0 * std::f64::consts::PI);
    if w > std::f64::consts::PI {
        w -= 2.0 * std::f64::consts::PI;
    }
    w
}

/// Absolute angular difference wrapped to `[0, pi]` (shortest arc).
#[inline]
pub fn angle_diff(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

/// Row-major 3x3 matrix; used for planar Jacobians and joint-space inertia.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3 {
    pub m: [[f64; 3]; 3],
}

impl Mat3 {
    pub const ZERO: Mat3 = Mat3 { m: [[0.0; 3]; 3] };

    pub fn identity() -> Mat3 {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Mat3 { m }
    }

    #[inline]
    pub fn mul_vec(&self, v: [f64; 3]) -> [f64; 3] {
        let m = &self.m;
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }

    /// Multiply the transpose of this matrix by a vector.
    #[inline]
    pub fn transpose_mul_vec(&self, v: [f64; 3]) -> [f64; 3] {
        let m = &self.m;
        [
            m[0][0] * v[0] + m[1][0] * v[1] + m[2][0] * v[2],
            m[0][1] * v[0] + m[1][1] * v[1] + m[2][1] * v[2],
            m[0][2] * v[0] + m[1][2] * v[1] + m[2][2] * v[2],
        ]
    }

    pub fn det(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Inverse via the adjugate; returns `None` when `|det|` is below `eps`.
    pub fn inverse(&self, eps: f64) -> Option<Mat3> {
        let d = self.det();
        if d.abs() < eps {
            return None;
        }
        let m = &self.m;
        let inv_d = 1.0 / d;
        let mut out = [[0.0; 3]; 3];
        out[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) * inv_d;
        out[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * inv_d;
        out[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * inv_d;
        out[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) * inv_d;
        out[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * inv_d;
        out[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * inv_d;
        out[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) * inv_d;
        out[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * inv_d;
        out[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * inv_d;
        Some(Mat3 { m: out })
    }
}
