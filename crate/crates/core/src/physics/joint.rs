//! Joint constraints: revolute (pin) and weld (pin + fixed relative angle).

use serde::{Deserialize, Serialize};

use crate::math::Vec2;

use super::body::BodyId;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Joint2 {
    /// Bodies share a point; relative rotation is free.
    Revolute { a: BodyId, b: BodyId, anchor_a: Vec2, anchor_b: Vec2 },
    /// Bodies share a point and a fixed relative angle.
    Weld { a: BodyId, b: BodyId, anchor_a: Vec2, anchor_b: Vec2, ref_angle: f64 },
}

impl Joint2 {
    pub fn bodies(&self) -> (BodyId, BodyId) {
        match *self {
            Joint2::Revolute { a, b, .. } | Joint2::Weld { a, b, .. } => (a, b),
        }
    }
}
