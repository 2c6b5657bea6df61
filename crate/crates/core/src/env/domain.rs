//! One sampled environment configuration.

use serde::{Deserialize, Serialize};

/// Out-of-plane depth (m) used to convert volumetric object density into a
/// planar mass: `mass = density * size_x * size_z * OBJECT_DEPTH_PROXY`.
pub const OBJECT_DEPTH_PROXY: f64 = 0.2;

/// Physical and action-scaling parameters randomized by ADR.
///
/// Defaults are the initial (un-randomized) values; each field stays inside
/// its final randomization range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DomainParams {
    /// Object length along x (m).
    pub object_size_x: f64,
    /// Object thickness along z (m).
    pub object_size_z: f64,
    /// Friction coefficient of the table (and bin wall) surface.
    pub table_friction: f64,
    /// Friction coefficient of the finger pads.
    pub gripper_friction: f64,
    /// Object density (kg/m^3 against the fixed depth proxy).
    pub object_density: f64,
    /// Meters of end-effector translation per unit action component.
    pub action_translation_scale: f64,
    /// Radians of end-effector rotation per unit action component.
    pub action_rotation_scale: f64,
    /// Initial gap between the object and the wall (m).
    pub initial_distance_to_wall: f64,
    /// Horizontal offset of the bin region (m).
    pub table_offset_x: f64,
    /// Height of the table surface (m).
    pub table_offset_z: f64,
}

impl Default for DomainParams {
    fn default() -> Self {
        DomainParams {
            object_size_x: 0.15,
            object_size_z: 0.05,
            table_friction: 0.3,
            gripper_friction: 3.0,
            object_density: 86.0,
            action_translation_scale: 0.03,
            action_rotation_scale: 0.2,
            initial_distance_to_wall: 0.0,
            table_offset_x: 0.5,
            table_offset_z: 0.07,
        }
    }
}

impl DomainParams {
    pub fn object_mass(&self) -> f64 {
        self.object_density * self.object_size_x * self.object_size_z * OBJECT_DEPTH_PROXY
    }

    pub fn field(&self, name: &str) -> Option<f64> {
        Some(match name {
            "object_size_x" => self.object_size_x,
            "object_size_z" => self.object_size_z,
            "table_friction" => self.table_friction,
            "gripper_friction" => self.gripper_friction,
            "object_density" => self.object_density,
            "action_translation_scale" => self.action_translation_scale,
            "action_rotation_scale" => self.action_rotation_scale,
            "initial_distance_to_wall" => self.initial_distance_to_wall,
            "table_offset_x" => self.table_offset_x,
            "table_offset_z" => self.table_offset_z,
            _ => return None,
        })
    }

    pub fn set_field(&mut self, name: &str, value: f64) -> bool {
        match name {
            "object_size_x" => self.object_size_x = value,
            "object_size_z" => self.object_size_z = value,
            "table_friction" => self.table_friction = value,
            "gripper_friction" => self.gripper_friction = value,
            "object_density" => self.object_density = value,
            "action_translation_scale" => self.action_translation_scale = value,
            "action_rotation_scale" => self.action_rotation_scale = value,
            "initial_distance_to_wall" => self.initial_distance_to_wall = value,
            "table_offset_x" => self.table_offset_x = value,
            "table_offset_z" => self.table_offset_z = value,
            _ => return false,
        }
        true
    }

    pub const FIELD_NAMES: [&'static str; 10] = [
        "object_size_x",
        "object_size_z",
        "table_friction",
        "gripper_friction",
        "object_density",
        "action_translation_scale",
        "action_rotation_scale",
        "initial_distance_to_wall",
        "table_offset_x",
        "table_offset_z",
    ];
}
