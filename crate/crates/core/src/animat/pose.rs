use serde::{Deserialize, Serialize};

use crate::geometry::{normalize_angle, Point};

/// Position on the ground plane and heading in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct Pose {
    pub z: f64,
    pub x: f64,
    pub theta: f64,
}

impl Pose {
    pub fn new(z: f64, x: f64, theta: f64) -> Self {
        Self {
            z,
            x,
            theta: normalize_angle(theta),
        }
    }

    pub fn at(position: Point, theta: f64) -> Self {
        Self::new(position.z, position.x, theta)
    }

    pub fn position(&self) -> Point {
        Point::new(self.z, self.x)
    }

    /// Unit heading vector as `(dz, dx)`.
    pub fn heading(&self) -> (f64, f64) {
        (self.theta.cos(), self.theta.sin())
    }
}

/// Membership in the frontal half-disc of radius `r_p`: the point must lie
/// strictly ahead of the line through the animat perpendicular to its
/// heading, and strictly within `r_p`.
pub fn in_perceptual_region(pose: &Pose, r_p: f64, point: Point) -> bool {
    let dz = point.z - pose.z;
    let dx = point.x - pose.x;
    let (hz, hx) = pose.heading();
    dz * hz + dx * hx > 0.0 && dz * dz + dx * dx < r_p * r_p
}
