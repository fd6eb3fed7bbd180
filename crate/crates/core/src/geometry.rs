//! Plane geometry on the `(z, x)` ground plane.
//!
//! Headings are measured from the `+z` axis towards `+x`, so a heading of
//! `π/2` faces `+x`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize, schemars::JsonSchema)]
pub struct Point {
    pub z: f64,
    pub x: f64,
}

impl Point {
    pub const fn new(z: f64, x: f64) -> Self {
        Self { z, x }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.z - other.z).hypot(self.x - other.x)
    }

    pub fn distance_sq(self, other: Point) -> f64 {
        let dz = self.z - other.z;
        let dx = self.x - other.x;
        dz * dz + dx * dx
    }

    /// Heading pointing from `self` towards `other`.
    pub fn bearing_to(self, other: Point) -> f64 {
        normalize_angle((other.x - self.x).atan2(other.z - self.z))
    }

    pub fn offset(self, heading: f64, length: f64) -> Point {
        Point::new(
            self.z + length * heading.cos(),
            self.x + length * heading.sin(),
        )
    }

    /// Rotation about `pivot` by `angle` (positive turns left).
    pub fn rotate_about(self, pivot: Point, angle: f64) -> Point {
        let (s, c) = angle.sin_cos();
        let dz = self.z - pivot.z;
        let dx = self.x - pivot.x;
        Point::new(pivot.z + c * dz - s * dx, pivot.x + s * dz + c * dx)
    }
}

/// Maps an angle into `[0, 2π)`.
pub fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Signed smallest rotation from `from` to `to`, in `(-π, π]`.
pub fn angle_diff(to: f64, from: f64) -> f64 {
    let d = (to - from).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

/// Axis-aligned rectangle given by centre and half extents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct Rect {
    pub center: Point,
    pub half_z: f64,
    pub half_x: f64,
}

impl Rect {
    pub fn new(center: Point, half_z: f64, half_x: f64) -> Self {
        Self {
            center,
            half_z,
            half_x,
        }
    }

    pub fn inflate(self, margin: f64) -> Rect {
        Rect::new(self.center, self.half_z + margin, self.half_x + margin)
    }

    pub fn contains(&self, p: Point) -> bool {
        (p.z - self.center.z).abs() <= self.half_z && (p.x - self.center.x).abs() <= self.half_x
    }

    /// True when `p` lies strictly inside.
    pub fn contains_strict(&self, p: Point) -> bool {
        (p.z - self.center.z).abs() < self.half_z && (p.x - self.center.x).abs() < self.half_x
    }

    /// Slab test: does the closed segment `a..b` touch the rectangle?
    pub fn intersects_segment(&self, a: Point, b: Point) -> bool {
        let mut t0: f64 = 0.0;
        let mut t1: f64 = 1.0;
        let axes = [
            (
                a.z,
                b.z - a.z,
                self.center.z - self.half_z,
                self.center.z + self.half_z,
            ),
            (
                a.x,
                b.x - a.x,
                self.center.x - self.half_x,
                self.center.x + self.half_x,
            ),
        ];
        for (origin, delta, lo, hi) in axes {
            if delta == 0.0 {
                if origin < lo || origin > hi {
                    return false;
                }
                continue;
            }
            let mut ta = (lo - origin) / delta;
            let mut tb = (hi - origin) / delta;
            if ta > tb {
                std::mem::swap(&mut ta, &mut tb);
            }
            t0 = t0.max(ta);
            t1 = t1.min(tb);
            if t0 > t1 {
                return false;
            }
        }
        true
    }
}

/// Closest distance from `p` to the segment `a..b`.
pub fn segment_distance(a: Point, b: Point, p: Point) -> f64 {
    let dz = b.z - a.z;
    let dx = b.x - a.x;
    let len_sq = dz * dz + dx * dx;
    let t = if len_sq == 0.0 {
        0.0
    } else {
        (((p.z - a.z) * dz + (p.x - a.x) * dx) / len_sq).clamp(0.0, 1.0)
    };
    p.distance(Point::new(a.z + t * dz, a.x + t * dx))
}
