//! Planar points and angle bookkeeping shared across the crate.
//!
//! Angles at module boundaries are degrees (matching steering hardware and
//! log formats); trigonometry happens in radians at the call site.

use serde::{Deserialize, Serialize};

/// A 2D point. Units depend on the frame (meters in global frames, pixels in
/// image frames).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Wrap an angle in degrees to (-180, 180].
pub fn wrap_deg(angle: f64) -> f64 {
    let mut a = angle % 360.0;
    if a <= -180.0 {
        a += 360.0;
    } else if a > 180.0 {
        a -= 360.0;
    }
    a
}

/// Difference `a - b` in degrees, wrapped to (-180, 180].
pub fn angle_diff_deg(a: f64, b: f64) -> f64 {
    wrap_deg(a - b)
}

pub fn kmh_to_mps(v: f64) -> f64 {
    v / 3.6
}

pub fn mps_to_kmh(v: f64) -> f64 {
    v * 3.6
}
