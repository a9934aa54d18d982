//! The modified geometric steering laws.
//!
//! Pure pursuit chases a target point resolved at a speed-dependent
//! look-ahead distance on a vehicle-local pixel path and smooths its output
//! with an anti-windup PID filter; Stanley combines front-axle cross-track
//! and heading errors against a densified global path. Both emit raw
//! road-wheel degrees; the shared steering actuator applies the slew
//! threshold and the physical bound afterwards.

mod pure_pursuit;
mod stanley;

pub use pure_pursuit::{
    lookahead_distance, pure_pursuit_steer, steer_from_alpha, LookaheadFormula, PidFilter,
    PidGains, PurePursuit, PurePursuitParams,
};
pub use stanley::{stanley_steer, StanleyParams};

use serde::Serialize;

/// Signed tracking errors against a reference path.
///
/// `alpha` is the rear-axle-to-target bearing minus heading (pure pursuit);
/// `cross_track` is meters, positive when the path lies left of the vehicle
/// (equivalently the vehicle right of the path), so a positive error demands
/// a positive (left) steer; `heading` is path tangent minus vehicle yaw.
/// All angles are degrees in (-180, 180].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TrackingErrors {
    pub alpha: f64,
    pub cross_track: f64,
    pub heading: f64,
}
