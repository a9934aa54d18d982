//! Deterministic kinematic bicycle plant stepped at a fixed timestep.
//!
//! The pose `(x, y)` is the rear axle; the front axle is derived from the
//! wheelbase when a controller needs it. Under constant steering the discrete
//! update follows the exact constant-curvature arc, so the plant itself adds
//! no integration error to tracker comparisons.

use crate::geometry::{wrap_deg, Point2};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Planar pose plus speed of the bicycle-model vehicle.
///
/// `yaw` is degrees, counter-clockwise positive, 0 along +x, kept in
/// (-180, 180]. `speed` is m/s and never negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleState {
    pub x: f64,
    pub y: f64,
    pub yaw: f64,
    pub speed: f64,
}

impl VehicleState {
    pub fn new(x: f64, y: f64, yaw: f64, speed: f64) -> Self {
        Self {
            x,
            y,
            yaw: wrap_deg(yaw),
            speed: speed.max(0.0),
        }
    }

    pub fn position(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }
}

/// Fixed physical and actuator parameters of the plant.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct VehicleParams {
    /// Wheelbase L in meters.
    pub wheelbase: f64,
    /// Symmetric road-wheel angle bound, degrees.
    pub max_steer: f64,
    /// Steering slew threshold T, degrees per control step.
    pub steer_slew: f64,
    /// Control timestep, seconds.
    pub dt: f64,
}

impl Default for VehicleParams {
    fn default() -> Self {
        Self {
            wheelbase: 2.7,
            max_steer: 30.0,
            steer_slew: 1.0,
            dt: 0.02,
        }
    }
}

/// A road-wheel steering command in degrees, positive = left turn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteeringCommand {
    pub angle: f64,
}

/// Advance the vehicle one timestep under a fixed steering command.
///
/// Zero steering moves `speed * dt` along the heading. Otherwise the vehicle
/// travels the same arc length along the circle of radius `L / tan(angle)`.
/// Speed is never altered.
pub fn step(state: VehicleState, cmd: SteeringCommand, params: &VehicleParams) -> Result<VehicleState> {
    for (v, name) in [
        (state.x, "state.x"),
        (state.y, "state.y"),
        (state.yaw, "state.yaw"),
        (state.speed, "state.speed"),
        (cmd.angle, "cmd.angle"),
    ] {
        if !v.is_finite() {
            return Err(Error::NonFinite(name));
        }
    }

    let yaw_rad = state.yaw.to_radians();
    let arc = state.speed * params.dt;
    let steer_rad = cmd.angle.to_radians();

    // Exact constant-curvature arc in chord form: the displacement is the
    // chord 2R sin(dyaw/2) = arc * sinc(dyaw/2) along the half-turned
    // heading. Unlike the R = L/tan(delta) form this stays finite and exact
    // as the steering angle approaches zero.
    let dyaw = arc * steer_rad.tan() / params.wheelbase;
    let half = dyaw / 2.0;
    let sinc = if half.abs() < 1e-4 {
        1.0 - half * half / 6.0
    } else {
        half.sin() / half
    };
    let chord = arc * sinc;
    let dir = yaw_rad + half;
    Ok(VehicleState {
        x: state.x + chord * dir.cos(),
        y: state.y + chord * dir.sin(),
        yaw: wrap_deg((yaw_rad + dyaw).to_degrees()),
        speed: state.speed,
    })
}

/// One step of the steering compensation: move from `prev` toward `desired`
/// by at most the slew threshold T, then clamp to the road-wheel bound.
pub fn apply_actuator(desired: f64, prev: f64, params: &VehicleParams) -> SteeringCommand {
    let t = params.steer_slew;
    let stepped = prev + (desired - prev).clamp(-t, t);
    SteeringCommand {
        angle: stepped.clamp(-params.max_steer, params.max_steer),
    }
}

/// Front-axle position, derived from the rear-axle pose and the wheelbase.
pub fn front_axle(state: &VehicleState, params: &VehicleParams) -> Point2 {
    let yaw = state.yaw.to_radians();
    Point2::new(
        state.x + params.wheelbase * yaw.cos(),
        state.y + params.wheelbase * yaw.sin(),
    )
}

/// Stateful wrapper around [`apply_actuator`] holding the previously issued
/// command. One instance per closed loop; both standalone trackers and the
/// hybrid selector push their raw command through the same actuator.
#[derive(Debug, Clone)]
pub struct SteeringActuator {
    prev: f64,
}

impl SteeringActuator {
    pub fn new(initial: f64) -> Self {
        Self { prev: initial }
    }

    pub fn previous(&self) -> f64 {
        self.prev
    }

    pub fn apply(&mut self, desired: f64, params: &VehicleParams) -> SteeringCommand {
        let cmd = apply_actuator(desired, self.prev, params);
        self.prev = cmd.angle;
        cmd
    }

    /// Re-issue the previous command without change (degraded mode).
    pub fn hold(&self) -> SteeringCommand {
        SteeringCommand { angle: self.prev }
    }
}
