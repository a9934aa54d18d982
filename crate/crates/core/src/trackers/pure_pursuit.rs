//! Pure pursuit with a logistic variable look-ahead and a PID output filter.

use crate::geometry::Point2;
use crate::path::{lookahead_target, FrameOrigin};
use crate::plant::VehicleParams;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Which reading of the variable look-ahead curve to use.
///
/// The logistic form is bounded to (base - amplitude/2, base + amplitude/2)
/// and is the default; the literal form keeps the bare exponential for
/// comparison runs and grows without bound above the center speed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LookaheadFormula {
    Logistic,
    Literal,
}

/// PID gains of the steering filter.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
}

/// Pure pursuit tuning. Look-ahead values are pixels of the local frame,
/// speeds km/h.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PurePursuitParams {
    pub ld_base: f64,
    pub ld_amplitude: f64,
    pub ld_center: f64,
    pub ld_width: f64,
    pub formula: LookaheadFormula,
    pub pid: PidGains,
    /// Anti-windup clamp on the PID integral state, degree-seconds.
    pub integral_limit: f64,
    /// Compensation threshold, degrees per step; enforced by the shared
    /// steering actuator downstream of every tracker.
    pub slew: f64,
}

impl PurePursuitParams {
    /// Defaults for the vision-path variant.
    pub fn vision() -> Self {
        Self {
            ld_base: 190.0,
            ld_amplitude: 100.0,
            ld_center: 20.0,
            ld_width: 15.0,
            formula: LookaheadFormula::Logistic,
            pid: PidGains { kp: 0.5, ki: 3.0, kd: 0.002 },
            integral_limit: 10.0,
            slew: 1.0,
        }
    }

    /// Defaults for the GPS-path variant.
    pub fn gps() -> Self {
        Self {
            pid: PidGains { kp: 0.6, ki: 3.5, kd: 0.002 },
            ..Self::vision()
        }
    }
}

/// Speed-dependent look-ahead distance in pixels.
pub fn lookahead_distance(speed_kmh: f64, p: &PurePursuitParams) -> f64 {
    let z = (speed_kmh - p.ld_center) / p.ld_width;
    let bracket = match p.formula {
        LookaheadFormula::Logistic => 1.0 / (1.0 + (-z).exp()) - 0.5,
        LookaheadFormula::Literal => z.exp() - 0.5,
    };
    p.ld_base + p.ld_amplitude * bracket
}

/// Steering angle from the bearing error and look-ahead distance in meters.
pub fn steer_from_alpha(alpha_deg: f64, ld_m: f64, wheelbase_m: f64) -> f64 {
    (2.0 * wheelbase_m * alpha_deg.to_radians().sin() / ld_m)
        .atan()
        .to_degrees()
}

/// Raw pure pursuit steering for a vehicle-local pixel path.
///
/// The target is the path point at the look-ahead distance from the frame
/// origin; `alpha` is its bearing off the vehicle's heading, positive left.
pub fn pure_pursuit_steer(
    path_px: &[Point2],
    ld_px: f64,
    meters_per_pixel: f64,
    params: &VehicleParams,
) -> Result<f64> {
    let origin = FrameOrigin::VehicleAtBottom.point();
    let target = lookahead_target(path_px, origin, ld_px).ok_or(Error::EmptyPath)?;
    let forward_m = (origin.y - target.y) * meters_per_pixel;
    let left_m = (origin.x - target.x) * meters_per_pixel;
    let alpha = left_m.atan2(forward_m).to_degrees();
    let ld_m = ld_px * meters_per_pixel;
    Ok(steer_from_alpha(alpha, ld_m, params.wheelbase))
}

/// Anti-windup PID filter on the steering setpoint.
///
/// The error is the raw command minus the previous filter output; the output
/// is kp*err + ki*integral + kd*d(err)/dt with the integral clamped to the
/// configured limit.
#[derive(Debug, Clone)]
pub struct PidFilter {
    gains: PidGains,
    integral_limit: f64,
    integral: f64,
    prev_err: f64,
    prev_out: f64,
}

impl PidFilter {
    pub fn new(gains: PidGains, integral_limit: f64) -> Self {
        Self {
            gains,
            integral_limit,
            integral: 0.0,
            prev_err: 0.0,
            prev_out: 0.0,
        }
    }

    pub fn reset(&mut self) {
        self.integral = 0.0;
        self.prev_err = 0.0;
        self.prev_out = 0.0;
    }

    pub fn integral(&self) -> f64 {
        self.integral
    }

    pub fn filter(&mut self, raw: f64, dt: f64) -> f64 {
        let err = raw - self.prev_out;
        self.integral = (self.integral + err * dt).clamp(-self.integral_limit, self.integral_limit);
        let deriv = (err - self.prev_err) / dt;
        let out = self.gains.kp * err + self.gains.ki * self.integral + self.gains.kd * deriv;
        self.prev_err = err;
        self.prev_out = out;
        out
    }
}

/// A pure pursuit tracker instance: parameters plus the filter state.
#[derive(Debug, Clone)]
pub struct PurePursuit {
    pub params: PurePursuitParams,
    pid: PidFilter,
}

impl PurePursuit {
    pub fn new(params: PurePursuitParams) -> Self {
        let pid = PidFilter::new(params.pid, params.integral_limit);
        Self { params, pid }
    }

    pub fn reset(&mut self) {
        self.pid.reset();
    }

    /// Filtered steering command for one control step. The PID state only
    /// advances when a target is resolvable.
    pub fn steer(
        &mut self,
        path_px: &[Point2],
        meters_per_pixel: f64,
        speed_kmh: f64,
        vehicle: &VehicleParams,
    ) -> Result<f64> {
        let ld_px = lookahead_distance(speed_kmh, &self.params);
        let raw = pure_pursuit_steer(path_px, ld_px, meters_per_pixel, vehicle)?;
        Ok(self.pid.filter(raw, vehicle.dt))
    }
}
