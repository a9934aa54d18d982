//! Tracking metrics against the ideal path.

use super::runner::TrajectoryLog;
use super::scenario::Scenario;
use crate::geometry::{angle_diff_deg, Point2};
use crate::plant::VehicleParams;
use crate::{Error, Result};
use serde::Serialize;

/// Success plus the five figures of merit. Position RMSEs are meters,
/// angle RMSEs degrees.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsReport {
    pub success: bool,
    pub rmse_lateral: f64,
    pub rmse_longitudinal: f64,
    pub distance: f64,
    pub rmse_yaw: f64,
    pub rmse_steer: f64,
}

/// Decompose each logged pose against the nearest ideal-path sample.
///
/// Lateral/longitudinal are the path-normal and path-tangential error
/// components; `distance` is the RMSE of the full Euclidean error, so
/// `lateral^2 + longitudinal^2 = distance^2` holds exactly. Yaw is compared
/// to the path tangent and steering to the curvature-feedforward reference
/// `atan(L * kappa)`.
pub fn compute_metrics(log: &TrajectoryLog, scenario: &Scenario, vehicle: &VehicleParams) -> Result<MetricsReport> {
    if log.rows.is_empty() {
        return Err(Error::EmptyPath);
    }
    let n = log.rows.len() as f64;
    let mut sum_lat = 0.0;
    let mut sum_lon = 0.0;
    let mut sum_yaw = 0.0;
    let mut sum_steer = 0.0;

    for row in &log.rows {
        let foot = project_to_path(scenario, Point2::new(row.x, row.y));
        let ex = row.x - foot.x;
        let ey = row.y - foot.y;
        let yaw = foot.yaw.to_radians();
        let lon = ex * yaw.cos() + ey * yaw.sin();
        let lat = -ex * yaw.sin() + ey * yaw.cos();
        sum_lat += lat * lat;
        sum_lon += lon * lon;
        sum_yaw += angle_diff_deg(row.yaw, foot.yaw).powi(2);
        let steer_ref = (vehicle.wheelbase * foot.curvature).atan().to_degrees();
        sum_steer += (row.steer_cmd - steer_ref).powi(2);
    }

    Ok(MetricsReport {
        success: log.success,
        rmse_lateral: (sum_lat / n).sqrt(),
        rmse_longitudinal: (sum_lon / n).sqrt(),
        distance: ((sum_lat + sum_lon) / n).sqrt(),
        rmse_yaw: (sum_yaw / n).sqrt(),
        rmse_steer: (sum_steer / n).sqrt(),
    })
}

/// Pose of the point on the piecewise-linear centerline closest to `p`.
struct Foot {
    x: f64,
    y: f64,
    yaw: f64,
    curvature: f64,
}

fn project_to_path(scenario: &Scenario, p: Point2) -> Foot {
    let samples = &scenario.path.samples;
    let (idx, _) = scenario.path.nearest(p);

    let mut best: Option<(f64, Foot)> = None;
    let lo = idx.saturating_sub(1);
    let hi = (idx + 1).min(samples.len() - 1);
    for i in lo..hi {
        let a = &samples[i];
        let b = &samples[i + 1];
        let vx = b.x - a.x;
        let vy = b.y - a.y;
        let len2 = vx * vx + vy * vy;
        let t = if len2 == 0.0 {
            0.0
        } else {
            (((p.x - a.x) * vx + (p.y - a.y) * vy) / len2).clamp(0.0, 1.0)
        };
        let fx = a.x + t * vx;
        let fy = a.y + t * vy;
        let d2 = (p.x - fx).powi(2) + (p.y - fy).powi(2);
        let near = if t < 0.5 { a } else { b };
        let foot = Foot {
            x: fx,
            y: fy,
            yaw: angle_lerp(a.yaw, b.yaw, t),
            curvature: near.curvature,
        };
        if best.as_ref().is_none_or(|(bd, _)| d2 < *bd) {
            best = Some((d2, foot));
        }
    }
    match best {
        Some((_, f)) => f,
        None => {
            let s = &samples[idx];
            Foot { x: s.x, y: s.y, yaw: s.yaw, curvature: s.curvature }
        }
    }
}

fn angle_lerp(a: f64, b: f64, t: f64) -> f64 {
    crate::geometry::wrap_deg(a + angle_diff_deg(b, a) * t)
}
