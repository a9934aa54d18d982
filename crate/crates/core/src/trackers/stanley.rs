//! Stanley controller with dual gains on the heading and cross-track terms.

use crate::path::{nearest_point_and_errors, DensePath};
use crate::plant::{front_axle, VehicleParams, VehicleState};
use crate::Result;
use serde::{Deserialize, Serialize};

/// Stanley gains: `k` scales the cross-track error, `ks` softens the speed
/// division near standstill, `k1`/`k2` weight the heading and cross-track
/// terms of the combined law.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StanleyParams {
    pub k: f64,
    pub ks: f64,
    pub k1: f64,
    pub k2: f64,
}

impl Default for StanleyParams {
    fn default() -> Self {
        Self {
            k: 2.5,
            ks: 1.0,
            k1: 1.0,
            k2: 1.0,
        }
    }
}

/// Stanley steering in degrees, clamped to the road-wheel bound.
///
/// Errors are evaluated at the front axle: `delta = k1*phi +
/// k2*atan(k*e / (ks + v))` with v in m/s.
pub fn stanley_steer(
    state: &VehicleState,
    dense: &DensePath,
    sp: &StanleyParams,
    params: &VehicleParams,
) -> Result<f64> {
    let front = front_axle(state, params);
    let errors = nearest_point_and_errors(dense, front, state.yaw)?;
    let cross_term = (sp.k * errors.cross_track / (sp.ks + state.speed)).atan().to_degrees();
    let delta = sp.k1 * errors.heading + sp.k2 * cross_term;
    Ok(delta.clamp(-params.max_steer, params.max_steer))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::DensePoint;

    fn straight_up_path() -> DensePath {
        DensePath {
            points: (0..400)
                .map(|i| DensePoint { x: 0.0, y: i as f64 * 0.1, yaw: 90.0 })
                .collect(),
        }
    }

    fn vp() -> VehicleParams {
        VehicleParams::default()
    }

    #[test]
    fn on_path_aligned_is_zero() {
        // Rear axle placed so the front axle sits on the path.
        let state = VehicleState::new(0.0, 5.0, 90.0, 5.0);
        let d = stanley_steer(&state, &straight_up_path(), &StanleyParams::default(), &vp()).unwrap();
        assert!(d.abs() < 1e-9);
    }

    #[test]
    fn unit_gain_limit_hits_45_degrees() {
        // k1=k2=k=1, ks -> 0+, v=1, e=1, phi=0: delta -> atan(1) = 45 deg.
        let sp = StanleyParams { k: 1.0, ks: 1e-12, k1: 1.0, k2: 1.0 };
        let params = VehicleParams { max_steer: 60.0, ..vp() };
        // Front axle 1 m right of the up path, heading aligned.
        let state = VehicleState::new(1.0, 5.0, 90.0, 1.0);
        let d = stanley_steer(&state, &straight_up_path(), &sp, &params).unwrap();
        assert!((d - 45.0).abs() < 1e-6, "got {d}");
    }

    #[test]
    fn cross_track_term_vanishes_at_speed() {
        let sp = StanleyParams { k: 1.0, ks: 1.0, k1: 1.0, k2: 1.0 };
        let state = VehicleState::new(1.0, 5.0, 90.0, 1e9);
        let d = stanley_steer(&state, &straight_up_path(), &sp, &vp()).unwrap();
        assert!(d.abs() < 1e-6);
    }

    #[test]
    fn steers_toward_the_path() {
        let sp = StanleyParams::default();
        // Vehicle right of the path (front axle at x=2) must steer left (+).
        let state = VehicleState::new(2.0, 5.0, 90.0, 5.0);
        let d = stanley_steer(&state, &straight_up_path(), &sp, &vp()).unwrap();
        assert!(d > 0.0);
        // And symmetric on the other side.
        let state = VehicleState::new(-2.0, 5.0, 90.0, 5.0);
        let d2 = stanley_steer(&state, &straight_up_path(), &sp, &vp()).unwrap();
        assert!((d + d2).abs() < 1e-9);
    }

    #[test]
    fn mirror_symmetry_negates_steer() {
        // Mirror the path about the vehicle's heading axis (the y axis here):
        // delta flips sign exactly.
        let sp = StanleyParams::default();
        let path = DensePath {
            points: (0..400)
                .map(|i| {
                    let y = i as f64 * 0.1;
                    DensePoint { x: 0.5 + 0.02 * y * y, y, yaw: 90.0 - y }
                })
                .collect(),
        };
        let mirrored = DensePath {
            points: path
                .points
                .iter()
                .map(|p| DensePoint { x: -p.x, y: p.y, yaw: 90.0 + (90.0 - p.yaw) })
                .collect(),
        };
        let state = VehicleState::new(0.0, 3.0, 90.0, 6.0);
        let a = stanley_steer(&state, &path, &sp, &vp()).unwrap();
        let b = stanley_steer(&state, &mirrored, &sp, &vp()).unwrap();
        assert!((a + b).abs() < 1e-9);
        assert!(a != 0.0);
    }

    #[test]
    fn empty_path_errors() {
        let state = VehicleState::new(0.0, 0.0, 90.0, 5.0);
        let empty = DensePath { points: Vec::new() };
        assert!(stanley_steer(&state, &empty, &StanleyParams::default(), &vp()).is_err());
    }

    #[test]
    fn clamped_to_max_steer() {
        let sp = StanleyParams { k: 100.0, ks: 0.1, k1: 3.0, k2: 3.0 };
        let state = VehicleState::new(8.0, 5.0, 90.0, 1.0);
        let d = stanley_steer(&state, &straight_up_path(), &sp, &vp()).unwrap();
        assert_eq!(d, vp().max_steer);
    }
}
