//! Synthetic sensors: a top-view lane raster rendered around the vehicle,
//! the windowed global path with RTK-grade noise, and the HD-map flag.

use super::scenario::{LaneVisibility, Scenario};
use crate::config::Config;
use crate::geometry::Point2;
use crate::lane::{process_mask, GuidanceLine, SegMask};
use crate::path::{GlobalPath, FRAME_BOTTOM_Y, FRAME_CENTER_X, FRAME_SIZE};
use crate::plant::VehicleState;
use crate::selector::{RtkState, SensorSnapshot};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// How far ahead of the vehicle lane geometry is rasterized, meters.
const RENDER_AHEAD_M: f64 = 12.0;
const RENDER_BEHIND_M: f64 = 2.0;
/// Half-width of a lane stroke stamp, pixels.
const STAMP_RADIUS: i32 = 2;

/// Window length of the global path fed to the GPS trackers.
const GLOBAL_PATH_POINTS: usize = 30;
const GLOBAL_PATH_SPACING_M: f64 = 1.0;

/// Rasterize the visible lane lines into a 300x300 top-view mask around the
/// vehicle (labels: 2 = left lane, 3 = right lane).
pub fn render_lane_mask(scenario: &Scenario, cfg: &Config, state: &VehicleState, s_vehicle: f64) -> SegMask {
    let mut mask = SegMask::new(FRAME_SIZE, FRAME_SIZE);
    let half_w_m = cfg.road_width_px * cfg.scales.vision_mpp / 2.0;
    let px_per_m = 1.0 / cfg.scales.vision_mpp;

    let theta = (-(90.0 + state.yaw)).to_radians();
    let (sin_t, cos_t) = theta.sin_cos();
    let mut stamp = |p_global: Point2, label: u8| {
        let dx = p_global.x - state.x;
        let dy = p_global.y - state.y;
        let xr = cos_t * dx - sin_t * dy;
        let yr = sin_t * dx + cos_t * dy;
        let px = (FRAME_CENTER_X - px_per_m * xr).round() as i32;
        let py = (FRAME_BOTTOM_Y + px_per_m * yr).round() as i32;
        for oy in -STAMP_RADIUS..=STAMP_RADIUS {
            for ox in -STAMP_RADIUS..=STAMP_RADIUS {
                let (x, y) = (px + ox, py + oy);
                if x >= 0 && y >= 0 && (x as usize) < FRAME_SIZE && (y as usize) < FRAME_SIZE {
                    mask.set(x as usize, y as usize, label);
                }
            }
        }
    };

    let from = ((s_vehicle - RENDER_BEHIND_M).max(0.0) / 0.1) as usize;
    let to = (((s_vehicle + RENDER_AHEAD_M) / 0.1) as usize).min(scenario.path.samples.len() - 1);
    for sample in &scenario.path.samples[from..=to] {
        let vis = scenario.lane_visibility_at(sample.s);
        let (nx, ny) = sample.left_normal();
        if matches!(vis, LaneVisibility::Both | LaneVisibility::LeftOnly) {
            stamp(
                Point2::new(sample.x + half_w_m * nx, sample.y + half_w_m * ny),
                2,
            );
        }
        if matches!(vis, LaneVisibility::Both | LaneVisibility::RightOnly) {
            stamp(
                Point2::new(sample.x - half_w_m * nx, sample.y - half_w_m * ny),
                3,
            );
        }
    }
    mask
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; the clamp keeps ln() finite.
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Build the full sensor snapshot for the current pose and time.
/// Returns the snapshot plus the vehicle's arc position on the ideal path.
pub fn synthesize_sensors(
    scenario: &Scenario,
    cfg: &Config,
    state: &VehicleState,
    t: f64,
    rng: &mut ChaCha8Rng,
) -> (SensorSnapshot, f64) {
    let (idx, _) = scenario.path.nearest(state.position());
    let s_vehicle = scenario.path.samples[idx].s;

    let mask = render_lane_mask(scenario, cfg, state, s_vehicle);
    let guidance = process_mask(&mask, None, &cfg.lane)
        .map(|a| a.guidance)
        .unwrap_or_else(|_| GuidanceLine::none());

    let (rtk, hdop) = scenario.gps_at(t);
    let global_path = if rtk == RtkState::NoFixed {
        None
    } else {
        let mut pts = Vec::with_capacity(GLOBAL_PATH_POINTS);
        for k in 1..=GLOBAL_PATH_POINTS {
            let s = s_vehicle + k as f64 * GLOBAL_PATH_SPACING_M;
            if s > scenario.path.total_len {
                break;
            }
            let sample = scenario.path.sample_at(s);
            let sigma = scenario.gps_noise_sigma;
            pts.push(Point2::new(
                sample.x + sigma * gaussian(rng),
                sample.y + sigma * gaussian(rng),
            ));
        }
        GlobalPath::new(pts).ok()
    };

    let snapshot = SensorSnapshot {
        rtk_state: rtk,
        hdop,
        guidance,
        hd_map_flag: scenario.hd_flag_at(s_vehicle),
        global_path,
        timestamp: t,
    };
    (snapshot, s_vehicle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lane::GuidanceSource;
    use crate::plant::VehicleState;
    use crate::selector::lane_reliability;
    use crate::sim::build_scenario;
    use rand::SeedableRng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    #[test]
    fn centered_vehicle_sees_centered_guidance() {
        let cfg = Config::default();
        let sc = build_scenario("straight", &cfg).unwrap();
        let start = sc.path.sample_at(5.0);
        let state = VehicleState::new(start.x, start.y, start.yaw, sc.speed);
        let (snap, _) = synthesize_sensors(&sc, &cfg, &state, 0.0, &mut rng());
        assert_eq!(snap.guidance.source, GuidanceSource::BothLanes);
        assert_eq!(snap.guidance.points.len(), 31);
        for p in &snap.guidance.points {
            assert!((p.x - 150.0).abs() < 1.0, "x = {}", p.x);
        }
        assert!(lane_reliability(&snap.guidance, cfg.road_width_px));
    }

    #[test]
    fn junction_gap_blanks_the_guidance() {
        let cfg = Config::default();
        let sc = build_scenario("junctions", &cfg).unwrap();
        // Just inside the first gap: everything the camera can see is blank.
        let start = sc.path.sample_at(60.6);
        let state = VehicleState::new(start.x, start.y, start.yaw, sc.speed);
        let (snap, _) = synthesize_sensors(&sc, &cfg, &state, 60.6 / sc.speed, &mut rng());
        assert_eq!(snap.guidance.source, GuidanceSource::None);
        assert!(!lane_reliability(&snap.guidance, cfg.road_width_px));
    }

    #[test]
    fn tunnel_window_drops_the_global_path() {
        let cfg = Config::default();
        let sc = build_scenario("tunnel", &cfg).unwrap();
        let s_in = 100.0;
        let t_in = s_in / sc.speed;
        let sample = sc.path.sample_at(s_in);
        let state = VehicleState::new(sample.x, sample.y, sample.yaw, sc.speed);
        let (snap, _) = synthesize_sensors(&sc, &cfg, &state, t_in, &mut rng());
        assert_eq!(snap.rtk_state, RtkState::NoFixed);
        assert!(snap.global_path.is_none());
        // Lanes remain visible inside the tunnel.
        assert_eq!(snap.guidance.source, GuidanceSource::BothLanes);
    }

    #[test]
    fn global_path_window_is_30_points_1m_apart() {
        let cfg = Config { gps_noise_sigma: 0.0, ..Config::default() };
        let sc = build_scenario("straight", &cfg).unwrap();
        let start = sc.path.sample_at(0.0);
        let state = VehicleState::new(start.x, start.y, start.yaw, sc.speed);
        let (snap, _) = synthesize_sensors(&sc, &cfg, &state, 0.0, &mut rng());
        let gp = snap.global_path.unwrap();
        assert_eq!(gp.points.len(), 30);
        for pair in gp.points.windows(2) {
            assert!((pair[0].distance(pair[1]) - 1.0).abs() < 1e-9);
        }
        assert!((gp.points[0].distance(start.position()) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn left_only_window_still_yields_a_centered_line() {
        let cfg = Config { gps_noise_sigma: 0.0, ..Config::default() };
        let mut sc = build_scenario("straight", &cfg).unwrap();
        sc.lane_windows = vec![(0.0, 400.0, LaneVisibility::LeftOnly)];
        let start = sc.path.sample_at(5.0);
        let state = VehicleState::new(start.x, start.y, start.yaw, sc.speed);
        let (snap, _) = synthesize_sensors(&sc, &cfg, &state, 0.0, &mut rng());
        assert_eq!(snap.guidance.source, GuidanceSource::LeftOffset);
        for p in &snap.guidance.points {
            assert!((p.x - 150.0).abs() < 1.5, "x = {}", p.x);
        }
    }
}
