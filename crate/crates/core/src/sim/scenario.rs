//! The seven road scenarios as analytic centerlines with per-arc lane
//! visibility, HD-map terrain windows, and GPS quality timelines.

use crate::config::Config;
use crate::geometry::{kmh_to_mps, wrap_deg, Point2};
use crate::selector::RtkState;
use crate::{Error, Result};

/// Names accepted by [`build_scenario`].
pub const SCENARIO_NAMES: [&str; 7] = [
    "straight",
    "slight_curve",
    "steep_curve",
    "junctions",
    "roundabout",
    "intersection",
    "tunnel",
];

/// The three normal-road scenario names.
pub const NORMAL_SCENARIOS: [&str; 3] = ["straight", "slight_curve", "steep_curve"];

/// The four complex-road scenario names.
pub const COMPLEX_SCENARIOS: [&str; 4] = ["junctions", "roundabout", "intersection", "tunnel"];

/// Centerline sampling step in meters.
const PATH_DS: f64 = 0.1;
/// Path left beyond the scored horizon so the 30-point window never runs out.
const END_MARGIN_M: f64 = 35.0;

/// Which lane lines the camera can see on a stretch of road.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaneVisibility {
    Both,
    LeftOnly,
    RightOnly,
    None,
}

/// One centerline sample: pose, signed curvature (left positive), and the
/// arc position from the start.
#[derive(Debug, Clone, Copy)]
pub struct PathSample {
    pub x: f64,
    pub y: f64,
    pub yaw: f64,
    pub curvature: f64,
    pub s: f64,
}

impl PathSample {
    pub fn position(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }

    /// Unit normal pointing left of the path direction.
    pub fn left_normal(&self) -> (f64, f64) {
        let r = self.yaw.to_radians();
        (-r.sin(), r.cos())
    }
}

/// Dense analytic centerline.
#[derive(Debug, Clone)]
pub struct ScenarioPath {
    pub samples: Vec<PathSample>,
    pub total_len: f64,
}

impl ScenarioPath {
    /// Index of and distance to the sample nearest `p`.
    pub fn nearest(&self, p: Point2) -> (usize, f64) {
        let mut best = (0usize, f64::INFINITY);
        for (i, s) in self.samples.iter().enumerate() {
            let d = p.distance(s.position());
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }

    /// Sample at arc position `s`, clamped to the path.
    pub fn sample_at(&self, s: f64) -> PathSample {
        let idx = (s / PATH_DS).round() as isize;
        let idx = idx.clamp(0, self.samples.len() as isize - 1) as usize;
        self.samples[idx]
    }
}

/// Piecewise segments the centerline is built from.
#[derive(Debug, Clone, Copy)]
enum Segment {
    Straight { len: f64 },
    /// Circular arc; positive `turn_deg` bends left.
    Arc { radius: f64, turn_deg: f64 },
}

impl Segment {
    fn len(&self) -> f64 {
        match self {
            Segment::Straight { len } => *len,
            Segment::Arc { radius, turn_deg } => radius * turn_deg.abs().to_radians(),
        }
    }
}

/// Lay out segments from the origin heading +x and sample every 0.1 m.
/// Poses are computed analytically inside each segment, so there is no
/// accumulation error along the path.
fn sample_segments(segments: &[Segment]) -> ScenarioPath {
    let total: f64 = segments.iter().map(Segment::len).sum();
    let n = (total / PATH_DS).floor() as usize;

    // Absolute pose at each segment boundary.
    let mut starts = Vec::with_capacity(segments.len() + 1);
    let mut pose = (0.0f64, 0.0f64, 0.0f64); // x, y, yaw deg
    let mut s_acc = 0.0;
    for seg in segments {
        starts.push((s_acc, pose));
        pose = advance(pose, seg, seg.len());
        s_acc += seg.len();
    }

    let pose_in = |s: f64| -> (f64, f64, f64, f64) {
        // Find the segment containing s.
        let mut chosen = (segments.len() - 1, starts[segments.len() - 1]);
        for (i, &(seg_s, _)) in starts.iter().enumerate() {
            if s >= seg_s - 1e-9 {
                chosen = (i, starts[i]);
            }
        }
        let (i, (seg_s, seg_pose)) = chosen;
        let seg = &segments[i];
        let local = (s - seg_s).clamp(0.0, seg.len());
        let (x, y, yaw) = advance(seg_pose, seg, local);
        let curvature = match seg {
            Segment::Straight { .. } => 0.0,
            Segment::Arc { radius, turn_deg } => turn_deg.signum() / radius,
        };
        (x, y, yaw, curvature)
    };

    let mut samples = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let s = i as f64 * PATH_DS;
        let (x, y, yaw, curvature) = pose_in(s);
        samples.push(PathSample { x, y, yaw, curvature, s });
    }
    ScenarioPath {
        samples,
        total_len: total,
    }
}

fn advance(pose: (f64, f64, f64), seg: &Segment, dist: f64) -> (f64, f64, f64) {
    let (x, y, yaw) = pose;
    let yr = yaw.to_radians();
    match seg {
        Segment::Straight { .. } => (x + dist * yr.cos(), y + dist * yr.sin(), yaw),
        Segment::Arc { radius, turn_deg } => {
            let signed_r = turn_deg.signum() * radius;
            let dpsi = dist / signed_r;
            let new_yr = yr + dpsi;
            (
                x + signed_r * (new_yr.sin() - yr.sin()),
                y - signed_r * (new_yr.cos() - yr.cos()),
                wrap_deg(new_yr.to_degrees()),
            )
        }
    }
}

/// A GPS quality window on the run clock.
#[derive(Debug, Clone, Copy)]
pub struct GpsWindow {
    pub from_t: f64,
    pub to_t: f64,
    pub rtk: RtkState,
    pub hdop: f64,
}

/// A fully parameterized scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub path: ScenarioPath,
    /// Arc ranges where the HD map marks GPS-preferred terrain.
    pub hd_windows: Vec<(f64, f64)>,
    /// Arc ranges with reduced lane visibility; `Both` everywhere else.
    pub lane_windows: Vec<(f64, f64, LaneVisibility)>,
    /// Degraded-GPS windows on the run clock; Fixed/0.8 everywhere else.
    pub gps_timeline: Vec<GpsWindow>,
    /// Constant speed profile, m/s.
    pub speed: f64,
    /// Scored duration, seconds.
    pub duration: f64,
    /// Physical road (lane) width, meters.
    pub road_width_m: f64,
    /// Noise sigma on windowed GPS points, meters.
    pub gps_noise_sigma: f64,
}

impl Scenario {
    pub fn lane_visibility_at(&self, s: f64) -> LaneVisibility {
        for &(from, to, vis) in &self.lane_windows {
            if s >= from && s < to {
                return vis;
            }
        }
        LaneVisibility::Both
    }

    pub fn hd_flag_at(&self, s: f64) -> bool {
        self.hd_windows.iter().any(|&(from, to)| s >= from && s < to)
    }

    pub fn gps_at(&self, t: f64) -> (RtkState, f64) {
        for w in &self.gps_timeline {
            if t >= w.from_t && t < w.to_t {
                return (w.rtk, w.hdop);
            }
        }
        (RtkState::Fixed, 0.8)
    }
}

/// Segments plus HD, lane-visibility, and GPS-outage windows of one layout.
type Layout = (
    Vec<Segment>,
    Vec<(f64, f64)>,
    Vec<(f64, f64, LaneVisibility)>,
    Option<(f64, f64)>,
);

/// Build one of the seven scenarios, applying any per-scenario overrides
/// from the config.
pub fn build_scenario(name: &str, cfg: &Config) -> Result<Scenario> {
    if !SCENARIO_NAMES.contains(&name) {
        return Err(Error::UnknownScenario(name.to_string()));
    }
    let over = cfg.scenarios.get(name).copied().unwrap_or_default();
    let speed = kmh_to_mps(over.speed_kmh.unwrap_or(20.0));

    let (segments, hd_windows, lane_windows, gps_arc_out): Layout = match name {
        "straight" => (vec![Segment::Straight { len: 220.0 }], vec![], vec![], None),
        "slight_curve" => (
            vec![
                Segment::Straight { len: 30.0 },
                Segment::Arc { radius: 157.5, turn_deg: (120.0 / 157.5f64).to_degrees() },
                Segment::Straight { len: 60.0 },
            ],
            vec![],
            vec![],
            None,
        ),
        "steep_curve" => (
            vec![
                Segment::Straight { len: 30.0 },
                Segment::Arc { radius: 53.0, turn_deg: 90.0 },
                Segment::Straight { len: 60.0 },
            ],
            vec![],
            vec![],
            None,
        ),
        "junctions" => (
            vec![Segment::Straight { len: 230.0 }],
            vec![],
            // Three 10 m stretches where the right-side junction mouths wipe
            // out both painted lines.
            vec![
                (60.0, 70.0, LaneVisibility::None),
                (100.0, 110.0, LaneVisibility::None),
                (140.0, 150.0, LaneVisibility::None),
            ],
            None,
        ),
        "roundabout" => {
            let entry = Segment::Arc { radius: 8.0, turn_deg: -35.0 };
            let circulate = Segment::Arc { radius: 14.0, turn_deg: 250.0 };
            let exit = Segment::Arc { radius: 8.0, turn_deg: -35.0 };
            let s0 = 40.0;
            let s1 = s0 + entry.len();
            let s2 = s1 + circulate.len();
            let s3 = s2 + exit.len();
            (
                vec![
                    Segment::Straight { len: s0 },
                    entry,
                    circulate,
                    exit,
                    Segment::Straight { len: 60.0 },
                ],
                // Terrain flag raised 10 m ahead of the deflection and held
                // 10 m past the exit.
                vec![(s0 - 10.0, s3 + 10.0)],
                // Circulating lanes are unreadable for the camera.
                vec![(s0, s3, LaneVisibility::None)],
                None,
            )
        }
        "intersection" => {
            let turn = Segment::Arc { radius: 25.0, turn_deg: 90.0 };
            let s0 = 60.0;
            let s1 = s0 + turn.len();
            (
                vec![
                    Segment::Straight { len: s0 },
                    turn,
                    Segment::Straight { len: 60.0 },
                ],
                vec![(s0 - 10.0, s1 + 10.0)],
                // No painted lanes through the junction box.
                vec![(s0 - 10.0, s1 + 10.0, LaneVisibility::None)],
                None,
            )
        }
        "tunnel" => (
            vec![
                Segment::Straight { len: 50.0 },
                Segment::Arc { radius: 157.5, turn_deg: (120.0 / 157.5f64).to_degrees() },
                Segment::Straight { len: 60.0 },
            ],
            vec![],
            vec![],
            // GPS has no fix while inside the tunnel bore.
            Some((60.0, 160.0)),
        ),
        _ => unreachable!(),
    };

    let path = sample_segments(&segments);
    let duration = over
        .duration_s
        .unwrap_or((path.total_len - END_MARGIN_M).max(1.0) / speed);

    let gps_timeline = gps_arc_out
        .map(|(from_s, to_s)| {
            vec![GpsWindow {
                from_t: from_s / speed,
                to_t: to_s / speed,
                rtk: RtkState::NoFixed,
                hdop: 9.9,
            }]
        })
        .unwrap_or_default();

    Ok(Scenario {
        name: name.to_string(),
        path,
        hd_windows,
        lane_windows,
        gps_timeline,
        speed,
        duration,
        road_width_m: cfg.road_width_m(),
        gps_noise_sigma: over.gps_noise_sigma.unwrap_or(cfg.gps_noise_sigma),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> Config {
        Config::default()
    }

    #[test]
    fn steep_curve_has_quoted_curvature() {
        let s = build_scenario("steep_curve", &cfg()).unwrap();
        let on_arc: Vec<&PathSample> = s
            .path
            .samples
            .iter()
            .filter(|p| p.s > 31.0 && p.s < 30.0 + 53.0 * std::f64::consts::FRAC_PI_2 - 1.0)
            .collect();
        assert!(!on_arc.is_empty());
        for p in on_arc {
            assert!((p.curvature - 1.0 / 53.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tunnel_timeline_contains_no_fix_window() {
        let s = build_scenario("tunnel", &cfg()).unwrap();
        assert_eq!(s.gps_timeline.len(), 1);
        assert_eq!(s.gps_timeline[0].rtk, RtkState::NoFixed);
        let mid = (s.gps_timeline[0].from_t + s.gps_timeline[0].to_t) / 2.0;
        assert_eq!(s.gps_at(mid).0, RtkState::NoFixed);
        assert_eq!(s.gps_at(0.0).0, RtkState::Fixed);
    }

    #[test]
    fn straight_has_no_terrain_flag() {
        let s = build_scenario("straight", &cfg()).unwrap();
        for p in &s.path.samples {
            assert!(!s.hd_flag_at(p.s));
        }
    }

    #[test]
    fn roundabout_flags_and_visibility() {
        let s = build_scenario("roundabout", &cfg()).unwrap();
        assert!(s.hd_flag_at(35.0), "advance notice before the deflection");
        assert!(s.hd_flag_at(80.0));
        assert!(!s.hd_flag_at(5.0));
        assert_eq!(s.lane_visibility_at(80.0), LaneVisibility::None);
        assert_eq!(s.lane_visibility_at(10.0), LaneVisibility::Both);
    }

    #[test]
    fn unknown_name_lists_valid() {
        let err = build_scenario("moon_base", &cfg()).unwrap_err();
        assert!(err.to_string().contains("straight"));
    }

    #[test]
    fn path_is_continuous_across_segments() {
        for name in SCENARIO_NAMES {
            let s = build_scenario(name, &cfg()).unwrap();
            for pair in s.path.samples.windows(2) {
                let d = pair[0].position().distance(pair[1].position());
                assert!(
                    (d - 0.1).abs() < 1e-3,
                    "{name}: sample spacing {d} at s={}",
                    pair[0].s
                );
            }
        }
    }

    #[test]
    fn durations_leave_end_margin() {
        for name in SCENARIO_NAMES {
            let s = build_scenario(name, &cfg()).unwrap();
            let travelled = s.speed * s.duration;
            assert!(travelled <= s.path.total_len - 30.0, "{name}");
        }
    }
}
