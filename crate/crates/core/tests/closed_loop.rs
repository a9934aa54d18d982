//! Closed-loop behavior of the hybrid selector across the scenario set.

use hybrid_tracker::config::Config;
use hybrid_tracker::geometry::Point2;
use hybrid_tracker::lane::GuidanceLine;
use hybrid_tracker::plant::{SteeringActuator, VehicleState};
use hybrid_tracker::selector::{
    HybridController, RtkState, SensorSnapshot, TrackerBank, TrackerId,
};
use hybrid_tracker::sim::{build_scenario, simulate, SimOptions, TrackerChoice, SCENARIO_NAMES};
use hybrid_tracker::trackers::PurePursuit;

fn default_bank(cfg: &Config) -> TrackerBank {
    TrackerBank::new(
        PurePursuit::new(cfg.pp_vision),
        PurePursuit::new(cfg.pp_gps),
        cfg.stanley,
        cfg.scales,
    )
}

#[test]
fn tunnel_hands_control_to_vision() {
    let cfg = Config::default();
    let sc = build_scenario("tunnel", &cfg).unwrap();
    let log = simulate(&sc, TrackerChoice::Hybrid, &cfg, &SimOptions::default()).unwrap();
    assert!(log.success);
    let window = &sc.gps_timeline[0];
    let mut saw_window = false;
    for r in &log.rows {
        if r.t >= window.from_t && r.t < window.to_t {
            saw_window = true;
            assert!(!r.gps_rel, "GPS flagged reliable inside the tunnel at t={}", r.t);
            assert_eq!(r.tracker, TrackerId::PurePursuitVision, "t={}", r.t);
        }
    }
    assert!(saw_window);
}

#[test]
fn roundabout_circulates_on_stanley() {
    let cfg = Config::default();
    let sc = build_scenario("roundabout", &cfg).unwrap();
    let log = simulate(&sc, TrackerChoice::Hybrid, &cfg, &SimOptions::default()).unwrap();
    assert!(log.success);
    // While the terrain flag is up (the deflections and the circulating
    // arc), the GPS path is trusted and Stanley drives.
    let mut stanley_steps = 0;
    for r in &log.rows {
        if r.hd_map {
            assert_eq!(r.tracker, TrackerId::StanleyGps, "t={}", r.t);
            stanley_steps += 1;
        }
    }
    assert!(stanley_steps > 300, "terrain window too short: {stanley_steps} steps");
}

#[test]
fn intersection_switches_through_all_three() {
    let cfg = Config::default();
    let sc = build_scenario("intersection", &cfg).unwrap();
    let log = simulate(&sc, TrackerChoice::Hybrid, &cfg, &SimOptions::default()).unwrap();
    assert!(log.success);
    let used: std::collections::BTreeSet<&str> =
        log.rows.iter().map(|r| r.tracker.as_str()).collect();
    assert!(used.contains("pp-vision"));
    assert!(used.contains("stanley-gps"));
}

#[test]
fn junction_gaps_fall_back_to_gps_pursuit() {
    let cfg = Config::default();
    let sc = build_scenario("junctions", &cfg).unwrap();
    let log = simulate(&sc, TrackerChoice::Hybrid, &cfg, &SimOptions::default()).unwrap();
    assert!(log.success);
    let gap_rows: Vec<_> = log.rows.iter().filter(|r| !r.lane_rel).collect();
    assert!(!gap_rows.is_empty(), "no lane-unreliable steps seen");
    for r in &gap_rows {
        assert_eq!(r.tracker, TrackerId::PurePursuitGps);
    }
    // Every gap produces a switch away from vision and back.
    let switches = log
        .rows
        .windows(2)
        .filter(|w| w[0].tracker != w[1].tracker)
        .count();
    assert_eq!(switches, 6, "three gaps, each entered and left");
}

#[test]
fn hybrid_is_transparent_on_straight() {
    // With vision selected throughout, the hybrid's issued commands equal
    // the standalone pure pursuit (vision) run bit for bit.
    let cfg = Config::default();
    let mut sc = build_scenario("straight", &cfg).unwrap();
    sc.duration = 10.0;
    let opts = SimOptions::default();
    let hybrid = simulate(&sc, TrackerChoice::Hybrid, &cfg, &opts).unwrap();
    let standalone = simulate(&sc, TrackerChoice::PpVision, &cfg, &opts).unwrap();
    assert_eq!(hybrid.rows.len(), standalone.rows.len());
    for (h, s) in hybrid.rows.iter().zip(&standalone.rows) {
        assert_eq!(h.tracker, TrackerId::PurePursuitVision);
        assert_eq!(h.steer_cmd, s.steer_cmd, "t={}", h.t);
    }
}

#[test]
fn switching_is_slew_bounded() {
    let cfg = Config::default();
    for name in SCENARIO_NAMES {
        let sc = build_scenario(name, &cfg).unwrap();
        let log = simulate(&sc, TrackerChoice::Hybrid, &cfg, &SimOptions::default()).unwrap();
        for w in log.rows.windows(2) {
            let jump = (w[1].steer_cmd - w[0].steer_cmd).abs();
            assert!(
                jump <= cfg.vehicle.steer_slew + 1e-12,
                "{name}: jump {jump} at t={}",
                w[1].t
            );
        }
    }
}

#[test]
fn straight_zero_offset_keeps_steering_at_zero() {
    let cfg = Config::default();
    let mut sc = build_scenario("straight", &cfg).unwrap();
    sc.duration = 12.0;
    let log = simulate(&sc, TrackerChoice::PpVision, &cfg, &SimOptions::default()).unwrap();
    let max_steer = log.rows.iter().map(|r| r.steer_cmd.abs()).fold(0.0f64, f64::max);
    assert!(max_steer <= 1e-9, "steering moved to {max_steer:.2e} deg");

    // And cross-track stays essentially zero.
    let max_lat = log
        .rows
        .iter()
        .map(|r| {
            let (idx, _) = sc.path.nearest(Point2::new(r.x, r.y));
            let s = &sc.path.samples[idx];
            let yaw = s.yaw.to_radians();
            (-(r.x - s.x) * yaw.sin() + (r.y - s.y) * yaw.cos()).abs()
        })
        .fold(0.0f64, f64::max);
    assert!(max_lat < 0.05, "cross-track grew to {max_lat:.3} m");
}

#[test]
fn degraded_mode_holds_the_previous_command() {
    // No guidance line and no global path: the controller reports degraded
    // mode and re-issues the held command.
    let cfg = Config::default();
    let mut hybrid = HybridController::new(default_bank(&cfg), cfg.road_width_px, 0);
    let mut actuator = SteeringActuator::new(3.5);
    let state = VehicleState::new(0.0, 0.0, 0.0, 5.0);
    let snapshot = SensorSnapshot {
        rtk_state: RtkState::NoFixed,
        hdop: 9.0,
        guidance: GuidanceLine::none(),
        hd_map_flag: false,
        global_path: None,
        timestamp: 0.0,
    };
    let out = hybrid.step(&snapshot, &state, &cfg.vehicle, &mut actuator);
    assert!(out.degraded);
    assert_eq!(out.command.angle, 3.5);
    assert!(!out.flags.gps && !out.flags.lane);
}

#[test]
fn minimum_dwell_defers_switching() {
    // On the roundabout the terrain flag rises 10 m before the lanes vanish.
    // Without dwell the selector moves to Stanley immediately; with a large
    // dwell it keeps the still-usable vision tracker until the lanes die.
    let cfg = Config::default();
    let sc = build_scenario("roundabout", &cfg).unwrap();
    let probe_window = |log: &hybrid_tracker::sim::TrajectoryLog| -> Vec<TrackerId> {
        log.rows
            .iter()
            .filter(|r| {
                let s = r.t * sc.speed;
                (32.0..38.0).contains(&s)
            })
            .map(|r| r.tracker)
            .collect()
    };

    let free = simulate(&sc, TrackerChoice::Hybrid, &cfg, &SimOptions::default()).unwrap();
    assert!(probe_window(&free).iter().all(|&t| t == TrackerId::StanleyGps));

    let mut with_dwell = cfg.clone();
    with_dwell.min_dwell_steps = 100_000;
    let held = simulate(&sc, TrackerChoice::Hybrid, &with_dwell, &SimOptions::default()).unwrap();
    assert!(probe_window(&held).iter().all(|&t| t == TrackerId::PurePursuitVision));
}

#[test]
fn high_speed_straight_screams_through() {
    // The straight scenario at 100 km/h still tracks for every choice.
    let mut cfg = Config::default();
    cfg.apply_str("[straight]\nspeed_kmh = 100\n").unwrap();
    for choice in TrackerChoice::ALL {
        let sc = build_scenario("straight", &cfg).unwrap();
        let log = simulate(&sc, choice, &cfg, &SimOptions::default()).unwrap();
        assert!(log.success, "{} failed at 100 km/h", choice.as_str());
    }
}
