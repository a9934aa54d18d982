//! The observer around the trackers: GPS and lane reliability gates, HD-map
//! terrain hints, and the per-step choice of which tracker drives.

use crate::geometry::mps_to_kmh;
use crate::lane::GuidanceLine;
use crate::path::{global_to_local, spline_interpolate, GlobalPath, FRAME_CENTER_X};
use crate::plant::{SteeringActuator, SteeringCommand, VehicleParams, VehicleState};
use crate::trackers::{stanley_steer, PurePursuit, StanleyParams};
use serde::Serialize;

/// RTK carrier-phase solution quality, worst to best.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RtkState {
    NoFixed,
    Float,
    Fixed,
}

/// Everything the selector sees in one control step.
#[derive(Debug, Clone)]
pub struct SensorSnapshot {
    pub rtk_state: RtkState,
    pub hdop: f64,
    pub guidance: GuidanceLine,
    /// HD-map terrain bit: 1 marks large-curvature / roundabout /
    /// intersection zones where the GPS path is preferred.
    pub hd_map_flag: bool,
    /// Windowed global path; absent when localization has no fix.
    pub global_path: Option<GlobalPath>,
    pub timestamp: f64,
}

/// The three reliability bits driving the selection table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReliabilityFlags {
    pub gps: bool,
    pub lane: bool,
    pub hd_map: bool,
}

/// The selectable trackers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TrackerId {
    #[serde(rename = "pp-vision")]
    PurePursuitVision,
    #[serde(rename = "pp-gps")]
    PurePursuitGps,
    #[serde(rename = "stanley-gps")]
    StanleyGps,
}

impl TrackerId {
    pub fn as_str(&self) -> &'static str {
        match self {
            TrackerId::PurePursuitVision => "pp-vision",
            TrackerId::PurePursuitGps => "pp-gps",
            TrackerId::StanleyGps => "stanley-gps",
        }
    }
}

/// GPS is trusted only with a Fixed RTK solution and HDOP below 3.
pub fn gps_reliability(rtk_state: RtkState, hdop: f64) -> bool {
    rtk_state == RtkState::Fixed && hdop < 3.0
}

/// The lane is trusted when a guidance line exists and every guidance point
/// stays within a fifth of the road width of the frame center.
pub fn lane_reliability(line: &GuidanceLine, road_width_px: f64) -> bool {
    line.is_usable()
        && line
            .points
            .iter()
            .all(|p| (FRAME_CENTER_X - p.x).abs() < road_width_px / 5.0)
}

/// Selection criteria:
///
/// | gps | hd map | lane | tracker            |
/// |-----|--------|------|--------------------|
/// |  0  |   *    |  *   | pure pursuit vision|
/// |  1  |   1    |  *   | Stanley GPS        |
/// |  1  |   0    |  1   | pure pursuit vision|
/// |  1  |   0    |  0   | pure pursuit GPS   |
///
/// The last two rows share one "pure pursuit (vision, GPS)" entry in the
/// source criteria; lane reliability is the remaining discriminator.
pub fn select_tracker(flags: ReliabilityFlags) -> TrackerId {
    if !flags.gps {
        TrackerId::PurePursuitVision
    } else if flags.hd_map {
        TrackerId::StanleyGps
    } else if flags.lane {
        TrackerId::PurePursuitVision
    } else {
        TrackerId::PurePursuitGps
    }
}

/// Frame scales used when local pixel paths are built for the trackers.
#[derive(Debug, Clone, Copy)]
pub struct FrameScales {
    /// Meters per pixel of the vision guidance frame.
    pub vision_mpp: f64,
    /// Meters per pixel of the GPS local path frame.
    pub gps_mpp: f64,
}

impl Default for FrameScales {
    fn default() -> Self {
        Self {
            vision_mpp: 0.03,
            gps_mpp: 0.1,
        }
    }
}

/// Per-step raw outputs of the three trackers (before the actuator).
#[derive(Debug, Clone, Copy)]
pub struct TrackerOutputs {
    pub vision: Option<f64>,
    pub gps: Option<f64>,
    pub stanley: Option<f64>,
}

impl TrackerOutputs {
    pub fn get(&self, id: TrackerId) -> Option<f64> {
        match id {
            TrackerId::PurePursuitVision => self.vision,
            TrackerId::PurePursuitGps => self.gps,
            TrackerId::StanleyGps => self.stanley,
        }
    }
}

/// The three trackers evaluated side by side each step so that any of them
/// can take over without warm-up.
#[derive(Debug, Clone)]
pub struct TrackerBank {
    pub pp_vision: PurePursuit,
    pub pp_gps: PurePursuit,
    pub stanley: StanleyParams,
    pub scales: FrameScales,
}

impl TrackerBank {
    pub fn new(pp_vision: PurePursuit, pp_gps: PurePursuit, stanley: StanleyParams, scales: FrameScales) -> Self {
        Self {
            pp_vision,
            pp_gps,
            stanley,
            scales,
        }
    }

    /// Evaluate every tracker that has a usable path. Trackers without one
    /// return `None` and keep their filter state unchanged.
    pub fn evaluate(
        &mut self,
        snapshot: &SensorSnapshot,
        vehicle: &VehicleState,
        params: &VehicleParams,
    ) -> TrackerOutputs {
        let v_kmh = mps_to_kmh(vehicle.speed);

        let vision = self
            .pp_vision
            .steer(&snapshot.guidance.points, self.scales.vision_mpp, v_kmh, params)
            .ok();

        let (gps, stanley) = match &snapshot.global_path {
            Some(gp) => {
                let local = global_to_local(gp, vehicle.x, vehicle.y, vehicle.yaw, self.scales.gps_mpp);
                let gps = self
                    .pp_gps
                    .steer(&local.points, self.scales.gps_mpp, v_kmh, params)
                    .ok();
                let stanley = spline_interpolate(gp)
                    .ok()
                    .and_then(|dense| stanley_steer(vehicle, &dense, &self.stanley, params).ok());
                (gps, stanley)
            }
            None => (None, None),
        };

        TrackerOutputs { vision, gps, stanley }
    }

    pub fn reset(&mut self) {
        self.pp_vision.reset();
        self.pp_gps.reset();
    }
}

/// Result of one hybrid control step.
#[derive(Debug, Clone, Copy)]
pub struct HybridOutput {
    pub command: SteeringCommand,
    pub tracker: TrackerId,
    pub flags: ReliabilityFlags,
    /// Set when no tracker had a usable path and the previous command was held.
    pub degraded: bool,
}

/// The hybrid controller: reliability gates, the selection table, an optional
/// minimum dwell, and the unusable-tracker fallback chain.
#[derive(Debug, Clone)]
pub struct HybridController {
    pub bank: TrackerBank,
    pub road_width_px: f64,
    /// Minimum steps between tracker switches; 0 = switch freely.
    pub min_dwell_steps: usize,
    current: Option<TrackerId>,
    steps_since_switch: usize,
}

impl HybridController {
    pub fn new(bank: TrackerBank, road_width_px: f64, min_dwell_steps: usize) -> Self {
        Self {
            bank,
            road_width_px,
            min_dwell_steps,
            current: None,
            steps_since_switch: 0,
        }
    }

    pub fn flags(&self, snapshot: &SensorSnapshot) -> ReliabilityFlags {
        ReliabilityFlags {
            gps: gps_reliability(snapshot.rtk_state, snapshot.hdop),
            lane: lane_reliability(&snapshot.guidance, self.road_width_px),
            hd_map: snapshot.hd_map_flag,
        }
    }

    /// Evaluate all trackers, pick one per the selection criteria, and push
    /// its output through the shared actuator. The issued command always
    /// equals the selected tracker's own output after actuator limiting.
    pub fn step(
        &mut self,
        snapshot: &SensorSnapshot,
        vehicle: &VehicleState,
        params: &VehicleParams,
        actuator: &mut SteeringActuator,
    ) -> HybridOutput {
        let flags = self.flags(snapshot);
        let outputs = self.bank.evaluate(snapshot, vehicle, params);

        let mut selected = select_tracker(flags);
        if let Some(current) = self.current {
            if self.steps_since_switch < self.min_dwell_steps
                && selected != current
                && outputs.get(current).is_some()
            {
                selected = current;
            }
        }

        // Fall back among usable trackers when the selected one has no path.
        let fallback = [
            TrackerId::PurePursuitVision,
            TrackerId::PurePursuitGps,
            TrackerId::StanleyGps,
        ];
        let mut chosen = selected;
        if outputs.get(chosen).is_none() {
            if let Some(&usable) = fallback.iter().find(|&&id| outputs.get(id).is_some()) {
                chosen = usable;
            } else {
                // Degraded: hold the previous command.
                self.track_switch(chosen);
                return HybridOutput {
                    command: actuator.hold(),
                    tracker: chosen,
                    flags,
                    degraded: true,
                };
            }
        }

        self.track_switch(chosen);
        let desired = outputs.get(chosen).expect("chosen tracker is usable");
        HybridOutput {
            command: actuator.apply(desired, params),
            tracker: chosen,
            flags,
            degraded: false,
        }
    }

    fn track_switch(&mut self, id: TrackerId) {
        if self.current == Some(id) {
            self.steps_since_switch += 1;
        } else {
            self.current = Some(id);
            self.steps_since_switch = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;
    use crate::lane::{GuidanceLine, GuidanceSource};

    fn line_at(x: f64) -> GuidanceLine {
        GuidanceLine {
            points: (0..31)
                .map(|i| Point2::new(x, 299.0 - i as f64 * 9.9666))
                .collect(),
            source: GuidanceSource::BothLanes,
        }
    }

    #[test]
    fn gps_truth_table() {
        // All six RTK x HDOP-band cells.
        let cases = [
            (RtkState::NoFixed, 2.9, false),
            (RtkState::NoFixed, 3.0, false),
            (RtkState::Float, 1.0, false),
            (RtkState::Float, 3.5, false),
            (RtkState::Fixed, 2.9, true),
            (RtkState::Fixed, 3.0, false),
        ];
        for (rtk, hdop, expect) in cases {
            assert_eq!(gps_reliability(rtk, hdop), expect, "{rtk:?} hdop {hdop}");
        }
    }

    #[test]
    fn lane_gate_on_deviation() {
        assert!(lane_reliability(&line_at(150.0), 100.0));
        // 25 px off center with W_r = 100: 25 >= 20 fails the gate.
        assert!(!lane_reliability(&line_at(175.0), 100.0));
        assert!(!lane_reliability(&GuidanceLine::none(), 100.0));
        // Just inside / exactly at the bound.
        assert!(lane_reliability(&line_at(150.0 + 19.99), 100.0));
        assert!(!lane_reliability(&line_at(150.0 + 20.0), 100.0));
    }

    #[test]
    fn selection_table_all_eight_rows() {
        use TrackerId::*;
        let rows = [
            ((false, false, false), PurePursuitVision),
            ((false, false, true), PurePursuitVision),
            ((false, true, false), PurePursuitVision),
            ((false, true, true), PurePursuitVision),
            ((true, true, true), StanleyGps),
            ((true, true, false), StanleyGps),
            ((true, false, true), PurePursuitVision),
            ((true, false, false), PurePursuitGps),
        ];
        for ((gps, hd_map, lane), expect) in rows {
            let got = select_tracker(ReliabilityFlags { gps, lane, hd_map });
            assert_eq!(got, expect, "gps={gps} hd={hd_map} lane={lane}");
        }
    }
}
