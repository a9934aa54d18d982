//! Runtime parameters and the sectioned key = value override format.
//!
//! One format serves both the global parameter file (pointed to by the
//! `HYBRID_TRACKER_CONFIG` environment variable) and per-run scenario
//! overrides: `[section]` headers followed by `key = value` lines, with `#`
//! or `;` comments. Unknown keys are rejected so typos surface immediately.

use crate::lane::LaneConfig;
use crate::plant::VehicleParams;
use crate::selector::FrameScales;
use crate::trackers::{LookaheadFormula, PurePursuitParams, StanleyParams};
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::path::Path;

/// Environment variable naming a global parameter file applied on top of the
/// defaults before any explicit config.
pub const CONFIG_ENV_VAR: &str = "HYBRID_TRACKER_CONFIG";

/// Per-scenario overrides.
#[derive(Debug, Clone, Copy, Default)]
pub struct ScenarioOverride {
    pub speed_kmh: Option<f64>,
    pub duration_s: Option<f64>,
    pub gps_noise_sigma: Option<f64>,
}

/// Full parameter set of the system.
#[derive(Debug, Clone)]
pub struct Config {
    pub vehicle: VehicleParams,
    pub pp_vision: PurePursuitParams,
    pub pp_gps: PurePursuitParams,
    pub stanley: StanleyParams,
    pub lane: LaneConfig,
    pub scales: FrameScales,
    /// Road width in pixels of the vision frame (W_r).
    pub road_width_px: f64,
    /// Minimum dwell between tracker switches in steps; 0 switches freely.
    pub min_dwell_steps: usize,
    /// Standard deviation of the zero-mean noise on windowed GPS points, meters.
    pub gps_noise_sigma: f64,
    /// Extra corridor margin beyond half the road width, meters.
    pub corridor_margin_m: f64,
    pub scenarios: BTreeMap<String, ScenarioOverride>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            vehicle: VehicleParams::default(),
            pp_vision: PurePursuitParams::vision(),
            pp_gps: PurePursuitParams::gps(),
            stanley: StanleyParams::default(),
            lane: LaneConfig::default(),
            scales: FrameScales::default(),
            road_width_px: 100.0,
            min_dwell_steps: 0,
            gps_noise_sigma: 0.02,
            corridor_margin_m: 0.5,
            scenarios: BTreeMap::new(),
        }
    }
}

impl Config {
    /// Defaults plus the global file from `HYBRID_TRACKER_CONFIG`, if set.
    pub fn from_env() -> Result<Self> {
        let mut cfg = Self::default();
        if let Ok(path) = std::env::var(CONFIG_ENV_VAR) {
            if !path.is_empty() {
                cfg.apply_file(Path::new(&path))?;
            }
        }
        Ok(cfg)
    }

    /// Road width of the vision frame converted to meters.
    pub fn road_width_m(&self) -> f64 {
        self.road_width_px * self.scales.vision_mpp
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        self.apply_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Apply sectioned `key = value` text on top of the current values.
    pub fn apply_str(&mut self, text: &str) -> Result<()> {
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split(['#', ';']).next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') && line.ends_with(']') {
                section = line[1..line.len() - 1].trim().to_ascii_lowercase();
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!("line {}: expected key = value", lineno + 1)));
            };
            let key = key.trim().to_ascii_lowercase();
            let value = value.trim();
            self.apply_key(&section, &key, value)
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    fn apply_key(&mut self, section: &str, key: &str, value: &str) -> std::result::Result<(), String> {
        let num = || -> std::result::Result<f64, String> {
            value.parse::<f64>().map_err(|_| format!("bad number `{value}` for {key}"))
        };
        let int = || -> std::result::Result<usize, String> {
            value.parse::<usize>().map_err(|_| format!("bad integer `{value}` for {key}"))
        };
        match section {
            "vehicle" => match key {
                "wheelbase" => self.vehicle.wheelbase = num()?,
                "max_steer" => self.vehicle.max_steer = num()?,
                "steer_slew" => self.vehicle.steer_slew = num()?,
                "dt" => self.vehicle.dt = num()?,
                _ => return Err(format!("unknown key `{key}` in [vehicle]")),
            },
            "pure_pursuit_vision" | "pure_pursuit_gps" => {
                let pp = if section == "pure_pursuit_vision" {
                    &mut self.pp_vision
                } else {
                    &mut self.pp_gps
                };
                match key {
                    "ld_base" => pp.ld_base = num()?,
                    "ld_amplitude" => pp.ld_amplitude = num()?,
                    "ld_center" => pp.ld_center = num()?,
                    "ld_width" => pp.ld_width = num()?,
                    "kp" => pp.pid.kp = num()?,
                    "ki" => pp.pid.ki = num()?,
                    "kd" => pp.pid.kd = num()?,
                    "integral_limit" => pp.integral_limit = num()?,
                    "slew" => pp.slew = num()?,
                    "lookahead_formula" => {
                        pp.formula = match value.to_ascii_lowercase().as_str() {
                            "logistic" => LookaheadFormula::Logistic,
                            "literal" => LookaheadFormula::Literal,
                            other => return Err(format!("unknown lookahead formula `{other}`")),
                        }
                    }
                    _ => return Err(format!("unknown key `{key}` in [{section}]")),
                }
            }
            "stanley" => match key {
                "k" => self.stanley.k = num()?,
                "ks" => self.stanley.ks = num()?,
                "k1" => self.stanley.k1 = num()?,
                "k2" => self.stanley.k2 = num()?,
                _ => return Err(format!("unknown key `{key}` in [stanley]")),
            },
            "lane" => match key {
                "erode_kernel" => self.lane.erode_kernel = int()?,
                "erode_iterations" => self.lane.erode_iterations = int()?,
                "lane_width_px" => self.lane.lane_width_px = num()?,
                _ => return Err(format!("unknown key `{key}` in [lane]")),
            },
            "selector" => match key {
                "road_width_px" => self.road_width_px = num()?,
                "min_dwell_steps" => self.min_dwell_steps = int()?,
                _ => return Err(format!("unknown key `{key}` in [selector]")),
            },
            "frames" => match key {
                "vision_mpp" => self.scales.vision_mpp = num()?,
                "gps_mpp" => self.scales.gps_mpp = num()?,
                _ => return Err(format!("unknown key `{key}` in [frames]")),
            },
            "sim" => match key {
                "gps_noise_sigma" => self.gps_noise_sigma = num()?,
                "corridor_margin" => self.corridor_margin_m = num()?,
                _ => return Err(format!("unknown key `{key}` in [sim]")),
            },
            scenario if crate::sim::SCENARIO_NAMES.contains(&scenario) => {
                let entry = self.scenarios.entry(scenario.to_string()).or_default();
                match key {
                    "speed_kmh" => entry.speed_kmh = Some(num()?),
                    "duration_s" => entry.duration_s = Some(num()?),
                    "gps_noise_sigma" => entry.gps_noise_sigma = Some(num()?),
                    _ => return Err(format!("unknown key `{key}` in [{scenario}]")),
                }
            }
            "" => return Err(format!("key `{key}` outside any [section]")),
            other => return Err(format!("unknown section `[{other}]`")),
        }
        Ok(())
    }
}
