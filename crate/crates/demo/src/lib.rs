//! Browser bindings for the path tracker: three interactive operations
//! behind `wasm_bindgen`, each returning JSON for the page's canvases.
//!
//! Build with `wasm-pack build crates/demo --target web` (or cargo +
//! wasm-bindgen-cli) and serve `crates/demo/www/`.

use hybrid_tracker::config::Config;
use hybrid_tracker::geometry::Point2;
use hybrid_tracker::lane::{extract_lane_pixels, process_mask, SegMask};
use hybrid_tracker::selector::lane_reliability;
use hybrid_tracker::sim::{build_scenario, compute_metrics, simulate, SimOptions, TrackerChoice};
use hybrid_tracker::trackers::{lookahead_distance, LookaheadFormula, PurePursuitParams};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct TrackerSpan {
    from_t: f64,
    to_t: f64,
    tracker: &'static str,
}

#[derive(Serialize)]
struct ScenarioRun {
    scenario: String,
    tracker: String,
    success: bool,
    road_width_m: f64,
    corridor_m: f64,
    ideal: Vec<(f64, f64)>,
    trajectory: Vec<(f64, f64)>,
    spans: Vec<TrackerSpan>,
    steer: Vec<(f64, f64)>,
    metrics: serde_json::Value,
}

fn err_json(message: impl std::fmt::Display) -> String {
    serde_json::json!({ "error": message.to_string() }).to_string()
}

/// Run one scenario under one tracker and return the trajectory, the ideal
/// path, per-tracker time spans, the steering trace, and the metrics.
#[wasm_bindgen]
pub fn run_scenario(scenario: &str, tracker: &str, seed: u32) -> String {
    let cfg = Config::default();
    let Some(choice) = TrackerChoice::parse(tracker) else {
        return err_json(format!("unknown tracker `{tracker}`"));
    };
    let sc = match build_scenario(scenario, &cfg) {
        Ok(s) => s,
        Err(e) => return err_json(e),
    };
    let opts = SimOptions {
        seed: seed as u64,
        ..SimOptions::default()
    };
    let log = match simulate(&sc, choice, &cfg, &opts) {
        Ok(l) => l,
        Err(e) => return err_json(e),
    };
    let metrics = match compute_metrics(&log, &sc, &cfg.vehicle) {
        Ok(m) => serde_json::to_value(&m).unwrap_or_default(),
        Err(e) => return err_json(e),
    };

    let ideal: Vec<(f64, f64)> = sc
        .path
        .samples
        .iter()
        .step_by(5)
        .map(|s| (s.x, s.y))
        .collect();
    let trajectory: Vec<(f64, f64)> = log.rows.iter().map(|r| (r.x, r.y)).collect();
    let steer: Vec<(f64, f64)> = log.rows.iter().map(|r| (r.t, r.steer_cmd)).collect();

    let mut spans: Vec<TrackerSpan> = Vec::new();
    for r in &log.rows {
        match spans.last_mut() {
            Some(span) if span.tracker == r.tracker.as_str() => span.to_t = r.t,
            _ => spans.push(TrackerSpan {
                from_t: r.t,
                to_t: r.t,
                tracker: r.tracker.as_str(),
            }),
        }
    }

    let run = ScenarioRun {
        scenario: sc.name.clone(),
        tracker: choice.as_str().to_string(),
        success: log.success,
        road_width_m: sc.road_width_m,
        corridor_m: sc.road_width_m / 2.0 + cfg.corridor_margin_m,
        ideal,
        trajectory,
        spans,
        steer,
        metrics,
    };
    serde_json::to_string(&run).unwrap_or_else(err_json)
}

#[derive(Serialize)]
struct FitDemo {
    width: usize,
    height: usize,
    pixels: Vec<(u16, u16, u8)>,
    guidance: Vec<(f64, f64)>,
    source: String,
    lane_reliable: bool,
    fits: serde_json::Value,
}

/// Rasterize a parametric lane pair (lateral offset in pixels, quadratic
/// bend), run the lane pipeline, and return the eroded pixels, the selected
/// fits, and the guidance line.
#[wasm_bindgen]
pub fn fit_demo(offset_px: f64, bend: f64, visibility: &str) -> String {
    let cfg = Config::default();
    let mut mask = SegMask::new(300, 300);
    let (left_on, right_on) = match visibility {
        "both" => (true, true),
        "left" => (true, false),
        "right" => (false, true),
        "none" => (false, false),
        other => return err_json(format!("unknown visibility `{other}`")),
    };
    for y in 0..300usize {
        let ahead = (299 - y) as f64;
        let center = 150.0 + offset_px + bend * ahead * ahead / 300.0;
        let mut stamp = |x: f64, label: u8| {
            for d in -2..=2i64 {
                let col = x.round() as i64 + d;
                if (0..300).contains(&col) {
                    mask.set(col as usize, y, label);
                }
            }
        };
        if left_on {
            stamp(center - 50.0, 2);
        }
        if right_on {
            stamp(center + 50.0, 3);
        }
    }

    let analysis = match process_mask(&mask, None, &cfg.lane) {
        Ok(a) => a,
        Err(e) => return err_json(e),
    };

    // Ship the eroded pixels the fits actually saw.
    let eroded = hybrid_tracker::lane::erode(&mask, cfg.lane.erode_kernel).unwrap_or(mask);
    let mut pixels = Vec::new();
    for (i, lane) in extract_lane_pixels(&eroded).iter().enumerate() {
        for p in lane.iter().step_by(3) {
            pixels.push((p.x as u16, p.y as u16, (i + 1) as u8));
        }
    }

    let out = FitDemo {
        width: 300,
        height: 300,
        pixels,
        guidance: analysis.guidance.points.iter().map(|p: &Point2| (p.x, p.y)).collect(),
        source: serde_json::to_value(analysis.guidance.source)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default(),
        lane_reliable: lane_reliability(&analysis.guidance, cfg.road_width_px),
        fits: serde_json::to_value(&analysis.fits).unwrap_or_default(),
    };
    serde_json::to_string(&out).unwrap_or_else(err_json)
}

/// Sample the speed-dependent look-ahead curve for one formula reading.
#[wasm_bindgen]
pub fn lookahead_curve(formula: &str) -> String {
    let mut params = PurePursuitParams::vision();
    params.formula = match formula {
        "logistic" => LookaheadFormula::Logistic,
        "literal" => LookaheadFormula::Literal,
        other => return err_json(format!("unknown formula `{other}`")),
    };
    let points: Vec<(f64, f64)> = (0..=120)
        .map(|v| {
            let v = v as f64;
            (v, lookahead_distance(v, &params))
        })
        .collect();
    serde_json::to_string(&serde_json::json!({
        "formula": formula,
        "base": params.ld_base,
        "points": points,
    }))
    .unwrap_or_else(err_json)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_run_shape() {
        let v: serde_json::Value = serde_json::from_str(&run_scenario("steep_curve", "hybrid", 42)).unwrap();
        assert_eq!(v["success"], true);
        assert!(v["trajectory"].as_array().unwrap().len() > 500);
        assert!(v["ideal"].as_array().unwrap().len() > 100);
        assert!(v["metrics"]["rmse_lateral"].as_f64().unwrap() < 1.0);
        assert!(!v["spans"].as_array().unwrap().is_empty());
    }

    #[test]
    fn scenario_run_rejects_unknowns() {
        let v: serde_json::Value = serde_json::from_str(&run_scenario("mars", "hybrid", 1)).unwrap();
        assert!(v["error"].as_str().unwrap().contains("mars"));
        let v: serde_json::Value = serde_json::from_str(&run_scenario("straight", "warp", 1)).unwrap();
        assert!(v["error"].is_string());
    }

    #[test]
    fn fit_demo_centered_lane_is_reliable() {
        let v: serde_json::Value = serde_json::from_str(&fit_demo(0.0, 0.0, "both")).unwrap();
        assert_eq!(v["source"], "both-lanes");
        assert_eq!(v["lane_reliable"], true);
        let guidance = v["guidance"].as_array().unwrap();
        assert_eq!(guidance.len(), 31);
        for p in guidance {
            assert!((p[0].as_f64().unwrap() - 150.0).abs() < 1.0);
        }
    }

    #[test]
    fn fit_demo_offset_trips_the_gate() {
        let v: serde_json::Value = serde_json::from_str(&fit_demo(30.0, 0.0, "both")).unwrap();
        assert_eq!(v["lane_reliable"], false);
        let v: serde_json::Value = serde_json::from_str(&fit_demo(0.0, 0.0, "left")).unwrap();
        assert_eq!(v["source"], "left-offset");
        let v: serde_json::Value = serde_json::from_str(&fit_demo(0.0, 0.0, "none")).unwrap();
        assert_eq!(v["source"], "none");
    }

    #[test]
    fn lookahead_curves_match_the_formulas() {
        let v: serde_json::Value = serde_json::from_str(&lookahead_curve("logistic")).unwrap();
        let pts = v["points"].as_array().unwrap();
        assert_eq!(pts.len(), 121);
        let at20 = pts.iter().find(|p| p[0] == 20.0).unwrap();
        assert!((at20[1].as_f64().unwrap() - 190.0).abs() < 1e-9);
        let v: serde_json::Value = serde_json::from_str(&lookahead_curve("literal")).unwrap();
        let last = v["points"].as_array().unwrap().last().unwrap().clone();
        assert!(last[1].as_f64().unwrap() > 500.0);
    }
}
