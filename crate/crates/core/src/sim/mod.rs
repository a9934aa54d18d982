//! Closed-loop simulation: the seven road scenarios, synthetic sensors, the
//! fixed-step runner, and the tracking metrics.

mod metrics;
mod runner;
mod scenario;
mod sensors;

pub use metrics::{compute_metrics, MetricsReport};
pub use runner::{
    expected_success, run_matrix, simulate, LogRow, MatrixCell, SimOptions, TrackerChoice,
    TrajectoryLog,
};
pub use scenario::{
    build_scenario, LaneVisibility, PathSample, Scenario, ScenarioPath, COMPLEX_SCENARIOS,
    NORMAL_SCENARIOS, SCENARIO_NAMES,
};
pub use sensors::{render_lane_mask, synthesize_sensors};
