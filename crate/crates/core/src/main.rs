//! Command-line front end: run scenarios, compare trackers, process masks.

use clap::{Parser, Subcommand};
use hybrid_tracker::config::Config;
use hybrid_tracker::lane::{process_mask, SegMask};
use hybrid_tracker::sim::{
    build_scenario, compute_metrics, run_matrix, simulate, MatrixCell, SimOptions, TrackerChoice,
    COMPLEX_SCENARIOS, NORMAL_SCENARIOS, SCENARIO_NAMES,
};
use serde::Serialize;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "hybrid-tracker",
    about = "Closed-loop path-tracking simulator: three geometric trackers and the reliability-driven hybrid"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate one scenario under one tracker and write the log + metrics.
    Run {
        /// Scenario name, or a config file containing one scenario section.
        #[arg(long)]
        scenario: String,
        /// pp-vision | pp-gps | stanley-gps | hybrid
        #[arg(long)]
        tracker: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Control timestep override, seconds.
        #[arg(long)]
        dt: Option<f64>,
        /// Output directory for the trajectory and metrics files.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Trajectory file format: csv | json.
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Run all scenarios x all trackers and check the success pattern.
    Matrix {
        /// Restrict to `normal` or `complex` scenarios.
        #[arg(long)]
        only: Option<String>,
    },
    /// Fit the lanes of a segmentation mask (binary PGM, labels 0..4).
    Fit { mask: PathBuf },
    /// List scenario and tracker names.
    List,
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version requests are not usage errors.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };

    let cfg = match Config::from_env() {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("hybrid-tracker: config error: {e}");
            return 1;
        }
    };

    match cli.cmd {
        Cmd::Run {
            scenario,
            tracker,
            seed,
            dt,
            out,
            format,
        } => cmd_run(cfg, &scenario, &tracker, seed, dt, &out, &format),
        Cmd::Matrix { only } => cmd_matrix(cfg, only.as_deref()),
        Cmd::Fit { mask } => cmd_fit(&mask),
        Cmd::List => {
            println!("scenarios:");
            for name in SCENARIO_NAMES {
                println!("  {name}");
            }
            println!("trackers:");
            for choice in TrackerChoice::ALL {
                println!("  {}", choice.as_str());
            }
            0
        }
    }
}

#[derive(Serialize)]
struct TrajectoryJson<'a> {
    scenario: &'a str,
    tracker: &'a str,
    success: bool,
    rows: &'a [hybrid_tracker::sim::LogRow],
}

fn cmd_run(
    mut cfg: Config,
    scenario_arg: &str,
    tracker: &str,
    seed: u64,
    dt: Option<f64>,
    out: &Path,
    format: &str,
) -> i32 {
    let Some(choice) = TrackerChoice::parse(tracker) else {
        eprintln!(
            "hybrid-tracker: unknown tracker `{tracker}`; valid: pp-vision, pp-gps, stanley-gps, hybrid"
        );
        return 1;
    };
    if !matches!(format, "csv" | "json") {
        eprintln!("hybrid-tracker: unknown format `{format}`; valid: csv, json");
        return 1;
    }

    // A scenario argument naming an existing file is a config with exactly
    // one scenario section.
    let scenario_name = if Path::new(scenario_arg).is_file() {
        if let Err(e) = cfg.apply_file(Path::new(scenario_arg)) {
            eprintln!("hybrid-tracker: {e}");
            return 1;
        }
        match cfg.scenarios.len() {
            1 => cfg.scenarios.keys().next().unwrap().clone(),
            n => {
                eprintln!(
                    "hybrid-tracker: scenario config `{scenario_arg}` must contain exactly one scenario section, found {n}"
                );
                return 1;
            }
        }
    } else {
        scenario_arg.to_string()
    };

    let scenario = match build_scenario(&scenario_name, &cfg) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("hybrid-tracker: {e}");
            return 1;
        }
    };

    let opts = SimOptions {
        seed,
        dt_override: dt,
        ..SimOptions::default()
    };
    let result = simulate(&scenario, choice, &cfg, &opts)
        .and_then(|log| compute_metrics(&log, &scenario, &cfg.vehicle).map(|m| (log, m)));
    let (log, metrics) = match result {
        Ok(pair) => pair,
        Err(e) => {
            eprintln!("hybrid-tracker: {e}");
            return 1;
        }
    };

    let stem = format!("{}_{}", scenario.name, choice.as_str());
    let write = |name: &str, bytes: &[u8]| -> std::io::Result<PathBuf> {
        std::fs::create_dir_all(out)?;
        let path = out.join(name);
        std::fs::write(&path, bytes)?;
        Ok(path)
    };

    let traj = match format {
        "json" => {
            let body = TrajectoryJson {
                scenario: &scenario.name,
                tracker: choice.as_str(),
                success: log.success,
                rows: &log.rows,
            };
            write(
                &format!("{stem}.json"),
                serde_json::to_string_pretty(&body).expect("serialize").as_bytes(),
            )
        }
        _ => write(&format!("{stem}.csv"), log.to_csv().as_bytes()),
    };
    let metrics_file = write(
        &format!("{stem}.metrics.json"),
        serde_json::to_string_pretty(&metrics).expect("serialize").as_bytes(),
    );
    match (traj, metrics_file) {
        (Ok(t), Ok(m)) => {
            println!("wrote {} and {}", t.display(), m.display());
        }
        (Err(e), _) | (_, Err(e)) => {
            eprintln!("hybrid-tracker: cannot write output: {e}");
            return 1;
        }
    }

    if log.success {
        0
    } else {
        eprintln!(
            "hybrid-tracker: tracking failure on `{}` with {} (max deviation {:.2} m)",
            scenario.name,
            choice.as_str(),
            log.max_deviation
        );
        2
    }
}

fn cmd_matrix(cfg: Config, only: Option<&str>) -> i32 {
    let scenarios: Vec<&str> = match only {
        None => SCENARIO_NAMES.to_vec(),
        Some("normal") => NORMAL_SCENARIOS.to_vec(),
        Some("complex") => COMPLEX_SCENARIOS.to_vec(),
        Some(other) => {
            eprintln!("hybrid-tracker: unknown group `{other}`; valid: normal, complex");
            return 1;
        }
    };

    let cells = match run_matrix(&cfg, &scenarios, 42) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("hybrid-tracker: {e}");
            return 1;
        }
    };

    print_matrix(&scenarios, &cells);

    let report = serde_json::to_string_pretty(&cells).expect("serialize");
    if let Err(e) = std::fs::write("matrix_report.json", report) {
        eprintln!("hybrid-tracker: cannot write matrix_report.json: {e}");
        return 1;
    }
    println!("wrote matrix_report.json");

    let deviations: Vec<&MatrixCell> = cells.iter().filter(|c| c.success != c.expected).collect();
    if deviations.is_empty() {
        0
    } else {
        eprintln!("hybrid-tracker: {} cell(s) deviate from the expected pattern:", deviations.len());
        for c in deviations {
            eprintln!(
                "  {} / {}: got {}, expected {}",
                c.scenario,
                c.tracker.as_str(),
                mark(c.success),
                mark(c.expected)
            );
        }
        3
    }
}

fn mark(success: bool) -> &'static str {
    if success {
        "o"
    } else {
        "x"
    }
}

fn print_matrix(scenarios: &[&str], cells: &[MatrixCell]) {
    println!("{:<14} {:>10} {:>8} {:>12} {:>8}", "scenario", "pp-vision", "pp-gps", "stanley-gps", "hybrid");
    for name in scenarios {
        let row: Vec<&MatrixCell> = cells.iter().filter(|c| c.scenario == *name).collect();
        let get = |choice: TrackerChoice| {
            row.iter()
                .find(|c| c.tracker == choice)
                .map(|c| mark(c.success))
                .unwrap_or("?")
        };
        println!(
            "{:<14} {:>10} {:>8} {:>12} {:>8}",
            name,
            get(TrackerChoice::PpVision),
            get(TrackerChoice::PpGps),
            get(TrackerChoice::StanleyGps),
            get(TrackerChoice::Hybrid),
        );
    }
    println!();
    println!(
        "{:<14} {:<12} {:>9} {:>9} {:>9} {:>9} {:>10}",
        "scenario", "tracker", "rmse_lat", "rmse_lon", "distance", "rmse_yaw", "rmse_steer"
    );
    for c in cells {
        println!(
            "{:<14} {:<12} {:>9.3} {:>9.3} {:>9.3} {:>9.3} {:>10.3}",
            c.scenario,
            c.tracker.as_str(),
            c.metrics.rmse_lateral,
            c.metrics.rmse_longitudinal,
            c.metrics.distance,
            c.metrics.rmse_yaw,
            c.metrics.rmse_steer,
        );
    }
}

#[derive(Serialize)]
struct FitLane<'a> {
    lane: &'a str,
    degree: usize,
    coefficients: &'a [f64],
    metric: f64,
}

fn cmd_fit(mask_path: &Path) -> i32 {
    let bytes = match std::fs::read(mask_path) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("hybrid-tracker: cannot read {}: {e}", mask_path.display());
            return 1;
        }
    };
    let mask = match SegMask::from_pgm(&bytes) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("hybrid-tracker: {e}");
            return 1;
        }
    };
    let analysis = match process_mask(&mask, None, &Default::default()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("hybrid-tracker: {e}");
            return 1;
        }
    };

    let lane_names = ["left-left", "left", "right", "right-right"];
    let lanes: Vec<Option<FitLane>> = analysis
        .fits
        .iter()
        .enumerate()
        .map(|(i, f)| {
            f.as_ref().map(|fit| FitLane {
                lane: lane_names[i],
                degree: fit.degree,
                coefficients: &fit.coefficients,
                metric: fit.metric,
            })
        })
        .collect();

    #[derive(Serialize)]
    struct FitOutput<'a> {
        lanes: Vec<Option<FitLane<'a>>>,
        guidance: &'a hybrid_tracker::lane::GuidanceLine,
    }
    let out = FitOutput {
        lanes,
        guidance: &analysis.guidance,
    };
    println!("{}", serde_json::to_string_pretty(&out).expect("serialize"));
    0
}
