//! Closed-loop path-tracking library built around three modified geometric
//! steering laws (pure pursuit on vision and GPS paths, Stanley on GPS paths)
//! and a reliability-driven selector that hands control to whichever tracker
//! the current road and sensor conditions favor.
//!
//! The crate is organized around the data flow of the driving stack:
//!
//! * [`plant`] — kinematic bicycle vehicle with a slew-limited steering actuator
//! * [`lane`] — segmentation-mask processing down to a 31-point guidance line
//! * [`path`] — spline densification, frame transforms, tracking-error extraction
//! * [`trackers`] — the steering laws themselves
//! * [`selector`] — GPS/lane reliability gates and tracker arbitration
//! * [`sim`] — seven road scenarios, the closed loop, and tracking metrics
//! * [`config`] — runtime parameters and the key=value override format

pub mod config;
pub mod geometry;
pub mod lane;
pub mod path;
pub mod plant;
pub mod selector;
pub mod sim;
pub mod trackers;

mod linalg;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),
    #[error("singular homography (|det| = {0:.3e})")]
    SingularHomography(f64),
    #[error("erosion kernel must be odd and >= 3, got {0}")]
    BadKernel(usize),
    #[error("polynomial fit is under-determined: {points} points for degree {degree}")]
    UnderDetermined { points: usize, degree: usize },
    #[error("rank-deficient fitting system (all x identical?)")]
    RankDeficient,
    #[error("path is empty or too short")]
    EmptyPath,
    #[error("duplicate consecutive spline knots at index {0}")]
    DuplicateKnot(usize),
    #[error("unknown scenario `{0}`; valid: straight, slight_curve, steep_curve, junctions, roundabout, intersection, tunnel")]
    UnknownScenario(String),
    #[error("malformed PGM: {0}")]
    MalformedPgm(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
