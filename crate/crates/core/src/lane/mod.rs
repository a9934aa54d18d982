//! Lane processing: from a labeled segmentation raster to per-lane polynomial
//! fits and the 31-point driving guidance line.
//!
//! The stages mirror the perception post-processing chain: optional inverse
//! perspective mapping to a top view, per-label erosion to thin the lanes,
//! pixel extraction, least-squares fitting at degrees 1..3 with the smallest
//! mean squared residual winning, and center-line construction with a
//! half-road offset fallback when only one lane is visible.

mod fit;
mod guidance;
mod homography;
mod mask;
mod morphology;

pub use fit::{polyfit_least_squares, select_best_fit, PolyFit};
pub use guidance::{extract_lane_pixels, guidance_line, GuidanceLine, GuidanceSource, GUIDANCE_POINTS};
pub use homography::{apply_ipm, Homography};
pub use mask::SegMask;
pub use morphology::erode;

use crate::geometry::Point2;
use crate::Result;

/// Tunables of the mask-to-guidance pipeline.
#[derive(Debug, Clone, Copy)]
pub struct LaneConfig {
    /// Erosion structuring-element size (odd, >= 3).
    pub erode_kernel: usize,
    /// Number of erosion passes.
    pub erode_iterations: usize,
    /// Road width W_r in pixels of the frame, used for the one-lane offset.
    pub lane_width_px: f64,
}

impl Default for LaneConfig {
    fn default() -> Self {
        Self {
            erode_kernel: 3,
            erode_iterations: 1,
            lane_width_px: 100.0,
        }
    }
}

/// Per-lane fits plus the guidance line produced from one mask.
#[derive(Debug, Clone)]
pub struct LaneAnalysis {
    /// Selected fit per lane instance (left-left, left, right, right-right).
    /// Lanes too sparse or degenerate to fit are `None`.
    pub fits: [Option<PolyFit>; 4],
    pub guidance: GuidanceLine,
}

/// Run the full pipeline on one mask.
///
/// Lanes in the top view run roughly vertically, so each lane is fitted with
/// the image row as the independent variable (column = f(row)); the guidance
/// stations are evenly spaced rows from the bottom of the frame to the top.
pub fn process_mask(mask: &SegMask, ipm: Option<&Homography>, cfg: &LaneConfig) -> Result<LaneAnalysis> {
    let top_view = match ipm {
        Some(h) => apply_ipm(mask, h, (mask.width, mask.height))?,
        None => mask.clone(),
    };

    let mut eroded = top_view;
    for _ in 0..cfg.erode_iterations {
        eroded = erode(&eroded, cfg.erode_kernel)?;
    }

    let lanes = extract_lane_pixels(&eroded);
    let mut fits: [Option<PolyFit>; 4] = [None, None, None, None];
    for (i, pixels) in lanes.iter().enumerate() {
        if pixels.len() < 4 {
            continue;
        }
        // Swap to (row, column) so the near-vertical lane has a single-valued fit.
        let rotated: Vec<Point2> = pixels.iter().map(|p| Point2::new(p.y, p.x)).collect();
        fits[i] = select_best_fit(&rotated).ok();
    }

    let guidance = guidance_line(&fits, cfg.lane_width_px, eroded.width, eroded.height);
    Ok(LaneAnalysis { fits, guidance })
}
