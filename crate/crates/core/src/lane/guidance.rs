//! Lane-pixel extraction and the 31-point driving guidance line.

use super::fit::PolyFit;
use super::mask::SegMask;
use crate::geometry::Point2;
use serde::Serialize;

/// Number of stations sampled along the frame for each lane / the guidance line.
pub const GUIDANCE_POINTS: usize = 31;

/// How the guidance line was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GuidanceSource {
    /// Midpoint of the left and right lane fits.
    BothLanes,
    /// Left lane shifted half a road width to the right.
    LeftOffset,
    /// Right lane shifted half a road width to the left.
    RightOffset,
    /// No usable center lane.
    None,
}

/// Vision-derived center path in the local pixel frame: 31 points ordered
/// from the bottom row of the frame (nearest the vehicle) to the top, empty
/// when no center lane is available.
#[derive(Debug, Clone, Serialize)]
pub struct GuidanceLine {
    pub points: Vec<Point2>,
    pub source: GuidanceSource,
}

impl GuidanceLine {
    pub fn none() -> Self {
        Self {
            points: Vec::new(),
            source: GuidanceSource::None,
        }
    }

    pub fn is_usable(&self) -> bool {
        self.source != GuidanceSource::None && !self.points.is_empty()
    }
}

/// Collect pixel coordinates per lane instance in row-major scan order.
/// Index i holds the pixels labeled i + 1.
pub fn extract_lane_pixels(mask: &SegMask) -> [Vec<Point2>; 4] {
    let mut lanes: [Vec<Point2>; 4] = [Vec::new(), Vec::new(), Vec::new(), Vec::new()];
    for y in 0..mask.height {
        for x in 0..mask.width {
            let label = mask.get(x, y);
            if (1..=4).contains(&label) {
                lanes[(label - 1) as usize].push(Point2::new(x as f64, y as f64));
            }
        }
    }
    lanes
}

/// Build the guidance line from the center-lane fits (index 1 = left lane,
/// index 2 = right lane; fits map image row -> column).
///
/// Stations are 31 evenly spaced rows from the bottom of the frame to the
/// top. With both center lanes present the line is the pointwise midpoint;
/// with one lane it is that lane shifted half the road width toward the
/// center; with neither the line is empty.
pub fn guidance_line(
    fits: &[Option<PolyFit>; 4],
    lane_width_px: f64,
    frame_width: usize,
    frame_height: usize,
) -> GuidanceLine {
    let left = fits[1].as_ref();
    let right = fits[2].as_ref();
    let (source, eval): (GuidanceSource, Box<dyn Fn(f64) -> f64>) = match (left, right) {
        (Some(l), Some(r)) => (
            GuidanceSource::BothLanes,
            Box::new(move |row| 0.5 * (l.eval(row) + r.eval(row))),
        ),
        (Some(l), None) => (
            GuidanceSource::LeftOffset,
            Box::new(move |row| l.eval(row) + lane_width_px / 2.0),
        ),
        (None, Some(r)) => (
            GuidanceSource::RightOffset,
            Box::new(move |row| r.eval(row) - lane_width_px / 2.0),
        ),
        (None, None) => return GuidanceLine::none(),
    };

    let bottom = (frame_height - 1) as f64;
    let x_max = (frame_width - 1) as f64;
    let points = (0..GUIDANCE_POINTS)
        .map(|i| {
            let row = bottom * (1.0 - i as f64 / (GUIDANCE_POINTS - 1) as f64);
            let col = eval(row).clamp(0.0, x_max);
            Point2::new(col, row)
        })
        .collect();
    GuidanceLine { points, source }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lane::fit::select_best_fit;

    fn vertical_fit(x: f64) -> PolyFit {
        PolyFit {
            degree: 1,
            coefficients: vec![x, 0.0],
            metric: 0.0,
        }
    }

    #[test]
    fn extraction_matches_scan_order() {
        let mut m = SegMask::new(5, 5);
        m.set(1, 0, 2);
        m.set(1, 4, 2);
        let lanes = extract_lane_pixels(&m);
        assert!(lanes[0].is_empty() && lanes[2].is_empty() && lanes[3].is_empty());
        assert_eq!(lanes[1], vec![Point2::new(1.0, 0.0), Point2::new(1.0, 4.0)]);
    }

    #[test]
    fn extraction_of_empty_and_full_masks() {
        let m = SegMask::new(4, 3);
        assert!(extract_lane_pixels(&m).iter().all(|l| l.is_empty()));

        let mut m = SegMask::new(4, 3);
        for y in 0..3 {
            for x in 0..4 {
                m.set(x, y, 1);
            }
        }
        assert_eq!(extract_lane_pixels(&m)[0].len(), 12);
    }

    #[test]
    fn midpoint_of_two_vertical_lanes() {
        let fits = [None, Some(vertical_fit(100.0)), Some(vertical_fit(200.0)), None];
        let g = guidance_line(&fits, 100.0, 300, 300);
        assert_eq!(g.source, GuidanceSource::BothLanes);
        assert_eq!(g.points.len(), GUIDANCE_POINTS);
        for p in &g.points {
            assert_eq!(p.x, 150.0);
        }
        assert_eq!(g.points[0].y, 299.0);
        assert_eq!(g.points[GUIDANCE_POINTS - 1].y, 0.0);
    }

    #[test]
    fn single_lane_offsets() {
        let fits = [None, Some(vertical_fit(100.0)), None, None];
        let g = guidance_line(&fits, 100.0, 300, 300);
        assert_eq!(g.source, GuidanceSource::LeftOffset);
        assert!(g.points.iter().all(|p| p.x == 150.0));

        let fits = [None, None, Some(vertical_fit(200.0)), None];
        let g = guidance_line(&fits, 100.0, 300, 300);
        assert_eq!(g.source, GuidanceSource::RightOffset);
        assert!(g.points.iter().all(|p| p.x == 150.0));
    }

    #[test]
    fn no_lanes_means_no_line() {
        let fits = [None, None, None, None];
        let g = guidance_line(&fits, 100.0, 300, 300);
        assert_eq!(g.source, GuidanceSource::None);
        assert!(g.points.is_empty());
        assert!(!g.is_usable());
    }

    /// Mirroring the mask about the frame's vertical center mirrors the
    /// guidance line (left/right lanes swap labels in the mirror).
    #[test]
    fn midpoint_symmetry_under_mirroring() {
        let w = 300usize;
        let mut mask = SegMask::new(w, 300);
        // A gently curving lane pair.
        for y in 0..300 {
            let t = y as f64;
            let left = 90.0 + 0.05 * t + 4e-4 * t * t * 0.3;
            let right = left + 104.0;
            for d in 0..3 {
                mask.set(left as usize + d, y, 2);
                mask.set(right as usize + d, y, 3);
            }
        }
        let mut mirror = SegMask::new(w, 300);
        for y in 0..300 {
            for x in 0..w {
                let label = mask.get(x, y);
                if label != 0 {
                    let swapped = match label {
                        1 => 4,
                        2 => 3,
                        3 => 2,
                        4 => 1,
                        other => other,
                    };
                    mirror.set(w - 1 - x, y, swapped);
                }
            }
        }

        let line = |m: &SegMask| {
            let lanes = extract_lane_pixels(m);
            let mut fits: [Option<PolyFit>; 4] = [None, None, None, None];
            for (i, px) in lanes.iter().enumerate() {
                if px.len() >= 4 {
                    let rot: Vec<Point2> = px.iter().map(|p| Point2::new(p.y, p.x)).collect();
                    fits[i] = select_best_fit(&rot).ok();
                }
            }
            guidance_line(&fits, 100.0, w, 300)
        };

        let g = line(&mask);
        let gm = line(&mirror);
        assert_eq!(g.points.len(), gm.points.len());
        let center = (w - 1) as f64;
        for (a, b) in g.points.iter().zip(&gm.points) {
            assert!((a.x - (center - b.x)).abs() < 1e-6, "{} vs {}", a.x, center - b.x);
            assert_eq!(a.y, b.y);
        }
    }
}
