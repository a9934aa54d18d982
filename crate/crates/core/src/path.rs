//! Path processing: spline densification of HD-map waypoints, the UTM-to-
//! local-pixel transform, look-ahead target resolution, and nearest-point
//! tracking errors.
//!
//! Local pixel frames are 300x300 with the vehicle at (150, 300) heading
//! up-screen; x grows to the right of the image and y down, so a point ahead
//! of the vehicle has a smaller pixel y.

use crate::geometry::{angle_diff_deg, Point2};
use crate::trackers::TrackingErrors;
use crate::{Error, Result};
use serde::Serialize;

/// Pixel column of the vehicle in a local frame.
pub const FRAME_CENTER_X: f64 = 150.0;
/// Pixel row of the vehicle in a local frame.
pub const FRAME_BOTTOM_Y: f64 = 300.0;
/// Local frame side length in pixels.
pub const FRAME_SIZE: usize = 300;

/// Ordered global waypoints (easting, northing) in meters; nominally 30
/// points at about 1 m spacing when windowed from a map.
#[derive(Debug, Clone, Serialize)]
pub struct GlobalPath {
    pub points: Vec<Point2>,
}

impl GlobalPath {
    pub fn new(points: Vec<Point2>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::EmptyPath);
        }
        for (i, pair) in points.windows(2).enumerate() {
            if pair[0].distance(pair[1]) == 0.0 {
                return Err(Error::DuplicateKnot(i + 1));
            }
        }
        Ok(Self { points })
    }
}

/// One densified sample: position in meters plus the path tangent in degrees.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DensePoint {
    pub x: f64,
    pub y: f64,
    pub yaw: f64,
}

impl DensePoint {
    pub fn position(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }
}

/// Spline-densified path at ~0.1 m spacing with per-point yaw.
#[derive(Debug, Clone, Serialize)]
pub struct DensePath {
    pub points: Vec<DensePoint>,
}

/// Where the vehicle sits in a local pixel frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FrameOrigin {
    /// Vehicle at (150, 300), path ahead toward the top of the frame.
    VehicleAtBottom,
    /// Vehicle at (150, 0), path ahead toward the bottom of the frame.
    VehicleAtTop,
}

impl FrameOrigin {
    pub fn point(&self) -> Point2 {
        match self {
            FrameOrigin::VehicleAtBottom => Point2::new(FRAME_CENTER_X, FRAME_BOTTOM_Y),
            FrameOrigin::VehicleAtTop => Point2::new(FRAME_CENTER_X, 0.0),
        }
    }
}

/// A path expressed in a vehicle-local pixel frame.
#[derive(Debug, Clone, Serialize)]
pub struct LocalPixelPath {
    pub points: Vec<Point2>,
    pub meters_per_pixel: f64,
    pub origin: FrameOrigin,
}

// ---------------------------------------------------------------------------
// Natural cubic spline on chord-length parameter.
// ---------------------------------------------------------------------------

/// Natural cubic spline through 1D values at given parameters.
struct Spline1d {
    t: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots (natural: zero at both ends).
    m: Vec<f64>,
}

impl Spline1d {
    fn build(t: &[f64], y: &[f64]) -> Self {
        let n = t.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm on the interior second derivatives.
            let mut sub = vec![0.0; n - 2];
            let mut diag = vec![0.0; n - 2];
            let mut sup = vec![0.0; n - 2];
            let mut rhs = vec![0.0; n - 2];
            for i in 1..n - 1 {
                let h0 = t[i] - t[i - 1];
                let h1 = t[i + 1] - t[i];
                sub[i - 1] = h0;
                diag[i - 1] = 2.0 * (h0 + h1);
                sup[i - 1] = h1;
                rhs[i - 1] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
            }
            for i in 1..n - 2 {
                let w = sub[i] / diag[i - 1];
                diag[i] -= w * sup[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            let mut sol = vec![0.0; n - 2];
            sol[n - 3] = rhs[n - 3] / diag[n - 3];
            for i in (0..n - 3).rev() {
                sol[i] = (rhs[i] - sup[i] * sol[i + 1]) / diag[i];
            }
            m[1..n - 1].copy_from_slice(&sol);
        }
        Self {
            t: t.to_vec(),
            y: y.to_vec(),
            m,
        }
    }

    fn segment(&self, t: f64) -> usize {
        let n = self.t.len();
        match self.t.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        }
    }

    fn eval(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.t[i + 1] - self.t[i];
        let tau = t - self.t[i];
        let b = (self.y[i + 1] - self.y[i]) / h - h * (2.0 * self.m[i] + self.m[i + 1]) / 6.0;
        let c = self.m[i] / 2.0;
        let d = (self.m[i + 1] - self.m[i]) / (6.0 * h);
        self.y[i] + tau * (b + tau * (c + tau * d))
    }

    fn deriv(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.t[i + 1] - self.t[i];
        let tau = t - self.t[i];
        let b = (self.y[i + 1] - self.y[i]) / h - h * (2.0 * self.m[i] + self.m[i + 1]) / 6.0;
        let c = self.m[i] / 2.0;
        let d = (self.m[i + 1] - self.m[i]) / (6.0 * h);
        b + tau * (2.0 * c + tau * 3.0 * d)
    }
}

/// 2D natural cubic spline on cumulative chord length.
pub struct PathSpline {
    sx: Spline1d,
    sy: Spline1d,
    /// Chord-length parameter of each knot.
    knots: Vec<f64>,
}

impl PathSpline {
    pub fn build(path: &GlobalPath) -> Result<Self> {
        let pts = &path.points;
        if pts.len() < 3 {
            return Err(Error::EmptyPath);
        }
        let mut knots = Vec::with_capacity(pts.len());
        let mut acc = 0.0;
        knots.push(0.0);
        for (i, pair) in pts.windows(2).enumerate() {
            let d = pair[0].distance(pair[1]);
            if d == 0.0 {
                return Err(Error::DuplicateKnot(i + 1));
            }
            acc += d;
            knots.push(acc);
        }
        let xs: Vec<f64> = pts.iter().map(|p| p.x).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.y).collect();
        Ok(Self {
            sx: Spline1d::build(&knots, &xs),
            sy: Spline1d::build(&knots, &ys),
            knots,
        })
    }

    pub fn knot_params(&self) -> &[f64] {
        &self.knots
    }

    pub fn total_param(&self) -> f64 {
        *self.knots.last().unwrap()
    }

    pub fn point_at(&self, t: f64) -> Point2 {
        Point2::new(self.sx.eval(t), self.sy.eval(t))
    }

    /// Tangent angle in degrees at parameter t.
    pub fn yaw_at(&self, t: f64) -> f64 {
        self.sy.deriv(t).atan2(self.sx.deriv(t)).to_degrees()
    }
}

/// Densify global waypoints with a natural cubic spline, resampled at about
/// 0.1 m arc-length steps, with the spline tangent as per-point yaw.
pub fn spline_interpolate(path: &GlobalPath) -> Result<DensePath> {
    spline_interpolate_at(path, 0.1)
}

/// As [`spline_interpolate`] with an explicit arc-length step.
pub fn spline_interpolate_at(path: &GlobalPath, ds: f64) -> Result<DensePath> {
    let spline = PathSpline::build(path)?;
    let total = spline.total_param();

    // Walk the spline with fine parameter steps, emitting a sample each time
    // the accumulated arc length crosses a multiple of ds.
    let fine_steps = ((total / ds).ceil() as usize * 16).max(64);
    let dt = total / fine_steps as f64;

    let mut points = Vec::with_capacity((total / ds) as usize + 2);
    let push = |points: &mut Vec<DensePoint>, spline: &PathSpline, t: f64| {
        let p = spline.point_at(t);
        points.push(DensePoint {
            x: p.x,
            y: p.y,
            yaw: spline.yaw_at(t),
        });
    };
    push(&mut points, &spline, 0.0);

    let mut arc = 0.0;
    let mut next_emit = ds;
    let mut prev = spline.point_at(0.0);
    let mut prev_t = 0.0;
    for i in 1..=fine_steps {
        let t = if i == fine_steps { total } else { i as f64 * dt };
        let p = spline.point_at(t);
        let seg = prev.distance(p);
        while arc + seg >= next_emit && seg > 0.0 {
            let frac = (next_emit - arc) / seg;
            push(&mut points, &spline, prev_t + frac * (t - prev_t));
            next_emit += ds;
        }
        arc += seg;
        prev = p;
        prev_t = t;
    }

    // Close with the endpoint while keeping spacing within [ds/2, 1.5 ds].
    let end = spline.point_at(total);
    let last = points.last().unwrap();
    let tail = Point2::new(last.x, last.y).distance(end);
    if tail >= ds / 2.0 {
        push(&mut points, &spline, total);
    } else if tail > 0.0 {
        points.pop();
        push(&mut points, &spline, total);
    }

    Ok(DensePath { points })
}

// ---------------------------------------------------------------------------
// Global <-> local pixel transform.
// ---------------------------------------------------------------------------

fn rotation_angle(vehicle_yaw_deg: f64) -> f64 {
    (-(90.0 + vehicle_yaw_deg)).to_radians()
}

/// Transform global points into the vehicle-local 300x300 pixel frame.
///
/// The displacement to each path point is rotated by -(90 deg + yaw) and
/// scaled by 1/meters_per_pixel; the vehicle lands on (150, 300) heading
/// up-screen.
pub fn global_to_local(
    path: &GlobalPath,
    vehicle_x: f64,
    vehicle_y: f64,
    vehicle_yaw_deg: f64,
    meters_per_pixel: f64,
) -> LocalPixelPath {
    let theta = rotation_angle(vehicle_yaw_deg);
    let (sin_t, cos_t) = theta.sin_cos();
    let s = 1.0 / meters_per_pixel;
    let points = path
        .points
        .iter()
        .map(|p| {
            let dx = p.x - vehicle_x;
            let dy = p.y - vehicle_y;
            let xr = cos_t * dx - sin_t * dy;
            let yr = sin_t * dx + cos_t * dy;
            Point2::new(FRAME_CENTER_X - s * xr, FRAME_BOTTOM_Y + s * yr)
        })
        .collect();
    LocalPixelPath {
        points,
        meters_per_pixel,
        origin: FrameOrigin::VehicleAtBottom,
    }
}

/// Inverse of [`global_to_local`] for one pixel point.
pub fn local_to_global(
    pixel: Point2,
    vehicle_x: f64,
    vehicle_y: f64,
    vehicle_yaw_deg: f64,
    meters_per_pixel: f64,
) -> Point2 {
    let theta = rotation_angle(vehicle_yaw_deg);
    let (sin_t, cos_t) = theta.sin_cos();
    let xr = (FRAME_CENTER_X - pixel.x) * meters_per_pixel;
    let yr = (pixel.y - FRAME_BOTTOM_Y) * meters_per_pixel;
    // Inverse rotation (transpose).
    let dx = cos_t * xr + sin_t * yr;
    let dy = -sin_t * xr + cos_t * yr;
    Point2::new(vehicle_x + dx, vehicle_y + dy)
}

// ---------------------------------------------------------------------------
// Look-ahead target and nearest-point errors.
// ---------------------------------------------------------------------------

/// Point at exactly distance `ld` from `origin` along the piecewise-linear
/// path, found on the first segment whose endpoints bracket that distance.
/// Beyond the far end the farthest point is returned; short of the near end,
/// the first point.
pub fn lookahead_target(points: &[Point2], origin: Point2, ld: f64) -> Option<Point2> {
    if points.is_empty() {
        return None;
    }
    if points.len() == 1 {
        return Some(points[0]);
    }
    let dist: Vec<f64> = points.iter().map(|p| p.distance(origin)).collect();
    for i in 0..points.len() - 1 {
        let (d0, d1) = (dist[i], dist[i + 1]);
        if (d0 - ld) * (d1 - ld) <= 0.0 {
            let p0 = points[i];
            let v = Point2::new(points[i + 1].x - p0.x, points[i + 1].y - p0.y);
            let w = Point2::new(p0.x - origin.x, p0.y - origin.y);
            let a = v.x * v.x + v.y * v.y;
            let b = 2.0 * (w.x * v.x + w.y * v.y);
            let c = w.x * w.x + w.y * w.y - ld * ld;
            let t = if a == 0.0 {
                0.0
            } else {
                let disc = (b * b - 4.0 * a * c).max(0.0).sqrt();
                let t1 = (-b + disc) / (2.0 * a);
                let t2 = (-b - disc) / (2.0 * a);
                // Prefer the root within the segment that lies farther along.
                let in_range = |t: f64| (-1e-12..=1.0 + 1e-12).contains(&t);
                if in_range(t1) {
                    t1
                } else if in_range(t2) {
                    t2
                } else {
                    ((ld - d0) / (d1 - d0)).clamp(0.0, 1.0)
                }
            }
            .clamp(0.0, 1.0);
            return Some(Point2::new(p0.x + t * v.x, p0.y + t * v.y));
        }
    }
    // No bracketing segment: clamp to the nearer end of the distance range.
    let all_below = dist.iter().all(|&d| d < ld);
    if all_below {
        Some(points[points.len() - 1])
    } else {
        Some(points[0])
    }
}

/// Look-ahead target on a guidance line (vision path), measured from the
/// vehicle origin at the bottom center of the frame.
pub fn densify_vision_path(line: &crate::lane::GuidanceLine, ld_px: f64) -> Result<Point2> {
    if !line.is_usable() {
        return Err(Error::EmptyPath);
    }
    lookahead_target(&line.points, FrameOrigin::VehicleAtBottom.point(), ld_px).ok_or(Error::EmptyPath)
}

/// Nearest dense-path sample to `probe` plus the signed tracking errors.
///
/// The cross-track error magnitude is the distance to the nearest sample,
/// positive when the probe lies right of the path tangent (so a positive
/// error demands a left steer); the heading error is path yaw minus vehicle
/// heading, wrapped to (-180, 180].
pub fn nearest_point_and_errors(dense: &DensePath, probe: Point2, heading_deg: f64) -> Result<TrackingErrors> {
    let (idx, dist) = nearest_index(dense, probe)?;
    let near = &dense.points[idx];
    let tangent = near.yaw.to_radians();
    let ox = probe.x - near.x;
    let oy = probe.y - near.y;
    // Right of the tangent = negative z-component of tangent x offset.
    let side = tangent.sin() * ox - tangent.cos() * oy;
    let cross_track = if side >= 0.0 { dist } else { -dist };
    Ok(TrackingErrors {
        alpha: 0.0,
        cross_track,
        heading: angle_diff_deg(near.yaw, heading_deg),
    })
}

/// Index of and distance to the sample nearest to `probe`.
pub fn nearest_index(dense: &DensePath, probe: Point2) -> Result<(usize, f64)> {
    if dense.points.is_empty() {
        return Err(Error::EmptyPath);
    }
    let mut best = (0usize, f64::INFINITY);
    for (i, p) in dense.points.iter().enumerate() {
        let d = probe.distance(p.position());
        if d < best.1 {
            best = (i, d);
        }
    }
    Ok(best)
}
