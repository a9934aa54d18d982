//! Planar homography and the inverse perspective mapping warp.

use super::mask::SegMask;
use crate::geometry::Point2;
use crate::linalg::solve_square;
use crate::{Error, Result};

/// A 3x3 projective transform, row-major, mapping source pixels to top-view
/// pixels as `(x', y', w')^T = H (x, y, 1)^T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Homography {
    pub h: [f64; 9],
}

impl Homography {
    /// Build from the raw matrix, rejecting near-singular input.
    pub fn new(h: [f64; 9]) -> Result<Self> {
        let d = det3(&h);
        if d.abs() <= 1e-12 {
            return Err(Error::SingularHomography(d));
        }
        Ok(Self { h })
    }

    pub fn identity() -> Self {
        Self {
            h: [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
        }
    }

    pub fn translation(dx: f64, dy: f64) -> Self {
        Self {
            h: [1.0, 0.0, dx, 0.0, 1.0, dy, 0.0, 0.0, 1.0],
        }
    }

    /// Exact homography taking the four `src` points to the four `dst`
    /// points, solved from the 8x8 linear system with `h[8]` fixed to 1.
    pub fn from_correspondences(src: &[Point2; 4], dst: &[Point2; 4]) -> Result<Self> {
        let mut a = vec![0.0; 64];
        let mut b = vec![0.0; 8];
        for i in 0..4 {
            let (x, y) = (src[i].x, src[i].y);
            let (u, v) = (dst[i].x, dst[i].y);
            let r0 = 2 * i;
            let r1 = 2 * i + 1;
            a[r0 * 8..r0 * 8 + 8].copy_from_slice(&[x, y, 1.0, 0.0, 0.0, 0.0, -u * x, -u * y]);
            a[r1 * 8..r1 * 8 + 8].copy_from_slice(&[0.0, 0.0, 0.0, x, y, 1.0, -v * x, -v * y]);
            b[r0] = u;
            b[r1] = v;
        }
        let sol = solve_square(&mut a, &mut b, 8)
            .ok_or(Error::SingularHomography(0.0))?;
        let h = [sol[0], sol[1], sol[2], sol[3], sol[4], sol[5], sol[6], sol[7], 1.0];
        Self::new(h)
    }

    pub fn apply(&self, p: Point2) -> Point2 {
        let h = &self.h;
        let w = h[6] * p.x + h[7] * p.y + h[8];
        Point2::new(
            (h[0] * p.x + h[1] * p.y + h[2]) / w,
            (h[3] * p.x + h[4] * p.y + h[5]) / w,
        )
    }

    /// Inverse via the adjugate; `new` guarantees the determinant is usable.
    pub fn inverse(&self) -> Homography {
        let h = &self.h;
        let d = det3(h);
        let adj = [
            h[4] * h[8] - h[5] * h[7],
            h[2] * h[7] - h[1] * h[8],
            h[1] * h[5] - h[2] * h[4],
            h[5] * h[6] - h[3] * h[8],
            h[0] * h[8] - h[2] * h[6],
            h[2] * h[3] - h[0] * h[5],
            h[3] * h[7] - h[4] * h[6],
            h[1] * h[6] - h[0] * h[7],
            h[0] * h[4] - h[1] * h[3],
        ];
        Homography {
            h: adj.map(|v| v / d),
        }
    }
}

fn det3(h: &[f64; 9]) -> f64 {
    h[0] * (h[4] * h[8] - h[5] * h[7]) - h[1] * (h[3] * h[8] - h[5] * h[6])
        + h[2] * (h[3] * h[7] - h[4] * h[6])
}

/// Warp a mask into a top view of `out_size` = (width, height).
///
/// Every output pixel is inverse-mapped through `h` and takes the label of
/// the nearest source pixel; labels are never interpolated. Out-of-frame
/// samples become background.
pub fn apply_ipm(mask: &SegMask, h: &Homography, out_size: (usize, usize)) -> Result<SegMask> {
    // `Homography::new` already rejects singular input; recheck cheaply in
    // case the matrix was constructed directly.
    let d = det3(&h.h);
    if d.abs() <= 1e-12 {
        return Err(Error::SingularHomography(d));
    }
    let inv = h.inverse();
    let (ow, oh) = out_size;
    let mut out = SegMask::new(ow, oh);
    for v in 0..oh {
        for u in 0..ow {
            let src = inv.apply(Point2::new(u as f64, v as f64));
            let xs = src.x.round();
            let ys = src.y.round();
            if xs >= 0.0 && ys >= 0.0 && (xs as usize) < mask.width && (ys as usize) < mask.height {
                let label = mask.get(xs as usize, ys as usize);
                if label != 0 {
                    out.set(u, v, label);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_warp_is_identity() {
        let mut m = SegMask::new(20, 20);
        for y in 3..17 {
            m.set(5, y, 2);
            m.set(14, y, 3);
        }
        let out = apply_ipm(&m, &Homography::identity(), (20, 20)).unwrap();
        assert_eq!(out, m);
    }

    #[test]
    fn translation_preserves_label_multiset() {
        let mut m = SegMask::new(30, 30);
        for y in 10..20 {
            m.set(10, y, 1);
            m.set(12, y, 4);
        }
        let h = Homography::translation(3.0, -2.0);
        let out = apply_ipm(&m, &h, (30, 30)).unwrap();
        assert_eq!(out.count_label(1), 10);
        assert_eq!(out.count_label(4), 10);
        assert_eq!(out.get(13, 8), 1);
        assert_eq!(out.get(15, 8), 4);
    }

    #[test]
    fn singular_matrix_rejected() {
        assert!(Homography::new([1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 0.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn four_point_correspondence_round_trip() {
        let src = [
            Point2::new(120.0, 200.0),
            Point2::new(180.0, 200.0),
            Point2::new(60.0, 299.0),
            Point2::new(240.0, 299.0),
        ];
        let dst = [
            Point2::new(100.0, 0.0),
            Point2::new(200.0, 0.0),
            Point2::new(100.0, 299.0),
            Point2::new(200.0, 299.0),
        ];
        let h = Homography::from_correspondences(&src, &dst).unwrap();
        for i in 0..4 {
            let p = h.apply(src[i]);
            assert!((p.x - dst[i].x).abs() < 1e-9 && (p.y - dst[i].y).abs() < 1e-9);
        }
        let inv = h.inverse();
        for i in 0..4 {
            let p = inv.apply(dst[i]);
            assert!((p.x - src[i].x).abs() < 1e-9 && (p.y - src[i].y).abs() < 1e-9);
        }
    }

    /// A perspective view of two converging lane borders must warp to
    /// parallel verticals with constant column spacing.
    #[test]
    fn converging_lanes_become_parallel() {
        // Trapezoid in the source: lane borders converge from bottom
        // (y = 299, x = 60/240) toward the vanishing region (y = 100, x = 135/165).
        let src = [
            Point2::new(135.0, 100.0),
            Point2::new(165.0, 100.0),
            Point2::new(60.0, 299.0),
            Point2::new(240.0, 299.0),
        ];
        let dst = [
            Point2::new(100.0, 0.0),
            Point2::new(200.0, 0.0),
            Point2::new(100.0, 299.0),
            Point2::new(200.0, 299.0),
        ];
        let h = Homography::from_correspondences(&src, &dst).unwrap();

        // Analytic check: every point of the continuous borders lands on the
        // verticals x = 100 / x = 200, spacing exactly 100.
        for step in 0..=500 {
            let t = step as f64 / 500.0;
            let y = 100.0 + t * 199.0;
            let left = h.apply(Point2::new(135.0 + t * (60.0 - 135.0), y));
            let right = h.apply(Point2::new(165.0 + t * (240.0 - 165.0), y));
            assert!((left.x - 100.0).abs() < 1e-9);
            assert!((right.x - 200.0).abs() < 1e-9);
            assert!((right.x - left.x - 100.0).abs() < 1e-9);
        }

        // Raster check on a trapezoid whose warp shrinks columns everywhere
        // (near field wider than far field, as a camera sees it), so the
        // half-pixel stamp rounding stays inside one output pixel.
        let src = [
            Point2::new(90.0, 100.0),
            Point2::new(210.0, 100.0),
            Point2::new(60.0, 299.0),
            Point2::new(240.0, 299.0),
        ];
        let h = Homography::from_correspondences(&src, &dst).unwrap();
        let mut mask = SegMask::new(300, 300);
        for step in 0..=199 {
            let t = step as f64 / 199.0;
            let y = (100.0 + t * 199.0).round() as usize;
            let left = (90.0 + t * (60.0 - 90.0)).round() as i64;
            let right = (210.0 + t * (240.0 - 210.0)).round() as i64;
            for d in -1..=1i64 {
                mask.set((left + d) as usize, y, 2);
                mask.set((right + d) as usize, y, 3);
            }
        }
        let top = apply_ipm(&mask, &h, (300, 300)).unwrap();

        // In the top view each populated row should show the stroke centers
        // around columns 100 and 200: spacing constant within a pixel.
        let mut spacings = Vec::new();
        for y in 0..300 {
            let mut left = (None, None);
            let mut right = (None, None);
            for x in 0..300 {
                match top.get(x, y) {
                    2 => {
                        left.0.get_or_insert(x as f64);
                        left.1 = Some(x as f64);
                    }
                    3 => {
                        right.0.get_or_insert(x as f64);
                        right.1 = Some(x as f64);
                    }
                    _ => {}
                }
            }
            if let ((Some(l0), Some(l1)), (Some(r0), Some(r1))) = (left, right) {
                spacings.push((r0 + r1) / 2.0 - (l0 + l1) / 2.0);
            }
        }
        assert!(spacings.len() > 250, "top view rows populated: {}", spacings.len());
        for s in &spacings {
            assert!((s - 100.0).abs() <= 1.0, "spacing {s}");
        }
    }
}
