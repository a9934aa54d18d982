//! Polynomial least squares at degrees 1..3 and the smallest-residual vote.

use crate::geometry::Point2;
use crate::linalg::solve_square;
use crate::{Error, Result};
use serde::Serialize;

/// Metric ties closer than this pick the lower degree.
const TIE_EPS: f64 = 1e-12;

/// One selected least-squares polynomial, constant term first.
#[derive(Debug, Clone, Serialize)]
pub struct PolyFit {
    pub degree: usize,
    pub coefficients: Vec<f64>,
    /// Mean squared residual over the fit's own sample set (pixels^2).
    pub metric: f64,
}

impl PolyFit {
    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.coefficients.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }
}

/// Least-squares polynomial of the requested degree through `points`,
/// fitting y as a function of x.
///
/// The regressor is centered and scaled to [-1, 1] before the normal
/// equations are formed, and the solution is expanded back to plain powers
/// of x, which keeps recovery accurate for pixel-scale coordinates.
pub fn polyfit_least_squares(points: &[Point2], degree: usize) -> Result<PolyFit> {
    assert!((1..=3).contains(&degree), "degree must be 1..=3");
    let n = points.len();
    if n < degree + 1 {
        return Err(Error::UnderDetermined { points: n, degree });
    }

    let mean: f64 = points.iter().map(|p| p.x).sum::<f64>() / n as f64;
    let scale = points
        .iter()
        .map(|p| (p.x - mean).abs())
        .fold(0.0f64, f64::max);
    if scale == 0.0 {
        return Err(Error::RankDeficient);
    }

    let m = degree + 1;
    // Normal equations in the scaled basis t = (x - mean) / scale.
    let mut gram = vec![0.0; m * m];
    let mut rhs = vec![0.0; m];
    for p in points {
        let t = (p.x - mean) / scale;
        let mut powers = [1.0f64; 4];
        for i in 1..m {
            powers[i] = powers[i - 1] * t;
        }
        for i in 0..m {
            rhs[i] += powers[i] * p.y;
            for j in 0..m {
                gram[i * m + j] += powers[i] * powers[j];
            }
        }
    }
    let q = solve_square(&mut gram, &mut rhs, m).ok_or(Error::RankDeficient)?;

    // Residuals in the scaled basis.
    let mut sq_sum = 0.0;
    for p in points {
        let t = (p.x - mean) / scale;
        let mut acc = 0.0;
        for &c in q.iter().rev() {
            acc = acc * t + c;
        }
        let r = p.y - acc;
        sq_sum += r * r;
    }

    // Expand sum q_i ((x - mean)/scale)^i into plain powers of x.
    let mut coefficients = vec![0.0; m];
    for (i, &qi) in q.iter().enumerate() {
        let base = qi / scale.powi(i as i32);
        // (x - mean)^i = sum_k C(i,k) x^k (-mean)^(i-k)
        let mut binom = 1.0;
        #[allow(clippy::needless_range_loop)]
        for k in 0..=i {
            if k > 0 {
                binom = binom * (i - k + 1) as f64 / k as f64;
            }
            coefficients[k] += base * binom * (-mean).powi((i - k) as i32);
        }
    }

    Ok(PolyFit {
        degree,
        coefficients,
        metric: sq_sum / n as f64,
    })
}

/// Fit degrees 1, 2 and 3 and keep the one with the smallest mean squared
/// residual; ties within 1e-12 go to the lowest degree.
pub fn select_best_fit(points: &[Point2]) -> Result<PolyFit> {
    if points.len() < 4 {
        return Err(Error::UnderDetermined {
            points: points.len(),
            degree: 3,
        });
    }
    let mut fits = Vec::with_capacity(3);
    let mut last_err = None;
    for degree in 1..=3 {
        match polyfit_least_squares(points, degree) {
            Ok(f) => fits.push(f),
            Err(e) => last_err = Some(e),
        }
    }
    let Some(best_metric) = fits.iter().map(|f| f.metric).fold(None, |acc: Option<f64>, m| {
        Some(acc.map_or(m, |a| a.min(m)))
    }) else {
        return Err(last_err.unwrap_or(Error::RankDeficient));
    };
    Ok(fits
        .into_iter()
        .find(|f| f.metric <= best_metric + TIE_EPS)
        .expect("at least one fit at the minimum"))
}
