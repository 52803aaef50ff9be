//! Restricted cubic spline bases for smooth-in-time hazard models.
//!
//! The basis is the natural cubic spline in truncated-power form: linear
//! beyond the boundary knots, continuous first and second derivatives
//! everywhere, and normalized by the squared boundary-knot span so that
//! coefficients stay on comparable scales. With `m` knots the basis spans
//! `m - 1` columns, the raw value itself first.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SplineError {
    #[error("spline requires at least 3 knots, got {0}")]
    TooFewKnots(usize),
    #[error("knots must be finite and strictly increasing")]
    KnotsNotIncreasing,
    #[error("spline degrees of freedom must be at least 1, got {0}")]
    DegreesOfFreedom(usize),
    #[error("need at least {needed} distinct values for {df} degrees of freedom, got {found}")]
    TooFewDistinct { needed: usize, found: usize, df: usize },
}

/// Knot locations of a restricted cubic spline. Knots are finite and
/// strictly increasing; there are at least 3 of them.
#[derive(Clone, Debug)]
pub struct SplineBasis {
    knots: Vec<f64>,
}

impl SplineBasis {
    pub fn new(knots: Vec<f64>) -> Result<Self, SplineError> {
        if knots.len() < 3 {
            return Err(SplineError::TooFewKnots(knots.len()));
        }
        let increasing = knots
            .windows(2)
            .all(|w| w[0].is_finite() && w[1].is_finite() && w[0] < w[1]);
        if !increasing {
            return Err(SplineError::KnotsNotIncreasing);
        }
        Ok(Self { knots })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Number of basis columns, the linear term included.
    pub fn ncols(&self) -> usize {
        self.knots.len() - 1
    }

    /// Evaluates the basis at `x`: the raw value followed by the restricted
    /// cubic terms. Below the first knot the cubic terms are exactly zero;
    /// above the last knot each column continues linearly.
    pub fn basis_row(&self, x: f64) -> Vec<f64> {
        let m = self.knots.len();
        let k_last = self.knots[m - 1];
        let k_penult = self.knots[m - 2];
        let span = k_last - self.knots[0];
        let norm = span * span;
        let tail = k_last - k_penult;

        let mut row = Vec::with_capacity(m - 1);
        row.push(x);
        for j in 0..m - 2 {
            let kj = self.knots[j];
            let term = cube_plus(x - kj) - cube_plus(x - k_penult) * (k_last - kj) / tail
                + cube_plus(x - k_last) * (k_penult - kj) / tail;
            row.push(term / norm);
        }
        row
    }
}

#[inline]
fn cube_plus(u: f64) -> f64 {
    if u > 0.0 {
        u * u * u
    } else {
        0.0
    }
}

/// Places `df + 1` knots at equally spaced quantiles of the *distinct*
/// values, the minimum and maximum included. Quantiles interpolate linearly
/// between order statistics. Requires at least `df + 1` distinct values so
/// the knots cannot collide.
pub fn make_knots(values: &[f64], df: usize) -> Result<Vec<f64>, SplineError> {
    if df < 1 {
        return Err(SplineError::DegreesOfFreedom(df));
    }
    let mut distinct: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
    distinct.dedup();
    let n = distinct.len();
    if n < df + 1 {
        return Err(SplineError::TooFewDistinct { needed: df + 1, found: n, df });
    }
    let knots = (0..=df)
        .map(|i| {
            let h = (i as f64 / df as f64) * (n - 1) as f64;
            let lo = h.floor() as usize;
            let frac = h - lo as f64;
            if lo + 1 < n {
                distinct[lo] + frac * (distinct[lo + 1] - distinct[lo])
            } else {
                distinct[n - 1]
            }
        })
        .collect();
    Ok(knots)
}
