//! Logistic regression via iteratively reweighted least squares.
//!
//! This is the one model family the crate fits: pooled person-period
//! regressions for discrete-time cause-specific hazards. The solver is a
//! damped Newton iteration on the (optionally ridge-penalized) deviance with
//! step halving, a Cholesky solve of the weighted normal equations, and
//! explicit detection of rank deficiency and separation. The ridge penalty
//! skips columns labeled `"intercept"`.

use thiserror::Error;

const MAX_ITERATIONS: usize = 100;
const MAX_HALVINGS: usize = 30;
const SCORE_TOL: f64 = 1e-8;
const DEVIANCE_REL_TOL: f64 = 1e-10;
/// Fitted probabilities are clamped to [PROB_FLOOR, 1 - PROB_FLOOR].
const PROB_FLOOR: f64 = 1e-12;
/// A fit is flagged as separated when every fitted probability reproduces
/// its outcome to within this distance. The score-based exit already fires
/// near residuals of 1e-9, so this must sit well above that.
const SEPARATION_PROB_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum GlmError {
    #[error("design matrix row has {got} values, expected {expected}")]
    RowLength { expected: usize, got: usize },
    #[error("design matrix contains non-finite values in column '{0}'")]
    NonFinite(String),
    #[error("outcome vector has {got} entries for {rows} design rows")]
    OutcomeLength { rows: usize, got: usize },
    #[error("outcomes must be 0 or 1, found {0}")]
    OutcomeNotBinary(f64),
    #[error("need at least as many rows as columns, got {rows} rows for {cols} columns")]
    TooFewRows { rows: usize, cols: usize },
    #[error("design is rank deficient: column '{0}' is linearly dependent on preceding columns")]
    RankDeficient(String),
    #[error(
        "outcome is separated (fitted probabilities collapsed to 0/1 with unbounded \
         coefficients); refit with a ridge penalty, e.g. --ridge 1e-4"
    )]
    Separation,
    #[error("no convergence after {iterations} iterations (max |score| = {max_score:.3e})")]
    NotConverged { iterations: usize, max_score: f64 },
    #[error("ridge penalty must be finite and non-negative, got {0}")]
    BadRidge(f64),
}

/// Dense row-major design matrix with labeled columns.
#[derive(Clone, Debug)]
pub struct DesignMatrix {
    labels: Vec<String>,
    data: Vec<f64>,
    nrows: usize,
}

impl DesignMatrix {
    pub fn new(labels: Vec<String>) -> Self {
        Self { labels, data: Vec::new(), nrows: 0 }
    }

    pub fn with_row_capacity(labels: Vec<String>, rows: usize) -> Self {
        let cap = rows * labels.len();
        Self { labels, data: Vec::with_capacity(cap), nrows: 0 }
    }

    pub fn push_row(&mut self, row: &[f64]) -> Result<(), GlmError> {
        if row.len() != self.labels.len() {
            return Err(GlmError::RowLength { expected: self.labels.len(), got: row.len() });
        }
        self.data.extend_from_slice(row);
        self.nrows += 1;
        Ok(())
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        let p = self.labels.len();
        &self.data[i * p..(i + 1) * p]
    }
}

/// Converged logistic fit: coefficients plus the diagnostics a run manifest
/// records.
#[derive(Clone, Debug, serde::Serialize)]
pub struct LogisticFit {
    labels: Vec<String>,
    coefficients: Vec<f64>,
    iterations: usize,
    deviance: f64,
    max_score: f64,
    ridge: f64,
}

impl LogisticFit {
    /// Builds a fit directly from coefficients. Intended for tests and for
    /// counterfactual surgery on fitted models (e.g. zeroing treatment
    /// terms); diagnostics are blank.
    pub fn from_coefficients(labels: Vec<String>, coefficients: Vec<f64>) -> Self {
        assert_eq!(labels.len(), coefficients.len());
        Self { labels, coefficients, iterations: 0, deviance: f64::NAN, max_score: f64::NAN, ridge: 0.0 }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn coefficients_mut(&mut self) -> &mut [f64] {
        &mut self.coefficients
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn deviance(&self) -> f64 {
        self.deviance
    }

    pub fn max_score(&self) -> f64 {
        self.max_score
    }
}

/// Fits a logistic regression of `y` on `x`, maximizing the log-likelihood
/// minus `ridge/2` times the squared norm of the non-intercept coefficients.
pub fn fit_logistic(x: &DesignMatrix, y: &[f64], ridge: f64) -> Result<LogisticFit, GlmError> {
    let n = x.nrows();
    let p = x.ncols();
    if y.len() != n {
        return Err(GlmError::OutcomeLength { rows: n, got: y.len() });
    }
    if n < p {
        return Err(GlmError::TooFewRows { rows: n, cols: p });
    }
    if !ridge.is_finite() || ridge < 0.0 {
        return Err(GlmError::BadRidge(ridge));
    }
    for &v in y {
        if v != 0.0 && v != 1.0 {
            return Err(GlmError::OutcomeNotBinary(v));
        }
    }
    for i in 0..n {
        let row = x.row(i);
        for (j, &v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(GlmError::NonFinite(x.labels[j].clone()));
            }
        }
    }

    // Penalty mask: intercept columns are never shrunk.
    let penalized: Vec<f64> =
        x.labels.iter().map(|l| if l == "intercept" { 0.0 } else { 1.0 }).collect();

    let mut beta = vec![0.0; p];
    let mut eta = vec![0.0; n];
    let mut dev = penalized_deviance(x, y, &beta, &mut eta, ridge, &penalized);

    let mut hessian = vec![0.0; p * p];
    let mut score = vec![0.0; p];
    let mut iterations = 0;
    let mut max_score = f64::INFINITY;

    while iterations < MAX_ITERATIONS {
        iterations += 1;

        score.iter_mut().for_each(|s| *s = 0.0);
        hessian.iter_mut().for_each(|h| *h = 0.0);
        for i in 0..n {
            let row = x.row(i);
            let mu = sigmoid(eta[i]);
            let w = mu * (1.0 - mu);
            let r = y[i] - mu;
            for j in 0..p {
                score[j] += row[j] * r;
                let wj = w * row[j];
                for k in j..p {
                    hessian[j * p + k] += wj * row[k];
                }
            }
        }
        for j in 0..p {
            score[j] -= ridge * penalized[j] * beta[j];
            hessian[j * p + j] += ridge * penalized[j];
        }
        max_score = score.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        if max_score < SCORE_TOL {
            return finish(x, y, beta, iterations, dev, max_score, ridge, &eta);
        }

        let delta = match cholesky_solve_upper(&mut hessian.clone(), &score, p) {
            Ok(d) => d,
            Err(col) => {
                // A collapsed weight matrix during a runaway fit is
                // separation, not structural rank deficiency.
                if ridge == 0.0 && iterations > 1 && looks_separated(&eta, y) {
                    return Err(GlmError::Separation);
                }
                return Err(GlmError::RankDeficient(x.labels[col].clone()));
            }
        };

        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let candidate: Vec<f64> =
                beta.iter().zip(&delta).map(|(b, d)| b + step * d).collect();
            let cand_dev = penalized_deviance(x, y, &candidate, &mut eta, ridge, &penalized);
            if cand_dev <= dev + 1e-12 {
                let rel_change = (dev - cand_dev).abs() / (dev.abs() + 1e-10);
                beta = candidate;
                dev = cand_dev;
                accepted = true;
                if rel_change < DEVIANCE_REL_TOL {
                    let max_score = max_abs_score(x, y, &eta, &beta, ridge, &penalized);
                    return finish(x, y, beta, iterations, dev, max_score, ridge, &eta);
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // The deviance cannot be improved along the Newton direction;
            // treat the current point as stationary.
            refresh_eta(x, &beta, &mut eta);
            let max_score = max_abs_score(x, y, &eta, &beta, ridge, &penalized);
            return finish(x, y, beta, iterations, dev, max_score, ridge, &eta);
        }
    }

    refresh_eta(x, &beta, &mut eta);
    if ridge == 0.0 && looks_separated(&eta, y) {
        return Err(GlmError::Separation);
    }
    Err(GlmError::NotConverged { iterations, max_score })
}

#[allow(clippy::too_many_arguments)]
fn finish(
    x: &DesignMatrix,
    y: &[f64],
    beta: Vec<f64>,
    iterations: usize,
    dev: f64,
    max_score: f64,
    ridge: f64,
    eta: &[f64],
) -> Result<LogisticFit, GlmError> {
    if ridge == 0.0 && looks_separated(eta, y) {
        return Err(GlmError::Separation);
    }
    Ok(LogisticFit {
        labels: x.labels.clone(),
        coefficients: beta,
        iterations,
        deviance: dev,
        max_score,
        ridge,
    })
}

/// The penalized score's largest absolute entry at `beta`, with `eta`
/// already refreshed to match.
fn max_abs_score(
    x: &DesignMatrix,
    y: &[f64],
    eta: &[f64],
    beta: &[f64],
    ridge: f64,
    penalized: &[f64],
) -> f64 {
    let p = beta.len();
    let mut score = vec![0.0; p];
    for i in 0..x.nrows() {
        let r = y[i] - sigmoid(eta[i]);
        for (j, &v) in x.row(i).iter().enumerate() {
            score[j] += v * r;
        }
    }
    for j in 0..p {
        score[j] -= ridge * penalized[j] * beta[j];
    }
    score.iter().fold(0.0f64, |m, s| m.max(s.abs()))
}

/// A model that reproduces every outcome to within tolerance has no finite
/// maximizer: scaling the linear predictor up always improves the
/// likelihood. That is separation, whatever the coefficient scale.
fn looks_separated(eta: &[f64], y: &[f64]) -> bool {
    eta.iter().zip(y).all(|(&e, &yi)| (yi - sigmoid(e)).abs() < SEPARATION_PROB_TOL)
}

fn refresh_eta(x: &DesignMatrix, beta: &[f64], eta: &mut [f64]) {
    for i in 0..x.nrows() {
        eta[i] = dot(x.row(i), beta);
    }
}

/// -2 log-likelihood plus the ridge term, evaluated stably through the
/// linear predictor; `eta` is refreshed as a side effect.
fn penalized_deviance(
    x: &DesignMatrix,
    y: &[f64],
    beta: &[f64],
    eta: &mut [f64],
    ridge: f64,
    penalized: &[f64],
) -> f64 {
    let mut dev = 0.0;
    for i in 0..x.nrows() {
        let e = dot(x.row(i), beta);
        eta[i] = e;
        // -[y ln mu + (1-y) ln(1-mu)] = softplus(e) - y e
        dev += 2.0 * (softplus(e) - y[i] * e);
    }
    let pen: f64 =
        beta.iter().zip(penalized).map(|(b, m)| m * b * b).sum();
    dev + ridge * pen
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

#[inline]
fn softplus(t: f64) -> f64 {
    if t > 30.0 {
        t
    } else {
        t.exp().ln_1p()
    }
}

/// Solves the symmetric positive definite system stored in the upper
/// triangle of `a` (p x p, row-major) by Cholesky factorization. Returns the
/// index of the first column whose pivot collapses.
fn cholesky_solve_upper(a: &mut [f64], b: &[f64], p: usize) -> Result<Vec<f64>, usize> {
    let tol = {
        let max_diag = (0..p).fold(0.0f64, |m, j| m.max(a[j * p + j].abs()));
        (max_diag * 1e-12).max(f64::MIN_POSITIVE)
    };
    // In-place upper Cholesky: a becomes R with R' R = A.
    for j in 0..p {
        let mut d = a[j * p + j];
        for k in 0..j {
            d -= a[k * p + j] * a[k * p + j];
        }
        if !(d > tol) {
            return Err(j);
        }
        let r = d.sqrt();
        a[j * p + j] = r;
        for i in j + 1..p {
            let mut v = a[j * p + i];
            for k in 0..j {
                v -= a[k * p + j] * a[k * p + i];
            }
            a[j * p + i] = v / r;
        }
    }
    // Forward then backward substitution.
    let mut z = b.to_vec();
    for j in 0..p {
        for k in 0..j {
            z[j] -= a[k * p + j] * z[k];
        }
        z[j] /= a[j * p + j];
    }
    for j in (0..p).rev() {
        for k in j + 1..p {
            z[j] -= a[j * p + k] * z[k];
        }
        z[j] /= a[j * p + j];
    }
    Ok(z)
}

/// Fitted probability for one design row, clamped away from 0 and 1 so that
/// downstream products of survival terms never degenerate.
pub fn predict_prob(fit: &LogisticFit, row: &[f64]) -> Result<f64, GlmError> {
    if row.len() != fit.coefficients.len() {
        return Err(GlmError::RowLength { expected: fit.coefficients.len(), got: row.len() });
    }
    let mu = sigmoid(dot(row, &fit.coefficients));
    Ok(mu.clamp(PROB_FLOOR, 1.0 - PROB_FLOOR))
}
