//! Cause-specific discrete-time hazard models.
//!
//! Each cause gets its own logistic regression on its person-period
//! risk-set table. A design row is intercept, treatment, baseline
//! covariates, a time basis evaluated at the interval's grid value, and
//! optionally treatment-by-time interaction columns. The same row builder
//! serves fitting and prediction, so a subject's factual hazard prediction
//! reproduces the training row bitwise.
//!
//! Spline knots are chosen from the pooled event times of both causes, so
//! the two models get comparable flexibility wherever events actually
//! happen. Time enters as the grid value t_s, not the index s: relabeling
//! the grid without moving its points does not change the fit.

use serde::{Deserialize, Serialize};

use crate::dataio::{expand_person_periods, Cause, Cohort, EventCode};
use crate::decomp::ArmHazards;
use crate::exec;
use crate::glm::{fit_logistic, predict_prob, DesignMatrix, GlmError, LogisticFit};
use crate::splines::{make_knots, SplineBasis, SplineError};

#[derive(Debug, thiserror::Error)]
pub enum HazardError {
    #[error("cannot fit {cause} hazard: no events of this cause in the cohort")]
    NoEvents { cause: Cause },
    #[error("model names covariate '{0}' but the cohort does not have it")]
    UnknownCovariate(String),
    #[error("time_df must be at least 1, got {0}")]
    InvalidTimeDf(usize),
    #[error("time basis: {0}")]
    Spline(#[from] SplineError),
    #[error("{cause} hazard fit: {source}")]
    Fit { cause: Cause, source: GlmError },
}

/// Declarative description of one cause's hazard regression.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HazardModelSpec {
    /// Number of time columns: 1 is a plain linear term, df >= 2 a cubic
    /// spline basis with df+1 knots.
    #[serde(default = "default_time_df")]
    pub time_df: usize,
    /// Baseline covariates entering linearly, by cohort column name.
    #[serde(default)]
    pub covariates: Vec<String>,
    /// Whether treatment multiplies each time column.
    #[serde(default = "default_interaction")]
    pub treatment_time_interaction: bool,
    /// Ridge penalty passed to the logistic fit (intercept unpenalized).
    #[serde(default)]
    pub ridge: f64,
}

fn default_time_df() -> usize {
    3
}

fn default_interaction() -> bool {
    true
}

impl Default for HazardModelSpec {
    fn default() -> Self {
        Self {
            time_df: default_time_df(),
            covariates: Vec::new(),
            treatment_time_interaction: default_interaction(),
            ridge: 0.0,
        }
    }
}

/// The two cause-specific model descriptions.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ModelSpec {
    pub target: HazardModelSpec,
    pub competing: HazardModelSpec,
}

impl ModelSpec {
    /// Same description for both causes.
    pub fn shared(spec: HazardModelSpec) -> Self {
        Self { target: spec.clone(), competing: spec }
    }
}

/// Time columns of the design: a raw value for df = 1, else a spline row.
#[derive(Clone, Debug)]
pub enum TimeBasis {
    Linear,
    Spline(SplineBasis),
}

impl TimeBasis {
    fn ncols(&self) -> usize {
        match self {
            TimeBasis::Linear => 1,
            TimeBasis::Spline(b) => b.ncols(),
        }
    }

    fn fill(&self, t: f64, out: &mut Vec<f64>) {
        match self {
            TimeBasis::Linear => out.push(t),
            TimeBasis::Spline(b) => out.extend(b.basis_row(t)),
        }
    }

    pub fn knots(&self) -> Option<&[f64]> {
        match self {
            TimeBasis::Linear => None,
            TimeBasis::Spline(b) => Some(b.knots()),
        }
    }
}

/// One fitted cause-specific model plus everything needed to evaluate it.
#[derive(Debug)]
pub struct CauseFit {
    pub cause: Cause,
    pub fit: LogisticFit,
    pub time_basis: TimeBasis,
    pub spec: HazardModelSpec,
    /// Cohort covariate indices matching `spec.covariates`.
    cov_idx: Vec<usize>,
    /// Number of events in this cause's risk-set table.
    pub events: usize,
    /// Number of person-period rows the fit used.
    pub rows: usize,
}

impl CauseFit {
    /// Fills `out` with this model's design row.
    fn design_row(&self, out: &mut Vec<f64>, treated: bool, covariates: &[f64], t: f64) {
        design_row(
            out,
            treated,
            covariates,
            &self.cov_idx,
            t,
            &self.time_basis,
            self.spec.treatment_time_interaction,
        );
    }
}

/// Both fitted models.
#[derive(Debug)]
pub struct HazardFits {
    pub target: CauseFit,
    pub competing: CauseFit,
}

fn design_labels(spec: &HazardModelSpec, time_cols: usize) -> Vec<String> {
    let mut labels = Vec::with_capacity(2 + spec.covariates.len() + 2 * time_cols);
    labels.push("intercept".to_string());
    labels.push("treatment".to_string());
    labels.extend(spec.covariates.iter().cloned());
    for j in 1..=time_cols {
        labels.push(format!("time_b{j}"));
    }
    if spec.treatment_time_interaction {
        for j in 1..=time_cols {
            labels.push(format!("treat_x_time_b{j}"));
        }
    }
    labels
}

/// The single row builder used for both fitting and prediction.
fn design_row(
    out: &mut Vec<f64>,
    treated: bool,
    covariates: &[f64],
    cov_idx: &[usize],
    t: f64,
    basis: &TimeBasis,
    interaction: bool,
) {
    out.clear();
    let arm = if treated { 1.0 } else { 0.0 };
    out.push(1.0);
    out.push(arm);
    for &c in cov_idx {
        out.push(covariates[c]);
    }
    let time_start = out.len();
    basis.fill(t, out);
    if interaction {
        for j in time_start..time_start + basis.ncols() {
            let v = arm * out[j];
            out.push(v);
        }
    }
}

fn resolve_covariates(cohort: &Cohort, spec: &HazardModelSpec) -> Result<Vec<usize>, HazardError> {
    spec.covariates
        .iter()
        .map(|name| {
            cohort
                .covariate_names()
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| HazardError::UnknownCovariate(name.clone()))
        })
        .collect()
}

fn time_basis(event_times: &[f64], df: usize) -> Result<TimeBasis, HazardError> {
    match df {
        0 => Err(HazardError::InvalidTimeDf(0)),
        1 => Ok(TimeBasis::Linear),
        _ => {
            let knots = make_knots(event_times, df)?;
            Ok(TimeBasis::Spline(SplineBasis::new(knots)?))
        }
    }
}

fn fit_one_cause(
    cohort: &Cohort,
    cause: Cause,
    spec: &HazardModelSpec,
    event_times: &[f64],
) -> Result<CauseFit, HazardError> {
    let cov_idx = resolve_covariates(cohort, spec)?;
    let basis = time_basis(event_times, spec.time_df)?;
    let table = expand_person_periods(cohort, cause);
    let events = table.rows.iter().filter(|r| r.outcome).count();
    if events == 0 {
        return Err(HazardError::NoEvents { cause });
    }

    let labels = design_labels(spec, basis.ncols());
    let mut x = DesignMatrix::with_row_capacity(labels, table.rows.len());
    let mut y = Vec::with_capacity(table.rows.len());
    let mut row = Vec::new();
    let grid = cohort.grid();
    let records = cohort.records();
    for r in &table.rows {
        let rec = &records[r.subject];
        design_row(
            &mut row,
            rec.treated,
            &rec.covariates,
            &cov_idx,
            grid[r.interval],
            &basis,
            spec.treatment_time_interaction,
        );
        x.push_row(&row).expect("design rows share one builder");
        y.push(if r.outcome { 1.0 } else { 0.0 });
    }

    let fit =
        fit_logistic(&x, &y, spec.ridge).map_err(|source| HazardError::Fit { cause, source })?;
    Ok(CauseFit {
        cause,
        fit,
        time_basis: basis,
        spec: spec.clone(),
        cov_idx,
        events,
        rows: table.rows.len(),
    })
}

/// Fits both cause-specific hazard models. Knots come from the pooled
/// event times of both causes; each cause then fits on its own risk-set
/// table.
pub fn fit_cause_specific(cohort: &Cohort, spec: &ModelSpec) -> Result<HazardFits, HazardError> {
    let grid = cohort.grid();
    let event_times: Vec<f64> = cohort
        .records()
        .iter()
        .filter(|r| r.event != EventCode::Censored)
        .map(|r| grid[r.time_index])
        .collect();

    let target = fit_one_cause(cohort, Cause::Target, &spec.target, &event_times)?;
    let competing = fit_one_cause(cohort, Cause::Competing, &spec.competing, &event_times)?;
    Ok(HazardFits { target, competing })
}

/// Per-subject, per-arm, per-interval predicted hazards for both causes.
///
/// Layout per cause: `values[(i * 2 + arm) * K + (s - 1)]`, arm 0 control
/// and 1 treated, so each subject-arm curve is one contiguous slice.
#[derive(Debug)]
pub struct HazardSurface {
    n_subjects: usize,
    n_intervals: usize,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl HazardSurface {
    pub fn n_subjects(&self) -> usize {
        self.n_subjects
    }

    pub fn n_intervals(&self) -> usize {
        self.n_intervals
    }

    /// The four hazard curves the decomposition consumes for subject `i`.
    pub fn arm_hazards(&self, i: usize) -> ArmHazards<'_> {
        let k = self.n_intervals;
        let control = (i * 2) * k;
        let treated = (i * 2 + 1) * k;
        ArmHazards {
            y_treated: &self.y[treated..treated + k],
            y_control: &self.y[control..control + k],
            d_treated: &self.d[treated..treated + k],
            d_control: &self.d[control..control + k],
        }
    }
}

/// Evaluates both fitted models for every subject at both treatment
/// assignments (the subject keeps their own covariates) and every
/// interval.
pub fn hazard_surface(cohort: &Cohort, fits: &HazardFits) -> HazardSurface {
    let k = cohort.n_intervals();
    let grid = cohort.grid();
    let records = cohort.records();

    // Per subject: [control s=1..K, treated s=1..K] for each cause.
    let blocks = exec::map_indexed(records.len(), |i| {
        let rec = &records[i];
        let mut y = Vec::with_capacity(2 * k);
        let mut d = Vec::with_capacity(2 * k);
        let mut row = Vec::new();
        for arm in [false, true] {
            for s in 1..=k {
                let t = grid[s];
                fits.target.design_row(&mut row, arm, &rec.covariates, t);
                y.push(predict_prob(&fits.target.fit, &row).expect("row from this fit's builder"));
                fits.competing.design_row(&mut row, arm, &rec.covariates, t);
                d.push(
                    predict_prob(&fits.competing.fit, &row).expect("row from this fit's builder"),
                );
            }
        }
        (y, d)
    });

    let mut y = Vec::with_capacity(records.len() * 2 * k);
    let mut d = Vec::with_capacity(records.len() * 2 * k);
    for (by, bd) in blocks {
        y.extend(by);
        d.extend(bd);
    }
    HazardSurface { n_subjects: records.len(), n_intervals: k, y, d }
}
