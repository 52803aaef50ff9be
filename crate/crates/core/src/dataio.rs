//! Cohort ingestion and person-period expansion.
//!
//! One row per subject comes in; one row per subject-interval at risk goes
//! out, separately for each cause. The expansion encodes the within-interval
//! ordering the whole crate assumes: censoring resolves first, then the
//! competing event, then the target event. Concretely, for a subject whose
//! record ends at interval `k`:
//!
//! * censored at `k`: at risk for both causes through `k - 1` only,
//! * competing event at `k`: at risk for the competing cause through `k`
//!   (event row at `k`) but for the target cause only through `k - 1`,
//! * target event at `k`: at risk for both causes through `k`; the
//!   competing-cause row at `k` is a non-event because the competing event
//!   had its chance first and did not happen.

use std::collections::HashSet;
use std::fs::File;
use std::io;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing required column '{0}'")]
    MissingColumn(String),
    #[error("event codes must be pairwise distinct, got '{0}' twice")]
    AmbiguousEventCodes(String),
    #[error("record {id} (line {line}): {message}")]
    Record { id: String, line: usize, message: String },
    #[error("empty cohort: no data rows after the header")]
    EmptyCohort,
    #[error("grid must contain at least 2 finite, strictly increasing values")]
    BadGrid,
    #[error("cohort validation: {0}")]
    Invalid(String),
}

/// Outcome classification of a subject's final interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventCode {
    Censored,
    Target,
    Competing,
}

/// Cause selector for risk-set expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cause {
    Target,
    Competing,
}

impl std::fmt::Display for Cause {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Cause::Target => "target",
            Cause::Competing => "competing",
        })
    }
}

/// One subject: first event or censoring at interval `time_index` on the
/// cohort grid (1-based), baseline treatment arm, baseline covariates.
#[derive(Clone, Debug, PartialEq)]
pub struct SubjectRecord {
    pub id: String,
    pub time_index: usize,
    pub event: EventCode,
    pub treated: bool,
    pub covariates: Vec<f64>,
}

/// A validated cohort on a shared grid `t_0 < t_1 < … < t_K`. Every subject
/// is event-free and under observation at `t_0`.
#[derive(Clone, Debug)]
pub struct Cohort {
    grid: Vec<f64>,
    covariate_names: Vec<String>,
    records: Vec<SubjectRecord>,
}

impl Cohort {
    pub fn new(
        grid: Vec<f64>,
        covariate_names: Vec<String>,
        records: Vec<SubjectRecord>,
    ) -> Result<Self, DataError> {
        if grid.len() < 2
            || grid.windows(2).any(|w| !w[0].is_finite() || !w[1].is_finite() || w[0] >= w[1])
        {
            return Err(DataError::BadGrid);
        }
        if records.is_empty() {
            return Err(DataError::EmptyCohort);
        }
        let k_max = grid.len() - 1;
        for r in &records {
            if r.time_index < 1 || r.time_index > k_max {
                return Err(DataError::Invalid(format!(
                    "subject {}: time index {} outside 1..={k_max}",
                    r.id, r.time_index
                )));
            }
            if r.covariates.len() != covariate_names.len() {
                return Err(DataError::Invalid(format!(
                    "subject {}: {} covariates, expected {}",
                    r.id,
                    r.covariates.len(),
                    covariate_names.len()
                )));
            }
            if r.covariates.iter().any(|v| !v.is_finite()) {
                return Err(DataError::Invalid(format!(
                    "subject {}: non-finite covariate value",
                    r.id
                )));
            }
        }
        Ok(Self { grid, covariate_names, records })
    }

    /// Grid points `t_0..t_K`.
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Number of intervals `K`.
    pub fn n_intervals(&self) -> usize {
        self.grid.len() - 1
    }

    pub fn records(&self) -> &[SubjectRecord] {
        &self.records
    }

    pub fn covariate_names(&self) -> &[String] {
        &self.covariate_names
    }

    /// New cohort holding the subjects at `indices`, in order, on the same
    /// grid. Duplicates are allowed; this is the bootstrap resampler.
    pub fn subset(&self, indices: &[usize]) -> Cohort {
        Cohort {
            grid: self.grid.clone(),
            covariate_names: self.covariate_names.clone(),
            records: indices.iter().map(|&i| self.records[i].clone()).collect(),
        }
    }
}

/// One subject-interval at risk for a cause.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RiskSetRow {
    /// Index into the cohort's records.
    pub subject: usize,
    /// Interval `s` (1-based).
    pub interval: usize,
    /// Whether the cause's event happened at `s`.
    pub outcome: bool,
}

/// Person-period rows for one cause over the whole cohort.
#[derive(Clone, Debug, PartialEq)]
pub struct RiskSetTable {
    pub cause: Cause,
    pub rows: Vec<RiskSetRow>,
}

/// Expands a cohort into the cause's person-period risk-set table.
pub fn expand_person_periods(cohort: &Cohort, cause: Cause) -> RiskSetTable {
    let mut rows = Vec::new();
    for (subject, r) in cohort.records().iter().enumerate() {
        let k = r.time_index;
        // Last interval in which the subject is in this cause's risk set.
        let upper = match (cause, r.event) {
            (Cause::Target, EventCode::Target) => k,
            (Cause::Competing, EventCode::Competing) => k,
            // The competing event at k removes the subject from the target
            // risk set at k, but not the other way around.
            (Cause::Target, EventCode::Competing) => k - 1,
            (Cause::Competing, EventCode::Target) => k,
            // Censoring at k pre-empts both events at k.
            (_, EventCode::Censored) => k - 1,
        };
        let is_event_cause = matches!(
            (cause, r.event),
            (Cause::Target, EventCode::Target) | (Cause::Competing, EventCode::Competing)
        );
        for s in 1..=upper {
            rows.push(RiskSetRow { subject, interval: s, outcome: is_event_cause && s == k });
        }
    }
    RiskSetTable { cause, rows }
}

// --- CSV ingestion -------------------------------------------------------

/// Column mapping and event coding for CSV files.
#[derive(Clone, Debug)]
pub struct CsvSchema {
    pub id: String,
    pub time: String,
    pub event: String,
    pub treatment: String,
    /// Covariate columns to load, in design order.
    pub covariates: Vec<String>,
    pub event_codes: EventCodes,
}

#[derive(Clone, Debug)]
pub struct EventCodes {
    pub censored: String,
    pub target: String,
    pub competing: String,
}

impl Default for EventCodes {
    fn default() -> Self {
        Self { censored: "0".into(), target: "1".into(), competing: "2".into() }
    }
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self {
            id: "id".into(),
            time: "time".into(),
            event: "event".into(),
            treatment: "treatment".into(),
            covariates: Vec::new(),
            event_codes: EventCodes::default(),
        }
    }
}

impl EventCodes {
    fn decode(&self, raw: &str) -> Option<EventCode> {
        if raw == self.censored {
            Some(EventCode::Censored)
        } else if raw == self.target {
            Some(EventCode::Target)
        } else if raw == self.competing {
            Some(EventCode::Competing)
        } else {
            None
        }
    }

    fn encode(&self, event: EventCode) -> &str {
        match event {
            EventCode::Censored => &self.censored,
            EventCode::Target => &self.target,
            EventCode::Competing => &self.competing,
        }
    }

    fn validate(&self) -> Result<(), DataError> {
        if self.censored == self.target || self.censored == self.competing {
            return Err(DataError::AmbiguousEventCodes(self.censored.clone()));
        }
        if self.target == self.competing {
            return Err(DataError::AmbiguousEventCodes(self.target.clone()));
        }
        Ok(())
    }
}

/// Loads a one-row-per-subject CSV. Times are continuous values; with a
/// supplied `grid` (`t_0..t_K`) each time is binned to the smallest `k >= 1`
/// with `t <= t_k`. Without a grid, the grid becomes 0 followed by the
/// sorted unique observed event times, so event binning is exact. A
/// censoring time beyond the last grid point clamps to interval K
/// (administrative censoring after the last modeled interval); an event
/// time beyond the last grid point is an error.
pub fn load_csv(path: &Path, schema: &CsvSchema, grid: Option<&[f64]>) -> Result<Cohort, DataError> {
    load_csv_reader(File::open(path)?, schema, grid)
}

pub fn load_csv_reader<R: io::Read>(
    reader: R,
    schema: &CsvSchema,
    grid: Option<&[f64]>,
) -> Result<Cohort, DataError> {
    schema.event_codes.validate()?;
    if let Some(g) = grid {
        if g.len() < 2 || g.windows(2).any(|w| !w[0].is_finite() || w[0] >= w[1]) {
            return Err(DataError::BadGrid);
        }
    }

    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| -> Result<usize, DataError> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| DataError::MissingColumn(name.to_string()))
    };
    let id_col = col(&schema.id)?;
    let time_col = col(&schema.time)?;
    let event_col = col(&schema.event)?;
    let treat_col = col(&schema.treatment)?;
    let cov_cols: Vec<usize> =
        schema.covariates.iter().map(|c| col(c)).collect::<Result<_, _>>()?;

    struct RawRow {
        id: String,
        line: usize,
        time: f64,
        event: EventCode,
        treated: bool,
        covariates: Vec<f64>,
    }

    let mut raw = Vec::new();
    let mut seen_ids = HashSet::new();
    for (i, result) in rdr.records().enumerate() {
        let line = i + 2; // header is line 1
        let rec = result?;
        let id = rec.get(id_col).unwrap_or("").to_string();
        let fail = |message: String| DataError::Record { id: id.clone(), line, message };
        if id.is_empty() {
            return Err(fail("empty id".into()));
        }
        if !seen_ids.insert(id.clone()) {
            return Err(fail("duplicate id".into()));
        }
        let time: f64 = rec
            .get(time_col)
            .and_then(|v| v.parse().ok())
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| fail(format!("unparseable time '{}'", rec.get(time_col).unwrap_or(""))))?;
        let event_raw = rec.get(event_col).unwrap_or("");
        let event = schema
            .event_codes
            .decode(event_raw)
            .ok_or_else(|| fail(format!("unknown event code '{event_raw}'")))?;
        let treated = match rec.get(treat_col).unwrap_or("") {
            "0" => false,
            "1" => true,
            other => return Err(fail(format!("non-binary treatment value '{other}'"))),
        };
        let mut covariates = Vec::with_capacity(cov_cols.len());
        for (&c, name) in cov_cols.iter().zip(&schema.covariates) {
            let v: f64 = rec
                .get(c)
                .filter(|v| !v.is_empty())
                .and_then(|v| v.parse().ok())
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| {
                    fail(format!("missing or unparseable covariate '{name}'"))
                })?;
            covariates.push(v);
        }
        raw.push(RawRow { id, line, time, event, treated, covariates });
    }
    if raw.is_empty() {
        return Err(DataError::EmptyCohort);
    }

    let grid: Vec<f64> = match grid {
        Some(g) => g.to_vec(),
        None => {
            let mut times: Vec<f64> = raw
                .iter()
                .filter(|r| r.event != EventCode::Censored)
                .map(|r| r.time)
                .collect();
            if times.is_empty() {
                return Err(DataError::Invalid(
                    "no target or competing events observed; supply an explicit grid".into(),
                ));
            }
            times.sort_by(|a, b| a.partial_cmp(b).unwrap());
            times.dedup();
            if times[0] <= 0.0 {
                return Err(DataError::Invalid(format!(
                    "observed event time {} is not positive; supply an explicit grid",
                    times[0]
                )));
            }
            let mut g = vec![0.0];
            g.extend(times);
            g
        }
    };

    let mut records = Vec::with_capacity(raw.len());
    for r in raw {
        let fail = |message: String| DataError::Record { id: r.id.clone(), line: r.line, message };
        if r.time <= grid[0] {
            return Err(fail(format!("time {} is not after the grid origin {}", r.time, grid[0])));
        }
        let time_index = match grid.iter().position(|&t| r.time <= t) {
            Some(k) => k,
            // Censoring after the last modeled interval: full exposure
            // recorded through K-1, removed from interval K's risk sets.
            None if r.event == EventCode::Censored => grid.len() - 1,
            None => {
                return Err(fail(format!(
                    "event time {} exceeds the last grid point {}",
                    r.time,
                    grid[grid.len() - 1]
                )))
            }
        };
        records.push(SubjectRecord {
            id: r.id,
            time_index,
            event: r.event,
            treated: r.treated,
            covariates: r.covariates,
        });
    }

    Cohort::new(grid, schema.covariates.clone(), records)
}

/// Writes a cohort back out, one row per subject, with times as grid values.
/// Reloading with the same schema and the same grid reproduces the cohort.
pub fn write_csv<W: io::Write>(
    cohort: &Cohort,
    schema: &CsvSchema,
    writer: W,
) -> Result<(), DataError> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header =
        vec![schema.id.clone(), schema.time.clone(), schema.event.clone(), schema.treatment.clone()];
    header.extend(cohort.covariate_names().iter().cloned());
    wtr.write_record(&header)?;
    for r in cohort.records() {
        let mut row = vec![
            r.id.clone(),
            format_number(cohort.grid()[r.time_index]),
            schema.event_codes.encode(r.event).to_string(),
            if r.treated { "1" } else { "0" }.to_string(),
        ];
        row.extend(r.covariates.iter().map(|&v| format_number(v)));
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Shortest decimal that round-trips through `f64` parsing.
pub(crate) fn format_number(v: f64) -> String {
    let s = format!("{v}");
    debug_assert_eq!(s.parse::<f64>().unwrap(), v);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn subject(id: &str, k: usize, event: EventCode) -> SubjectRecord {
        SubjectRecord { id: id.into(), time_index: k, event, treated: false, covariates: vec![] }
    }

    fn unit_grid(k: usize) -> Vec<f64> {
        (0..=k).map(|i| i as f64).collect()
    }

    fn outcomes(table: &RiskSetTable, subject: usize) -> Vec<(usize, bool)> {
        table
            .rows
            .iter()
            .filter(|r| r.subject == subject)
            .map(|r| (r.interval, r.outcome))
            .collect()
    }

    #[test]
    fn target_event_expansion() {
        let cohort =
            Cohort::new(unit_grid(4), vec![], vec![subject("s", 3, EventCode::Target)]).unwrap();
        let target = expand_person_periods(&cohort, Cause::Target);
        let competing = expand_person_periods(&cohort, Cause::Competing);
        assert_eq!(outcomes(&target, 0), vec![(1, false), (2, false), (3, true)]);
        assert_eq!(outcomes(&competing, 0), vec![(1, false), (2, false), (3, false)]);
    }

    #[test]
    fn competing_event_expansion() {
        let cohort =
            Cohort::new(unit_grid(4), vec![], vec![subject("s", 2, EventCode::Competing)]).unwrap();
        let target = expand_person_periods(&cohort, Cause::Target);
        let competing = expand_person_periods(&cohort, Cause::Competing);
        assert_eq!(outcomes(&competing, 0), vec![(1, false), (2, true)]);
        // The competing event at 2 removes interval 2 from the target risk set.
        assert_eq!(outcomes(&target, 0), vec![(1, false)]);
    }

    #[test]
    fn censored_expansion_drops_the_censored_interval() {
        let cohort =
            Cohort::new(unit_grid(4), vec![], vec![subject("s", 2, EventCode::Censored)]).unwrap();
        let target = expand_person_periods(&cohort, Cause::Target);
        let competing = expand_person_periods(&cohort, Cause::Competing);
        assert_eq!(outcomes(&target, 0), vec![(1, false)]);
        assert_eq!(outcomes(&competing, 0), vec![(1, false)]);
    }

    #[test]
    fn first_interval_events_leave_empty_tables_where_expected() {
        let cohort = Cohort::new(
            unit_grid(3),
            vec![],
            vec![
                subject("censored1", 1, EventCode::Censored),
                subject("competing1", 1, EventCode::Competing),
            ],
        )
        .unwrap();
        let target = expand_person_periods(&cohort, Cause::Target);
        let competing = expand_person_periods(&cohort, Cause::Competing);
        assert!(outcomes(&target, 0).is_empty());
        assert!(outcomes(&competing, 0).is_empty());
        assert!(outcomes(&target, 1).is_empty());
        assert_eq!(outcomes(&competing, 1), vec![(1, true)]);
    }

    fn random_cohort(seed: u64, n: usize, k: usize) -> Cohort {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
        let records = (0..n)
            .map(|i| {
                let event = match rng.random_range(0..3) {
                    0 => EventCode::Censored,
                    1 => EventCode::Target,
                    _ => EventCode::Competing,
                };
                SubjectRecord {
                    id: format!("s{i}"),
                    time_index: rng.random_range(1..=k),
                    event,
                    treated: rng.random_bool(0.5),
                    covariates: vec![rng.random_range(-2.0..2.0)],
                }
            })
            .collect();
        Cohort::new(unit_grid(k), vec!["x".into()], records).unwrap()
    }

    #[test]
    fn outcome_totals_match_event_counts() {
        let cohort = random_cohort(5, 500, 6);
        let n_target =
            cohort.records().iter().filter(|r| r.event == EventCode::Target).count();
        let n_competing =
            cohort.records().iter().filter(|r| r.event == EventCode::Competing).count();
        let target = expand_person_periods(&cohort, Cause::Target);
        let competing = expand_person_periods(&cohort, Cause::Competing);
        assert_eq!(target.rows.iter().filter(|r| r.outcome).count(), n_target);
        assert_eq!(competing.rows.iter().filter(|r| r.outcome).count(), n_competing);
    }

    #[test]
    fn per_subject_row_counts_differ_by_at_most_one() {
        let cohort = random_cohort(7, 300, 5);
        let target = expand_person_periods(&cohort, Cause::Target);
        let competing = expand_person_periods(&cohort, Cause::Competing);
        for i in 0..cohort.records().len() {
            let nt = target.rows.iter().filter(|r| r.subject == i).count();
            let nc = competing.rows.iter().filter(|r| r.subject == i).count();
            assert!(nc == nt || nc == nt + 1, "subject {i}: target {nt}, competing {nc}");
        }
    }

    #[test]
    fn loads_csv_with_schema_mapping_and_grid_binning() {
        let csv = "\
patient,months,status,arm,age
p1,0.5,1,1,61
p2,2,2,0,58
p3,2.1,0,1,70
p4,6,1,0,66
";
        let schema = CsvSchema {
            id: "patient".into(),
            time: "months".into(),
            event: "status".into(),
            treatment: "arm".into(),
            covariates: vec!["age".into()],
            event_codes: EventCodes::default(),
        };
        let grid = [0.0, 2.0, 4.0, 6.0];
        let cohort = load_csv_reader(csv.as_bytes(), &schema, Some(&grid)).unwrap();
        let idx: Vec<usize> = cohort.records().iter().map(|r| r.time_index).collect();
        assert_eq!(idx, vec![1, 1, 2, 3]);
        assert_eq!(cohort.records()[0].event, EventCode::Target);
        assert_eq!(cohort.records()[1].event, EventCode::Competing);
        assert!(cohort.records()[0].treated);
        assert_eq!(cohort.records()[3].covariates, vec![66.0]);
    }

    #[test]
    fn default_grid_is_zero_plus_unique_event_times() {
        // d censors at 7, beyond the last event time 3: the grid ignores
        // the censoring time and d clamps to the last interval.
        let csv = "id,time,event,treatment\na,3,1,0\nb,1,2,1\nc,2.5,0,0\nd,7,0,1\n";
        let cohort = load_csv_reader(csv.as_bytes(), &CsvSchema::default(), None).unwrap();
        assert_eq!(cohort.grid(), &[0.0, 1.0, 3.0]);
        let idx: Vec<usize> = cohort.records().iter().map(|r| r.time_index).collect();
        assert_eq!(idx, vec![2, 1, 2, 2]);
        assert_eq!(cohort.records()[3].event, EventCode::Censored);
    }

    #[test]
    fn default_grid_needs_at_least_one_event() {
        let csv = "id,time,event,treatment\na,3,0,0\nb,1,0,1\n";
        let err = load_csv_reader(csv.as_bytes(), &CsvSchema::default(), None).unwrap_err();
        assert!(matches!(err, DataError::Invalid(ref m) if m.contains("explicit grid")));
    }

    #[test]
    fn time_beyond_grid_names_the_record() {
        let csv = "id,time,event,treatment\na,1,1,0\nb,9,1,1\n";
        let err =
            load_csv_reader(csv.as_bytes(), &CsvSchema::default(), Some(&[0.0, 2.0, 4.0]))
                .unwrap_err();
        match err {
            DataError::Record { id, line, message } => {
                assert_eq!(id, "b");
                assert_eq!(line, 3);
                assert!(message.contains("exceeds"), "{message}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn bad_cells_are_rejected_with_diagnostics() {
        let missing = "id,time,treatment\na,1,0\n";
        assert!(matches!(
            load_csv_reader(missing.as_bytes(), &CsvSchema::default(), None),
            Err(DataError::MissingColumn(c)) if c == "event"
        ));

        let bad_event = "id,time,event,treatment\na,1,9,0\n";
        assert!(matches!(
            load_csv_reader(bad_event.as_bytes(), &CsvSchema::default(), None),
            Err(DataError::Record { ref message, .. }) if message.contains("event code '9'")
        ));

        let bad_treat = "id,time,event,treatment\na,1,1,2\n";
        assert!(matches!(
            load_csv_reader(bad_treat.as_bytes(), &CsvSchema::default(), None),
            Err(DataError::Record { ref message, .. }) if message.contains("non-binary")
        ));

        let schema = CsvSchema { covariates: vec!["x".into()], ..CsvSchema::default() };
        let missing_cov = "id,time,event,treatment,x\na,1,1,0,\n";
        assert!(matches!(
            load_csv_reader(missing_cov.as_bytes(), &schema, None),
            Err(DataError::Record { ref message, .. }) if message.contains("covariate 'x'")
        ));

        let empty = "id,time,event,treatment\n";
        assert!(matches!(
            load_csv_reader(empty.as_bytes(), &CsvSchema::default(), None),
            Err(DataError::EmptyCohort)
        ));

        let dup = "id,time,event,treatment\na,1,1,0\na,2,1,0\n";
        assert!(matches!(
            load_csv_reader(dup.as_bytes(), &CsvSchema::default(), None),
            Err(DataError::Record { ref message, .. }) if message.contains("duplicate")
        ));
    }

    #[test]
    fn round_trip_preserves_risk_set_tables() {
        let cohort = random_cohort(11, 200, 5);
        let schema = CsvSchema { covariates: vec!["x".into()], ..CsvSchema::default() };
        let mut buffer = Vec::new();
        write_csv(&cohort, &schema, &mut buffer).unwrap();
        let reread =
            load_csv_reader(buffer.as_slice(), &schema, Some(cohort.grid())).unwrap();
        assert_eq!(
            expand_person_periods(&cohort, Cause::Target),
            expand_person_periods(&reread, Cause::Target)
        );
        assert_eq!(
            expand_person_periods(&cohort, Cause::Competing),
            expand_person_periods(&reread, Cause::Competing)
        );
        assert_eq!(cohort.records(), reread.records());
    }

    #[test]
    fn cohort_validation_rejects_bad_shapes() {
        assert!(matches!(
            Cohort::new(vec![0.0, 1.0, 1.0], vec![], vec![subject("a", 1, EventCode::Target)]),
            Err(DataError::BadGrid)
        ));
        assert!(matches!(
            Cohort::new(vec![0.0, 1.0], vec![], vec![]),
            Err(DataError::EmptyCohort)
        ));
        assert!(Cohort::new(vec![0.0, 1.0], vec![], vec![subject("a", 2, EventCode::Target)])
            .is_err());
        let bad_cov = SubjectRecord {
            id: "a".into(),
            time_index: 1,
            event: EventCode::Target,
            treated: false,
            covariates: vec![1.0],
        };
        assert!(Cohort::new(vec![0.0, 1.0], vec![], vec![bad_cov]).is_err());
    }
}
