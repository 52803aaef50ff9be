//! Counterfactual simulation oracle.
//!
//! Individuals carry four independent controlled event times: the target
//! event time under each arm with the competing event eliminated, and the
//! competing event time under each arm. Everything observable or
//! counterfactual is then pure bookkeeping:
//!
//! * the joint process under arm pair `(a', a'')` shows the target event by
//!   `k` iff the target time under `a'` is at most `k` *and* the competing
//!   time under `a''` did not come first (ties go to the competing event,
//!   matching the within-interval ordering used everywhere else);
//! * the observed record under an arm applies independent censoring, which
//!   pre-empts events in its own interval.
//!
//! Each individual's eight decomposition components at each horizon are
//! integer contrasts in {-1, 0, +1}, computed two ways (the contrast form on
//! joint-process indicators and the product form on controlled indicators
//! times competing indicators) and asserted equal. Averaging them over
//! simulated individuals gives a model-free truth that the closed-form
//! plug-in and the estimation pipeline are tested against.
//!
//! Random numbers: one ChaCha12 stream per individual, namespaced by use
//! (truth draws, cohort draws, bootstrap replicates), so results are
//! independent of thread count and chunking. Within an individual's stream
//! the draw order is: stratum, arm, the four controlled times (target
//! treated, target control, competing treated, competing control), censoring
//! time.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataio::{Cohort, EventCode, SubjectRecord};
use crate::decomp::{
    self, ArmHazards, Component, ComponentCurves, DecompositionCurve,
};
use crate::exec;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    BadScenario(String),
    #[error("unknown preset '{0}' (expected scenario1, scenario2 or scenario3)")]
    UnknownPreset(String),
}

/// An event time on the grid: interval index `1..=K`, or [`NEVER`] when the
/// event does not occur within follow-up.
pub const NEVER: u32 = u32::MAX;

/// Controlled event times for one individual.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ControlledTimes {
    /// Target-event time under treatment with the competing event eliminated.
    pub target_treated: u32,
    /// Target-event time under control with the competing event eliminated.
    pub target_control: u32,
    /// Competing-event time under treatment.
    pub competing_treated: u32,
    /// Competing-event time under control.
    pub competing_control: u32,
}

impl ControlledTimes {
    fn target(&self, treated: bool) -> u32 {
        if treated {
            self.target_treated
        } else {
            self.target_control
        }
    }

    fn competing(&self, treated: bool) -> u32 {
        if treated {
            self.competing_treated
        } else {
            self.competing_control
        }
    }
}

/// Hazards per interval for both causes and arms; each vector has length `K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HazardTable {
    pub y_treated: Vec<f64>,
    pub y_control: Vec<f64>,
    pub d_treated: Vec<f64>,
    pub d_control: Vec<f64>,
}

impl HazardTable {
    pub fn as_arm_hazards(&self) -> ArmHazards<'_> {
        ArmHazards {
            y_treated: &self.y_treated,
            y_control: &self.y_control,
            d_treated: &self.d_treated,
            d_control: &self.d_control,
        }
    }

    fn constant(k: usize, y_treated: f64, y_control: f64, d_treated: f64, d_control: f64) -> Self {
        Self {
            y_treated: vec![y_treated; k],
            y_control: vec![y_control; k],
            d_treated: vec![d_treated; k],
            d_control: vec![d_control; k],
        }
    }

    fn validate(&self, k: usize, label: &str) -> Result<(), SimError> {
        for (name, h) in [
            ("y_treated", &self.y_treated),
            ("y_control", &self.y_control),
            ("d_treated", &self.d_treated),
            ("d_control", &self.d_control),
        ] {
            if h.len() != k {
                return Err(SimError::BadScenario(format!(
                    "{label}: {name} has {} entries, expected {k}",
                    h.len()
                )));
            }
            if h.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(SimError::BadScenario(format!(
                    "{label}: {name} has hazards outside [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

/// One covariate stratum: its population share and its hazards.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stratum {
    pub share: f64,
    pub hazards: HazardTable,
}

/// A complete generating scenario. Hazards may differ across at most two
/// strata of one binary baseline covariate; the emitted cohort then carries
/// that covariate under the name `stratum`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    /// Grid points `t_0..t_K`.
    pub grid: Vec<f64>,
    pub strata: Vec<Stratum>,
    pub n: usize,
    pub seed: u64,
    /// Probability of assignment to the treated arm in the observed cohort.
    pub treat_prob: f64,
    /// Constant per-interval hazard of independent censoring in the observed
    /// cohort; 0 disables censoring.
    pub censor_hazard: f64,
}

impl ScenarioSpec {
    pub fn n_intervals(&self) -> usize {
        self.grid.len().saturating_sub(1)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.grid.len() < 2
            || self.grid.windows(2).any(|w| !w[0].is_finite() || !w[1].is_finite() || w[0] >= w[1])
        {
            return Err(SimError::BadScenario(
                "grid must contain at least 2 strictly increasing finite values".into(),
            ));
        }
        if self.n == 0 {
            return Err(SimError::BadScenario("n must be at least 1".into()));
        }
        if self.strata.is_empty() || self.strata.len() > 2 {
            return Err(SimError::BadScenario(format!(
                "expected 1 or 2 strata, got {}",
                self.strata.len()
            )));
        }
        let share_sum: f64 = self.strata.iter().map(|s| s.share).sum();
        if self.strata.iter().any(|s| !(s.share > 0.0)) || (share_sum - 1.0).abs() > 1e-9 {
            return Err(SimError::BadScenario(format!(
                "stratum shares must be positive and sum to 1, got {share_sum}"
            )));
        }
        let k = self.n_intervals();
        for (i, s) in self.strata.iter().enumerate() {
            s.hazards.validate(k, &format!("stratum {i}"))?;
        }
        if !(0.0..=1.0).contains(&self.treat_prob) {
            return Err(SimError::BadScenario(format!(
                "treat_prob must be in [0, 1], got {}",
                self.treat_prob
            )));
        }
        if !(0.0..=1.0).contains(&self.censor_hazard) {
            return Err(SimError::BadScenario(format!(
                "censor_hazard must be in [0, 1], got {}",
                self.censor_hazard
            )));
        }
        Ok(())
    }

    fn stratified(&self) -> bool {
        self.strata.len() > 1
    }
}

/// Built-in scenarios, all sharing target-event hazards (treated 0.18,
/// control 0.35 per interval) on a unit grid with 10 intervals, so the
/// target event becomes near-certain under control by the horizon. They
/// differ only in what treatment does to the competing event:
///
/// * `scenario1`: treatment also delays the competing event (0.04 vs 0.10),
/// * `scenario2`: treatment accelerates the competing event (0.25 vs 0.10),
/// * `scenario3`: treatment leaves the competing event untouched (0.10 both),
///   making the mediated components exactly zero.
///
/// These constants are pinned; tests freeze their qualitative behavior.
pub fn preset(name: &str, n: usize, seed: u64) -> Result<ScenarioSpec, SimError> {
    const K: usize = 10;
    let (d_treated, d_control) = match name {
        "scenario1" => (0.04, 0.10),
        "scenario2" => (0.25, 0.10),
        "scenario3" => (0.10, 0.10),
        other => return Err(SimError::UnknownPreset(other.to_string())),
    };
    Ok(ScenarioSpec {
        grid: (0..=K).map(|i| i as f64).collect(),
        strata: vec![Stratum {
            share: 1.0,
            hazards: HazardTable::constant(K, 0.18, 0.35, d_treated, d_control),
        }],
        n,
        seed,
        treat_prob: 0.5,
        censor_hazard: 0.0,
    })
}

// --- Random draws ----------------------------------------------------------

/// Namespaces for per-index random streams, so draws for different purposes
/// never overlap.
#[derive(Clone, Copy, Debug)]
pub(crate) enum StreamDomain {
    Truth = 0,
    Cohort = 1,
    Bootstrap = 2,
}

/// One independent ChaCha12 stream per (seed, domain, index).
pub(crate) fn substream(seed: u64, domain: StreamDomain, index: u64) -> ChaCha12Rng {
    debug_assert!(index < 1 << 56);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(((domain as u64) << 56) | index);
    rng
}

/// Draws an event time with interval mass
/// `P(T = s) = lambda_s prod_{j<s}(1 - lambda_j)`, or [`NEVER`] with the
/// residual mass.
fn draw_time(rng: &mut ChaCha12Rng, hazards: &[f64]) -> u32 {
    for (s, &h) in hazards.iter().enumerate() {
        if rng.random_bool(h) {
            return (s + 1) as u32;
        }
    }
    NEVER
}

/// Draws all four controlled times for one individual, in the documented
/// field order.
pub fn draw_controlled_times(rng: &mut ChaCha12Rng, hazards: &HazardTable) -> ControlledTimes {
    ControlledTimes {
        target_treated: draw_time(rng, &hazards.y_treated),
        target_control: draw_time(rng, &hazards.y_control),
        competing_treated: draw_time(rng, &hazards.d_treated),
        competing_control: draw_time(rng, &hazards.d_control),
    }
}

// --- Counterfactual bookkeeping ---------------------------------------------

/// Joint-process indicators at horizon `k` when the target process runs
/// under the arm giving `t_y` and the competing process under the arm giving
/// `t_d`. The competing event prevails on ties.
pub fn joint_outcome(t_y: u32, t_d: u32, k: usize) -> (bool, bool) {
    let k = k as u32;
    let d = t_d <= k && t_d <= t_y;
    let y = t_y <= k && t_d > t_y;
    (y, d)
}

/// All eight per-individual components at one horizon; each lies in
/// {-1, 0, +1} and the four primitives sum to the total.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct IndividualComponents {
    pub te: i8,
    pub cde: i8,
    pub int_ref: i8,
    pub int_med: i8,
    pub pie: i8,
    pub nde: i8,
    pub nie: i8,
    pub tde: i8,
}

impl IndividualComponents {
    pub fn get(&self, c: Component) -> i8 {
        match c {
            Component::Te => self.te,
            Component::Cde => self.cde,
            Component::IntRef => self.int_ref,
            Component::IntMed => self.int_med,
            Component::Pie => self.pie,
            Component::Nde => self.nde,
            Component::Nie => self.nie,
            Component::Tde => self.tde,
        }
    }
}

/// Decomposes one individual's effect at horizon `k`, evaluating both the
/// contrast form (differences of joint-process indicators) and the product
/// form (controlled indicators times competing indicators) and asserting
/// they agree. Panics on disagreement; that would be an implementation bug,
/// not a data condition.
pub fn individual_decomposition(times: &ControlledTimes, k: usize) -> IndividualComponents {
    let i = |b: bool| b as i8;

    // Controlled target indicators (competing event eliminated).
    let yc_a = i(times.target_treated <= k as u32);
    let yc_c = i(times.target_control <= k as u32);

    // Joint-process indicators for the four arm pairs.
    let (y_aa, d_aa) = joint_outcome(times.target_treated, times.competing_treated, k);
    let (y_ac, d_ac) = joint_outcome(times.target_treated, times.competing_control, k);
    let (y_ca, d_ca) = joint_outcome(times.target_control, times.competing_treated, k);
    let (y_cc, d_cc) = joint_outcome(times.target_control, times.competing_control, k);

    // Contrast form.
    let cde = yc_a - yc_c;
    let int_ref = (i(y_ac) - i(y_cc)) - cde;
    let int_med = (i(y_aa) - i(y_ca)) - (i(y_ac) - i(y_cc));
    let pie = i(y_ca) - i(y_cc);
    let te = i(y_aa) - i(y_cc);

    // Product form: the competing event erases a controlled target event.
    let int_ref_p = -(yc_a * i(d_ac) - yc_c * i(d_cc));
    let int_med_p = -(yc_a * i(d_aa) - yc_c * i(d_ca)) + (yc_a * i(d_ac) - yc_c * i(d_cc));
    let pie_p = -yc_c * (i(d_ca) - i(d_cc));

    assert_eq!(int_ref, int_ref_p, "contrast and product forms disagree on INT_ref");
    assert_eq!(int_med, int_med_p, "contrast and product forms disagree on INT_med");
    assert_eq!(pie, pie_p, "contrast and product forms disagree on PIE");
    assert_eq!(te, cde + int_ref + int_med + pie, "components do not sum to the total");

    let nde = cde + int_ref;
    let nie = int_med + pie;
    let tde = cde + int_ref + int_med;
    debug_assert_eq!(nde, i(y_ac) - i(y_cc));
    debug_assert_eq!(nie, i(y_aa) - i(y_ac));
    debug_assert_eq!(tde, i(y_aa) - i(y_ca));

    IndividualComponents { te, cde, int_ref, int_med, pie, nde, nie, tde }
}

/// Applies censoring and arm assignment to controlled times, producing the
/// observed interval and event classification. Censoring pre-empts an event
/// in the same interval; the competing event prevails over the target event
/// in the same interval. An individual reaching the end of the grid without
/// any of the three is censored in the sentinel interval `K + 1`, so it
/// keeps full exposure in every modeled interval after person-period
/// expansion.
pub fn observe(
    times: &ControlledTimes,
    treated: bool,
    censor_time: u32,
    n_intervals: usize,
) -> (usize, EventCode) {
    let t_y = times.target(treated);
    let t_d = times.competing(treated);
    let event_time = t_d.min(t_y);
    let k = n_intervals as u32;
    if censor_time <= event_time && censor_time <= k {
        (censor_time as usize, EventCode::Censored)
    } else if event_time <= k {
        let code = if t_d <= t_y { EventCode::Competing } else { EventCode::Target };
        (event_time as usize, code)
    } else {
        (n_intervals + 1, EventCode::Censored)
    }
}

// --- Scenario-level products -------------------------------------------------

fn draw_stratum(rng: &mut ChaCha12Rng, spec: &ScenarioSpec) -> usize {
    if spec.stratified() && rng.random_bool(spec.strata[1].share) {
        1
    } else {
        0
    }
}

/// Simulates the observed cohort: stratum, arm, controlled times, censoring,
/// then the observation rule. The emitted grid carries one sentinel interval
/// past the scenario grid for end-of-follow-up censoring.
pub fn emit_cohort(spec: &ScenarioSpec) -> Result<Cohort, SimError> {
    spec.validate()?;
    let k = spec.n_intervals();
    let censor_curve = vec![spec.censor_hazard; k];

    let records = exec::map_indexed(spec.n, |i| {
        let mut rng = substream(spec.seed, StreamDomain::Cohort, i as u64);
        let stratum = draw_stratum(&mut rng, spec);
        let treated = rng.random_bool(spec.treat_prob);
        let times = draw_controlled_times(&mut rng, &spec.strata[stratum].hazards);
        let censor_time =
            if spec.censor_hazard > 0.0 { draw_time(&mut rng, &censor_curve) } else { NEVER };
        let (time_index, event) = observe(&times, treated, censor_time, k);
        SubjectRecord {
            id: format!("sim{i}"),
            time_index,
            event,
            treated,
            covariates: if spec.stratified() { vec![stratum as f64] } else { vec![] },
        }
    });

    let mut grid = spec.grid.clone();
    grid.push(grid[k] + (grid[k] - grid[k - 1]));
    let names =
        if spec.stratified() { vec!["stratum".to_string()] } else { vec![] };
    Cohort::new(grid, names, records).map_err(|e| SimError::BadScenario(e.to_string()))
}

/// Monte Carlo truth: exact integer accumulation of per-individual
/// components at every horizon, divided by `n` at the end. Deterministic in
/// (seed, n) regardless of parallelism.
pub fn monte_carlo_truth(spec: &ScenarioSpec) -> Result<DecompositionCurve, SimError> {
    spec.validate()?;
    let k_max = spec.n_intervals();
    let width = 8 * k_max;

    let chunk_sums: Vec<Vec<i64>> = exec::map_chunks(spec.n, |range| {
        let mut acc = vec![0i64; width];
        for i in range {
            let mut rng = substream(spec.seed, StreamDomain::Truth, i as u64);
            let stratum = draw_stratum(&mut rng, spec);
            let _arm = rng.random_bool(spec.treat_prob);
            let times = draw_controlled_times(&mut rng, &spec.strata[stratum].hazards);
            for k in 1..=k_max {
                let c = individual_decomposition(&times, k);
                for (ci, comp) in Component::ALL.iter().enumerate() {
                    acc[ci * k_max + (k - 1)] += i64::from(c.get(*comp));
                }
            }
        }
        acc
    });

    let mut totals = vec![0i64; width];
    for chunk in &chunk_sums {
        for (t, v) in totals.iter_mut().zip(chunk) {
            *t += v;
        }
    }

    let mut risk = ComponentCurves::zeros(k_max + 1);
    let n = spec.n as f64;
    for (ci, comp) in Component::ALL.iter().enumerate() {
        for k in 1..=k_max {
            risk.set(*comp, k, totals[ci * k_max + (k - 1)] as f64 / n);
        }
    }
    Ok(DecompositionCurve::from_risk(spec.grid.clone(), risk))
}

/// Closed-form truth: the id-form plug-in on the true hazards, standardized
/// over the stratum law.
pub fn closed_form_truth(spec: &ScenarioSpec) -> Result<DecompositionCurve, SimError> {
    spec.validate()?;
    let k_len = spec.n_intervals() + 1;
    let mut risk = ComponentCurves::zeros(k_len);
    for stratum in &spec.strata {
        let curves = decomp::component_curves(&stratum.hazards.as_arm_hazards());
        for c in Component::ALL {
            for k in 0..k_len {
                risk.set(c, k, risk.at(c, k) + stratum.share * curves.at(c, k));
            }
        }
    }
    Ok(DecompositionCurve::from_risk(spec.grid.clone(), risk))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn times(ty_a: u32, ty_c: u32, td_a: u32, td_c: u32) -> ControlledTimes {
        ControlledTimes {
            target_treated: ty_a,
            target_control: ty_c,
            competing_treated: td_a,
            competing_control: td_c,
        }
    }

    #[test]
    fn joint_outcome_tie_goes_to_the_competing_event() {
        assert_eq!(joint_outcome(2, 2, 2), (false, true));
        assert_eq!(joint_outcome(2, 3, 2), (true, false));
        assert_eq!(joint_outcome(2, 3, 1), (false, false));
        assert_eq!(joint_outcome(NEVER, NEVER, 3), (false, false));
        assert_eq!(joint_outcome(NEVER, 1, 3), (false, true));
    }

    #[test]
    fn decomposition_of_an_intercepted_target_event() {
        // Both arms would have the target event at 2; treatment pulls the
        // competing event to 1, intercepting it. The whole effect at k=2 is
        // a pure indirect effect of -1.
        let c = individual_decomposition(&times(2, 2, 1, NEVER), 2);
        assert_eq!((c.te, c.cde, c.int_ref, c.int_med, c.pie), (-1, 0, 0, 0, -1));
    }

    #[test]
    fn decomposition_with_control_side_interception() {
        // Treatment eliminates the target event entirely (CDE = -1), but
        // under control the competing event at 1 had already intercepted the
        // target event at 2. Interactions with the interception cancel out
        // the direct benefit.
        let c = individual_decomposition(&times(NEVER, 2, NEVER, 1), 2);
        assert_eq!((c.te, c.cde, c.int_ref, c.int_med, c.pie), (0, -1, 1, -1, 1));
    }

    #[test]
    fn combinations_match_their_own_contrasts() {
        // NDE, NIE and TDE telescope to single joint-process contrasts;
        // spot-check a case where every piece is active.
        let t = times(3, 1, 2, NEVER);
        for k in 1..=3 {
            let c = individual_decomposition(&t, k);
            assert_eq!(c.nde, c.cde + c.int_ref);
            assert_eq!(c.nie, c.int_med + c.pie);
            assert_eq!(c.te, c.nde + c.nie);
        }
    }

    #[test]
    fn observe_follows_censoring_and_tie_rules() {
        // Censoring strictly earlier than both events wins.
        let t = times(3, 3, 5, 5);
        assert_eq!(observe(&t, true, 2, 6), (2, EventCode::Censored));
        // Censoring in the same interval as an event still wins.
        assert_eq!(observe(&t, true, 3, 6), (3, EventCode::Censored));
        // No censoring: the target event lands.
        assert_eq!(observe(&t, true, NEVER, 6), (3, EventCode::Target));
        // Competing event first, and on ties.
        let tie = times(4, 4, 4, 2);
        assert_eq!(observe(&tie, true, NEVER, 6), (4, EventCode::Competing));
        assert_eq!(observe(&tie, false, NEVER, 6), (2, EventCode::Competing));
        // Nothing happens in follow-up: sentinel interval K + 1.
        let quiet = times(NEVER, NEVER, NEVER, NEVER);
        assert_eq!(observe(&quiet, true, NEVER, 6), (7, EventCode::Censored));
    }

    #[test]
    fn draw_time_matches_the_discrete_law() {
        let mut rng = substream(99, StreamDomain::Truth, 0);
        let hazards = vec![0.5; 5];
        let n = 100_000;
        let mut counts = [0usize; 3];
        for _ in 0..n {
            match draw_time(&mut rng, &hazards) {
                1 => counts[0] += 1,
                2 => counts[1] += 1,
                _ => counts[2] += 1,
            }
        }
        let p1 = counts[0] as f64 / n as f64;
        let p2 = counts[1] as f64 / n as f64;
        assert!((p1 - 0.5).abs() < 0.005, "P(T=1) = {p1}");
        assert!((p2 - 0.25).abs() < 0.005, "P(T=2) = {p2}");
    }

    #[test]
    fn presets_are_pinned() {
        let s1 = preset("scenario1", 100, 7).unwrap();
        assert_eq!(s1.n_intervals(), 10);
        assert_eq!(s1.strata[0].hazards.y_treated[0], 0.18);
        assert_eq!(s1.strata[0].hazards.d_treated[0], 0.04);
        let s3 = preset("scenario3", 100, 7).unwrap();
        assert_eq!(s3.strata[0].hazards.d_treated, s3.strata[0].hazards.d_control);
        assert!(matches!(preset("scenario9", 100, 7), Err(SimError::UnknownPreset(_))));
    }

    #[test]
    fn scenario_validation_catches_bad_inputs() {
        let mut spec = preset("scenario1", 100, 7).unwrap();
        spec.n = 0;
        assert!(spec.validate().is_err());
        let mut spec = preset("scenario1", 100, 7).unwrap();
        spec.strata[0].hazards.y_treated[3] = 1.5;
        assert!(spec.validate().is_err());
        let mut spec = preset("scenario1", 100, 7).unwrap();
        spec.strata[0].share = 0.7;
        assert!(spec.validate().is_err());
        let mut spec = preset("scenario1", 100, 7).unwrap();
        spec.grid = vec![0.0, 1.0, 1.0];
        assert!(spec.validate().is_err());
    }

    #[test]
    fn identical_arms_have_null_component_means() {
        let k = 6;
        let table = HazardTable::constant(k, 0.25, 0.25, 0.1, 0.1);
        let spec = ScenarioSpec {
            grid: (0..=k).map(|i| i as f64).collect(),
            strata: vec![Stratum { share: 1.0, hazards: table }],
            n: 40_000,
            seed: 31,
            treat_prob: 0.5,
            censor_hazard: 0.0,
        };
        let truth = monte_carlo_truth(&spec).unwrap();
        let bound = 3.0 / (spec.n as f64).sqrt();
        for c in Component::ALL {
            for k in 0..truth.risk.len() {
                let v = truth.risk.at(c, k);
                assert!(v.abs() <= bound, "{} at {k} is {v}", c.name());
            }
        }
    }

    #[test]
    fn monte_carlo_truth_is_reproducible_and_approaches_closed_form() {
        let spec = preset("scenario2", 100_000, 404).unwrap();
        let a = monte_carlo_truth(&spec).unwrap();
        let b = monte_carlo_truth(&spec).unwrap();
        assert_eq!(a.risk, b.risk);

        let closed = closed_form_truth(&spec).unwrap();
        let gap = decomp::max_curve_gap(&a.risk, &closed.risk);
        assert!(gap < 0.01, "Monte Carlo vs closed form gap {gap}");
    }

    #[test]
    fn monte_carlo_error_shrinks_at_root_n() {
        let closed = closed_form_truth(&preset("scenario1", 1, 0).unwrap()).unwrap();
        let mean_abs_err = |n: usize| {
            let spec = preset("scenario1", n, 555).unwrap();
            let mc = monte_carlo_truth(&spec).unwrap();
            let mut total = 0.0;
            let mut count = 0;
            for c in Component::ALL {
                for k in 1..mc.risk.len() {
                    total += (mc.risk.at(c, k) - closed.risk.at(c, k)).abs();
                    count += 1;
                }
            }
            total / count as f64
        };
        let e3 = mean_abs_err(1_000);
        let e4 = mean_abs_err(10_000);
        let e5 = mean_abs_err(100_000);
        let root10 = 10f64.sqrt();
        for (lo, hi, label) in [(e3, e4, "1e3 to 1e4"), (e4, e5, "1e4 to 1e5")] {
            let ratio = lo / hi;
            assert!(
                ratio > root10 / 3.0 && ratio < root10 * 3.0,
                "error ratio {label} was {ratio}, expected near sqrt(10)"
            );
        }
    }

    #[test]
    fn emitted_cohort_is_reproducible_and_well_formed() {
        let mut spec = preset("scenario1", 2_000, 88).unwrap();
        spec.censor_hazard = 0.02;
        let a = emit_cohort(&spec).unwrap();
        let b = emit_cohort(&spec).unwrap();
        assert_eq!(a.records(), b.records());
        // Sentinel interval: grid has one extra point, and some subject
        // reaches it as end-of-follow-up censoring.
        assert_eq!(a.grid().len(), spec.grid.len() + 1);
        assert_eq!(a.n_intervals(), spec.n_intervals() + 1);
        let k_sentinel = spec.n_intervals() + 1;
        assert!(a
            .records()
            .iter()
            .any(|r| r.time_index == k_sentinel && r.event == EventCode::Censored));
        let censored_early = a
            .records()
            .iter()
            .filter(|r| r.event == EventCode::Censored && r.time_index <= spec.n_intervals())
            .count();
        assert!(censored_early > 0, "expected some in-study censoring");
        // Both arms appear in reasonable proportion.
        let treated = a.records().iter().filter(|r| r.treated).count();
        assert!((treated as f64 / spec.n as f64 - 0.5).abs() < 0.05);
    }

    #[test]
    fn stratified_cohort_carries_the_stratum_covariate() {
        let k = 4;
        let spec = ScenarioSpec {
            grid: (0..=k).map(|i| i as f64).collect(),
            strata: vec![
                Stratum { share: 0.6, hazards: HazardTable::constant(k, 0.1, 0.2, 0.05, 0.1) },
                Stratum { share: 0.4, hazards: HazardTable::constant(k, 0.3, 0.5, 0.1, 0.2) },
            ],
            n: 5_000,
            seed: 12,
            treat_prob: 0.5,
            censor_hazard: 0.0,
        };
        let cohort = emit_cohort(&spec).unwrap();
        assert_eq!(cohort.covariate_names(), ["stratum".to_string()]);
        let share1: f64 = cohort.records().iter().map(|r| r.covariates[0]).sum::<f64>()
            / spec.n as f64;
        assert!((share1 - 0.4).abs() < 0.03, "stratum share {share1}");
    }
}
