//! Four-way decomposition of the total treatment effect on a target event
//! under competing risks.
//!
//! All quantities live on a discrete grid with `K` intervals and are driven
//! by four cause-specific hazard curves: target-event and competing-event
//! hazards under each arm. Two algebraically equivalent routes are
//! implemented end to end:
//!
//! * the *risk form*: net risks `F` combined with interception
//!   probabilities `E_k(a', a'')`, the probability that a competing event
//!   under hazards `a''` would have pre-empted a target event that occurs by
//!   `k` under hazards `a'`;
//! * the *id form*: sums over intervals of net point probabilities
//!   `f_{Y;s}` times competing-event survival `G_{D;s}`.
//!
//! The id form is what production code evaluates (it is cheaper and has no
//! divisions); debug and test builds re-derive every value through the risk
//! form and assert agreement to [`DUAL_FORM_TOL`]. The combination effects
//! NDE, NIE and TDE are evaluated from their own closed forms and checked
//! against the component sums the same way.

use crate::exec;
use crate::sum::NeumaierSum;

/// Maximum absolute disagreement tolerated between the risk-form and
/// id-form evaluations of any component.
pub const DUAL_FORM_TOL: f64 = 1e-12;
/// Maximum absolute violation of TE = CDE + INT_ref + INT_med + PIE.
pub const ADDITIVITY_TOL: f64 = 1e-10;

/// The four primitive components, their sum, and the three standard
/// combinations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Component {
    Te,
    Cde,
    IntRef,
    IntMed,
    Pie,
    Nde,
    Nie,
    Tde,
}

impl Component {
    pub const ALL: [Component; 8] = [
        Component::Te,
        Component::Cde,
        Component::IntRef,
        Component::IntMed,
        Component::Pie,
        Component::Nde,
        Component::Nie,
        Component::Tde,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Component::Te => "TE",
            Component::Cde => "CDE",
            Component::IntRef => "INT_ref",
            Component::IntMed => "INT_med",
            Component::Pie => "PIE",
            Component::Nde => "NDE",
            Component::Nie => "NIE",
            Component::Tde => "TDE",
        }
    }

    pub fn from_name(name: &str) -> Option<Component> {
        Component::ALL.iter().copied().find(|c| c.name() == name)
    }

    #[inline]
    fn idx(self) -> usize {
        match self {
            Component::Te => 0,
            Component::Cde => 1,
            Component::IntRef => 2,
            Component::IntMed => 3,
            Component::Pie => 4,
            Component::Nde => 5,
            Component::Nie => 6,
            Component::Tde => 7,
        }
    }
}

/// The four hazard curves driving one decomposition, each of length `K`:
/// entry `s - 1` is the hazard in interval `s`.
#[derive(Clone, Copy, Debug)]
pub struct ArmHazards<'a> {
    pub y_treated: &'a [f64],
    pub y_control: &'a [f64],
    pub d_treated: &'a [f64],
    pub d_control: &'a [f64],
}

impl ArmHazards<'_> {
    pub fn n_intervals(&self) -> usize {
        self.y_treated.len()
    }

    fn check(&self) {
        let k = self.y_treated.len();
        assert!(
            self.y_control.len() == k && self.d_treated.len() == k && self.d_control.len() == k,
            "hazard curves must share one length"
        );
        debug_assert!(
            [self.y_treated, self.y_control, self.d_treated, self.d_control]
                .iter()
                .all(|h| h.iter().all(|&v| (0.0..=1.0).contains(&v))),
            "hazards must lie in [0, 1]"
        );
    }
}

/// All eight component values at a single horizon.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Components {
    pub te: f64,
    pub cde: f64,
    pub int_ref: f64,
    pub int_med: f64,
    pub pie: f64,
    pub nde: f64,
    pub nie: f64,
    pub tde: f64,
}

impl Components {
    pub fn get(&self, c: Component) -> f64 {
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

/// Eight series over horizons `k = 0..=K` (index 0 is identically zero).
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentCurves {
    values: [Vec<f64>; 8],
}

impl ComponentCurves {
    pub fn zeros(len: usize) -> Self {
        Self { values: std::array::from_fn(|_| vec![0.0; len]) }
    }

    pub fn len(&self) -> usize {
        self.values[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn series(&self, c: Component) -> &[f64] {
        &self.values[c.idx()]
    }

    pub fn at(&self, c: Component, k: usize) -> f64 {
        self.values[c.idx()][k]
    }

    pub fn set(&mut self, c: Component, k: usize, v: f64) {
        self.values[c.idx()][k] = v;
    }

    pub fn components_at(&self, k: usize) -> Components {
        Components {
            te: self.at(Component::Te, k),
            cde: self.at(Component::Cde, k),
            int_ref: self.at(Component::IntRef, k),
            int_med: self.at(Component::IntMed, k),
            pie: self.at(Component::Pie, k),
            nde: self.at(Component::Nde, k),
            nie: self.at(Component::Nie, k),
            tde: self.at(Component::Tde, k),
        }
    }
}

/// Component curves on both reporting scales, tied to a grid.
#[derive(Clone, Debug)]
pub struct DecompositionCurve {
    pub grid: Vec<f64>,
    pub risk: ComponentCurves,
    pub rmst: ComponentCurves,
}

impl DecompositionCurve {
    /// Builds the pair of scales from risk-scale curves; the RMST scale is
    /// the running time-weighted negative sum of the risk scale.
    pub fn from_risk(grid: Vec<f64>, risk: ComponentCurves) -> Self {
        assert_eq!(grid.len(), risk.len(), "grid and curves must share a length");
        let rmst = rmst_transform(&grid, &risk);
        Self { grid, risk, rmst }
    }

    pub fn n_intervals(&self) -> usize {
        self.grid.len() - 1
    }
}

// --- Risk-form building blocks -------------------------------------------

/// Net (cause-eliminated) cumulative risk curve `F_0..F_K` for one hazard
/// curve: `F_k = sum_{s<=k} lambda_s prod_{j<s} (1 - lambda_j)`. Agrees with
/// the complement-product form `1 - prod_{s<=k}(1 - lambda_s)` to within
/// floating-point noise; debug builds assert that.
pub fn net_risk(hazards: &[f64]) -> Vec<f64> {
    let mut curve = Vec::with_capacity(hazards.len() + 1);
    curve.push(0.0);
    let mut surv = 1.0;
    let mut cum = 0.0;
    for &h in hazards {
        cum += h * surv;
        surv *= 1.0 - h;
        curve.push(cum);
        debug_assert!(
            (cum - (1.0 - surv)).abs() <= DUAL_FORM_TOL,
            "net-risk sum form {cum} drifted from product form {}",
            1.0 - surv
        );
    }
    curve
}

/// Interception probability `E_k`: given a target event by `k` under the
/// net risk curve `f_y`, the probability that a competing event under the
/// net risk curve `f_d` would have occurred first (ties included). Both
/// arguments are net risk curves indexed `0..=K`. Defined as 0 when the
/// target event cannot occur by `k`.
pub fn interception_prob(f_y: &[f64], f_d: &[f64], k: usize) -> f64 {
    assert!(k < f_y.len() && k < f_d.len(), "horizon {k} out of range");
    if f_y[k] == 0.0 {
        return 0.0;
    }
    let mut num = 0.0;
    for s in 1..=k {
        num += (f_y[s] - f_y[s - 1]) * f_d[s];
    }
    num / f_y[k]
}

/// Risk-form evaluation of the four components and their combinations at
/// every horizon, through net risks and interception probabilities.
pub fn component_curves_riskform(h: &ArmHazards) -> ComponentCurves {
    h.check();
    let k_max = h.n_intervals();
    let fy_a = net_risk(h.y_treated);
    let fy_c = net_risk(h.y_control);
    let fd_a = net_risk(h.d_treated);
    let fd_c = net_risk(h.d_control);

    let mut out = ComponentCurves::zeros(k_max + 1);
    for k in 1..=k_max {
        let e_aa = interception_prob(&fy_a, &fd_a, k);
        let e_ac = interception_prob(&fy_a, &fd_c, k);
        let e_ca = interception_prob(&fy_c, &fd_a, k);
        let e_cc = interception_prob(&fy_c, &fd_c, k);

        let cde = fy_a[k] - fy_c[k];
        let int_ref = -(fy_a[k] * e_ac - fy_c[k] * e_cc);
        let int_med = -(fy_a[k] * (e_aa - e_ac) - fy_c[k] * (e_ca - e_cc));
        let pie = -fy_c[k] * (e_ca - e_cc);
        let te = fy_a[k] * (1.0 - e_aa) - fy_c[k] * (1.0 - e_cc);

        out.set(Component::Te, k, te);
        out.set(Component::Cde, k, cde);
        out.set(Component::IntRef, k, int_ref);
        out.set(Component::IntMed, k, int_med);
        out.set(Component::Pie, k, pie);
        out.set(Component::Nde, k, cde + int_ref);
        out.set(Component::Nie, k, int_med + pie);
        out.set(Component::Tde, k, cde + int_ref + int_med);
    }
    out
}

/// Risk-form evaluation at a single horizon.
pub fn components_riskform(h: &ArmHazards, k: usize) -> Components {
    component_curves_riskform(h).components_at(k)
}

// --- Id-form route (production) ------------------------------------------

/// Id-form evaluation of all eight components at every horizon: running
/// sums of net point probabilities `f_{Y;s}` against competing-event
/// survival `G_{D;s}`. NDE, NIE and TDE come from their own closed forms.
/// Debug builds assert agreement with the risk form, with the component
/// sums, and with additivity.
pub fn component_curves(h: &ArmHazards) -> ComponentCurves {
    h.check();
    let k_max = h.n_intervals();
    let mut out = ComponentCurves::zeros(k_max + 1);

    // Survival of the target event through s - 1, per arm.
    let mut before_y_a = 1.0;
    let mut before_y_c = 1.0;
    // Survival of the competing event through s, per arm.
    let mut g_d_a = 1.0;
    let mut g_d_c = 1.0;

    let (mut te, mut cde, mut int_ref, mut int_med, mut pie) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let (mut nde, mut nie, mut tde) = (0.0, 0.0, 0.0);

    for s in 1..=k_max {
        let fy_a = h.y_treated[s - 1] * before_y_a;
        let fy_c = h.y_control[s - 1] * before_y_c;
        g_d_a *= 1.0 - h.d_treated[s - 1];
        g_d_c *= 1.0 - h.d_control[s - 1];

        let df = fy_a - fy_c;
        let dg = g_d_a - g_d_c;

        cde += df;
        int_ref += -df * (1.0 - g_d_c);
        int_med += df * dg;
        pie += fy_c * dg;
        te += fy_a * g_d_a - fy_c * g_d_c;
        nde += df * g_d_c;
        nie += fy_a * dg;
        tde += df * g_d_a;

        out.set(Component::Te, s, te);
        out.set(Component::Cde, s, cde);
        out.set(Component::IntRef, s, int_ref);
        out.set(Component::IntMed, s, int_med);
        out.set(Component::Pie, s, pie);
        out.set(Component::Nde, s, nde);
        out.set(Component::Nie, s, nie);
        out.set(Component::Tde, s, tde);

        before_y_a *= 1.0 - h.y_treated[s - 1];
        before_y_c *= 1.0 - h.y_control[s - 1];
    }

    debug_assert!(max_curve_gap(&out, &component_curves_riskform(h)) <= DUAL_FORM_TOL);
    #[cfg(debug_assertions)]
    for k in 0..=k_max {
        let c = out.components_at(k);
        debug_assert!((c.te - (c.cde + c.int_ref + c.int_med + c.pie)).abs() <= ADDITIVITY_TOL);
        debug_assert!((c.nde - (c.cde + c.int_ref)).abs() <= DUAL_FORM_TOL);
        debug_assert!((c.nie - (c.int_med + c.pie)).abs() <= DUAL_FORM_TOL);
        debug_assert!((c.tde - (c.cde + c.int_ref + c.int_med)).abs() <= DUAL_FORM_TOL);
    }
    out
}

/// Id-form evaluation at a single horizon.
pub fn components_idform(h: &ArmHazards, k: usize) -> Components {
    component_curves(h).components_at(k)
}

/// Largest absolute gap between two curve sets across all components and
/// horizons.
pub fn max_curve_gap(a: &ComponentCurves, b: &ComponentCurves) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut gap = 0.0f64;
    for c in Component::ALL {
        for (x, y) in a.series(c).iter().zip(b.series(c)) {
            gap = gap.max((x - y).abs());
        }
    }
    gap
}

/// Overwrites NDE, NIE and TDE with the sums of their constituent
/// components. Used where the primitive components were obtained without
/// hazard curves (e.g. Monte Carlo averages).
pub fn fill_combos(curves: &mut ComponentCurves) {
    for k in 0..curves.len() {
        let cde = curves.at(Component::Cde, k);
        let int_ref = curves.at(Component::IntRef, k);
        let int_med = curves.at(Component::IntMed, k);
        let pie = curves.at(Component::Pie, k);
        curves.set(Component::Nde, k, cde + int_ref);
        curves.set(Component::Nie, k, int_med + pie);
        curves.set(Component::Tde, k, cde + int_ref + int_med);
    }
}

// --- Reporting scales ------------------------------------------------------

/// Transforms risk-scale curves to the restricted-mean-survival-time scale:
/// the effect at `k` is minus the time-weighted running sum
/// `sum_{s<=k} (t_s - t_{s-1}) * component_s`. Positive risk-scale effects
/// (more events) become negative time-scale effects (less event-free time).
pub fn rmst_transform(grid: &[f64], risk: &ComponentCurves) -> ComponentCurves {
    assert_eq!(grid.len(), risk.len(), "grid and curves must share a length");
    let mut out = ComponentCurves::zeros(risk.len());
    for c in Component::ALL {
        let series = risk.series(c);
        let mut acc = 0.0;
        for k in 1..series.len() {
            acc -= (grid[k] - grid[k - 1]) * series[k];
            out.set(c, k, acc);
        }
    }
    out
}

// --- Standardization -------------------------------------------------------

/// Averages per-subject component curves over a cohort: the g-formula
/// standardization step. `per_subject(i)` must return curves of length
/// `k_len`. Accumulation is compensated and chunked in fixed index order,
/// so the result is identical whether or not the work is parallelized.
pub fn standardize<F>(n_subjects: usize, k_len: usize, per_subject: F) -> ComponentCurves
where
    F: Fn(usize) -> ComponentCurves + Sync + Send,
{
    assert!(n_subjects > 0, "standardization needs at least one subject");
    let width = 8 * k_len;
    let chunk_sums = exec::map_chunks(n_subjects, |range| {
        let mut acc = vec![NeumaierSum::new(); width];
        for i in range {
            let curves = per_subject(i);
            assert_eq!(curves.len(), k_len, "per-subject curve length mismatch");
            for (ci, c) in Component::ALL.iter().enumerate() {
                let series = curves.series(*c);
                for k in 0..k_len {
                    acc[ci * k_len + k].add(series[k]);
                }
            }
        }
        acc
    });

    let mut total = vec![NeumaierSum::new(); width];
    for chunk in &chunk_sums {
        for (t, c) in total.iter_mut().zip(chunk) {
            t.merge(c);
        }
    }

    let mut out = ComponentCurves::zeros(k_len);
    let n = n_subjects as f64;
    for (ci, c) in Component::ALL.iter().enumerate() {
        for k in 0..k_len {
            out.set(*c, k, total[ci * k_len + k].value() / n);
        }
    }
    out
}
