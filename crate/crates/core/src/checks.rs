//! Self-verification routines behind the CLI's `verify` subcommand.
//!
//! Each check re-derives a mathematical identity through an independent
//! code path and compares it against the library's production routines:
//! the individual-level decomposition over an exhaustive grid of event
//! times, the agreement of the hazard-product and risk-form component
//! formulas on random hazards, and the linearity of the time-spent
//! transform. A failing check means the library's algebra is wrong, not
//! that data is unusual.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::decomp::{
    component_curves, component_curves_riskform, max_curve_gap, rmst_transform, ArmHazards,
    Component, ADDITIVITY_TOL, DUAL_FORM_TOL,
};
use crate::sim::{individual_decomposition, ControlledTimes, NEVER};

/// One verification routine's verdict.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// Number of cases exercised.
    pub cases: usize,
    /// Largest deviation seen (0 for exact-integer checks that pass).
    pub worst: f64,
    /// Empty when passed; otherwise describes the first failures.
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &'static str) -> Self {
        Self { name, passed: true, cases: 0, worst: 0.0, detail: String::new() }
    }

    fn fail(&mut self, description: String) {
        self.passed = false;
        if self.detail.len() < 2000 {
            self.detail.push_str(&description);
            self.detail.push('\n');
        }
    }

    fn observe(&mut self, gap: f64, tol: f64, description: impl Fn() -> String) {
        if gap > self.worst {
            self.worst = gap;
        }
        if !(gap <= tol) {
            self.fail(format!("{} (gap {gap:e}, tolerance {tol:e})", description()));
        }
    }
}

impl std::fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: {} ({} cases, worst deviation {:e})",
            self.name,
            if self.passed { "ok" } else { "FAILED" },
            self.cases,
            self.worst
        )
    }
}

/// Indicator that the target event happened by `k` given the target time
/// and the competing time steering this world. Within an interval the
/// competing event goes first, so a tie suppresses the target event.
fn target_by(t_y: u32, t_d: u32, k: u32) -> i8 {
    (t_y <= k && t_d > t_y) as i8
}

/// Indicator that the target event would have happened by `k` with the
/// competing process removed.
fn net_target_by(t_y: u32, k: u32) -> i8 {
    (t_y <= k) as i8
}

/// Re-derives every component from scratch as contrasts of joint
/// outcomes, then compares against `individual_decomposition` across all
/// 4^4 time combinations and three horizons.
pub fn enumeration_check() -> CheckOutcome {
    let mut out = CheckOutcome::new("individual decomposition enumeration");
    let choices = [1u32, 2, 3, NEVER];
    for &ty_a in &choices {
        for &ty_c in &choices {
            for &td_a in &choices {
                for &td_c in &choices {
                    // One case per time combination, each checked at
                    // three horizons.
                    out.cases += 1;
                    for k in 1..=3u32 {
                        let times = ControlledTimes {
                            target_treated: ty_a,
                            target_control: ty_c,
                            competing_treated: td_a,
                            competing_control: td_c,
                        };

                        // Independent derivation: joint outcomes with the
                        // target path and the competing path steered
                        // separately, components as their contrasts.
                        let y_aa = target_by(ty_a, td_a, k);
                        let y_ac = target_by(ty_a, td_c, k);
                        let y_ca = target_by(ty_c, td_a, k);
                        let y_cc = target_by(ty_c, td_c, k);
                        let te = y_aa - y_cc;
                        let cde = net_target_by(ty_a, k) - net_target_by(ty_c, k);
                        let nde = y_ac - y_cc;
                        let nie = y_aa - y_ac;
                        let tde = y_aa - y_ca;
                        let int_ref = nde - cde;
                        let int_med = tde - nde;
                        let pie = te - tde;

                        let lib = individual_decomposition(&times, k as usize);
                        let pairs: [(Component, i8); 8] = [
                            (Component::Te, te),
                            (Component::Cde, cde),
                            (Component::IntRef, int_ref),
                            (Component::IntMed, int_med),
                            (Component::Pie, pie),
                            (Component::Nde, nde),
                            (Component::Nie, nie),
                            (Component::Tde, tde),
                        ];
                        for (c, expected) in pairs {
                            let got = lib.get(c);
                            if got != expected {
                                out.worst = out.worst.max(f64::from(got - expected).abs());
                                out.fail(format!(
                                    "{:?} k={k}: {} is {got}, re-derivation says {expected}",
                                    times,
                                    c.name()
                                ));
                            }
                            if !(-1i8..=1).contains(&got) {
                                out.fail(format!(
                                    "{:?} k={k}: {} is {got}, outside -1..=1",
                                    times,
                                    c.name()
                                ));
                            }
                        }
                        let sum = lib.get(Component::Cde)
                            + lib.get(Component::IntRef)
                            + lib.get(Component::IntMed)
                            + lib.get(Component::Pie);
                        if sum != lib.get(Component::Te) {
                            out.fail(format!("{times:?} k={k}: components sum {sum} != TE"));
                        }
                    }
                }
            }
        }
    }
    out
}

fn random_arm_hazards(rng: &mut ChaCha12Rng) -> [Vec<f64>; 4] {
    let k = rng.random_range(1..=8usize);
    let mut curves = [vec![], vec![], vec![], vec![]];
    for c in &mut curves {
        *c = (0..k).map(|_| rng.random_range(0.001..0.999)).collect();
    }
    curves
}

fn describe(h: &ArmHazards<'_>) -> String {
    format!(
        "y_treated={:?} y_control={:?} d_treated={:?} d_control={:?}",
        h.y_treated, h.y_control, h.d_treated, h.d_control
    )
}

/// Compares the hazard-product component formulas against the risk-form
/// route on random hazard curves, and checks additivity and the combined
/// estimands on both.
pub fn dual_form_check(trials: usize, seed: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("risk-form vs hazard-product agreement");
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    for _ in 0..trials {
        out.cases += 1;
        let [ya, yc, da, dc] = random_arm_hazards(&mut rng);
        let h = ArmHazards { y_treated: &ya, y_control: &yc, d_treated: &da, d_control: &dc };
        let id = component_curves(&h);
        let risk = component_curves_riskform(&h);
        out.observe(max_curve_gap(&id, &risk), DUAL_FORM_TOL, || describe(&h));

        for k in 0..id.len() {
            let v = id.components_at(k);
            let additivity = (v.te - (v.cde + v.int_ref + v.int_med + v.pie)).abs();
            out.observe(additivity, ADDITIVITY_TOL, || format!("additivity at k={k}: {}", describe(&h)));
            let combos = (v.nde - (v.cde + v.int_ref))
                .abs()
                .max((v.nie - (v.int_med + v.pie)).abs())
                .max((v.tde - (v.cde + v.int_ref + v.int_med)).abs());
            out.observe(combos, DUAL_FORM_TOL, || format!("combined estimands at k={k}: {}", describe(&h)));
        }
    }
    out
}

/// Checks that the time-spent transform keeps the decomposition additive
/// and starts every curve at zero.
pub fn rmst_check(trials: usize, seed: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("time-spent transform linearity");
    let mut rng = ChaCha12Rng::seed_from_u64(seed.wrapping_add(1));
    for _ in 0..trials {
        out.cases += 1;
        let [ya, yc, da, dc] = random_arm_hazards(&mut rng);
        let h = ArmHazards { y_treated: &ya, y_control: &yc, d_treated: &da, d_control: &dc };
        let risk = component_curves(&h);
        let mut grid = vec![0.0];
        for _ in 0..ya.len() {
            grid.push(grid.last().unwrap() + rng.random_range(0.1..3.0));
        }
        let rmst = rmst_transform(&grid, &risk);
        for c in Component::ALL {
            if rmst.at(c, 0) != 0.0 {
                out.fail(format!("{} at k=0 is {}, not 0", c.name(), rmst.at(c, 0)));
            }
        }
        for k in 0..rmst.len() {
            let v = rmst.components_at(k);
            let additivity = (v.te - (v.cde + v.int_ref + v.int_med + v.pie)).abs();
            out.observe(additivity, ADDITIVITY_TOL, || format!("additivity at k={k}: {}", describe(&h)));
        }
    }
    out
}

/// Runs every check. The slice is ordered from cheapest to most
/// expensive so a reader sees fundamental failures first.
pub fn run_all(trials: usize, seed: u64) -> Vec<CheckOutcome> {
    vec![enumeration_check(), dual_form_check(trials, seed), rmst_check(trials, seed)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_covers_the_full_grid_and_passes() {
        let out = enumeration_check();
        assert!(out.passed, "{}", out.detail);
        assert_eq!(out.cases, 4 * 4 * 4 * 4);
        assert_eq!(out.worst, 0.0);
        assert!(out.detail.is_empty());
    }

    #[test]
    fn dual_form_agrees_on_random_hazards() {
        let out = dual_form_check(500, 90210);
        assert!(out.passed, "{}", out.detail);
        assert_eq!(out.cases, 500);
        assert!(out.worst <= DUAL_FORM_TOL.max(ADDITIVITY_TOL));
    }

    #[test]
    fn rmst_transform_stays_additive() {
        let out = rmst_check(300, 4812);
        assert!(out.passed, "{}", out.detail);
        assert!(out.worst <= ADDITIVITY_TOL);
    }

    #[test]
    fn run_all_reports_three_passing_checks() {
        let outs = run_all(50, 3);
        assert_eq!(outs.len(), 3);
        for o in &outs {
            assert!(o.passed, "{o}");
            let line = o.to_string();
            assert!(line.contains("ok"), "{line}");
        }
    }
}
