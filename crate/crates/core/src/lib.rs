//! Four-way decomposition of a binary treatment's total effect on a target
//! event in the presence of a competing event, estimated from discrete-time
//! survival data.
//!
//! The total effect on the target event is split into four additive pieces:
//!
//! * `CDE`     controlled direct effect: the effect had the competing event
//!             been eliminated for everyone,
//! * `INT_ref` reference interaction: extra effect from the competing-event
//!             process that would run under the reference (untreated) arm,
//! * `INT_med` mediated interaction: extra effect from the treatment-induced
//!             *change* in the competing-event process acting together with
//!             the direct pathway,
//! * `PIE`     pure indirect effect: the effect produced solely by shifting
//!             the competing-event process.
//!
//! Arithmetic combinations `NDE = CDE + INT_ref`, `NIE = INT_med + PIE` and
//! `TDE = CDE + INT_ref + INT_med` are carried along with the four primitives.
//!
//! Everything runs on a shared discrete time grid `t_0 < t_1 < … < t_K`.
//! Within an interval, censoring is resolved first, then the competing event,
//! then the target event; the risk-set construction in [`dataio`], the hazard
//! regressions in [`hazards`] and the simulation oracle in [`sim`] all follow
//! that one ordering.
//!
//! Two independent evaluation routes are kept alive on purpose: a risk-form
//! route through net risks and interception probabilities, and an id-form
//! route through products of cause-specific hazards. The id-form is what the
//! estimator returns; debug and test builds assert the two routes agree to
//! 1e-12. The [`sim`] module provides the third, model-free route: exact
//! counterfactual bookkeeping on simulated individuals.
//!
//! The [`boot`] module wraps the whole pipeline in a subject-level percentile
//! bootstrap, and [`checks`] packages the identity suites that back the
//! `verify` subcommand of the companion CLI.

pub mod boot;
pub mod checks;
pub mod dataio;
pub mod decomp;
pub mod glm;
pub mod hazards;
pub mod pipeline;
pub mod sim;
pub mod splines;

mod exec;
mod sum;

pub use sum::NeumaierSum;
