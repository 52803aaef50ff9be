//! Nonparametric bootstrap bands for the decomposition curves.
//!
//! Each replicate resamples subjects with replacement, reruns the whole
//! pipeline (knot selection included, so the bands carry model-selection
//! variability), and the bands are percentile intervals across replicates.
//! Replicates get independent counter-based RNG substreams keyed by their
//! index, so the bands are reproducible bit for bit regardless of thread
//! count or the `parallel` feature.
//!
//! A resample can lose all events of one cause and fail to fit; such
//! replicates are skipped and counted. More than 20% skipped aborts the
//! run: at that point the data is too thin for resampling to say anything.

use rand::Rng;

use crate::dataio::Cohort;
use crate::decomp::{Component, ComponentCurves, DecompositionCurve};
use crate::exec;
use crate::hazards::ModelSpec;
use crate::pipeline::decompose_cohort;
use crate::sim::{substream, StreamDomain};

#[derive(Debug, thiserror::Error)]
pub enum BootError {
    #[error("confidence level must be strictly between 0 and 1, got {0}")]
    BadLevel(f64),
    #[error("bootstrap needs at least one replicate")]
    NoReplicates,
    #[error("{failed} of {total} bootstrap replicates failed to fit; the cohort is too sparse")]
    TooManyFailures { failed: usize, total: usize },
}

/// How to resample.
#[derive(Debug, Clone, Copy)]
pub struct BootstrapPlan {
    pub replicates: usize,
    pub seed: u64,
    /// Two-sided coverage, e.g. 0.95.
    pub level: f64,
}

/// Percentile bands across replicates, per scale.
#[derive(Debug, Clone)]
pub struct BootstrapBands {
    pub risk_lower: ComponentCurves,
    pub risk_upper: ComponentCurves,
    pub rmst_lower: ComponentCurves,
    pub rmst_upper: ComponentCurves,
    pub replicates_used: usize,
    pub skipped: usize,
}

/// Linear-interpolation percentile of a sorted sample.
fn percentile(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    if lo + 1 == sorted.len() {
        return sorted[lo];
    }
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
}

fn band(
    curves: &[DecompositionCurve],
    pick: impl Fn(&DecompositionCurve) -> &ComponentCurves,
    k_len: usize,
    p: f64,
) -> ComponentCurves {
    let mut out = ComponentCurves::zeros(k_len);
    let mut sample = Vec::with_capacity(curves.len());
    for c in Component::ALL {
        for k in 0..k_len {
            sample.clear();
            sample.extend(curves.iter().map(|curve| pick(curve).at(c, k)));
            sample.sort_by(|a, b| a.partial_cmp(b).expect("components are finite"));
            out.set(c, k, percentile(&sample, p));
        }
    }
    out
}

/// Resamples, refits, and returns percentile bands.
pub fn bootstrap_bands(
    cohort: &Cohort,
    spec: &ModelSpec,
    plan: &BootstrapPlan,
) -> Result<BootstrapBands, BootError> {
    if !(plan.level > 0.0 && plan.level < 1.0) {
        return Err(BootError::BadLevel(plan.level));
    }
    if plan.replicates == 0 {
        return Err(BootError::NoReplicates);
    }

    let n = cohort.records().len();
    let replicates = exec::map_indexed(plan.replicates, |b| {
        let mut rng = substream(plan.seed, StreamDomain::Bootstrap, b as u64);
        let indices: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        let resample = cohort.subset(&indices);
        decompose_cohort(&resample, spec).ok().map(|(curve, _)| curve)
    });

    let total = replicates.len();
    let curves: Vec<DecompositionCurve> = replicates.into_iter().flatten().collect();
    let skipped = total - curves.len();
    if skipped * 5 > total {
        return Err(BootError::TooManyFailures { failed: skipped, total });
    }

    let k_len = cohort.n_intervals() + 1;
    let alpha = 1.0 - plan.level;
    let (lo, hi) = (alpha / 2.0, 1.0 - alpha / 2.0);
    Ok(BootstrapBands {
        risk_lower: band(&curves, |c| &c.risk, k_len, lo),
        risk_upper: band(&curves, |c| &c.risk, k_len, hi),
        rmst_lower: band(&curves, |c| &c.rmst, k_len, lo),
        rmst_upper: band(&curves, |c| &c.rmst, k_len, hi),
        replicates_used: curves.len(),
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hazards::HazardModelSpec;
    use crate::sim::{emit_cohort, HazardTable, ScenarioSpec, Stratum};

    fn cohort(n: usize, seed: u64) -> Cohort {
        let spec = ScenarioSpec {
            grid: (0..=5).map(f64::from).collect(),
            strata: vec![Stratum {
                share: 1.0,
                hazards: HazardTable {
                    y_treated: vec![0.1; 5],
                    y_control: vec![0.22; 5],
                    d_treated: vec![0.15; 5],
                    d_control: vec![0.07; 5],
                },
            }],
            n,
            seed,
            treat_prob: 0.5,
            censor_hazard: 0.0,
        };
        emit_cohort(&spec).unwrap()
    }

    fn model() -> ModelSpec {
        ModelSpec::shared(HazardModelSpec {
            time_df: 1,
            covariates: vec![],
            treatment_time_interaction: false,
            ridge: 0.0,
        })
    }

    #[test]
    fn plan_validation() {
        let cohort = cohort(60, 1);
        let plan = BootstrapPlan { replicates: 0, seed: 0, level: 0.95 };
        assert!(matches!(bootstrap_bands(&cohort, &model(), &plan), Err(BootError::NoReplicates)));
        let plan = BootstrapPlan { replicates: 5, seed: 0, level: 1.0 };
        assert!(matches!(
            bootstrap_bands(&cohort, &model(), &plan),
            Err(BootError::BadLevel(l)) if l == 1.0
        ));
    }

    #[test]
    fn single_replicate_collapses_the_band() {
        let cohort = cohort(150, 2);
        let plan = BootstrapPlan { replicates: 1, seed: 9, level: 0.95 };
        let bands = bootstrap_bands(&cohort, &model(), &plan).unwrap();
        assert_eq!(bands.replicates_used, 1);
        for c in Component::ALL {
            for k in 0..bands.risk_lower.len() {
                assert_eq!(bands.risk_lower.at(c, k), bands.risk_upper.at(c, k));
                assert_eq!(bands.rmst_lower.at(c, k), bands.rmst_upper.at(c, k));
            }
        }
    }

    #[test]
    fn bands_are_seed_deterministic_and_ordered() {
        let cohort = cohort(200, 3);
        let plan = BootstrapPlan { replicates: 20, seed: 77, level: 0.9 };
        let a = bootstrap_bands(&cohort, &model(), &plan).unwrap();
        let b = bootstrap_bands(&cohort, &model(), &plan).unwrap();
        for c in Component::ALL {
            for k in 0..a.risk_lower.len() {
                assert_eq!(a.risk_lower.at(c, k), b.risk_lower.at(c, k));
                assert_eq!(a.rmst_upper.at(c, k), b.rmst_upper.at(c, k));
                assert!(a.risk_lower.at(c, k) <= a.risk_upper.at(c, k));
                assert!(a.rmst_lower.at(c, k) <= a.rmst_upper.at(c, k));
            }
        }

        let other = bootstrap_bands(
            &cohort,
            &model(),
            &BootstrapPlan { replicates: 20, seed: 78, level: 0.9 },
        )
        .unwrap();
        let moved = Component::ALL.iter().any(|&c| {
            (0..a.risk_lower.len()).any(|k| a.risk_lower.at(c, k) != other.risk_lower.at(c, k))
        });
        assert!(moved, "a different seed must move the bands");
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn bands_do_not_depend_on_thread_count() {
        let cohort = cohort(200, 4);
        let plan = BootstrapPlan { replicates: 16, seed: 5, level: 0.95 };
        let default_pool = bootstrap_bands(&cohort, &model(), &plan).unwrap();
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| bootstrap_bands(&cohort, &model(), &plan).unwrap());
        for c in Component::ALL {
            for k in 0..default_pool.risk_lower.len() {
                assert_eq!(default_pool.risk_lower.at(c, k), single.risk_lower.at(c, k));
                assert_eq!(default_pool.risk_upper.at(c, k), single.risk_upper.at(c, k));
                assert_eq!(default_pool.rmst_lower.at(c, k), single.rmst_lower.at(c, k));
                assert_eq!(default_pool.rmst_upper.at(c, k), single.rmst_upper.at(c, k));
            }
        }
    }

    #[test]
    fn band_width_shrinks_with_sample_size() {
        let plan = BootstrapPlan { replicates: 60, seed: 11, level: 0.95 };
        let width = |n: usize, seed: u64| {
            let cohort = cohort(n, seed);
            let bands = bootstrap_bands(&cohort, &model(), &plan).unwrap();
            let k = 3;
            bands.risk_upper.at(Component::Te, k) - bands.risk_lower.at(Component::Te, k)
        };
        let wide = width(400, 21);
        let narrow = width(1600, 22);
        assert!(
            narrow < wide,
            "TE band width should shrink: n=400 gives {wide}, n=1600 gives {narrow}"
        );
    }

    #[test]
    fn sparse_cohorts_abort_instead_of_fabricating_bands() {
        // One competing event in 40 subjects: resamples drop it often, and
        // each such replicate cannot fit the competing model.
        let mut records = Vec::new();
        for i in 0..40 {
            let (event, k) = match i {
                0 => (crate::dataio::EventCode::Competing, 2),
                i if i % 3 == 0 => (crate::dataio::EventCode::Target, 1 + (i % 4)),
                i if i % 3 == 1 => (crate::dataio::EventCode::Target, 1 + (i % 5)),
                _ => (crate::dataio::EventCode::Censored, 5),
            };
            records.push(crate::dataio::SubjectRecord {
                id: format!("s{i}"),
                time_index: k,
                event,
                treated: i % 2 == 0,
                covariates: vec![],
            });
        }
        let cohort = Cohort::new((0..=5).map(f64::from).collect(), vec![], records).unwrap();
        let plan = BootstrapPlan { replicates: 50, seed: 13, level: 0.95 };
        match bootstrap_bands(&cohort, &model(), &plan) {
            Err(BootError::TooManyFailures { failed, total }) => {
                assert_eq!(total, 50);
                assert!(failed * 5 > total);
            }
            other => panic!("expected TooManyFailures, got {other:?}"),
        }
    }
}
