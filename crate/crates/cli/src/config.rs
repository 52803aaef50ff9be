//! TOML run configuration and its merging with command-line flags.
//!
//! Precedence everywhere: explicit flag, then config file, then default.
//! The `[model]` table describes both hazard regressions at once;
//! `[model.target]` / `[model.competing]` replace (not merge with) the
//! shared description for that cause.

use serde::Deserialize;

use riskdecomp::dataio::CsvSchema;
use riskdecomp::hazards::{HazardModelSpec, ModelSpec};
use riskdecomp::sim::{HazardTable, ScenarioSpec, Stratum};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub data: DataSection,
    pub model: Option<ModelSection>,
    pub scenario: Option<ScenarioSection>,
    pub bootstrap: Option<BootstrapSection>,
}

/// Column names, event codes, and the binning grid.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    pub id: Option<String>,
    pub time: Option<String>,
    pub event: Option<String>,
    pub treatment: Option<String>,
    pub censored: Option<String>,
    pub target: Option<String>,
    pub competing: Option<String>,
    pub grid: Option<Vec<f64>>,
}

/// `deny_unknown_fields` cannot coexist with `flatten`; typos in shared
/// model keys surface as unknown keys of `HazardModelSpec` instead.
#[derive(Debug, Deserialize)]
pub struct ModelSection {
    #[serde(flatten)]
    pub shared: HazardModelSpec,
    pub target: Option<HazardModelSpec>,
    pub competing: Option<HazardModelSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub preset: Option<String>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub treat_prob: Option<f64>,
    pub censor_hazard: Option<f64>,
    pub grid: Option<Vec<f64>>,
    pub strata: Option<Vec<StratumSection>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StratumSection {
    pub share: f64,
    pub y_treated: Vec<f64>,
    pub y_control: Vec<f64>,
    pub d_treated: Vec<f64>,
    pub d_control: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BootstrapSection {
    pub replicates: Option<usize>,
    pub seed: Option<u64>,
    pub level: Option<f64>,
}

pub fn parse_config(text: &str) -> Result<ConfigFile, String> {
    toml::from_str(text).map_err(|e| format!("config: {e}"))
}

/// Builds the loader schema from config, `--schema key=column` overrides,
/// and the covariate columns the model needs.
pub fn csv_schema(
    data: &DataSection,
    overrides: &[String],
    covariates: Vec<String>,
) -> Result<CsvSchema, String> {
    let mut schema = CsvSchema::default();
    if let Some(v) = &data.id {
        schema.id = v.clone();
    }
    if let Some(v) = &data.time {
        schema.time = v.clone();
    }
    if let Some(v) = &data.event {
        schema.event = v.clone();
    }
    if let Some(v) = &data.treatment {
        schema.treatment = v.clone();
    }
    if let Some(v) = &data.censored {
        schema.event_codes.censored = v.clone();
    }
    if let Some(v) = &data.target {
        schema.event_codes.target = v.clone();
    }
    if let Some(v) = &data.competing {
        schema.event_codes.competing = v.clone();
    }
    for entry in overrides {
        let (key, value) = entry
            .split_once('=')
            .ok_or_else(|| format!("--schema '{entry}' is not KEY=COLUMN"))?;
        let value = value.to_string();
        match key {
            "id" => schema.id = value,
            "time" => schema.time = value,
            "event" => schema.event = value,
            "treatment" => schema.treatment = value,
            "censored" => schema.event_codes.censored = value,
            "target" => schema.event_codes.target = value,
            "competing" => schema.event_codes.competing = value,
            other => {
                return Err(format!(
                    "--schema key '{other}' is not one of id, time, event, treatment, censored, target, competing"
                ))
            }
        }
    }
    schema.covariates = covariates;
    Ok(schema)
}

/// Resolves the two cause-specific model descriptions.
pub fn model_spec(section: Option<&ModelSection>, ridge_override: Option<f64>) -> ModelSpec {
    let mut spec = match section {
        None => ModelSpec::default(),
        Some(s) => ModelSpec {
            target: s.target.clone().unwrap_or_else(|| s.shared.clone()),
            competing: s.competing.clone().unwrap_or_else(|| s.shared.clone()),
        },
    };
    if let Some(r) = ridge_override {
        spec.target.ridge = r;
        spec.competing.ridge = r;
    }
    spec
}

/// The covariate columns the loader must read: both causes' lists, in
/// first-appearance order.
pub fn covariate_union(spec: &ModelSpec) -> Vec<String> {
    let mut names = Vec::new();
    for n in spec.target.covariates.iter().chain(&spec.competing.covariates) {
        if !names.contains(n) {
            names.push(n.clone());
        }
    }
    names
}

/// Resolves the scenario from config and flags. A preset fixes the grid
/// and hazards; explicit strata need a grid. `n` and `seed` come from
/// flags first, then config, then defaults (10000, 0).
pub fn scenario_spec(
    section: Option<&ScenarioSection>,
    preset_flag: Option<&str>,
    n_flag: Option<usize>,
    seed_flag: Option<u64>,
) -> Result<ScenarioSpec, String> {
    let none = ScenarioSection {
        preset: None,
        n: None,
        seed: None,
        treat_prob: None,
        censor_hazard: None,
        grid: None,
        strata: None,
    };
    let s = section.unwrap_or(&none);
    let n = n_flag.or(s.n).unwrap_or(10_000);
    let seed = seed_flag.or(s.seed).unwrap_or(0);
    let preset_name = preset_flag.or(s.preset.as_deref());

    let mut spec = match (preset_name, &s.strata) {
        (Some(name), None) => {
            riskdecomp::sim::preset(name, n, seed).map_err(|e| e.to_string())?
        }
        (None, Some(strata)) => {
            let grid = s
                .grid
                .clone()
                .ok_or("scenario with explicit strata needs a grid")?;
            let strata = strata
                .iter()
                .map(|st| Stratum {
                    share: st.share,
                    hazards: HazardTable {
                        y_treated: st.y_treated.clone(),
                        y_control: st.y_control.clone(),
                        d_treated: st.d_treated.clone(),
                        d_control: st.d_control.clone(),
                    },
                })
                .collect();
            ScenarioSpec {
                grid,
                strata,
                n,
                seed,
                treat_prob: 0.5,
                censor_hazard: 0.0,
            }
        }
        (Some(_), Some(_)) => {
            return Err("scenario gives both a preset and explicit strata; pick one".into())
        }
        (None, None) => return Err("scenario needs a preset or explicit strata".into()),
    };
    if let Some(p) = s.treat_prob {
        spec.treat_prob = p;
    }
    if let Some(c) = s.censor_hazard {
        spec.censor_hazard = c;
    }
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

/// Comma-separated grid flag.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("--grid entry '{}' is not a number", p.trim()))
        })
        .collect()
}
