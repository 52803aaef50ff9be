//! Run artifacts: the long-format component table, the simulation truth
//! table, and the JSON run manifest.
//!
//! Every number is written as the shortest decimal that parses back to the
//! same `f64`, so reruns with identical inputs and seeds produce
//! byte-identical files. The manifest's timestamp is the one exception and
//! deliberately feeds no digest.

use std::io;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use riskdecomp::boot::BootstrapBands;
use riskdecomp::decomp::{Component, DecompositionCurve};
use riskdecomp::hazards::ModelSpec;
use riskdecomp::pipeline::PipelineReport;
use riskdecomp::sim::ScenarioSpec;

fn num(v: f64) -> String {
    format!("{v}")
}

/// `components.csv`: one row per (scale, component, horizon), horizons
/// `k = 1..=K`. Without bands the bound columns stay empty.
pub fn write_components_csv<W: io::Write>(
    writer: W,
    curve: &DecompositionCurve,
    bands: Option<&BootstrapBands>,
) -> Result<(), csv::Error> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["k", "t_k", "component", "scale", "estimate", "lower", "upper"])?;
    let scales = [
        ("risk", &curve.risk, bands.map(|b| (&b.risk_lower, &b.risk_upper))),
        ("rmst", &curve.rmst, bands.map(|b| (&b.rmst_lower, &b.rmst_upper))),
    ];
    for (scale, values, bounds) in scales {
        for c in Component::ALL {
            for k in 1..=curve.n_intervals() {
                let (lower, upper) = match bounds {
                    Some((lo, hi)) => (num(lo.at(c, k)), num(hi.at(c, k))),
                    None => (String::new(), String::new()),
                };
                wtr.write_record([
                    &k.to_string(),
                    &num(curve.grid[k]),
                    c.name(),
                    scale,
                    &num(values.at(c, k)),
                    &lower,
                    &upper,
                ])?;
            }
        }
    }
    wtr.flush()?;
    Ok(())
}

/// `truth.csv`: wide format, one row per (horizon, scale) with the eight
/// component columns.
pub fn write_truth_csv<W: io::Write>(
    writer: W,
    curve: &DecompositionCurve,
) -> Result<(), csv::Error> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = vec!["k".to_string(), "t_k".to_string(), "scale".to_string()];
    header.extend(Component::ALL.iter().map(|c| c.name().to_string()));
    wtr.write_record(&header)?;
    for (scale, values) in [("risk", &curve.risk), ("rmst", &curve.rmst)] {
        for k in 1..=curve.n_intervals() {
            let mut row = vec![k.to_string(), num(curve.grid[k]), scale.to_string()];
            row.extend(Component::ALL.iter().map(|&c| num(values.at(c, k))));
            wtr.write_record(&row)?;
        }
    }
    wtr.flush()?;
    Ok(())
}

/// Everything a run needs to be reproduced: versions, input digests, the
/// resolved model or scenario, fit diagnostics, and bootstrap accounting.
/// `generated_at_unix` is the only field that varies between identical runs.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool_version: &'static str,
    pub command: &'static str,
    pub generated_at_unix: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config_sha256: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_sha256: Option<String>,
    pub seed: u64,
    pub grid: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fits: Option<PipelineReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bootstrap: Option<BootstrapInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioSpec>,
}

#[derive(Debug, Serialize)]
pub struct BootstrapInfo {
    pub replicates: usize,
    pub used: usize,
    pub skipped: usize,
    pub seed: u64,
    pub level: f64,
}

pub fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn write_manifest<W: io::Write>(mut writer: W, manifest: &Manifest) -> io::Result<()> {
    let text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    writer.write_all(text.as_bytes())?;
    writer.write_all(b"\n")
}
