//! Configuration ingestion: flat key-value TOML with section headers.
//!
//! Physical quantities carry explicit units in their key names
//! (`alpha_db_per_km`, `t_m_s`, ...); unit bugs dominate this domain.
//! Values resolve in three layers: parameter-set preset, config file,
//! command-line flags. A field that no layer provides raises an error
//! naming it.

use anyhow::{anyhow, bail, Context, Result};
use qkd_core::presets::{parameter_set, ParameterSet};
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub scenario: Option<ScenarioSection>,
    pub link: Option<LinkSection>,
    pub cv: Option<CvSection>,
    pub source: Option<SourceSection>,
    pub sim: Option<SimSection>,
    pub repeater: Option<RepeaterSection>,
    pub network: Option<NetworkSection>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub protocol: Option<String>,
    pub set: Option<u8>,
    pub sweep: Option<String>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub grid: Option<usize>,
    pub bound: Option<String>,
    pub out: Option<String>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSection {
    pub t: Option<f64>,
    pub t_bob: Option<f64>,
    pub eta: Option<f64>,
    pub p_dark_per_gate: Option<f64>,
    pub visibility: Option<f64>,
    pub visibility_eb: Option<f64>,
    pub nu_pulse_hz: Option<f64>,
    pub f_ec: Option<f64>,
    pub eps_cow: Option<f64>,
    pub zeta_eb: Option<f64>,
    pub alpha_db_per_km: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CvSection {
    pub epsilon_snu: Option<f64>,
    pub eta: Option<f64>,
    pub v_el_snu: Option<f64>,
    pub beta: Option<f64>,
    pub v_modulation: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSection {
    pub mu: Option<f64>,
    pub pair_m2: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub pulses: Option<u64>,
    pub p_intercept: Option<f64>,
    pub visibility: Option<f64>,
    pub t_total: Option<f64>,
    pub f_ec: Option<f64>,
    pub pa_rate: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepeaterSection {
    pub nu_pulse_hz: Option<f64>,
    pub eta: Option<f64>,
    pub eta_m: Option<f64>,
    pub p_m: Option<f64>,
    pub n_modes: Option<u32>,
    pub t_m_s: Option<f64>,
    pub fidelity: Option<f64>,
    pub alpha_db_per_km: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    pub total_km: Option<f64>,
    pub k_target_hz: Option<f64>,
    pub device_cost: Option<f64>,
    pub exponent: Option<f64>,
    pub alpha_db_per_km: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("malformed config {}", path.display()))
    }
}

/// Fully resolved device parameters for the DV and CV rate evaluations.
#[derive(Debug, Clone, Copy)]
pub struct ResolvedDevice {
    pub t_bob: f64,
    pub eta: f64,
    pub p_dark: f64,
    pub visibility: f64,
    pub visibility_eb: f64,
    pub f_ec: f64,
    pub eps_cow: f64,
    pub zeta_eb: f64,
    pub alpha_db_per_km: f64,
    pub cv_epsilon: f64,
    pub cv_eta: f64,
    pub cv_v_el: f64,
    pub cv_beta: f64,
}

fn require(name: &str, v: Option<f64>) -> Result<f64> {
    v.ok_or_else(|| anyhow!("missing field {name}: set it in the config or pass --set"))
}

/// Merges preset and config-file values into the device description.
pub fn resolve_device(set: Option<u8>, file: &FileConfig) -> Result<ResolvedDevice> {
    let preset: Option<&ParameterSet> = match set {
        Some(i) => Some(parameter_set(i).ok_or_else(|| anyhow!("unknown parameter set {i}"))?),
        None => None,
    };
    let link = file.link.clone().unwrap_or_default();
    let cv = file.cv.clone().unwrap_or_default();
    let dv = preset.map(|p| p.dv);
    let cvp = preset.map(|p| p.cv);
    Ok(ResolvedDevice {
        t_bob: require("link.t_bob", link.t_bob.or(dv.map(|d| d.t_bob)))?,
        eta: require("link.eta", link.eta.or(dv.map(|d| d.eta)))?,
        p_dark: require(
            "link.p_dark_per_gate",
            link.p_dark_per_gate.or(dv.map(|d| d.p_dark)),
        )?,
        visibility: require(
            "link.visibility",
            link.visibility.or(dv.map(|d| d.visibility_pm)),
        )?,
        visibility_eb: require(
            "link.visibility_eb",
            link.visibility_eb
                .or(link.visibility)
                .or(dv.map(|d| d.visibility_eb)),
        )?,
        f_ec: require("link.f_ec", link.f_ec.or(dv.map(|d| d.f_ec)))?,
        eps_cow: require("link.eps_cow", link.eps_cow.or(dv.map(|d| d.eps_cow)))?,
        zeta_eb: link.zeta_eb.or(dv.map(|d| d.zeta_eb)).unwrap_or(0.0),
        alpha_db_per_km: link.alpha_db_per_km.unwrap_or(0.2),
        cv_epsilon: require("cv.epsilon_snu", cv.epsilon_snu.or(cvp.map(|c| c.epsilon)))?,
        cv_eta: require("cv.eta", cv.eta.or(cvp.map(|c| c.eta)))?,
        cv_v_el: require("cv.v_el_snu", cv.v_el_snu.or(cvp.map(|c| c.v_el)))?,
        cv_beta: require("cv.beta", cv.beta.or(cvp.map(|c| c.beta)))?,
    })
}

/// Bound scenario selector for the sweep engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// Uncalibrated-device lower bounds (default).
    Lower,
    /// Adds the calibrated-device upper-bound columns for WCP BB84.
    CalibratedUpper,
}

impl std::str::FromStr for BoundKind {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lower" | "uncalibrated" => Ok(BoundKind::Lower),
            "calibrated-upper" | "calibrated_upper" => Ok(BoundKind::CalibratedUpper),
            other => bail!("unknown bound scenario '{other}' (lower | calibrated-upper)"),
        }
    }
}
