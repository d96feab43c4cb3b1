//! JSON scenario files: radio parameters, waveguide layout and users.
//!
//! ```json
//! {
//!   "carrier_frequency_hz": 28e9, "n_eff": 1.4, "min_spacing_m": "half_wavelength",
//!   "deploy_height_m": 3.0, "kappa_db_per_m": 0.0, "noise_power_dbm": -90.0,
//!   "num_segments": 50, "segment_length_m": 1.0, "first_feed_m": -25.0,
//!   "users": [{"x_m": 1.0, "y_m": -2.0, "power_dbm": 10.0}]
//! }
//! ```
//! Radio keys fall back to the 28 GHz defaults when omitted; the layout falls
//! back to 50 one-meter segments centered on the origin.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::{dbm_to_watts, SystemConfig, User, UserSet, WaveguideLayout};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedSpacing {
    HalfWavelength,
}

/// Minimum antenna spacing: meters, or a named multiple of the wavelength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Spacing {
    Meters(f64),
    Named(NamedSpacing),
}

impl Default for Spacing {
    fn default() -> Self {
        Spacing::Named(NamedSpacing::HalfWavelength)
    }
}

fn default_frequency() -> f64 {
    28e9
}
fn default_n_eff() -> f64 {
    1.4
}
fn default_height() -> f64 {
    3.0
}
fn default_noise() -> f64 {
    -90.0
}
fn default_segments() -> usize {
    50
}
fn default_segment_length() -> f64 {
    1.0
}

/// Radio and waveguide material parameters as they appear in config files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    #[serde(default = "default_frequency")]
    pub carrier_frequency_hz: f64,
    #[serde(default = "default_n_eff")]
    pub n_eff: f64,
    #[serde(default)]
    pub min_spacing_m: Spacing,
    #[serde(default = "default_height")]
    pub deploy_height_m: f64,
    #[serde(default)]
    pub kappa_db_per_m: f64,
    #[serde(default = "default_noise")]
    pub noise_power_dbm: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            carrier_frequency_hz: default_frequency(),
            n_eff: default_n_eff(),
            min_spacing_m: Spacing::default(),
            deploy_height_m: default_height(),
            kappa_db_per_m: 0.0,
            noise_power_dbm: default_noise(),
        }
    }
}

impl RadioParams {
    pub fn system_config(&self) -> Result<SystemConfig> {
        if !(self.carrier_frequency_hz.is_finite() && self.carrier_frequency_hz > 0.0) {
            return Err(invalid("carrier_frequency_hz", "must be finite and > 0"));
        }
        let spacing = match self.min_spacing_m {
            Spacing::Meters(m) => m,
            Spacing::Named(NamedSpacing::HalfWavelength) => {
                crate::model::SPEED_OF_LIGHT / self.carrier_frequency_hz / 2.0
            }
        };
        SystemConfig::new(
            self.carrier_frequency_hz,
            self.n_eff,
            spacing,
            self.deploy_height_m,
            self.kappa_db_per_m,
            dbm_to_watts(self.noise_power_dbm),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserEntry {
    pub x_m: f64,
    pub y_m: f64,
    pub power_dbm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    #[serde(flatten)]
    pub radio: RadioParams,
    #[serde(default = "default_segments")]
    pub num_segments: usize,
    #[serde(default = "default_segment_length")]
    pub segment_length_m: f64,
    /// Centered on the origin when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_feed_m: Option<f64>,
    pub users: Vec<UserEntry>,
}

/// Validated scenario ready for the optimizers.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub cfg: SystemConfig,
    pub layout: WaveguideLayout,
    pub users: UserSet,
}

impl ScenarioFile {
    pub fn into_scenario(&self) -> Result<Scenario> {
        let cfg = self.radio.system_config()?;
        let first_feed = self
            .first_feed_m
            .unwrap_or(-(self.num_segments as f64) * self.segment_length_m / 2.0);
        let layout = WaveguideLayout::new(self.num_segments, self.segment_length_m, first_feed)?;
        let users = UserSet::new(
            self.users
                .iter()
                .map(|u| User::new(u.x_m, u.y_m, dbm_to_watts(u.power_dbm)))
                .collect::<Result<Vec<_>>>()?,
        )?;
        Ok(Scenario { cfg, layout, users })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_file() {
        let text = r#"{
            "carrier_frequency_hz": 28e9, "n_eff": 1.4, "min_spacing_m": "half_wavelength",
            "deploy_height_m": 3.0, "kappa_db_per_m": 0.08, "noise_power_dbm": -90.0,
            "num_segments": 50, "segment_length_m": 1.0, "first_feed_m": -25.0,
            "users": [{"x_m": 1.0, "y_m": -2.0, "power_dbm": 10.0}]
        }"#;
        let file: ScenarioFile = serde_json::from_str(text).unwrap();
        let s = file.into_scenario().unwrap();
        assert!((s.cfg.min_spacing() - s.cfg.wavelength() / 2.0).abs() < 1e-18);
        assert_eq!(s.cfg.attenuation_db_per_m(), 0.08);
        assert!((s.cfg.noise_power() - 1e-12).abs() < 1e-24);
        assert_eq!(s.layout.num_segments(), 50);
        assert!((s.users.as_slice()[0].power - 0.01).abs() < 1e-15);
    }

    #[test]
    fn numeric_spacing_and_defaults() {
        let text = r#"{"min_spacing_m": 0.01, "num_segments": 2, "segment_length_m": 1.0,
            "first_feed_m": 0.0, "users": [{"x_m": 0.5, "y_m": 0.0, "power_dbm": 10.0}]}"#;
        let file: ScenarioFile = serde_json::from_str(text).unwrap();
        let s = file.into_scenario().unwrap();
        assert_eq!(s.cfg.min_spacing(), 0.01);
        assert_eq!(s.cfg.n_eff(), 1.4);

        let bare = r#"{"users": [{"x_m": 0.5, "y_m": 0.0, "power_dbm": 10.0}]}"#;
        let s = serde_json::from_str::<ScenarioFile>(bare).unwrap().into_scenario().unwrap();
        assert_eq!(s.layout.num_segments(), 50);
        assert_eq!(s.layout.first_feed(), -25.0);
    }

    #[test]
    fn rejects_invalid_content() {
        let no_users = r#"{"num_segments": 2, "segment_length_m": 1.0, "first_feed_m": 0.0, "users": []}"#;
        let file: ScenarioFile = serde_json::from_str(no_users).unwrap();
        assert!(file.into_scenario().is_err());
        let bad_spacing = r#"{"min_spacing_m": "quarter", "num_segments": 2, "segment_length_m": 1.0,
            "first_feed_m": 0.0, "users": []}"#;
        assert!(serde_json::from_str::<ScenarioFile>(bad_spacing).is_err());
    }
}
