use serde::{Deserialize, Serialize};

use crate::error::{Result, SwanError};
use crate::model::{Protocol, Scheme};
use crate::scenario::RadioParams;

/// One (protocol, scheme) combination evaluated at every sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Arm {
    pub protocol: Protocol,
    pub scheme: Scheme,
}

impl Arm {
    pub fn new(protocol: Protocol, scheme: Scheme) -> Self {
        Self { protocol, scheme }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Sweep {
    /// Vary the side length D_x with fixed segment length; M = D_x / L.
    DxSweep { values: Vec<f64>, segment_length_m: f64 },
    /// Vary M over a fixed span; L = D_x / M.
    SegmentsFixedSpan { segments: Vec<usize>, span_m: f64 },
    /// Vary M with fixed segment length; D_x = M·L.
    SegmentsFixedLength { segments: Vec<usize>, segment_length_m: f64 },
    /// Per-iteration objective of the alternating optimization.
    Convergence { num_segments: usize, segment_length_m: f64 },
}

impl Sweep {
    pub fn param_name(&self) -> &'static str {
        match self {
            Sweep::DxSweep { .. } => "dx_m",
            Sweep::SegmentsFixedSpan { .. } | Sweep::SegmentsFixedLength { .. } => "num_segments",
            Sweep::Convergence { .. } => "iteration",
        }
    }

    /// (sweep value, segment count, segment length) for every point.
    pub(crate) fn points(&self) -> Vec<(f64, usize, f64)> {
        match self {
            Sweep::DxSweep {
                values,
                segment_length_m,
            } => values
                .iter()
                .map(|&dx| (dx, (dx / segment_length_m).round() as usize, *segment_length_m))
                .collect(),
            Sweep::SegmentsFixedSpan { segments, span_m } => segments
                .iter()
                .map(|&m| (m as f64, m, span_m / m as f64))
                .collect(),
            Sweep::SegmentsFixedLength {
                segments,
                segment_length_m,
            } => segments
                .iter()
                .map(|&m| (m as f64, m, *segment_length_m))
                .collect(),
            Sweep::Convergence {
                num_segments,
                segment_length_m,
            } => vec![(0.0, *num_segments, *segment_length_m)],
        }
    }
}

fn default_users() -> usize {
    4
}
fn default_region_y() -> f64 {
    20.0
}
fn default_power() -> f64 {
    10.0
}
fn default_grid() -> usize {
    10_000
}
fn default_trials() -> usize {
    100
}
fn default_tolerance() -> f64 {
    1e-4
}
fn default_max_iters() -> usize {
    50
}
fn default_arms() -> Vec<Arm> {
    [Protocol::Ss, Protocol::Sa, Protocol::Pass]
        .into_iter()
        .flat_map(|p| Scheme::ALL.into_iter().map(move |s| Arm::new(p, s)))
        .collect()
}

/// A seeded Monte-Carlo experiment over one sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    #[serde(flatten)]
    pub radio: RadioParams,
    #[serde(default = "default_users")]
    pub num_users: usize,
    /// Side length of the user region along y.
    #[serde(default = "default_region_y")]
    pub region_y_m: f64,
    #[serde(default = "default_power")]
    pub power_dbm: f64,
    #[serde(default = "default_grid")]
    pub grid_points: usize,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_tolerance")]
    pub ao_tolerance: f64,
    #[serde(default = "default_max_iters")]
    pub ao_max_iters: usize,
    /// Attenuation the designed placements are re-evaluated at; the design
    /// attenuation is used when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_eval_db_per_m: Option<f64>,
    #[serde(default = "default_arms")]
    pub arms: Vec<Arm>,
    pub sweep: Sweep,
}

impl ExperimentSpec {
    pub fn new(sweep: Sweep) -> Self {
        Self {
            radio: RadioParams::default(),
            num_users: default_users(),
            region_y_m: default_region_y(),
            power_dbm: default_power(),
            grid_points: default_grid(),
            trials: default_trials(),
            seed: 0,
            ao_tolerance: default_tolerance(),
            ao_max_iters: default_max_iters(),
            kappa_eval_db_per_m: None,
            arms: default_arms(),
            sweep,
        }
    }

    /// Parses and validates a JSON spec.
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text).map_err(|e| SwanError::InvalidSpec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(SwanError::InvalidSpec(msg));
        let cfg = self.radio.system_config()?;
        if let Some(k) = self.kappa_eval_db_per_m {
            cfg.with_attenuation(k)?;
        }
        if self.trials == 0 {
            return fail("trials must be >= 1".into());
        }
        if self.num_users == 0 {
            return fail("num_users must be >= 1".into());
        }
        if !(self.region_y_m.is_finite() && self.region_y_m >= 0.0) {
            return fail("region_y_m must be finite and >= 0".into());
        }
        if !self.power_dbm.is_finite() {
            return fail("power_dbm must be finite".into());
        }
        if self.grid_points < 2 {
            return fail("grid_points must be >= 2".into());
        }
        if self.ao_max_iters == 0 || !(self.ao_tolerance >= 0.0) {
            return fail("ao_max_iters must be >= 1 and ao_tolerance >= 0".into());
        }
        if self.arms.is_empty() {
            return fail("at least one arm is required".into());
        }
        match &self.sweep {
            Sweep::DxSweep {
                values,
                segment_length_m,
            } => {
                if !(*segment_length_m > 0.0 && segment_length_m.is_finite()) {
                    return fail("segment_length_m must be > 0".into());
                }
                for &dx in values {
                    if !(dx > 0.0 && dx.is_finite()) {
                        return fail(format!("sweep value {dx} must be > 0"));
                    }
                    let m = dx / segment_length_m;
                    if (m - m.round()).abs() > 1e-9 * m.max(1.0) || m.round() < 1.0 {
                        return fail(format!("D_x = {dx} is not a whole number of segments"));
                    }
                }
                if values.is_empty() {
                    return fail("sweep needs at least one value".into());
                }
            }
            Sweep::SegmentsFixedSpan { segments, span_m } => {
                if !(*span_m > 0.0 && span_m.is_finite()) {
                    return fail("span_m must be > 0".into());
                }
                if segments.is_empty() || segments.contains(&0) {
                    return fail("segment counts must be >= 1".into());
                }
            }
            Sweep::SegmentsFixedLength {
                segments,
                segment_length_m,
            } => {
                if !(*segment_length_m > 0.0 && segment_length_m.is_finite()) {
                    return fail("segment_length_m must be > 0".into());
                }
                if segments.is_empty() || segments.contains(&0) {
                    return fail("segment counts must be >= 1".into());
                }
            }
            Sweep::Convergence {
                num_segments,
                segment_length_m,
            } => {
                if *num_segments == 0 || !(*segment_length_m > 0.0 && segment_length_m.is_finite()) {
                    return fail("convergence sweep needs num_segments >= 1 and segment_length_m > 0".into());
                }
                if let Some(arm) = self
                    .arms
                    .iter()
                    .find(|a| a.protocol != Protocol::Sa || a.scheme == Scheme::PsTdma)
                {
                    return fail(format!(
                        "convergence sweep supports SA with PM-TDMA or NOMA only, got {}-{}",
                        arm.protocol, arm.scheme
                    ));
                }
            }
        }
        Ok(())
    }
}
