use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::spec::Arm;
use crate::model::{Protocol, Scheme};

pub const CSV_HEADER: &str = "sweep_param,value,protocol,scheme,mean_rate_bps_hz,stderr,trials";

/// Aggregate of one arm at one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub sweep_param: String,
    pub value: f64,
    pub protocol: Protocol,
    pub scheme: Scheme,
    pub mean_rate_bps_hz: f64,
    pub stderr: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Per-trial values behind each row, same order as `rows`.
    #[serde(skip)]
    pub samples: Vec<Vec<f64>>,
}

/// Mean and standard error of the mean.
pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

impl SweepResult {
    pub(crate) fn push(&mut self, param: &str, value: f64, arm: Arm, samples: Vec<f64>) {
        let (mean, stderr) = mean_and_stderr(&samples);
        self.rows.push(SweepRow {
            sweep_param: param.to_string(),
            value,
            protocol: arm.protocol,
            scheme: arm.scheme,
            mean_rate_bps_hz: mean,
            stderr,
            trials: samples.len(),
        });
        self.samples.push(samples);
    }

    pub fn find(&self, value: f64, arm: Arm) -> Option<(&SweepRow, &[f64])> {
        self.rows
            .iter()
            .zip(&self.samples)
            .find(|(r, _)| r.value == value && r.protocol == arm.protocol && r.scheme == arm.scheme)
            .map(|(r, s)| (r, s.as_slice()))
    }

    /// Mean and standard error of the per-trial difference `a − b` at `value`.
    pub fn paired_difference(&self, value: f64, a: Arm, b: Arm) -> Option<(f64, f64)> {
        let (_, sa) = self.find(value, a)?;
        let (_, sb) = self.find(value, b)?;
        if sa.len() != sb.len() || sa.is_empty() {
            return None;
        }
        let diffs: Vec<f64> = sa.iter().zip(sb).map(|(x, y)| x - y).collect();
        Some(mean_and_stderr(&diffs))
    }

    /// Distinct sweep values in first-seen order.
    pub fn values(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.value) {
                out.push(r.value);
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.sweep_param, r.value, r.protocol, r.scheme, r.mean_rate_bps_hz, r.stderr, r.trials
            );
        }
        out
    }

    /// JSON array of rows with the same fields as the CSV.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.rows).expect("rows serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats() {
        let (m, se) = mean_and_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_and_stderr(&[7.0]), (7.0, 0.0));
    }

    #[test]
    fn csv_and_json_layout() {
        let mut res = SweepResult::default();
        res.push("dx_m", 30.0, Arm::new(Protocol::Ss, Scheme::Noma), vec![1.0, 3.0]);
        res.push("dx_m", 30.0, Arm::new(Protocol::Pass, Scheme::Noma), vec![0.5, 2.5]);
        let csv = res.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "dx_m,30,SS,NOMA,2,1,2");
        let json: serde_json::Value = serde_json::from_str(&res.to_json()).unwrap();
        assert_eq!(json[1]["protocol"], "PASS");
        assert_eq!(json[1]["mean_rate_bps_hz"], 1.5);
        let (d, se) = res
            .paired_difference(30.0, Arm::new(Protocol::Ss, Scheme::Noma), Arm::new(Protocol::Pass, Scheme::Noma))
            .unwrap();
        assert_eq!((d, se), (0.5, 0.0));
    }
}
