//! Achievable sum-rates from per-user SNRs.

use crate::error::{Result, SwanError};

fn check(snrs: &[f64]) -> Result<()> {
    if snrs.is_empty() {
        return Err(SwanError::EmptyInput);
    }
    Ok(())
}

/// Orthogonal time slots: (1/K)·Σ log₂(1 + snr_k).
pub fn tdma_sum_rate(snrs: &[f64]) -> Result<f64> {
    check(snrs)?;
    let total: f64 = snrs.iter().map(|s| s.ln_1p()).sum();
    Ok(total / std::f64::consts::LN_2 / snrs.len() as f64)
}

/// Uplink NOMA sum capacity: log₂(1 + Σ snr_k).
pub fn noma_sum_rate(snrs: &[f64]) -> Result<f64> {
    check(snrs)?;
    Ok(snrs.iter().sum::<f64>().ln_1p() / std::f64::consts::LN_2)
}
