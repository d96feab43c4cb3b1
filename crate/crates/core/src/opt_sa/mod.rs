//! Placement optimizers for segment aggregation (all segments combined).

mod align;
mod ao;

pub use align::{
    anchor_segment, closed_form_position, closed_form_shift, phase_align_shift, refine_ps_tdma_sa,
    AlignShift, PhasePath, SaRefinement, SegmentRole, ShiftDirection,
};
pub use ao::{
    ao_objective_noma, ao_objective_pm_tdma, elementwise_ao, elementwise_ao_from, feasible_grid,
    sa_objective, AoOptions, AoSolution, AoTrace,
};

use crate::channel::{sa_effective_channel, snr};
use crate::error::Result;
use crate::model::{Placement, Protocol, RateReport, Scheme, SystemConfig, UserSet, WaveguideLayout};
use crate::rates::{noma_sum_rate, tdma_sum_rate};

#[derive(Debug, Clone, PartialEq)]
pub struct SaSolution {
    /// One placement per user slot for PS-TDMA, a single shared placement otherwise.
    pub placements: Vec<Placement>,
    pub report: RateReport,
    pub trace: Option<AoTrace>,
}

/// Rates of a shared SA placement under the attenuation of `cfg`.
pub fn evaluate_sa(
    users: &UserSet,
    placement: &Placement,
    layout: &WaveguideLayout,
    cfg: &SystemConfig,
    scheme: Scheme,
) -> Result<RateReport> {
    let snrs = users
        .iter()
        .map(|u| Ok(snr(u, sa_effective_channel(u, placement, layout, cfg)?.norm_sqr(), cfg)))
        .collect::<Result<Vec<f64>>>()?;
    let sum_rate = match scheme {
        Scheme::Noma => noma_sum_rate(&snrs)?,
        Scheme::PsTdma | Scheme::PmTdma => tdma_sum_rate(&snrs)?,
    };
    Ok(RateReport {
        scheme,
        protocol: Protocol::Sa,
        per_user_snr: snrs,
        sum_rate,
        trace: None,
    })
}

/// Optimizes the SA placement for `scheme` and reports the resulting sum-rate.
pub fn optimize_sa(
    users: &UserSet,
    layout: &WaveguideLayout,
    cfg: &SystemConfig,
    scheme: Scheme,
    options: &AoOptions,
) -> Result<SaSolution> {
    match scheme {
        Scheme::PsTdma => {
            let placements: Vec<Placement> = users
                .iter()
                .map(|u| refine_ps_tdma_sa(u, layout, cfg).placement())
                .collect();
            let snrs = users
                .iter()
                .zip(&placements)
                .map(|(u, p)| Ok(snr(u, sa_effective_channel(u, p, layout, cfg)?.norm_sqr(), cfg)))
                .collect::<Result<Vec<f64>>>()?;
            let sum_rate = tdma_sum_rate(&snrs)?;
            Ok(SaSolution {
                placements,
                report: RateReport {
                    scheme,
                    protocol: Protocol::Sa,
                    per_user_snr: snrs,
                    sum_rate,
                    trace: None,
                },
                trace: None,
            })
        }
        Scheme::PmTdma | Scheme::Noma => {
            let sol = elementwise_ao(users, layout, cfg, scheme, options)?;
            let mut report = evaluate_sa(users, &sol.placement, layout, cfg, scheme)?;
            report.trace = Some(sol.trace.iterations.clone());
            Ok(SaSolution {
                placements: vec![sol.placement],
                report,
                trace: Some(sol.trace),
            })
        }
    }
}
