//! Rates of given placements for any protocol.

use crate::baseline::pass_gain;
use crate::channel::{channel_gain, snr};
use crate::error::{Result, SwanError};
use crate::model::{is_feasible, Placement, Protocol, RateReport, Scheme, SystemConfig, UserSet, WaveguideLayout};
use crate::rates::{noma_sum_rate, tdma_sum_rate};

/// Evaluates either one shared placement or one placement per user slot.
///
/// For [`Protocol::Pass`] the placements are SS placements on segment 0 of a
/// single waveguide fed at `layout.first_feed()` and spanning `layout.span()`.
/// Infeasible placements are rejected with [`SwanError::Infeasible`].
pub fn evaluate_placements(
    users: &UserSet,
    placements: &[Placement],
    layout: &WaveguideLayout,
    cfg: &SystemConfig,
    protocol: Protocol,
    scheme: Scheme,
) -> Result<RateReport> {
    if placements.is_empty() {
        return Err(SwanError::EmptyInput);
    }
    if placements.len() != 1 && placements.len() != users.len() {
        return Err(SwanError::ArityMismatch {
            expected: users.len(),
            got: placements.len(),
        });
    }
    let pass_layout = WaveguideLayout::new(1, layout.span(), layout.first_feed())?;
    let target = if protocol == Protocol::Pass { &pass_layout } else { layout };
    for p in placements {
        let matches = matches!(
            (protocol, p),
            (Protocol::Ss | Protocol::Pass, Placement::Ss { .. }) | (Protocol::Sa, Placement::Sa { .. })
        );
        if !matches {
            return Err(SwanError::InvalidParameter {
                name: "placement",
                reason: format!("placement kind does not match protocol {protocol}"),
            });
        }
        if !is_feasible(p, target, cfg)? {
            return Err(SwanError::Infeasible(
                "placement violates segment bounds or minimum spacing".into(),
            ));
        }
    }

    let snrs = users
        .iter()
        .enumerate()
        .map(|(k, u)| {
            let p = &placements[if placements.len() == 1 { 0 } else { k }];
            let gain = match (protocol, p) {
                (Protocol::Pass, Placement::Ss { position, .. }) => {
                    pass_gain(u, *position, cfg, layout.first_feed(), layout.span())?
                }
                _ => channel_gain(u, p, target, cfg)?,
            };
            Ok(snr(u, gain, cfg))
        })
        .collect::<Result<Vec<f64>>>()?;
    let sum_rate = match scheme {
        Scheme::Noma => noma_sum_rate(&snrs)?,
        Scheme::PsTdma | Scheme::PmTdma => tdma_sum_rate(&snrs)?,
    };
    Ok(RateReport {
        scheme,
        protocol,
        per_user_snr: snrs,
        sum_rate,
        trace: None,
    })
}
