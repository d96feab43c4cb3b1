//! Placement optimizers for segment selection (one active antenna).
//!
//! PS-TDMA has a closed form: each slot puts the antenna under its user.
//! PM-TDMA and NOMA share one antenna position across users and are solved by
//! a grid search over the whole waveguide, optionally polished by Newton steps.
//! All design objectives assume a lossless waveguide; the reported rates use
//! the attenuation of the supplied config.

mod search;

pub use search::{argmax_over, grid_argmax, newton_refine, Grid};

use crate::channel::{single_antenna_gain, snr};
use crate::error::{Result, SwanError};
use crate::model::{Placement, Protocol, RateReport, Scheme, SystemConfig, User, UserSet, WaveguideLayout};
use crate::rates::{noma_sum_rate, tdma_sum_rate};

/// Closed-form PS-TDMA placement for one user's slot.
pub fn ps_tdma_place(user: &User, layout: &WaveguideLayout) -> Placement {
    let segment = layout.segment_of(user.x);
    let (lo, hi) = layout.segment_bounds(segment);
    Placement::Ss {
        segment,
        position: user.x.clamp(lo, hi),
    }
}

/// SNR of `user` through an antenna at `psi` scaled by a power loss factor.
#[inline]
pub(crate) fn scaled_snr(user: &User, psi: f64, cfg: &SystemConfig, loss: f64) -> f64 {
    let dx = user.x - psi;
    (user.power * loss) * (cfg.eta() / cfg.noise_power()) / (dx * dx + user.d_k(cfg))
}

/// NOMA design weight P_k/((u_x − ψ)² + d_k) scaled by a power loss factor.
#[inline]
pub(crate) fn scaled_weight(user: &User, psi: f64, cfg: &SystemConfig, loss: f64) -> f64 {
    let dx = user.x - psi;
    (user.power * loss) / (dx * dx + user.d_k(cfg))
}

/// PM-TDMA objective in product form: Π_k (1 + P_k η/σ² / ((u_x − ψ)² + d_k)).
pub fn pm_tdma_objective(psi: f64, users: &UserSet, cfg: &SystemConfig) -> f64 {
    users
        .iter()
        .map(|u| 1.0 + scaled_snr(u, psi, cfg, 1.0))
        .product()
}

/// PM-TDMA objective in log-sum form: Σ_k log₂(1 + snr_k(ψ)), i.e. K·R_T.
pub fn pm_tdma_log_objective(psi: f64, users: &UserSet, cfg: &SystemConfig) -> f64 {
    users
        .iter()
        .map(|u| scaled_snr(u, psi, cfg, 1.0).ln_1p())
        .sum::<f64>()
        / std::f64::consts::LN_2
}

/// d/dψ of the natural-log version of the PM-TDMA objective.
pub fn pm_tdma_log_derivative(psi: f64, users: &UserSet, cfg: &SystemConfig) -> f64 {
    let scale = cfg.eta() / cfg.noise_power();
    users
        .iter()
        .map(|u| {
            let a = u.power * scale;
            let x = psi - u.x;
            let q = x * x + u.d_k(cfg);
            -2.0 * a * x / (q * (q + a))
        })
        .sum()
}

/// NOMA objective Σ_k P_k/((u_x − ψ)² + d_k); multiply by η/σ² for the SNR sum.
pub fn noma_ss_objective(psi: f64, users: &UserSet, cfg: &SystemConfig) -> f64 {
    users.iter().map(|u| scaled_weight(u, psi, cfg, 1.0)).sum()
}

pub fn noma_ss_derivative(psi: f64, users: &UserSet, cfg: &SystemConfig) -> f64 {
    users
        .iter()
        .map(|u| {
            let x = psi - u.x;
            let q = x * x + u.d_k(cfg);
            -2.0 * u.power * x / (q * q)
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsOptions {
    pub grid_points: usize,
    /// Polish the grid optimum with projected Newton steps.
    pub newton: bool,
}

impl Default for SsOptions {
    fn default() -> Self {
        Self {
            grid_points: 10_000,
            newton: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SsSolution {
    /// One placement per user slot for PS-TDMA, a single shared placement otherwise.
    pub placements: Vec<Placement>,
    pub report: RateReport,
}

/// Shared SS position maximizing the PM-TDMA or NOMA objective over the whole waveguide.
pub fn shared_ss_position(
    users: &UserSet,
    layout: &WaveguideLayout,
    cfg: &SystemConfig,
    scheme: Scheme,
    options: &SsOptions,
) -> Result<f64> {
    let grid = Grid::new(layout.first_feed(), layout.end(), options.grid_points)?;
    let design = cfg.lossless();
    let interval = (layout.first_feed(), layout.end());
    let psi = match scheme {
        Scheme::PmTdma => {
            let f = |x: f64| pm_tdma_log_objective(x, users, &design);
            let x0 = grid_argmax(f, &grid)?;
            if options.newton {
                newton_refine(f, |x| pm_tdma_log_derivative(x, users, &design), x0, interval)
            } else {
                x0
            }
        }
        Scheme::Noma => {
            let f = |x: f64| noma_ss_objective(x, users, &design);
            let x0 = grid_argmax(f, &grid)?;
            if options.newton {
                newton_refine(f, |x| noma_ss_derivative(x, users, &design), x0, interval)
            } else {
                x0
            }
        }
        Scheme::PsTdma => {
            return Err(SwanError::UnsupportedScheme {
                scheme,
                context: "shared SS placement",
            })
        }
    };
    Ok(psi)
}

/// Rates of a shared SS placement. PS-TDMA is reported with the TDMA formula.
pub fn evaluate_ss(
    users: &UserSet,
    placement: &Placement,
    layout: &WaveguideLayout,
    cfg: &SystemConfig,
    scheme: Scheme,
) -> Result<RateReport> {
    let (segment, position) = match placement {
        Placement::Ss { segment, position } => (*segment, *position),
        Placement::Sa { positions } => {
            return Err(SwanError::ArityMismatch {
                expected: 1,
                got: positions.len(),
            })
        }
    };
    if segment >= layout.num_segments() {
        return Err(SwanError::SegmentOutOfRange {
            index: segment,
            segments: layout.num_segments(),
        });
    }
    let feed = layout.feed(segment);
    let snrs: Vec<f64> = users
        .iter()
        .map(|u| snr(u, single_antenna_gain(u, position, feed, cfg), cfg))
        .collect();
    let sum_rate = match scheme {
        Scheme::Noma => noma_sum_rate(&snrs)?,
        Scheme::PsTdma | Scheme::PmTdma => tdma_sum_rate(&snrs)?,
    };
    Ok(RateReport {
        scheme,
        protocol: Protocol::Ss,
        per_user_snr: snrs,
        sum_rate,
        trace: None,
    })
}

/// Optimizes the SS placement for `scheme` and reports the resulting sum-rate.
pub fn optimize_ss(
    users: &UserSet,
    layout: &WaveguideLayout,
    cfg: &SystemConfig,
    scheme: Scheme,
    options: &SsOptions,
) -> Result<SsSolution> {
    match scheme {
        Scheme::PsTdma => {
            let placements: Vec<Placement> = users.iter().map(|u| ps_tdma_place(u, layout)).collect();
            let snrs: Vec<f64> = users
                .iter()
                .zip(&placements)
                .map(|(u, p)| match p {
                    Placement::Ss { segment, position } => {
                        snr(u, single_antenna_gain(u, *position, layout.feed(*segment), cfg), cfg)
                    }
                    Placement::Sa { .. } => unreachable!("ps_tdma_place returns SS placements"),
                })
                .collect();
            let sum_rate = tdma_sum_rate(&snrs)?;
            Ok(SsSolution {
                placements,
                report: RateReport {
                    scheme,
                    protocol: Protocol::Ss,
                    per_user_snr: snrs,
                    sum_rate,
                    trace: None,
                },
            })
        }
        Scheme::PmTdma | Scheme::Noma => {
            let psi = shared_ss_position(users, layout, cfg, scheme, options)?;
            let placement = Placement::Ss {
                segment: layout.segment_of(psi),
                position: psi,
            };
            let report = evaluate_ss(users, &placement, layout, cfg, scheme)?;
            Ok(SsSolution {
                placements: vec![placement],
                report,
            })
        }
    }
}
