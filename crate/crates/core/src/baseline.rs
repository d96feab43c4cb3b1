//! Conventional single-waveguide baseline: one active antenna on a waveguide
//! fed at its left end, with attenuation accumulated over the whole run from
//! the feed.

use crate::channel::{single_antenna_gain, snr};
use crate::error::{Result, SwanError};
use crate::model::{Protocol, RateReport, Scheme, SystemConfig, User, UserSet, FEASIBILITY_TOL};
use crate::opt_ss::{grid_argmax, scaled_snr, scaled_weight, Grid};
use crate::rates::{noma_sum_rate, tdma_sum_rate};
use crate::channel::power_loss;

/// |h|² of the baseline antenna at `psi`: 10^(−κ(ψ−feed)/10)·η/((u_x − ψ)² + d_k).
pub fn pass_gain(user: &User, psi: f64, cfg: &SystemConfig, feed: f64, span: f64) -> Result<f64> {
    let end = feed + span;
    if !(psi >= feed - FEASIBILITY_TOL && psi <= end + FEASIBILITY_TOL) {
        return Err(SwanError::OutOfSpan {
            position: psi,
            start: feed,
            end,
        });
    }
    Ok(single_antenna_gain(user, psi, feed, cfg))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PassSolution {
    /// One position per user slot for PS-TDMA, a single shared position otherwise.
    pub positions: Vec<f64>,
    pub report: RateReport,
}

/// Grid search of the baseline antenna position using the attenuated gain.
pub fn optimize_pass(
    users: &UserSet,
    cfg: &SystemConfig,
    feed: f64,
    span: f64,
    scheme: Scheme,
    grid_points: usize,
) -> Result<PassSolution> {
    let grid = Grid::new(feed, feed + span, grid_points)?;
    let kappa = cfg.attenuation_db_per_m();
    let loss = |x: f64| power_loss(kappa, x - feed);

    let positions = match scheme {
        Scheme::PsTdma => users
            .iter()
            .map(|u| grid_argmax(|x| scaled_snr(u, x, cfg, loss(x)), &grid))
            .collect::<Result<Vec<f64>>>()?,
        Scheme::PmTdma => vec![grid_argmax(
            |x| {
                let l = loss(x);
                users
                    .iter()
                    .map(|u| scaled_snr(u, x, cfg, l).ln_1p())
                    .sum::<f64>()
                    / std::f64::consts::LN_2
            },
            &grid,
        )?],
        Scheme::Noma => vec![grid_argmax(
            |x| {
                let l = loss(x);
                users.iter().map(|u| scaled_weight(u, x, cfg, l)).sum()
            },
            &grid,
        )?],
    };

    let snrs = if scheme == Scheme::PsTdma {
        users
            .iter()
            .zip(&positions)
            .map(|(u, &x)| Ok(snr(u, pass_gain(u, x, cfg, feed, span)?, cfg)))
            .collect::<Result<Vec<f64>>>()?
    } else {
        users
            .iter()
            .map(|u| Ok(snr(u, pass_gain(u, positions[0], cfg, feed, span)?, cfg)))
            .collect::<Result<Vec<f64>>>()?
    };
    let sum_rate = match scheme {
        Scheme::Noma => noma_sum_rate(&snrs)?,
        Scheme::PsTdma | Scheme::PmTdma => tdma_sum_rate(&snrs)?,
    };
    Ok(PassSolution {
        positions,
        report: RateReport {
            scheme,
            protocol: Protocol::Pass,
            per_user_snr: snrs,
            sum_rate,
            trace: None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::WaveguideLayout;
    use crate::opt_ss::{optimize_ss, SsOptions};

    fn users(specs: &[(f64, f64)]) -> UserSet {
        UserSet::new(specs.iter().map(|&(x, y)| User::new(x, y, 0.01).unwrap()).collect()).unwrap()
    }

    #[test]
    fn gain_examples() {
        let cfg = SystemConfig::default();
        let u = User::new(3.0, 2.0, 0.01).unwrap();
        let lossless = pass_gain(&u, 5.0, &cfg, -25.0, 50.0).unwrap();
        let eq6 = cfg.eta() / (4.0 + u.d_k(&cfg));
        assert!((lossless - eq6).abs() <= 1e-15 * eq6);

        let lossy = cfg.with_attenuation(0.08).unwrap();
        let g = pass_gain(&u, 25.0, &lossy, -25.0, 50.0).unwrap();
        let g0 = pass_gain(&u, 25.0, &cfg, -25.0, 50.0).unwrap();
        assert!((g / g0 - 10f64.powf(-0.4)).abs() < 1e-12);
        assert!((g / g0 - 0.398).abs() < 1e-3);

        let at_feed = pass_gain(&u, -25.0, &lossy, -25.0, 50.0).unwrap();
        let at_feed0 = pass_gain(&u, -25.0, &cfg, -25.0, 50.0).unwrap();
        assert_eq!(at_feed, at_feed0);
        assert!(matches!(pass_gain(&u, 26.0, &cfg, -25.0, 50.0), Err(SwanError::OutOfSpan { .. })));
    }

    #[test]
    fn gain_never_exceeds_lossless() {
        let cfg = SystemConfig::default().with_attenuation(0.08).unwrap();
        let u = User::new(-4.0, 6.0, 0.01).unwrap();
        for i in 0..=100 {
            let x = -25.0 + 0.5 * i as f64;
            let g = pass_gain(&u, x, &cfg, -25.0, 50.0).unwrap();
            let eq6 = cfg.eta() / ((u.x - x).powi(2) + u.d_k(&cfg));
            assert!(g <= eq6);
        }
    }

    #[test]
    fn lossless_baseline_matches_segment_selection() {
        let cfg = SystemConfig::default();
        let layout = WaveguideLayout::new(50, 1.0, -25.0).unwrap();
        let set = users(&[(-12.0, 3.0), (-9.0, -1.0), (8.0, 7.0), (20.0, 2.0)]);
        let q = 1000;
        for scheme in [Scheme::PmTdma, Scheme::Noma] {
            let pass = optimize_pass(&set, &cfg, -25.0, 50.0, scheme, q).unwrap();
            let ss = optimize_ss(&set, &layout, &cfg, scheme, &SsOptions { grid_points: q, newton: false }).unwrap();
            assert_eq!(pass.report.sum_rate, ss.report.sum_rate);
        }
        let pass = optimize_pass(&set, &cfg, -25.0, 50.0, Scheme::PsTdma, q).unwrap();
        let ss = optimize_ss(&set, &layout, &cfg, Scheme::PsTdma, &SsOptions::default()).unwrap();
        assert!(ss.report.sum_rate >= pass.report.sum_rate);
        assert!(ss.report.sum_rate - pass.report.sum_rate < 1e-4);
    }

    #[test]
    fn attenuation_pulls_toward_feed_and_costs_rate() {
        let lossless = SystemConfig::default();
        let lossy = lossless.with_attenuation(0.08).unwrap();
        let far = users(&[(20.0, 9.0)]);
        let sol = optimize_pass(&far, &lossy, -25.0, 50.0, Scheme::PsTdma, 5001).unwrap();
        assert!(sol.positions[0] <= 20.0);
        // Brute-force oracle for the attenuated trade-off on a finer grid.
        let u = far.as_slice()[0];
        let fine = Grid::new(-25.0, 25.0, 50_001).unwrap();
        let best = grid_argmax(|x| pass_gain(&u, x, &lossy, -25.0, 50.0).unwrap(), &fine).unwrap();
        assert!(best < 20.0);
        assert!((sol.positions[0] - best).abs() <= 0.01 + 1e-9);

        let set = users(&[(-12.0, 3.0), (-9.0, -1.0), (8.0, 7.0), (20.0, 2.0)]);
        for scheme in Scheme::ALL {
            let a = optimize_pass(&set, &lossless, -25.0, 50.0, scheme, 1000).unwrap();
            let b = optimize_pass(&set, &lossy, -25.0, 50.0, scheme, 1000).unwrap();
            assert!(b.report.sum_rate <= a.report.sum_rate);
        }
    }
}
