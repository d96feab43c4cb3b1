//! Seeded Monte-Carlo sweeps over side length and segment count.
//!
//! Trial `t` always draws its users from ChaCha8 stream `t` of the experiment seed,
//! scaled to the region at the current sweep point, so every arm and every
//! sweep point sees the same underlying realizations. Trials run in parallel
//! and are reduced in trial order, which keeps results bit-identical
//! regardless of thread count.

mod output;
mod spec;

pub use output::{mean_and_stderr, SweepResult, SweepRow, CSV_HEADER};
pub use spec::{Arm, ExperimentSpec, Sweep};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::baseline::optimize_pass;
use crate::error::Result;
use crate::evaluate::evaluate_placements;
use crate::model::{dbm_to_watts, Placement, Protocol, RateReport, Scheme, SystemConfig, User, UserSet, WaveguideLayout};
use crate::opt_sa::{elementwise_ao, optimize_sa, AoOptions};
use crate::opt_ss::{optimize_ss, SsOptions};

/// RNG for trial `trial` of an experiment seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// `k` users uniform on the `dx` × `dy` rectangle centered at the origin.
pub fn sample_users<R: Rng + ?Sized>(k: usize, dx: f64, dy: f64, power_w: f64, rng: &mut R) -> Result<UserSet> {
    let users = (0..k)
        .map(|_| {
            let x = (rng.random::<f64>() - 0.5) * dx;
            let y = (rng.random::<f64>() - 0.5) * dy;
            User::new(x, y, power_w)
        })
        .collect::<Result<Vec<_>>>()?;
    UserSet::new(users)
}

/// Everything a trial needs besides its users.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialSetup {
    pub layout: WaveguideLayout,
    pub cfg: SystemConfig,
    /// Re-evaluates the designed placements under this config when set.
    pub eval_cfg: Option<SystemConfig>,
    pub grid_points: usize,
    pub ao: AoOptions,
}

/// Runs every arm on one user set, in arm order.
pub fn run_trial(users: &UserSet, setup: &TrialSetup, arms: &[Arm]) -> Result<Vec<RateReport>> {
    arms.iter()
        .map(|arm| {
            let (placements, report) = match arm.protocol {
                Protocol::Ss => {
                    let opts = SsOptions {
                        grid_points: setup.grid_points,
                        newton: false,
                    };
                    let sol = optimize_ss(users, &setup.layout, &setup.cfg, arm.scheme, &opts)?;
                    (sol.placements, sol.report)
                }
                Protocol::Sa => {
                    let opts = AoOptions {
                        grid_points: setup.grid_points,
                        ..setup.ao
                    };
                    let sol = optimize_sa(users, &setup.layout, &setup.cfg, arm.scheme, &opts)?;
                    (sol.placements, sol.report)
                }
                Protocol::Pass => {
                    let sol = optimize_pass(
                        users,
                        &setup.cfg,
                        setup.layout.first_feed(),
                        setup.layout.span(),
                        arm.scheme,
                        setup.grid_points,
                    )?;
                    let placements = sol
                        .positions
                        .iter()
                        .map(|&position| Placement::Ss { segment: 0, position })
                        .collect();
                    (placements, sol.report)
                }
            };
            match &setup.eval_cfg {
                Some(cfg) => evaluate_placements(users, &placements, &setup.layout, cfg, arm.protocol, arm.scheme),
                None => Ok(report),
            }
        })
        .collect()
}

fn setup_for(spec: &ExperimentSpec, segments: usize, segment_length: f64) -> Result<TrialSetup> {
    let span = segments as f64 * segment_length;
    let cfg = spec.radio.system_config()?;
    Ok(TrialSetup {
        layout: WaveguideLayout::new(segments, segment_length, -span / 2.0)?,
        cfg,
        eval_cfg: spec.kappa_eval_db_per_m.map(|k| cfg.with_attenuation(k)).transpose()?,
        grid_points: spec.grid_points,
        ao: AoOptions {
            grid_points: spec.grid_points,
            tolerance: spec.ao_tolerance,
            max_iters: spec.ao_max_iters,
        },
    })
}

/// Runs the whole experiment and aggregates per (sweep point, arm).
pub fn run_sweep(spec: &ExperimentSpec) -> Result<SweepResult> {
    spec.validate()?;
    let power = dbm_to_watts(spec.power_dbm);
    let param = spec.sweep.param_name();
    let mut result = SweepResult::default();

    if let Sweep::Convergence { .. } = spec.sweep {
        let (_, segments, length) = spec.sweep.points()[0];
        let setup = setup_for(spec, segments, length)?;
        for arm in &spec.arms {
            let traces = (0..spec.trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = trial_rng(spec.seed, t as u64);
                    let users = sample_users(spec.num_users, setup.layout.span(), spec.region_y_m, power, &mut rng)?;
                    let sol = elementwise_ao(&users, &setup.layout, &setup.cfg, arm.scheme, &setup.ao)?;
                    Ok(design_rates(&sol.trace.iterations, arm.scheme, &users, &setup))
                })
                .collect::<Result<Vec<Vec<f64>>>>()?;
            let longest = traces.iter().map(Vec::len).max().unwrap_or(0);
            for i in 0..longest {
                let samples: Vec<f64> = traces
                    .iter()
                    .map(|tr| *tr.get(i).unwrap_or_else(|| tr.last().expect("non-empty trace")))
                    .collect();
                result.push(param, i as f64, *arm, samples);
            }
        }
        return Ok(result);
    }

    for (value, segments, length) in spec.sweep.points() {
        let setup = setup_for(spec, segments, length)?;
        let per_trial = (0..spec.trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = trial_rng(spec.seed, t as u64);
                let users = sample_users(spec.num_users, setup.layout.span(), spec.region_y_m, power, &mut rng)?;
                run_trial(&users, &setup, &spec.arms)
            })
            .collect::<Result<Vec<Vec<RateReport>>>>()?;
        for (i, arm) in spec.arms.iter().enumerate() {
            let samples = per_trial.iter().map(|reports| reports[i].sum_rate).collect();
            result.push(param, value, *arm, samples);
        }
    }
    Ok(result)
}

/// Lossless sum-rate implied by each entry of an alternating-optimization trace.
fn design_rates(trace: &[f64], scheme: Scheme, users: &UserSet, setup: &TrialSetup) -> Vec<f64> {
    let cfg = &setup.cfg;
    let m = setup.layout.num_segments() as f64;
    trace
        .iter()
        .map(|&f| match scheme {
            Scheme::Noma => (cfg.eta() * f / (m * cfg.noise_power())).ln_1p() / std::f64::consts::LN_2,
            _ => f / users.len() as f64,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec(sweep: Sweep) -> ExperimentSpec {
        let mut spec = ExperimentSpec::new(sweep);
        spec.trials = 6;
        spec.grid_points = 200;
        spec.seed = 42;
        spec
    }

    #[test]
    fn sampling_is_deterministic_and_bounded() {
        let a = sample_users(4, 50.0, 20.0, 0.01, &mut trial_rng(7, 3)).unwrap();
        let b = sample_users(4, 50.0, 20.0, 0.01, &mut trial_rng(7, 3)).unwrap();
        assert_eq!(a, b);
        let c = sample_users(4, 50.0, 20.0, 0.01, &mut trial_rng(7, 4)).unwrap();
        assert_ne!(a, c);
        for u in &a {
            assert!(u.x.abs() <= 25.0 && u.y.abs() <= 10.0);
        }
        let flat = sample_users(5, 50.0, 0.0, 0.01, &mut trial_rng(1, 0)).unwrap();
        assert!(flat.iter().all(|u| u.y == 0.0));
    }

    #[test]
    fn uniform_mean_is_centered() {
        let mut rng = trial_rng(123, 0);
        let n = 100_000;
        let users = sample_users(n, 50.0, 20.0, 0.01, &mut rng).unwrap();
        let mean = users.iter().map(|u| u.x).sum::<f64>() / n as f64;
        // sd of U(-25, 25) is 50/√12
        let se = 50.0 / 12f64.sqrt() / (n as f64).sqrt();
        assert!(mean.abs() < 3.0 * se, "{mean} vs {se}");
    }

    #[test]
    fn single_user_single_segment_protocols_coincide() {
        let users = UserSet::new(vec![User::new(0.4, 3.0, 0.01).unwrap()]).unwrap();
        let setup = TrialSetup {
            layout: WaveguideLayout::new(1, 10.0, -5.0).unwrap(),
            cfg: SystemConfig::default(),
            eval_cfg: None,
            grid_points: 1001,
            ao: AoOptions::default(),
        };
        let arms: Vec<Arm> = Scheme::ALL
            .iter()
            .flat_map(|&s| [Arm::new(Protocol::Ss, s), Arm::new(Protocol::Sa, s)])
            .collect();
        let reports = run_trial(&users, &setup, &arms).unwrap();
        for pair in reports.chunks(2) {
            assert!((pair[0].sum_rate - pair[1].sum_rate).abs() < 1e-9);
        }
    }

    #[test]
    fn noma_beats_tdma_at_noma_placement() {
        let setup = TrialSetup {
            layout: WaveguideLayout::new(10, 1.0, -5.0).unwrap(),
            cfg: SystemConfig::default(),
            eval_cfg: None,
            grid_points: 200,
            ao: AoOptions::default(),
        };
        for t in 0..5 {
            let users = sample_users(4, 10.0, 20.0, 0.01, &mut trial_rng(9, t)).unwrap();
            for protocol in [Protocol::Ss, Protocol::Sa] {
                let r = run_trial(&users, &setup, &[Arm::new(protocol, Scheme::Noma)]).unwrap();
                let tdma = crate::rates::tdma_sum_rate(&r[0].per_user_snr).unwrap();
                assert!(r[0].sum_rate >= tdma);
            }
        }
    }

    #[test]
    fn re_evaluation_with_attenuation_lowers_rates() {
        let mut spec = small_spec(Sweep::DxSweep {
            values: vec![30.0],
            segment_length_m: 1.0,
        });
        let plain = run_sweep(&spec).unwrap();
        spec.kappa_eval_db_per_m = Some(0.0);
        assert_eq!(run_sweep(&spec).unwrap().to_csv(), plain.to_csv());
        spec.kappa_eval_db_per_m = Some(0.08);
        let lossy = run_sweep(&spec).unwrap();
        for (a, b) in plain.rows.iter().zip(&lossy.rows) {
            assert!(b.mean_rate_bps_hz < a.mean_rate_bps_hz, "{a:?} {b:?}");
        }
    }

    #[test]
    fn sweeps_are_reproducible() {
        let spec = small_spec(Sweep::DxSweep {
            values: vec![10.0, 20.0],
            segment_length_m: 1.0,
        });
        let a = run_sweep(&spec).unwrap();
        let b = run_sweep(&spec).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.rows.len(), 2 * 9);
    }

    #[test]
    fn convergence_rows_are_non_decreasing() {
        let mut spec = small_spec(Sweep::Convergence {
            num_segments: 6,
            segment_length_m: 1.0,
        });
        spec.arms = vec![Arm::new(Protocol::Sa, Scheme::PmTdma), Arm::new(Protocol::Sa, Scheme::Noma)];
        let res = run_sweep(&spec).unwrap();
        for scheme in [Scheme::PmTdma, Scheme::Noma] {
            let means: Vec<f64> = res
                .rows
                .iter()
                .filter(|r| r.scheme == scheme)
                .map(|r| r.mean_rate_bps_hz)
                .collect();
            assert!(means.len() >= 2);
            assert!(means.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        }
    }
}
