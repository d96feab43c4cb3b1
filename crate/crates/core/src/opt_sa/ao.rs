//! Element-wise alternating optimization for shared SA placements.
//!
//! Each sweep visits the segments in order and moves one antenna to the best
//! point of its segment grid while the others stay fixed. Grid points closer
//! than the minimum spacing to another antenna are skipped. The current
//! position is kept unless a grid point strictly improves on it, so the
//! objective never decreases.

use num_complex::Complex64;

use crate::channel::path_term;
use crate::error::{invalid, Result, SwanError};
use crate::model::{is_feasible, Placement, Scheme, SystemConfig, User, UserSet, WaveguideLayout};
use crate::opt_ss::{argmax_over, Grid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AoOptions {
    /// Grid points per segment.
    pub grid_points: usize,
    /// Relative objective increase below which a sweep counts as converged.
    pub tolerance: f64,
    pub max_iters: usize,
}

impl Default for AoOptions {
    fn default() -> Self {
        Self {
            grid_points: 10_000,
            tolerance: 1e-4,
            max_iters: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AoTrace {
    /// Objective at the initialization followed by the value after each sweep.
    pub iterations: Vec<f64>,
    pub converged: bool,
    pub threshold: f64,
}

impl AoTrace {
    /// Number of full sweeps performed.
    pub fn sweeps(&self) -> usize {
        self.iterations.len().saturating_sub(1)
    }

    /// Sweeps needed to reach the converged value. The last sweep of a
    /// converged run only confirms the stall and is not counted.
    pub fn iterations_to_converge(&self) -> usize {
        if self.converged {
            self.sweeps().saturating_sub(1).max(1)
        } else {
            self.sweeps()
        }
    }

    pub fn final_value(&self) -> f64 {
        *self.iterations.last().expect("trace holds the initial value")
    }

    /// Largest relative drop between consecutive entries (0 for a monotone trace).
    pub fn worst_relative_drop(&self) -> f64 {
        self.iterations
            .windows(2)
            .map(|w| ((w[0] - w[1]) / w[0].abs().max(f64::MIN_POSITIVE)).max(0.0))
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AoSolution {
    pub placement: Placement,
    pub trace: AoTrace,
}

fn per_user_value(scheme: Scheme, user: &User, g: Complex64, cfg: &SystemConfig, segments: usize) -> f64 {
    match scheme {
        Scheme::Noma => user.power * g.norm_sqr(),
        _ => {
            let snr = user.power * cfg.eta() * g.norm_sqr() / (segments as f64 * cfg.noise_power());
            snr.ln_1p() / std::f64::consts::LN_2
        }
    }
}

fn check_scheme(scheme: Scheme) -> Result<()> {
    if scheme == Scheme::PsTdma {
        return Err(SwanError::UnsupportedScheme {
            scheme,
            context: "element-wise alternating optimization",
        });
    }
    Ok(())
}

/// Full shared-placement objective: Σ log₂(1 + P_k η g_k/(Mσ²)) for PM-TDMA,
/// Σ P_k g_k for NOMA, with g_k = |Σ_m e^{−jk₀c_m}/r_m|².
pub fn sa_objective(
    positions: &[f64],
    users: &UserSet,
    layout: &WaveguideLayout,
    cfg: &SystemConfig,
    scheme: Scheme,
) -> Result<f64> {
    check_scheme(scheme)?;
    if positions.len() != layout.num_segments() {
        return Err(SwanError::ArityMismatch {
            expected: layout.num_segments(),
            got: positions.len(),
        });
    }
    let design = cfg.lossless();
    Ok(users
        .iter()
        .map(|u| {
            let g: Complex64 = positions
                .iter()
                .enumerate()
                .map(|(m, &x)| path_term(u, x, layout.feed(m), &design))
                .sum();
            per_user_value(scheme, u, g, &design, positions.len())
        })
        .sum())
}

/// One-antenna subproblem with the other antennas' contribution ĝ_k^m cached per user.
struct Subproblem<'a> {
    users: &'a UserSet,
    cfg: &'a SystemConfig,
    scheme: Scheme,
    feed: f64,
    segments: usize,
    others: Vec<Complex64>,
}

impl<'a> Subproblem<'a> {
    fn new(
        m: usize,
        positions: &[f64],
        users: &'a UserSet,
        layout: &WaveguideLayout,
        cfg: &'a SystemConfig,
        scheme: Scheme,
    ) -> Self {
        let others = users
            .iter()
            .map(|u| {
                positions
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != m)
                    .map(|(j, &x)| path_term(u, x, layout.feed(j), cfg))
                    .sum()
            })
            .collect();
        Self {
            users,
            cfg,
            scheme,
            feed: layout.feed(m),
            segments: layout.num_segments(),
            others,
        }
    }

    fn value(&self, psi: f64) -> f64 {
        self.users
            .iter()
            .zip(&self.others)
            .map(|(u, &rest)| {
                let g = rest + path_term(u, psi, self.feed, self.cfg);
                per_user_value(self.scheme, u, g, self.cfg, self.segments)
            })
            .sum()
    }
}

/// PM-TDMA subproblem objective f^{(m)}(ψ_m) with the other antennas at `positions`.
pub fn ao_objective_pm_tdma(
    psi_m: f64,
    m: usize,
    positions: &[f64],
    users: &UserSet,
    layout: &WaveguideLayout,
    cfg: &SystemConfig,
) -> f64 {
    let design = cfg.lossless();
    Subproblem::new(m, positions, users, layout, &design, Scheme::PmTdma).value(psi_m)
}

/// NOMA subproblem objective Σ_k P_k |ĝ_k(ψ_m) + ĝ_k^m|².
pub fn ao_objective_noma(
    psi_m: f64,
    m: usize,
    positions: &[f64],
    users: &UserSet,
    layout: &WaveguideLayout,
    cfg: &SystemConfig,
) -> f64 {
    let design = cfg.lossless();
    Subproblem::new(m, positions, users, layout, &design, Scheme::Noma).value(psi_m)
}

/// Points of `grid` at least `min_spacing` away from every antenna other than `m`.
pub fn feasible_grid(m: usize, grid: &Grid, positions: &[f64], min_spacing: f64) -> Vec<f64> {
    let nearby: Vec<f64> = positions
        .iter()
        .enumerate()
        .filter(|&(j, &x)| j != m && x > grid.start() - min_spacing && x < grid.end() + min_spacing)
        .map(|(_, &x)| x)
        .collect();
    grid.iter()
        .filter(|x| nearby.iter().all(|p| (x - p).abs() >= min_spacing))
        .collect()
}

/// Alternating optimization from the segment centers.
pub fn elementwise_ao(
    users: &UserSet,
    layout: &WaveguideLayout,
    cfg: &SystemConfig,
    scheme: Scheme,
    options: &AoOptions,
) -> Result<AoSolution> {
    elementwise_ao_from(users, layout, cfg, scheme, layout.segment_centers(), options)
}

pub fn elementwise_ao_from(
    users: &UserSet,
    layout: &WaveguideLayout,
    cfg: &SystemConfig,
    scheme: Scheme,
    init: Vec<f64>,
    options: &AoOptions,
) -> Result<AoSolution> {
    check_scheme(scheme)?;
    if options.max_iters == 0 {
        return Err(invalid("max_iters", "must be >= 1"));
    }
    if !(options.tolerance >= 0.0) {
        return Err(invalid("tolerance", "must be >= 0"));
    }
    let mut positions = init;
    if !is_feasible(&Placement::Sa { positions: positions.clone() }, layout, cfg)? {
        return Err(invalid("initial placement", "violates segment bounds or spacing"));
    }
    let design = cfg.lossless();
    let spacing = cfg.min_spacing();
    let grids = (0..layout.num_segments())
        .map(|m| {
            let (lo, hi) = layout.segment_bounds(m);
            Grid::new(lo, hi, options.grid_points)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut trace = vec![sa_objective(&positions, users, layout, &design, scheme)?];
    let mut converged = false;
    for _ in 0..options.max_iters {
        for (m, grid) in grids.iter().enumerate() {
            let sub = Subproblem::new(m, &positions, users, layout, &design, scheme);
            let current = sub.value(positions[m]);
            let candidates = feasible_grid(m, grid, &positions, spacing);
            if let Some((x, v)) = argmax_over(|x| sub.value(x), candidates)? {
                if v > current {
                    positions[m] = x;
                }
            }
        }
        let prev = *trace.last().expect("non-empty");
        let value = sa_objective(&positions, users, layout, &design, scheme)?;
        trace.push(value);
        let increase = (value - prev) / prev.abs().max(f64::MIN_POSITIVE);
        if increase < options.tolerance {
            converged = true;
            break;
        }
    }

    Ok(AoSolution {
        placement: Placement::Sa { positions },
        trace: AoTrace {
            iterations: trace,
            converged,
            threshold: options.tolerance,
        },
    })
}
