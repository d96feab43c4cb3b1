//! Uniform grids, grid argmax and projected Newton refinement.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, SwanError};

/// Uniform grid of `points` abscissas from `start` to `end` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    start: f64,
    end: f64,
    points: usize,
}

impl Grid {
    pub fn new(start: f64, end: f64, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(invalid("grid points", "need at least 2"));
        }
        if !(start.is_finite() && end.is_finite() && end >= start) {
            return Err(invalid("grid bounds", "need finite start <= end"));
        }
        Ok(Self { start, end, points })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn step(&self) -> f64 {
        (self.end - self.start) / (self.points - 1) as f64
    }

    /// The `i`-th abscissa. The last one is `end` exactly.
    pub fn abscissa(&self, i: usize) -> f64 {
        if i + 1 >= self.points {
            self.end
        } else {
            self.start + i as f64 * (self.end - self.start) / (self.points - 1) as f64
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(move |i| self.abscissa(i))
    }
}

/// Best `(position, value)` over `candidates`, first one wins on ties.
///
/// Returns `Ok(None)` for an empty candidate list.
pub fn argmax_over<F, I>(objective: F, candidates: I) -> Result<Option<(f64, f64)>>
where
    F: Fn(f64) -> f64,
    I: IntoIterator<Item = f64>,
{
    let mut best: Option<(f64, f64)> = None;
    for x in candidates {
        let v = objective(x);
        if v.is_nan() {
            return Err(SwanError::NanObjective { at: x });
        }
        match best {
            Some((_, bv)) if v <= bv => {}
            _ => best = Some((x, v)),
        }
    }
    Ok(best)
}

/// Grid point with the largest objective; ties go to the smallest abscissa.
pub fn grid_argmax<F: Fn(f64) -> f64>(objective: F, grid: &Grid) -> Result<f64> {
    Ok(argmax_over(objective, grid.iter())?
        .expect("grid has at least two points")
        .0)
}

const NEWTON_MAX_ITERS: usize = 50;
const NEWTON_DERIV_TOL: f64 = 1e-9;

/// Projected Newton iteration on the derivative of a smooth objective, seeded
/// from a grid optimum.
///
/// The second derivative is taken by central differences of `derivative`. The
/// result is a stationary point inside `interval`, or an endpoint when the
/// derivative pushes past it. If the iteration leaves the concave region or
/// ends at a worse objective value, `start` is returned unchanged.
pub fn newton_refine<F, D>(objective: F, derivative: D, start: f64, interval: (f64, f64)) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (lo, hi) = interval;
    let mut x = start.clamp(lo, hi);
    for _ in 0..NEWTON_MAX_ITERS {
        let g = derivative(x);
        if !g.is_finite() {
            return start;
        }
        if g.abs() <= NEWTON_DERIV_TOL || (x >= hi && g > 0.0) || (x <= lo && g < 0.0) {
            break;
        }
        let h = 1e-6 * x.abs().max(1.0);
        let curvature = (derivative(x + h) - derivative(x - h)) / (2.0 * h);
        if !(curvature < 0.0) {
            return start;
        }
        let next = (x - g / curvature).clamp(lo, hi);
        if (next - x).abs() <= 1e-14 * x.abs().max(1.0) {
            x = next;
            break;
        }
        x = next;
    }
    if objective(x) >= objective(start) {
        x
    } else {
        start
    }
}
