//! PS-TDMA placement under segment aggregation.
//!
//! The antenna under the user is the anchor. Every other antenna starts as
//! close to the anchor as the spacing rule allows and is then slid away from
//! it until its path length `c(ψ)` agrees with the anchor's modulo λ, so all
//! terms of the SA channel add in phase.

use num_complex::Complex64;

use crate::channel::path_term;
use crate::model::{Placement, SystemConfig, User, WaveguideLayout};

/// Path length `c(ψ) = √((u_x − ψ)² + d_k) + n_eff·(ψ − ψ₀)` of one user through one segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePath {
    user_x: f64,
    d_k: f64,
    n_eff: f64,
    feed: f64,
}

impl PhasePath {
    pub fn new(user: &User, feed: f64, cfg: &SystemConfig) -> Self {
        Self {
            user_x: user.x,
            d_k: user.d_k(cfg),
            n_eff: cfg.n_eff(),
            feed,
        }
    }

    pub fn value(&self, psi: f64) -> f64 {
        let dx = self.user_x - psi;
        (dx * dx + self.d_k).sqrt() + self.n_eff * (psi - self.feed)
    }

    /// dc/dψ, always inside (n_eff − 1, n_eff + 1).
    pub fn derivative(&self, psi: f64) -> f64 {
        let dx = psi - self.user_x;
        self.n_eff + dx / (dx * dx + self.d_k).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftDirection {
    /// Toward the feed point; decreases `c`.
    Left,
    /// Away from the feed point; increases `c`.
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlignShift {
    /// Non-negative distance to move in the requested direction.
    Shift(f64),
    /// The segment ends before the path length can be matched.
    Infeasible,
}

/// Residues within this many meters of a full wavelength count as aligned.
const RESIDUE_TOL: f64 = 1e-12;

/// Smallest shift ν ≥ 0 of the antenna at `psi_hat` on `segment` such that its
/// path length becomes congruent to `target_c` modulo λ, without leaving the segment.
pub fn phase_align_shift(
    user: &User,
    layout: &WaveguideLayout,
    segment: usize,
    psi_hat: f64,
    target_c: f64,
    direction: ShiftDirection,
    cfg: &SystemConfig,
) -> AlignShift {
    let lambda = cfg.wavelength();
    let (lo, hi) = layout.segment_bounds(segment);
    let path = PhasePath::new(user, lo, cfg);
    let c_hat = path.value(psi_hat);
    let n = cfg.n_eff();

    let delta = match direction {
        ShiftDirection::Left => (c_hat - target_c).rem_euclid(lambda),
        ShiftDirection::Right => (target_c - c_hat).rem_euclid(lambda),
    };
    if delta <= RESIDUE_TOL || lambda - delta <= RESIDUE_TOL {
        return AlignShift::Shift(0.0);
    }

    match direction {
        ShiftDirection::Left => {
            let goal = c_hat - delta;
            if psi_hat <= lo || path.value(lo) > goal {
                return AlignShift::Infeasible;
            }
            let mut a = lo;
            if n > 1.0 {
                a = a.max(psi_hat - delta / (n - 1.0));
            }
            let b = (psi_hat - delta / (n + 1.0)).max(a);
            let x = solve_increasing(&path, goal, a, b);
            AlignShift::Shift((psi_hat - x).max(0.0))
        }
        ShiftDirection::Right => {
            let goal = c_hat + delta;
            if psi_hat >= hi || path.value(hi) < goal {
                return AlignShift::Infeasible;
            }
            let a = psi_hat + delta / (n + 1.0);
            let mut b = hi;
            if n > 1.0 {
                b = b.min(psi_hat + delta / (n - 1.0));
            }
            let x = solve_increasing(&path, goal, a.min(b), b);
            AlignShift::Shift((x - psi_hat).max(0.0))
        }
    }
}

/// Root of `path.value(x) = goal` on `[a, b]`: Newton steps kept inside a shrinking bracket.
fn solve_increasing(path: &PhasePath, goal: f64, mut a: f64, mut b: f64) -> f64 {
    let mut x = 0.5 * (a + b);
    for _ in 0..100 {
        let g = path.value(x) - goal;
        if g.abs() <= 1e-14 * goal.abs().max(1.0) {
            return x;
        }
        if g < 0.0 {
            a = x;
        } else {
            b = x;
        }
        if b - a <= 1e-15 * x.abs().max(1.0) {
            return x;
        }
        let step = x - g / path.derivative(x);
        x = if step > a && step < b { step } else { 0.5 * (a + b) };
    }
    x
}

/// Position solving `c(ψ) = target_value` on the segment fed at `feed`, from the
/// quadratic obtained by squaring the path-length equation.
///
/// For n_eff ≠ 1 this is the smaller root of (n²−1)ψ² − 2(n²ψ₀ + n·t − u)ψ + … = 0;
/// for n_eff = 1 the equation is linear. Returns `None` when the discriminant is
/// negative or the linear branch has no admissible root.
pub fn closed_form_position(
    user: &User,
    feed: f64,
    target_value: f64,
    cfg: &SystemConfig,
) -> Option<f64> {
    let n = cfg.n_eff();
    let u = user.x;
    let dk = user.d_k(cfg);
    let t = target_value;
    if (n - 1.0).abs() < 1e-12 {
        let pivot = feed + t;
        if pivot <= u {
            return None;
        }
        return Some((pivot * pivot - (u * u + dk)) / (2.0 * (pivot - u)));
    }
    let n2 = n * n;
    let disc = n2 * (u - feed).powi(2) - 2.0 * t * n * (u - feed) + dk * (n2 - 1.0) + t * t;
    if disc < 0.0 {
        return None;
    }
    Some((feed * n2 + t * n - u - disc.sqrt()) / (n2 - 1.0))
}

/// Leftward shift implied by [`closed_form_position`].
pub fn closed_form_shift(
    user: &User,
    feed: f64,
    psi_hat: f64,
    target_value: f64,
    cfg: &SystemConfig,
) -> Option<f64> {
    closed_form_position(user, feed, target_value, cfg).map(|x| psi_hat - x)
}

/// Segment holding the user's projection and the projection clamped onto it.
pub fn anchor_segment(user: &User, layout: &WaveguideLayout) -> (usize, f64) {
    let m = layout.segment_of(user.x);
    let (lo, hi) = layout.segment_bounds(m);
    (m, user.x.clamp(lo, hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentRole {
    Anchor,
    /// Path length matched to the anchor modulo λ.
    Aligned,
    /// Alignment would leave the segment; the better of the two candidates was kept.
    Fallback,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaRefinement {
    pub positions: Vec<f64>,
    pub roles: Vec<SegmentRole>,
    pub anchor: usize,
    /// Anchor path length; aligned segments match it modulo λ.
    pub anchor_c: f64,
}

impl SaRefinement {
    pub fn placement(&self) -> Placement {
        Placement::Sa {
            positions: self.positions.clone(),
        }
    }
}

/// Single-user SA placement by anchoring and outward phase alignment.
pub fn refine_ps_tdma_sa(user: &User, layout: &WaveguideLayout, cfg: &SystemConfig) -> SaRefinement {
    let design = cfg.lossless();
    let segments = layout.num_segments();
    let spacing = cfg.min_spacing();
    let (anchor, anchor_pos) = anchor_segment(user, layout);
    let anchor_c = PhasePath::new(user, layout.feed(anchor), cfg).value(anchor_pos);

    let mut positions = vec![0.0; segments];
    let mut roles = vec![SegmentRole::Anchor; segments];
    positions[anchor] = anchor_pos;
    let mut partial = path_term(user, anchor_pos, layout.feed(anchor), &design);

    let place = |m: usize, psi_hat: f64, edge: f64, direction, partial: &mut Complex64| {
        let feed = layout.feed(m);
        let (pos, role) = match phase_align_shift(user, layout, m, psi_hat, anchor_c, direction, cfg) {
            AlignShift::Shift(nu) => {
                let x = match direction {
                    ShiftDirection::Left => psi_hat - nu,
                    ShiftDirection::Right => psi_hat + nu,
                };
                (x, SegmentRole::Aligned)
            }
            AlignShift::Infeasible => {
                let keep = (*partial + path_term(user, psi_hat, feed, &design)).norm();
                let slide = (*partial + path_term(user, edge, feed, &design)).norm();
                (if slide > keep { edge } else { psi_hat }, SegmentRole::Fallback)
            }
        };
        *partial += path_term(user, pos, feed, &design);
        (pos, role)
    };

    for m in (0..anchor).rev() {
        let (lo, hi) = layout.segment_bounds(m);
        let psi_hat = hi.min(positions[m + 1] - spacing).max(lo);
        let (pos, role) = place(m, psi_hat, lo, ShiftDirection::Left, &mut partial);
        positions[m] = pos;
        roles[m] = role;
    }
    for m in anchor + 1..segments {
        let (lo, hi) = layout.segment_bounds(m);
        let psi_hat = lo.max(positions[m - 1] + spacing).min(hi);
        let (pos, role) = place(m, psi_hat, hi, ShiftDirection::Right, &mut partial);
        positions[m] = pos;
        roles[m] = role;
    }

    SaRefinement {
        positions,
        roles,
        anchor,
        anchor_c,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::sa_effective_channel;
    use crate::model::is_feasible;
    use std::f64::consts::PI;

    /// Plain bisection on the monotone path length.
    fn bisect(path: &PhasePath, goal: f64, mut a: f64, mut b: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if path.value(mid) < goal {
                a = mid;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    }

    fn residue(c: f64, target: f64, lambda: f64) -> f64 {
        let r = (c - target).rem_euclid(lambda);
        r.min(lambda - r)
    }

    #[test]
    fn path_derivative_bounds() {
        let cfg = SystemConfig::default();
        let user = User::new(0.3, 2.0, 0.01).unwrap();
        let path = PhasePath::new(&user, -1.0, &cfg);
        for i in 0..200 {
            let x = -50.0 + i as f64 * 0.5;
            let d = path.derivative(x);
            assert!(d > cfg.n_eff() - 1.0 && d < cfg.n_eff() + 1.0);
            let h = 1e-6;
            let fd = (path.value(x + h) - path.value(x - h)) / (2.0 * h);
            assert!((fd - d).abs() < 1e-6);
        }
    }

    #[test]
    fn aligned_start_needs_no_shift() {
        let cfg = SystemConfig::default();
        let layout = WaveguideLayout::new(3, 1.0, 0.0).unwrap();
        let user = User::new(1.5, 1.0, 0.01).unwrap();
        let path = PhasePath::new(&user, layout.feed(0), &cfg);
        let psi_hat = 0.7;
        let target = path.value(psi_hat) + 3.0 * cfg.wavelength();
        assert_eq!(
            phase_align_shift(&user, &layout, 0, psi_hat, target, ShiftDirection::Left, &cfg),
            AlignShift::Shift(0.0)
        );
    }

    #[test]
    fn shift_brackets_and_matches_bisection() {
        let cfg = SystemConfig::default();
        let n = cfg.n_eff();
        let lambda = cfg.wavelength();
        let layout = WaveguideLayout::new(3, 1.0, 0.0).unwrap();
        let user = User::new(2.2, -3.0, 0.01).unwrap();
        let path = PhasePath::new(&user, layout.feed(0), &cfg);
        let psi_hat = 0.8;
        for k in 1..10 {
            let delta = lambda * k as f64 / 10.0;
            let target = path.value(psi_hat) - delta;
            let nu = match phase_align_shift(&user, &layout, 0, psi_hat, target, ShiftDirection::Left, &cfg) {
                AlignShift::Shift(nu) => nu,
                AlignShift::Infeasible => panic!("room to shift"),
            };
            assert!(nu > delta / (n + 1.0) && nu < delta / (n - 1.0));
            assert!((path.value(psi_hat - nu) - (path.value(psi_hat) - delta)).abs() < 1e-9);
            let oracle = psi_hat - bisect(&path, path.value(psi_hat) - delta, 0.0, psi_hat);
            assert!((nu - oracle).abs() < 1e-9);
        }
    }

    #[test]
    fn rightward_shift_matches_bisection() {
        let cfg = SystemConfig::default();
        let lambda = cfg.wavelength();
        let layout = WaveguideLayout::new(3, 1.0, 0.0).unwrap();
        let user = User::new(0.2, 1.0, 0.01).unwrap();
        let feed = layout.feed(2);
        let path = PhasePath::new(&user, feed, &cfg);
        let psi_hat = feed + 0.1;
        let target = path.value(psi_hat) + 0.37 * lambda;
        let nu = match phase_align_shift(&user, &layout, 2, psi_hat, target, ShiftDirection::Right, &cfg) {
            AlignShift::Shift(nu) => nu,
            AlignShift::Infeasible => panic!("room to shift"),
        };
        let oracle = bisect(&path, target, psi_hat, feed + 1.0) - psi_hat;
        assert!((nu - oracle).abs() < 1e-9);
        assert!(residue(path.value(psi_hat + nu), target, lambda) < 1e-9);
    }

    #[test]
    fn no_room_at_feed_point() {
        let cfg = SystemConfig::default();
        let layout = WaveguideLayout::new(3, 1.0, 0.0).unwrap();
        let user = User::new(2.5, 0.0, 0.01).unwrap();
        let path = PhasePath::new(&user, 0.0, &cfg);
        let target = path.value(0.0) - 0.3 * cfg.wavelength();
        assert_eq!(
            phase_align_shift(&user, &layout, 0, 0.0, target, ShiftDirection::Left, &cfg),
            AlignShift::Infeasible
        );
    }

    #[test]
    fn closed_form_agrees_with_root_finding() {
        for n_eff in [1.4, 1.0, 2.1] {
            let cfg = SystemConfig::new(28e9, n_eff, 0.005, 3.0, 0.0, 1e-12).unwrap();
            let layout = WaveguideLayout::new(4, 1.0, -2.0).unwrap();
            let user = User::new(0.6, 2.5, 0.01).unwrap();
            let feed = layout.feed(1);
            let path = PhasePath::new(&user, feed, &cfg);
            let psi_hat = feed + 0.9;
            let target = path.value(psi_hat) - 0.45 * cfg.wavelength();
            let nu = match phase_align_shift(&user, &layout, 1, psi_hat, target, ShiftDirection::Left, &cfg) {
                AlignShift::Shift(nu) => nu,
                AlignShift::Infeasible => panic!("room to shift"),
            };
            let goal = path.value(psi_hat - nu);
            let closed = closed_form_shift(&user, feed, psi_hat, goal, &cfg).unwrap();
            assert!((closed - nu).abs() < 1e-6, "n_eff={n_eff}: {closed} vs {nu}");
        }
    }

    #[test]
    fn single_segment_is_projection() {
        let cfg = SystemConfig::default();
        let layout = WaveguideLayout::new(1, 10.0, -5.0).unwrap();
        let user = User::new(1.3, 4.0, 0.01).unwrap();
        let r = refine_ps_tdma_sa(&user, &layout, &cfg);
        assert_eq!(r.positions, vec![1.3]);
        let h = sa_effective_channel(&user, &r.placement(), &layout, &cfg).unwrap();
        let expected = cfg.eta() / user.d_k(&cfg);
        assert!((h.norm_sqr() - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn two_segments_combine_coherently() {
        let cfg = SystemConfig::default();
        let layout = WaveguideLayout::new(2, 1.0, -1.0).unwrap();
        let user = User::new(0.4, 1.0, 0.01).unwrap();
        let r = refine_ps_tdma_sa(&user, &layout, &cfg);
        assert_eq!(r.anchor, 1);
        assert_eq!(r.positions[1], 0.4);
        assert_eq!(r.roles[0], SegmentRole::Aligned);
        let placement = r.placement();
        assert!(is_feasible(&placement, &layout, &cfg).unwrap());
        let mags: Vec<f64> = (0..2)
            .map(|m| (cfg.eta() / ((user.x - r.positions[m]).powi(2) + user.d_k(&cfg))).sqrt())
            .collect();
        let bound = (mags[0] + mags[1]).powi(2) / 2.0;
        let h = sa_effective_channel(&user, &placement, &layout, &cfg).unwrap();
        assert!((h.norm_sqr() - bound).abs() <= 1e-9 * bound);
        let wrapped = {
            let p = (cfg.wavenumber() * (PhasePath::new(&user, layout.feed(0), &cfg).value(r.positions[0]) - r.anchor_c))
                .rem_euclid(2.0 * PI);
            p.min(2.0 * PI - p)
        };
        assert!(wrapped < 1e-6 * 2.0 * PI);
    }

    #[test]
    fn beats_unshifted_initialization_and_centers() {
        let cfg = SystemConfig::default();
        let layout = WaveguideLayout::new(50, 1.0, -25.0).unwrap();
        let user = User::new(3.7, -6.2, 0.01).unwrap();
        let r = refine_ps_tdma_sa(&user, &layout, &cfg);
        let refined = sa_effective_channel(&user, &r.placement(), &layout, &cfg).unwrap().norm_sqr();
        let centers = sa_effective_channel(
            &user,
            &Placement::Sa {
                positions: layout.segment_centers(),
            },
            &layout,
            &cfg,
        )
        .unwrap()
        .norm_sqr();
        // Same initialization without the phase shift.
        let mut unshifted = vec![0.0; 50];
        unshifted[r.anchor] = r.positions[r.anchor];
        for m in (0..r.anchor).rev() {
            unshifted[m] = (layout.feed(m) + 1.0).min(unshifted[m + 1] - cfg.min_spacing());
        }
        for m in r.anchor + 1..50 {
            unshifted[m] = layout.feed(m).max(unshifted[m - 1] + cfg.min_spacing());
        }
        let plain = sa_effective_channel(&user, &Placement::Sa { positions: unshifted }, &layout, &cfg)
            .unwrap()
            .norm_sqr();
        assert!(refined >= centers);
        assert!(refined >= plain);
    }
}
