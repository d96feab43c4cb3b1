//! Line-of-sight free-space, in-waveguide and effective channel coefficients.
//!
//! The waveguide lies on the x-axis at height `d`; an antenna at abscissa `ψ`
//! sits at `(ψ, 0, d)` and a user at `(u_x, u_y, 0)`. Phases of the combined
//! SS/SA channels are computed from the path length
//! `c(ψ) = ‖u − ψ‖ + n_eff·|ψ − ψ₀|` multiplied by the free-space wavenumber.

use num_complex::Complex64;

use crate::error::{Result, SwanError};
use crate::model::{Placement, SystemConfig, User, WaveguideLayout};

pub type ComplexCoeff = Complex64;

/// Free-space coefficient √η·e^{−j k₀ r}/r between a user and an antenna.
pub fn free_space_coeff(user: [f64; 3], pa: [f64; 3], cfg: &SystemConfig) -> Result<ComplexCoeff> {
    let r = user
        .iter()
        .zip(pa.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    if !(r > 0.0) {
        return Err(SwanError::CoincidentPoints);
    }
    Ok(Complex64::from_polar(
        cfg.eta().sqrt() / r,
        -cfg.wavenumber() * r,
    ))
}

/// In-waveguide coefficient between the feed point and an antenna on the same segment.
pub fn in_waveguide_coeff(pa_x: f64, feed_x: f64, cfg: &SystemConfig) -> ComplexCoeff {
    let len = (pa_x - feed_x).abs();
    Complex64::from_polar(
        amplitude_loss(cfg.attenuation_db_per_m(), len),
        -2.0 * std::f64::consts::PI * len / cfg.guided_wavelength(),
    )
}

/// Amplitude factor 10^(−κℓ/20) for ℓ meters of waveguide.
pub fn amplitude_loss(kappa_db_per_m: f64, len: f64) -> f64 {
    10f64.powf(-kappa_db_per_m * len / 20.0)
}

/// Power factor 10^(−κℓ/10) for ℓ meters of waveguide.
pub fn power_loss(kappa_db_per_m: f64, len: f64) -> f64 {
    10f64.powf(-kappa_db_per_m * len / 10.0)
}

/// Distance from the user to an antenna at abscissa `psi`.
#[inline]
pub fn antenna_distance(user: &User, psi: f64, cfg: &SystemConfig) -> f64 {
    let dx = user.x - psi;
    (dx * dx + user.d_k(cfg)).sqrt()
}

/// Lossless normalized term e^{−j k₀ c(ψ)}/r, the summand used by the SA objectives.
#[inline]
pub fn path_term(user: &User, psi: f64, feed: f64, cfg: &SystemConfig) -> Complex64 {
    let r = antenna_distance(user, psi, cfg);
    let c = r + cfg.n_eff() * (psi - feed).abs();
    Complex64::from_polar(1.0 / r, -cfg.wavenumber() * c)
}

/// Combined feed-to-user coefficient for one antenna, including attenuation.
fn segment_coeff(user: &User, psi: f64, feed: f64, cfg: &SystemConfig) -> Result<Complex64> {
    let r = antenna_distance(user, psi, cfg);
    if !(r > 0.0) {
        return Err(SwanError::CoincidentPoints);
    }
    let len = (psi - feed).abs();
    let c = r + cfg.n_eff() * len;
    let mag = amplitude_loss(cfg.attenuation_db_per_m(), len) * cfg.eta().sqrt() / r;
    Ok(Complex64::from_polar(mag, -cfg.wavenumber() * c))
}

/// Effective SS channel h_i·h_o for the single active antenna.
pub fn ss_effective_channel(
    user: &User,
    placement: &Placement,
    layout: &WaveguideLayout,
    cfg: &SystemConfig,
) -> Result<ComplexCoeff> {
    match placement {
        Placement::Ss { segment, position } => {
            if *segment >= layout.num_segments() {
                return Err(SwanError::SegmentOutOfRange {
                    index: *segment,
                    segments: layout.num_segments(),
                });
            }
            segment_coeff(user, *position, layout.feed(*segment), cfg)
        }
        Placement::Sa { positions } => Err(SwanError::ArityMismatch {
            expected: 1,
            got: positions.len(),
        }),
    }
}

/// Effective SA channel (1/√M)·Σ_m h_i·h_o with antenna m fed from feed m.
pub fn sa_effective_channel(
    user: &User,
    placement: &Placement,
    layout: &WaveguideLayout,
    cfg: &SystemConfig,
) -> Result<ComplexCoeff> {
    let positions = match placement {
        Placement::Sa { positions } => positions,
        Placement::Ss { .. } => {
            return Err(SwanError::ArityMismatch {
                expected: layout.num_segments(),
                got: 1,
            })
        }
    };
    if positions.len() != layout.num_segments() {
        return Err(SwanError::ArityMismatch {
            expected: layout.num_segments(),
            got: positions.len(),
        });
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for (m, &psi) in positions.iter().enumerate() {
        sum += segment_coeff(user, psi, layout.feed(m), cfg)?;
    }
    Ok(sum / (positions.len() as f64).sqrt())
}

/// Closed-form |h|² of a single antenna at `psi` fed from `feed`:
/// 10^(−κℓ/10)·η/((u_x − ψ)² + d_k).
pub fn single_antenna_gain(user: &User, psi: f64, feed: f64, cfg: &SystemConfig) -> f64 {
    let dx = user.x - psi;
    power_loss(cfg.attenuation_db_per_m(), (psi - feed).abs()) * cfg.eta() / (dx * dx + user.d_k(cfg))
}

/// |h|² for any placement, dispatching on the protocol.
pub fn channel_gain(
    user: &User,
    placement: &Placement,
    layout: &WaveguideLayout,
    cfg: &SystemConfig,
) -> Result<f64> {
    match placement {
        Placement::Ss { segment, position } => {
            if *segment >= layout.num_segments() {
                return Err(SwanError::SegmentOutOfRange {
                    index: *segment,
                    segments: layout.num_segments(),
                });
            }
            Ok(single_antenna_gain(user, *position, layout.feed(*segment), cfg))
        }
        Placement::Sa { .. } => Ok(sa_effective_channel(user, placement, layout, cfg)?.norm_sqr()),
    }
}

pub fn snr(user: &User, channel_gain: f64, cfg: &SystemConfig) -> f64 {
    user.power * channel_gain / cfg.noise_power()
}
