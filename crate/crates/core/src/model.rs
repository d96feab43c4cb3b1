//! Domain types shared by the channel model, the optimizers and the harness.
//!
//! All powers are stored in watts and all lengths in meters. Segment indices
//! are zero-based throughout the crate.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, SwanError};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Slack applied to every feasibility comparison, in meters.
pub const FEASIBILITY_TOL: f64 = 1e-12;

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

/// Radio and waveguide parameters.
///
/// Wavelength, guided wavelength and the free-space gain constant `eta` are
/// derived from the carrier frequency and refractive index on demand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    carrier_frequency: f64,
    effective_refractive_index: f64,
    min_spacing: f64,
    deploy_height: f64,
    attenuation_db_per_m: f64,
    noise_power: f64,
}

impl SystemConfig {
    pub fn new(
        carrier_frequency: f64,
        effective_refractive_index: f64,
        min_spacing: f64,
        deploy_height: f64,
        attenuation_db_per_m: f64,
        noise_power: f64,
    ) -> Result<Self> {
        if !(carrier_frequency.is_finite() && carrier_frequency > 0.0) {
            return Err(invalid("carrier_frequency", "must be finite and > 0"));
        }
        if !(effective_refractive_index.is_finite() && effective_refractive_index >= 1.0) {
            return Err(invalid("n_eff", "must be finite and >= 1"));
        }
        if !(min_spacing.is_finite() && min_spacing >= 0.0) {
            return Err(invalid("min_spacing", "must be finite and >= 0"));
        }
        if !(deploy_height.is_finite() && deploy_height > 0.0) {
            return Err(invalid("deploy_height", "must be finite and > 0"));
        }
        if !(attenuation_db_per_m.is_finite() && attenuation_db_per_m >= 0.0) {
            return Err(invalid("attenuation", "must be finite and >= 0"));
        }
        if !(noise_power.is_finite() && noise_power > 0.0) {
            return Err(invalid("noise_power", "must be finite and > 0"));
        }
        Ok(Self {
            carrier_frequency,
            effective_refractive_index,
            min_spacing,
            deploy_height,
            attenuation_db_per_m,
            noise_power,
        })
    }

    /// Same parameters with a different in-waveguide attenuation.
    pub fn with_attenuation(&self, kappa_db_per_m: f64) -> Result<Self> {
        Self::new(
            self.carrier_frequency,
            self.effective_refractive_index,
            self.min_spacing,
            self.deploy_height,
            kappa_db_per_m,
            self.noise_power,
        )
    }

    pub fn with_min_spacing(&self, min_spacing: f64) -> Result<Self> {
        Self::new(
            self.carrier_frequency,
            self.effective_refractive_index,
            min_spacing,
            self.deploy_height,
            self.attenuation_db_per_m,
            self.noise_power,
        )
    }

    /// Lossless copy used by the placement objectives, which are designed with κ = 0.
    pub fn lossless(&self) -> Self {
        Self {
            attenuation_db_per_m: 0.0,
            ..*self
        }
    }

    pub fn carrier_frequency(&self) -> f64 {
        self.carrier_frequency
    }

    pub fn n_eff(&self) -> f64 {
        self.effective_refractive_index
    }

    pub fn min_spacing(&self) -> f64 {
        self.min_spacing
    }

    pub fn deploy_height(&self) -> f64 {
        self.deploy_height
    }

    pub fn attenuation_db_per_m(&self) -> f64 {
        self.attenuation_db_per_m
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_frequency
    }

    pub fn guided_wavelength(&self) -> f64 {
        self.wavelength() / self.effective_refractive_index
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength()
    }

    /// Free-space gain constant c²/(16π²f_c²), in m².
    pub fn eta(&self) -> f64 {
        SPEED_OF_LIGHT * SPEED_OF_LIGHT
            / (16.0 * PI * PI * self.carrier_frequency * self.carrier_frequency)
    }
}

impl Default for SystemConfig {
    /// 28 GHz, n_eff = 1.4, half-wavelength spacing, 3 m height, lossless, -90 dBm noise.
    fn default() -> Self {
        let carrier_frequency = 28e9;
        Self {
            carrier_frequency,
            effective_refractive_index: 1.4,
            min_spacing: SPEED_OF_LIGHT / carrier_frequency / 2.0,
            deploy_height: 3.0,
            attenuation_db_per_m: 0.0,
            noise_power: dbm_to_watts(-90.0),
        }
    }
}

/// A segmented waveguide of `num_segments` pieces of equal length laid along the x-axis.
///
/// Segment `m` (zero-based) is fed at its left end `first_feed + m * segment_length`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveguideLayout {
    num_segments: usize,
    segment_length: f64,
    first_feed: f64,
}

impl WaveguideLayout {
    pub fn new(num_segments: usize, segment_length: f64, first_feed: f64) -> Result<Self> {
        if num_segments == 0 {
            return Err(invalid("num_segments", "must be >= 1"));
        }
        if !(segment_length.is_finite() && segment_length > 0.0) {
            return Err(invalid("segment_length", "must be finite and > 0"));
        }
        if !first_feed.is_finite() {
            return Err(invalid("first_feed", "must be finite"));
        }
        Ok(Self {
            num_segments,
            segment_length,
            first_feed,
        })
    }

    /// Layout covering `[-span/2, span/2]` with `num_segments` equal segments.
    pub fn centered(num_segments: usize, span: f64) -> Result<Self> {
        if num_segments == 0 {
            return Err(invalid("num_segments", "must be >= 1"));
        }
        Self::new(num_segments, span / num_segments as f64, -span / 2.0)
    }

    pub fn num_segments(&self) -> usize {
        self.num_segments
    }

    pub fn segment_length(&self) -> f64 {
        self.segment_length
    }

    pub fn first_feed(&self) -> f64 {
        self.first_feed
    }

    /// Feed abscissa of segment `m`.
    pub fn feed(&self, m: usize) -> f64 {
        self.first_feed + m as f64 * self.segment_length
    }

    pub fn feeds(&self) -> Vec<f64> {
        (0..self.num_segments).map(|m| self.feed(m)).collect()
    }

    /// Closed interval available to the antenna of segment `m`.
    pub fn segment_bounds(&self, m: usize) -> (f64, f64) {
        let feed = self.feed(m);
        (feed, feed + self.segment_length)
    }

    pub fn span(&self) -> f64 {
        self.num_segments as f64 * self.segment_length
    }

    pub fn end(&self) -> f64 {
        self.first_feed + self.span()
    }

    /// Segment holding abscissa `x`: ⌈(x − ψ₀¹)/L⌉ in one-based terms, clamped to
    /// the layout. An offset of exactly zero belongs to the first segment.
    pub fn segment_of(&self, x: f64) -> usize {
        let offset = (x - self.first_feed) / self.segment_length;
        if offset.is_nan() || offset <= 0.0 {
            return 0;
        }
        let one_based = offset.ceil();
        if one_based >= self.num_segments as f64 {
            self.num_segments - 1
        } else {
            one_based as usize - 1
        }
    }

    /// Segment centers, the default starting point of the element-wise search.
    pub fn segment_centers(&self) -> Vec<f64> {
        (0..self.num_segments)
            .map(|m| self.feed(m) + 0.5 * self.segment_length)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct User {
    pub x: f64,
    pub y: f64,
    /// Transmit power in watts.
    pub power: f64,
}

impl User {
    pub fn new(x: f64, y: f64, power: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite()) {
            return Err(invalid("user position", "must be finite"));
        }
        if !(power.is_finite() && power > 0.0) {
            return Err(invalid("user power", "must be finite and > 0"));
        }
        Ok(Self { x, y, power })
    }

    /// Squared distance from the user to the waveguide axis, d² + u_y².
    pub fn d_k(&self, cfg: &SystemConfig) -> f64 {
        let h = cfg.deploy_height();
        h * h + self.y * self.y
    }

    pub fn position(&self) -> [f64; 3] {
        [self.x, self.y, 0.0]
    }
}

/// A non-empty set of users.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<User>", into = "Vec<User>")]
pub struct UserSet(Vec<User>);

impl UserSet {
    pub fn new(users: Vec<User>) -> Result<Self> {
        if users.is_empty() {
            return Err(invalid("users", "need at least one user"));
        }
        for u in &users {
            User::new(u.x, u.y, u.power)?;
        }
        Ok(Self(users))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, User> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[User] {
        &self.0
    }
}

impl TryFrom<Vec<User>> for UserSet {
    type Error = SwanError;

    fn try_from(users: Vec<User>) -> Result<Self> {
        Self::new(users)
    }
}

impl From<UserSet> for Vec<User> {
    fn from(set: UserSet) -> Self {
        set.0
    }
}

impl<'a> IntoIterator for &'a UserSet {
    type Item = &'a User;
    type IntoIter = std::slice::Iter<'a, User>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Antenna placement for one of the two operating protocols.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "protocol", rename_all = "lowercase")]
pub enum Placement {
    /// One active antenna on the selected segment.
    Ss { segment: usize, position: f64 },
    /// One antenna per segment, all combined.
    Sa { positions: Vec<f64> },
}

/// Checks the segment bounds and the pairwise minimum spacing.
///
/// An SS placement is a single active antenna and only needs to lie on its segment.
pub fn is_feasible(
    placement: &Placement,
    layout: &WaveguideLayout,
    cfg: &SystemConfig,
) -> Result<bool> {
    let within = |m: usize, x: f64| {
        let (lo, hi) = layout.segment_bounds(m);
        x.is_finite() && x >= lo - FEASIBILITY_TOL && x <= hi + FEASIBILITY_TOL
    };
    match placement {
        Placement::Ss { segment, position } => {
            if *segment >= layout.num_segments() {
                return Err(SwanError::SegmentOutOfRange {
                    index: *segment,
                    segments: layout.num_segments(),
                });
            }
            Ok(within(*segment, *position))
        }
        Placement::Sa { positions } => {
            if positions.len() != layout.num_segments() {
                return Err(SwanError::ArityMismatch {
                    expected: layout.num_segments(),
                    got: positions.len(),
                });
            }
            if !positions.iter().enumerate().all(|(m, &x)| within(m, x)) {
                return Ok(false);
            }
            let spacing = cfg.min_spacing() - FEASIBILITY_TOL;
            for (i, &a) in positions.iter().enumerate() {
                for &b in &positions[i + 1..] {
                    if (a - b).abs() < spacing {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "PS-TDMA", alias = "ps-tdma")]
    PsTdma,
    #[serde(rename = "PM-TDMA", alias = "pm-tdma")]
    PmTdma,
    #[serde(rename = "NOMA", alias = "noma")]
    Noma,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::PsTdma, Scheme::PmTdma, Scheme::Noma];

    pub fn label(&self) -> &'static str {
        match self {
            Scheme::PsTdma => "PS-TDMA",
            Scheme::PmTdma => "PM-TDMA",
            Scheme::Noma => "NOMA",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Scheme {
    type Err = SwanError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().replace('_', "-").as_str() {
            "PS-TDMA" => Ok(Scheme::PsTdma),
            "PM-TDMA" => Ok(Scheme::PmTdma),
            "NOMA" => Ok(Scheme::Noma),
            _ => Err(invalid("scheme", format!("unknown scheme `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Protocol {
    #[serde(rename = "SS", alias = "ss")]
    Ss,
    #[serde(rename = "SA", alias = "sa")]
    Sa,
    /// Conventional single-waveguide system with one active antenna.
    #[serde(rename = "PASS", alias = "pass")]
    Pass,
}

impl Protocol {
    pub fn label(&self) -> &'static str {
        match self {
            Protocol::Ss => "SS",
            Protocol::Sa => "SA",
            Protocol::Pass => "PASS",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Protocol {
    type Err = SwanError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "SS" => Ok(Protocol::Ss),
            "SA" => Ok(Protocol::Sa),
            "PASS" => Ok(Protocol::Pass),
            _ => Err(invalid("protocol", format!("unknown protocol `{s}`"))),
        }
    }
}

/// Outcome of evaluating one (protocol, scheme) pair on a user set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub scheme: Scheme,
    pub protocol: Protocol,
    pub per_user_snr: Vec<f64>,
    /// bits/s/Hz
    pub sum_rate: f64,
    /// Objective value per optimizer iteration, when the optimizer is iterative.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<f64>>,
}
