//! Uplink sum-rate maximization for segmented-waveguide pinching-antenna systems.
//!
//! A waveguide along the x-axis is cut into `M` segments, each with its own
//! feed point and one movable antenna. Under segment selection (SS) one
//! segment is connected to the receiver at a time; under segment aggregation
//! (SA) all feeds are combined. The crate provides the line-of-sight channel
//! model, TDMA/NOMA sum-rates, the placement optimizers for both protocols, a
//! conventional single-waveguide baseline and a seeded Monte-Carlo harness.

pub mod baseline;
pub mod channel;
pub mod error;
pub mod evaluate;
pub mod harness;
pub mod model;
pub mod opt_sa;
pub mod opt_ss;
pub mod rates;
pub mod scenario;

pub use error::{Result, SwanError};
pub use evaluate::evaluate_placements;
pub use model::{
    dbm_to_watts, is_feasible, watts_to_dbm, Placement, Protocol, RateReport, Scheme, SystemConfig, User, UserSet,
    WaveguideLayout,
};
