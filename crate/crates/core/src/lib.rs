//! Communication-rate / sensing-rate regions for pinching-antenna ISAC.
//!
//! A transmit dielectric waveguide carries `N` activated pinching antennas
//! that serve one communication user and illuminate one sensing target; the
//! echo is collected by a single pinch on a receive waveguide. This crate
//! evaluates the resulting rates in closed form and builds rate regions:
//!
//! - [`model`]: SNR and rate evaluation, including in-waveguide phase and loss.
//! - [`single_pinch`]: closed-form C-C, S-C and rate-profile placements.
//! - [`multi_pinch`]: element-wise grid search and the achievable inner bound.
//! - [`outer_bound`]: majorization-based outer bound on the multi-pinch region.
//! - [`region`]: downward-closed convex regions (time sharing) and containment.
//! - [`sensing`]: determinant / MMSE oracles for the sensing-rate expression.
//! - [`monte_carlo`]: seeded scenario sampling and averaged results.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
mod math;
pub mod model;
pub mod monte_carlo;
pub mod multi_pinch;
pub mod outer_bound;
pub mod region;
pub mod rng;
pub mod sensing;
pub mod single_pinch;

pub use error::{Error, Result};
pub use model::{Beamformer, RatePair, Scenario, SystemConfig};
pub use region::RateRegion;

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
