//! Capacity of the heat channel, a linear time-varying Gaussian filter with
//! additive white Gaussian noise.
//!
//! Three independent routes to the same number:
//!
//! * the closed form `(alpha beta / 2) w0(S / ((alpha beta / 2) theta2))^2` ([`heat::capacity_closed_form`]),
//! * water-filling over a discrete eigenmode ladder ([`heat::capacity_exact_discrete`]),
//! * water-filling over the time-frequency plane by quadrature ([`waterfill::waterfill_quadrature_2d`]).
//!
//! [`curve`] turns the rate forms into spectral-efficiency curves against
//! AWGN and Gaussian-filter baselines from [`comparison`].

// `!(x > 0.0)` is used on purpose so NaN lands on the error path.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod comparison;
pub mod curve;
pub mod error;
pub mod heat;
pub mod quadrature;
pub mod validate;
pub mod w0;
pub mod waterfill;

pub use error::{Error, Result};
pub use heat::HeatChannelGeometry;
pub use quadrature::QuadratureSpec;
pub use w0::ToleranceConfig;
pub use waterfill::{ModeSpectrum, WaterfillResult};
