//! Wavepacket scattering by the reflectionless sech² well: closed-form and
//! propagated wavefunctions, densities and currents, Bohmian trajectories
//! and arrival-time statistics.
//!
//! Everything is generic over the scalar type; the `*64` aliases fix it to
//! `f64`.

// `!(x > 0)` deliberately treats NaN as invalid; index loops mirror the
// matrix and tableau notation; rule tables keep their published digits.
#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::needless_range_loop,
    clippy::excessive_precision
)]

pub mod arrival;
pub mod bohmian;
pub mod error;
pub mod model;
pub mod numerics;
pub mod observables;
pub mod real;
pub mod validation;

pub use error::{Error, Result};
pub use model::{ComplexWidth, Family, PacketParams, Quantity, ScaledUnits, WaveField};
pub use real::Real;

/// Crate version, recorded in output metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type PacketParams64 = model::PacketParams<f64>;
pub type WaveField64 = model::WaveField<f64>;
pub type ScaledUnits64 = model::ScaledUnits<f64>;
pub type QuadratureSpec64 = numerics::QuadratureSpec<f64>;
pub type OdeSpec64 = numerics::OdeSpec<f64>;
pub type GridSpec64 = numerics::GridSpec<f64>;
pub type Trajectory64 = numerics::Trajectory<f64>;
pub type FlowSample64 = observables::FlowSample<f64>;
pub type MomentRecord64 = observables::MomentRecord<f64>;
pub type ArrivalRecord64 = arrival::ArrivalRecord<f64>;
pub type EnsembleSpec64 = bohmian::EnsembleSpec<f64>;
