//! Imaginary part of the in-out effective action for a moving
//! harmonic-oscillator atom coupled to a scalar vacuum field.
//!
//! * [`free_space`]: threshold emission, the renormalised second-order
//!   kernel and the cutoff frequency shift.
//! * [`friction`]: quantum friction for uniform motion parallel to a lossy
//!   plate.
//! * [`plate`]: small-oscillation emission kernels near the plate.
//! * [`trajectory`]: trajectories and their spectral functions.
//! * [`quad`]: the numerical backbone.
//! * [`sweep`]: parameter sweeps with CSV/JSON output.
//!
//! All numerics are generic over [`Scalar`]; the `*64` aliases below fix
//! `f64`, which is what the sweeps and oracles use.

pub mod error;
pub mod free_space;
pub mod friction;
pub mod params;
pub mod plate;
pub mod quad;
mod scalar;
pub mod sweep;
pub mod trajectory;

#[cfg(feature = "oracle")]
pub mod acceptance;
#[cfg(feature = "oracle")]
pub mod oracle;

pub use error::{Error, Result};
pub use params::{to_dimensionless, AtomParams, DimensionlessSet, MirrorParams};
pub use quad::{QuadConfig, QuadResult};
pub use scalar::Scalar;

pub type AtomParams64 = AtomParams<f64>;
pub type MirrorParams64 = MirrorParams<f64>;
pub type DimensionlessSet64 = DimensionlessSet<f64>;
pub type QuadResult64 = QuadResult<f64>;
pub type SigmaBreakdown64 = free_space::SigmaBreakdown<f64>;
pub type FrictionQuery64 = friction::FrictionQuery<f64>;
pub type PlateKernelPoint64 = plate::PlateKernelPoint<f64>;
pub type Trajectory64 = trajectory::Trajectory<f64>;
pub type LineSpectrum64 = trajectory::LineSpectrum<f64>;
