//! Pseudo-spectral laboratory for the viscous nonlinear wave equation
//! `u_tt - Lap u + sqrt(-Lap) u_t + u^p = 0` on a truncated periodic box:
//! exact linear propagators, the convolution-kernel toolbox, the
//! visco-dispersive oscillator limit, a dealiased nonlinear solver with a
//! Picard fixed-point route, and Wiener randomization with Monte Carlo
//! estimators.
//!
//! Everything is generic over the working scalar (`f32` or `f64`, via
//! [`scalar::Real`]); the `*64` aliases below are what the CLI and the file
//! formats use.

pub mod bands;
pub mod error;
pub mod fft;
pub mod field;
pub mod fit;
pub mod grid;
pub mod kernel;
pub mod oscillator;
pub mod propagator;
pub mod quad;
pub mod random;
pub mod scalar;
pub mod solver;

pub use error::{Error, Result};
pub use field::{critical_exponent, scale_data, CauchyData, Lp, SpectralField};
pub use grid::GridSpec;
pub use propagator::{PropagatorParams, TimeSeries, Trajectory};
pub use scalar::Real;

/// Concrete aliases for the default working precision.
pub type Grid64 = GridSpec<f64>;
pub type Field64 = SpectralField<f64>;
pub type Data64 = CauchyData<f64>;
pub type Trajectory64 = Trajectory<f64>;
pub type TimeSeries64 = TimeSeries<f64>;
pub type Params64 = PropagatorParams<f64>;

/// Single-precision aliases, mainly exercised by tests.
pub type Grid32 = GridSpec<f32>;
pub type Field32 = SpectralField<f32>;
