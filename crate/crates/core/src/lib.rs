//! p-adic analysis of time series.
//!
//! Natural-number time indices are read as elements of `Q_p/Z_p` through the
//! Monna map. On that ultrametric space the crate provides:
//!
//! - [`padic`]: exact digits, norms, group law and additive character;
//! - [`wavelets`]: Haar and p-adic wavelet transforms and projections;
//! - [`vladimirov`]: the discretized Vladimirov fractional derivative;
//! - [`fbm`]: covariance models and exact simulation of discretized
//!   fractional p-adic Brownian motion, with Monte Carlo verification;
//! - [`cli`]: the `padic-ts` command-line front end.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the scalar to `f64`.

pub mod cli;
pub mod error;
pub mod fbm;
pub mod padic;
pub mod scalar;
pub mod vladimirov;
pub mod wavelets;

pub use error::{Error, Result};
pub use padic::{NormValue, PAdicDigits, Prime, UltrametricIndex};
pub use scalar::Real;

pub type Complex = num_complex::Complex<f64>;
pub type Series = wavelets::SampledSeries<f64>;
pub type Series32 = wavelets::SampledSeries<f32>;
pub type Coefficients = wavelets::WaveletCoefficients<f64>;
pub type Coefficients32 = wavelets::WaveletCoefficients<f32>;
pub type Operator = vladimirov::OperatorConfig<f64>;
pub type Model = fbm::CovarianceModel<f64>;
pub type Simulation = fbm::SimulationConfig<f64>;
pub type Empirical = fbm::EmpiricalCovariance<f64>;
