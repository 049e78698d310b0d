//! Frequency-matching analysis between where a dataset's class information
//! lives in its temporal spectrum and what a leaky integrate-and-fire
//! neuron's low-pass response lets through.
//!
//! The numeric modules are generic over [`Real`] (`f32` or `f64`); the
//! `*64` aliases below fix the scalar to `f64`, which the CLI uses.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod di;
pub mod energy;
pub mod error;
pub mod ingest;
pub mod lif_sim;
pub mod lif_spectral;
pub mod matching;
pub mod scalar;
pub mod spectrum;
pub mod synth;

pub use error::{Error, ErrorCategory, Result};
pub use scalar::Real;

pub type FrequencyGrid64 = spectrum::FrequencyGrid<f64>;
pub type SampleTensor64 = spectrum::SampleTensor<f64>;
pub type ScalarSeries64 = spectrum::ScalarSeries<f64>;
pub type AmplitudeSpectrum64 = spectrum::AmplitudeSpectrum<f64>;
pub type ClassStats64 = di::ClassStats<f64>;
pub type DiSpectrum64 = di::DiSpectrum<f64>;
pub type LeakParam64 = lif_spectral::LeakParam<f64>;
pub type LifTemplate64 = lif_spectral::LifTemplate<f64>;
pub type Bandwidth64 = lif_spectral::Bandwidth<f64>;
pub type FmsCurve64 = matching::FmsCurve<f64>;
pub type KneeResult64 = matching::KneeResult<f64>;
pub type LifConfig64 = lif_sim::LifConfig<f64>;
pub type SpikeTrace64 = lif_sim::SpikeTrace<f64>;
pub type LayerOps64 = energy::LayerOps<f64>;
pub type EnergyConstants64 = energy::EnergyConstants<f64>;

pub type FrequencyGrid32 = spectrum::FrequencyGrid<f32>;
pub type SampleTensor32 = spectrum::SampleTensor<f32>;
pub type DiSpectrum32 = di::DiSpectrum<f32>;
pub type LifTemplate32 = lif_spectral::LifTemplate<f32>;
