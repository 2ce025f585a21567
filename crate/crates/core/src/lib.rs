//! Hilbert-Huang analysis of non-stationary series: empirical mode
//! decomposition, instantaneous amplitude and frequency, the time-dependent
//! amplitude scaling exponent `H*(t)` and complexity `C*(t)`, reference
//! process simulators, and an intraday significance pipeline.

pub mod emd;
pub mod error;
pub mod hilbert;
pub mod intraday;
pub mod scaling;
pub mod series;
pub mod sim;
pub mod spline;
pub mod stats;

pub use error::{Error, Result};
