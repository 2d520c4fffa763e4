//! Analog radio-over-fiber fronthaul overlay simulator.

pub mod budget;
pub mod channel;
pub mod dsp;
pub mod error;
pub mod photonics;
pub mod rng;
pub mod scenario;
pub mod signal;
pub mod subsystems;
pub mod units;
pub mod waveform;

pub use error::{Error, Result};
pub use waveform::ComplexWaveform;
