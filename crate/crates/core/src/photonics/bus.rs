//! Cascaded devices sharing one waveguide.

use crate::error::Result;
use crate::photonics::filter::DropFilterSpec;
use crate::photonics::mrm::apply_mrm;
use crate::photonics::ring::{ring_response_at, RingParams};
use crate::units::db_to_amplitude;
use crate::waveform::ComplexWaveform;

pub const DEFAULT_PASSBAND_LOSS_DB: f64 = 0.1;

/// A device as seen from the bus: the field continues on the through port.
#[derive(Debug, Clone, PartialEq)]
pub enum Device {
    /// Driven modulator; `drive` is a real electrical waveform.
    Mrm {
        params: RingParams,
        drive: ComplexWaveform,
    },
    /// Undriven ring held at its bias point.
    Ring(RingParams),
    /// Higher-order filter; the dropped band leaves the bus.
    Filter(DropFilterSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BusStage {
    pub device: Device,
    pub passband_loss_db: f64,
}

impl BusStage {
    pub fn new(device: Device) -> Self {
        Self {
            device,
            passband_loss_db: DEFAULT_PASSBAND_LOSS_DB,
        }
    }

    pub fn with_loss(mut self, db: f64) -> Self {
        self.passband_loss_db = db;
        self
    }

    pub fn apply(&self, field: &ComplexWaveform) -> Result<ComplexWaveform> {
        let out = match &self.device {
            Device::Mrm { params, drive } => apply_mrm(field, params, drive)?,
            Device::Ring(params) => {
                params.validate()?;
                let n = field.len();
                let mut spec = field.spectrum();
                for (k, x) in spec.iter_mut().enumerate() {
                    let f = field.ref_freq + crate::dsp::bin_freq(k, n, field.sample_rate);
                    *x *= ring_response_at(params, f, params.bias_volt).0;
                }
                field.from_spectrum_like(spec)
            }
            Device::Filter(spec) => spec.apply(field)?.1,
        };
        Ok(out.scaled(db_to_amplitude(-self.passband_loss_db)))
    }
}

/// Apply `stages` left to right.
pub fn cascade_bus(field: &ComplexWaveform, stages: &[BusStage]) -> Result<ComplexWaveform> {
    stages
        .iter()
        .try_fold(field.clone(), |acc, stage| stage.apply(&acc))
}
