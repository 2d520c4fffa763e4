//! Higher-order drop filters, modeled as a maximally flat bandpass with a
//! power-complementary through port.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dsp;
use crate::error::{Error, Result};
use crate::units::db_to_amplitude;
use crate::waveform::ComplexWaveform;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DropFilterSpec {
    /// Absolute center frequency (Hz).
    pub center: f64,
    /// 3 dB bandwidth (Hz).
    pub bandwidth: f64,
    pub order: u32,
    /// Excess loss applied to both ports (dB).
    #[serde(default)]
    pub loss_db: f64,
}

impl DropFilterSpec {
    pub fn new(center: f64, bandwidth: f64, order: u32) -> Self {
        Self {
            center,
            bandwidth,
            order,
            loss_db: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.order == 0 {
            return Err(Error::InvalidParameter("filter order must be >= 1".into()));
        }
        if !(self.bandwidth > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "filter bandwidth must be positive, got {}",
                self.bandwidth
            )));
        }
        if !(self.loss_db >= 0.0) {
            return Err(Error::InvalidParameter("filter loss must be >= 0 dB".into()));
        }
        Ok(())
    }

    /// Same filter with its center moved by `delta` Hz.
    pub fn shifted(&self, delta: f64) -> Self {
        Self {
            center: self.center + delta,
            ..*self
        }
    }

    /// `(drop, through)` field transfer at absolute frequency `freq`.
    pub fn response(&self, freq: f64) -> (Complex64, Complex64) {
        self.response_with(&self.poles(), db_to_amplitude(-self.loss_db), freq)
    }

    // Butterworth poles on the left half of the unit circle
    fn poles(&self) -> Vec<Complex64> {
        let n = self.order as i32;
        (1..=n)
            .map(|k| Complex64::from_polar(1.0, PI * (2 * k + n - 1) as f64 / (2 * n) as f64))
            .collect()
    }

    fn response_with(&self, poles: &[Complex64], loss: f64, freq: f64) -> (Complex64, Complex64) {
        let x = (freq - self.center) / (self.bandwidth / 2.0);
        let s = Complex64::new(0.0, x);
        let denom: Complex64 = poles.iter().map(|p| s - p).product();
        let drop = loss / denom;
        let through = loss * s.powi(poles.len() as i32) / denom;
        (drop, through)
    }

    fn check_band(&self, field: &ComplexWaveform) -> Result<()> {
        let off = self.center - field.ref_freq;
        let nyq = field.nyquist();
        if off.abs() + self.bandwidth / 2.0 > nyq {
            return Err(Error::Aliasing {
                freq_hz: off.abs() + self.bandwidth / 2.0,
                nyquist_hz: nyq,
            });
        }
        Ok(())
    }

    /// Apply to a precomputed spectrum of a field at `ref_freq`. Returns the
    /// `(drop, through)` spectra.
    pub fn split_spectrum(
        &self,
        spec: &[Complex64],
        sample_rate: f64,
        ref_freq: f64,
    ) -> (Vec<Complex64>, Vec<Complex64>) {
        let n = spec.len();
        let mut drop = Vec::with_capacity(n);
        let mut thru = Vec::with_capacity(n);
        let poles = self.poles();
        let loss = db_to_amplitude(-self.loss_db);
        for (k, x) in spec.iter().enumerate() {
            let (d, t) = self.response_with(&poles, loss, ref_freq + dsp::bin_freq(k, n, sample_rate));
            drop.push(x * d);
            thru.push(x * t);
        }
        (drop, thru)
    }

    pub fn apply(&self, field: &ComplexWaveform) -> Result<(ComplexWaveform, ComplexWaveform)> {
        self.validate()?;
        field.require_nonempty("drop_filter")?;
        self.check_band(field)?;
        let (d, t) = self.split_spectrum(&field.spectrum(), field.sample_rate, field.ref_freq);
        Ok((field.from_spectrum_like(d), field.from_spectrum_like(t)))
    }

    /// Offset from `center` at which the drop response has power transmission
    /// `fraction` (0 < fraction < 1).
    pub fn edge_offset_for(&self, fraction: f64) -> f64 {
        let n = self.order as f64;
        let lin = fraction / db_to_amplitude(-self.loss_db).powi(2);
        (self.bandwidth / 2.0) * (1.0 / lin - 1.0).powf(1.0 / (2.0 * n))
    }
}

/// Split `field` into the band around `center` and the remainder.
pub fn drop_filter(
    field: &ComplexWaveform,
    center: f64,
    bandwidth: f64,
    order: u32,
) -> Result<(ComplexWaveform, ComplexWaveform)> {
    DropFilterSpec::new(center, bandwidth, order).apply(field)
}
