//! Uniformly sampled complex envelope shared by optical and electrical signals.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dsp;
use crate::error::{Error, Result};
use crate::units::watts_to_dbm;

/// Complex baseband envelope.
///
/// Samples are in sqrt(W) so `|s|^2` is instantaneous power. `ref_freq` is the
/// absolute frequency of the baseband origin: an optical carrier grid point
/// for optical fields, `0.0` for electrical signals. `delay_s` accumulates bulk
/// propagation delay as metadata; it never shifts samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexWaveform {
    pub samples: Vec<Complex64>,
    pub sample_rate: f64,
    pub ref_freq: f64,
    #[serde(default)]
    pub delay_s: f64,
}

impl ComplexWaveform {
    pub fn new(samples: Vec<Complex64>, sample_rate: f64, ref_freq: f64) -> Result<Self> {
        if !(sample_rate > 0.0 && sample_rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sample_rate must be positive, got {sample_rate}"
            )));
        }
        Ok(Self {
            samples,
            sample_rate,
            ref_freq,
            delay_s: 0.0,
        })
    }

    pub fn zeros(len: usize, sample_rate: f64, ref_freq: f64) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); len], sample_rate, ref_freq)
    }

    /// Real-valued electrical waveform.
    pub fn from_real(values: &[f64], sample_rate: f64) -> Result<Self> {
        Self::new(
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            sample_rate,
            0.0,
        )
    }

    /// Same metadata, new samples.
    pub fn with_samples(&self, samples: Vec<Complex64>) -> Self {
        Self {
            samples,
            sample_rate: self.sample_rate,
            ref_freq: self.ref_freq,
            delay_s: self.delay_s,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    pub fn nyquist(&self) -> f64 {
        self.sample_rate / 2.0
    }

    pub fn is_optical(&self) -> bool {
        self.ref_freq > 0.0
    }

    pub fn require_nonempty(&self, what: &str) -> Result<()> {
        if self.samples.is_empty() {
            return Err(Error::InvalidParameter(format!("{what}: empty waveform")));
        }
        Ok(())
    }

    pub fn check_same_rate(&self, other: &ComplexWaveform) -> Result<()> {
        if (self.sample_rate - other.sample_rate).abs() > 1e-9 * self.sample_rate {
            return Err(Error::SampleRateMismatch(self.sample_rate, other.sample_rate));
        }
        Ok(())
    }

    /// Mean of `|s|^2` (W for optical fields).
    pub fn mean_power(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.samples.len() as f64
    }

    /// Total energy, `sum |s|^2 / sample_rate` (J).
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.sample_rate
    }

    pub fn power_dbm(&self) -> f64 {
        watts_to_dbm(self.mean_power())
    }

    pub fn scaled(&self, amplitude: f64) -> Self {
        self.with_samples(self.samples.iter().map(|s| s * amplitude).collect())
    }

    /// Largest imaginary magnitude relative to the largest sample magnitude.
    pub fn imag_ratio(&self) -> f64 {
        let peak = self.samples.iter().map(|s| s.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        self.samples.iter().map(|s| s.im.abs()).fold(0.0, f64::max) / peak
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.re).collect()
    }

    /// Unnormalized FFT of the samples.
    pub fn spectrum(&self) -> Vec<Complex64> {
        let mut buf = self.samples.clone();
        dsp::fft(&mut buf);
        buf
    }

    /// Inverse of [`spectrum`](Self::spectrum), keeping this waveform's metadata.
    pub fn from_spectrum_like(&self, mut spectrum: Vec<Complex64>) -> Self {
        dsp::ifft(&mut spectrum);
        self.with_samples(spectrum)
    }

    /// Signed baseband frequency (offset from `ref_freq`) of every FFT bin.
    pub fn bin_offsets(&self) -> Vec<f64> {
        dsp::bin_freqs(self.len(), self.sample_rate)
    }

    /// Two-sided periodogram: (offset frequency, W/Hz) per bin, sorted by frequency.
    pub fn psd(&self) -> Vec<(f64, f64)> {
        let n = self.len();
        if n == 0 {
            return Vec::new();
        }
        let spec = self.spectrum();
        let df = self.sample_rate / n as f64;
        let norm = 1.0 / (n as f64 * n as f64 * df);
        let mut out: Vec<(f64, f64)> = spec
            .iter()
            .enumerate()
            .map(|(k, x)| (dsp::bin_freq(k, n, self.sample_rate), x.norm_sqr() * norm))
            .collect();
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out
    }

    /// Periodogram averaged into `bins` equal-width frequency bins.
    pub fn psd_binned(&self, bins: usize) -> Vec<(f64, f64)> {
        let psd = self.psd();
        if psd.is_empty() || bins == 0 {
            return Vec::new();
        }
        let per = psd.len().div_ceil(bins);
        psd.chunks(per)
            .map(|c| {
                let f = c.iter().map(|p| p.0).sum::<f64>() / c.len() as f64;
                let s = c.iter().map(|p| p.1).sum::<f64>() / c.len() as f64;
                (f, s)
            })
            .collect()
    }

    /// Power (W) in the offset band `[lo, hi]` relative to `ref_freq`.
    pub fn band_power(&self, lo: f64, hi: f64) -> f64 {
        band_power_of_spectrum(&self.spectrum(), self.sample_rate, lo, hi)
    }

    /// Power (W) of the component at offset frequency `offset`.
    pub fn tone_power(&self, offset: f64) -> f64 {
        dsp::tone_amplitude(&self.samples, self.sample_rate, offset).norm_sqr()
    }

    pub fn add(&self, other: &ComplexWaveform) -> Result<Self> {
        self.check_same_rate(other)?;
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(self.with_samples(
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a + b)
                .collect(),
        ))
    }
}

/// Power in the offset band `[lo, hi]` of an unnormalized spectrum.
pub fn band_power_of_spectrum(spec: &[Complex64], fs: f64, lo: f64, hi: f64) -> f64 {
    let n = spec.len();
    if n == 0 {
        return 0.0;
    }
    let norm = 1.0 / (n as f64 * n as f64);
    spec.iter()
        .enumerate()
        .filter(|(k, _)| {
            let f = dsp::bin_freq(*k, n, fs);
            f >= lo && f <= hi
        })
        .map(|(_, x)| x.norm_sqr() * norm)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tone(n: usize, fs: f64, f: f64, amp: f64) -> ComplexWaveform {
        let s = (0..n)
            .map(|i| Complex64::from_polar(amp, 2.0 * PI * f * i as f64 / fs))
            .collect();
        ComplexWaveform::new(s, fs, 0.0).unwrap()
    }

    #[test]
    fn rejects_bad_rate() {
        assert!(ComplexWaveform::new(vec![], 0.0, 0.0).is_err());
        assert!(ComplexWaveform::new(vec![], f64::NAN, 0.0).is_err());
    }

    #[test]
    fn energy_and_power_agree() {
        let w = tone(1000, 1e3, 50.0, 2.0);
        assert!((w.mean_power() - 4.0).abs() < 1e-12);
        assert!((w.energy() - 4.0 * w.duration()).abs() < 1e-9);
    }

    #[test]
    fn psd_integrates_to_power() {
        let w = tone(1024, 1024.0, 100.0, 0.3);
        let df = w.sample_rate / w.len() as f64;
        let total: f64 = w.psd().iter().map(|p| p.1 * df).sum();
        assert!((total - w.mean_power()).abs() < 1e-12);
        assert!((w.band_power(90.0, 110.0) - 0.09).abs() < 1e-12);
        assert!(w.band_power(-110.0, -90.0) < 1e-20);
        assert!((w.tone_power(100.0) - 0.09).abs() < 1e-12);
    }

    #[test]
    fn add_checks_shapes() {
        let a = tone(8, 8.0, 1.0, 1.0);
        let b = tone(9, 8.0, 1.0, 1.0);
        assert!(matches!(a.add(&b), Err(Error::LengthMismatch { .. })));
        let c = ComplexWaveform::zeros(8, 16.0, 0.0).unwrap();
        assert!(matches!(a.add(&c), Err(Error::SampleRateMismatch(..))));
    }
}
