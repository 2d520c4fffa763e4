//! Multi-wavelength laser source.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::waveform::ComplexWaveform;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombSpec {
    pub n_tones: usize,
    /// Absolute frequency of the first tone (Hz).
    pub start_freq: f64,
    pub spacing: f64,
    /// Per-tone optical power (W).
    pub power_per_tone: f64,
    /// Lorentzian linewidth (Hz); 0 for ideal tones.
    #[serde(default)]
    pub linewidth: f64,
    /// Seed for the phase-noise walk; unused when `linewidth == 0`.
    #[serde(default)]
    pub seed: u64,
}

impl CombSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_tones == 0 {
            return Err(Error::InvalidParameter("comb needs at least one tone".into()));
        }
        if !(self.spacing > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "comb spacing must be positive, got {}",
                self.spacing
            )));
        }
        if !(self.power_per_tone >= 0.0) || !(self.linewidth >= 0.0) {
            return Err(Error::InvalidParameter(
                "comb power and linewidth must be non-negative".into(),
            ));
        }
        Ok(())
    }

    pub fn tone_freqs(&self) -> Vec<f64> {
        (0..self.n_tones)
            .map(|k| self.start_freq + k as f64 * self.spacing)
            .collect()
    }
}

/// Sum of the comb's tones sampled around `ref_freq`.
///
/// `duration * sample_rate` is rounded to a whole number of samples.
pub fn comb_source(
    spec: &CombSpec,
    duration: f64,
    sample_rate: f64,
    ref_freq: f64,
) -> Result<ComplexWaveform> {
    spec.validate()?;
    let n = (duration * sample_rate).round() as usize;
    if n == 0 {
        return Err(Error::InvalidParameter(format!(
            "duration {duration} s holds no samples at {sample_rate} Hz"
        )));
    }
    let nyq = sample_rate / 2.0;
    for f in spec.tone_freqs() {
        let off = f - ref_freq;
        if off.abs() >= nyq {
            return Err(Error::Aliasing {
                freq_hz: off,
                nyquist_hz: nyq,
            });
        }
    }
    let amp = spec.power_per_tone.sqrt();
    let mut samples = vec![Complex64::new(0.0, 0.0); n];
    let mut r = rng::seeded(spec.seed);
    let sigma = (2.0 * PI * spec.linewidth / sample_rate).sqrt();
    let walk = if sigma > 0.0 {
        Some(Normal::new(0.0, sigma).expect("finite sigma"))
    } else {
        None
    };
    for f in spec.tone_freqs() {
        let w = 2.0 * PI * (f - ref_freq) / sample_rate;
        let mut phase_noise = 0.0;
        for (i, s) in samples.iter_mut().enumerate() {
            *s += Complex64::from_polar(amp, w * i as f64 + phase_noise);
            if let Some(d) = &walk {
                phase_noise += d.sample(&mut r);
            }
        }
    }
    ComplexWaveform::new(samples, sample_rate, ref_freq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::watts_to_dbm;

    fn spec(n: usize, spacing: f64) -> CombSpec {
        CombSpec {
            n_tones: n,
            start_freq: 193.4e12,
            spacing,
            power_per_tone: 1e-3,
            linewidth: 0.0,
            seed: 0,
        }
    }

    #[test]
    fn single_tone_constant_envelope() {
        let w = comb_source(&spec(1, 100e9), 1e-8, 400e9, 193.4e12).unwrap();
        assert!((w.power_dbm() - 0.0).abs() < 0.1);
        for s in &w.samples {
            assert!((s.norm_sqr() - 1e-3).abs() < 1e-15);
        }
    }

    #[test]
    fn four_tone_lines() {
        let fs = 819.2e9;
        let ref_freq = 193.4e12 + 150e9;
        let w = comb_source(&spec(4, 100e9), 5e-9, fs, ref_freq).unwrap();
        for f in spec(4, 100e9).tone_freqs() {
            let p = w.tone_power(f - ref_freq);
            assert!((watts_to_dbm(p)).abs() < 0.1);
        }
        assert!(w.tone_power(-100e9) < 1e-12);
    }

    #[test]
    fn two_tone_beat_full_depth() {
        let fs = 400e9;
        let w = comb_source(&spec(2, 50e9), 1e-9, fs, 193.4e12 + 25e9).unwrap();
        let p: Vec<f64> = w.samples.iter().map(|s| s.norm_sqr()).collect();
        let max = p.iter().cloned().fold(0.0, f64::max);
        let min = p.iter().cloned().fold(f64::INFINITY, f64::min);
        // |a e^{iwt} + a e^{-iwt}|^2 swings between 4a^2 and 0
        assert!((max - 4e-3).abs() < 1e-9);
        assert!(min < 1e-9);
    }

    #[test]
    fn out_of_band_tone_rejected() {
        assert!(matches!(
            comb_source(&spec(4, 100e9), 1e-9, 200e9, 193.4e12),
            Err(Error::Aliasing { .. })
        ));
    }

    #[test]
    fn linewidth_broadens_but_keeps_power() {
        let mut s = spec(1, 100e9);
        s.linewidth = 100e6;
        s.seed = 9;
        let w = comb_source(&s, 1e-8, 100e9, 193.4e12).unwrap();
        assert!((w.power_dbm()).abs() < 1e-9);
        assert!(w.tone_power(0.0) < 0.99e-3);
        let again = comb_source(&s, 1e-8, 100e9, 193.4e12).unwrap();
        assert_eq!(w, again);
    }
}
