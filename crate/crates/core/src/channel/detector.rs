//! Square-law photodiode with shot and thermal noise.

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::units::ELECTRON_CHARGE;
use crate::waveform::ComplexWaveform;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdParams {
    /// A/W.
    #[serde(default = "default_responsivity")]
    pub responsivity: f64,
    /// One-sided thermal current noise density, A²/Hz.
    #[serde(default)]
    pub thermal_noise_psd: f64,
    #[serde(default)]
    pub include_shot: bool,
    #[serde(default)]
    pub seed: u64,
}

fn default_responsivity() -> f64 {
    1.0
}

impl PdParams {
    pub fn noiseless(responsivity: f64) -> Self {
        Self {
            responsivity,
            thermal_noise_psd: 0.0,
            include_shot: false,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.responsivity > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "responsivity must be positive, got {}",
                self.responsivity
            )));
        }
        if !(self.thermal_noise_psd >= 0.0) {
            return Err(Error::InvalidParameter(
                "thermal noise density must be >= 0".into(),
            ));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Photocurrent (A) as a real electrical waveform. Noise is white over the
/// simulated electrical bandwidth `sample_rate / 2`.
pub fn photodetect(field: &ComplexWaveform, params: &PdParams) -> Result<ComplexWaveform> {
    params.validate()?;
    if !field.is_optical() {
        return Err(Error::InvalidParameter(
            "photodetect needs an optical field (ref_freq > 0)".into(),
        ));
    }
    let bw = field.sample_rate / 2.0;
    let thermal_sigma = (params.thermal_noise_psd * bw).sqrt();
    let mut r = rng::seeded(params.seed);
    let samples = field
        .samples
        .iter()
        .map(|e| {
            let i = params.responsivity * e.norm_sqr();
            let mut noise = 0.0;
            if params.include_shot {
                let z: f64 = StandardNormal.sample(&mut r);
                noise += z * (2.0 * ELECTRON_CHARGE * i * bw).sqrt();
            }
            if thermal_sigma > 0.0 {
                let z: f64 = StandardNormal.sample(&mut r);
                noise += z * thermal_sigma;
            }
            Complex64::new(i + noise, 0.0)
        })
        .collect();
    let mut out = ComplexWaveform::new(samples, field.sample_rate, 0.0)?;
    out.delay_s = field.delay_s;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const F0: f64 = 193.4e12;

    #[test]
    fn dc_photocurrent() {
        let f = ComplexWaveform::new(vec![Complex64::new(1e-3f64.sqrt(), 0.0); 32], 1e9, F0).unwrap();
        let i = photodetect(&f, &PdParams::noiseless(1.0)).unwrap();
        for s in &i.samples {
            assert!((s.re - 1e-3).abs() < 1e-15 && s.im == 0.0);
        }
    }

    #[test]
    fn two_tone_beat() {
        let fs = 64e9;
        let n = 1024;
        let (p1, p2, df): (f64, f64, f64) = (1e-3, 0.25e-3, 5e9);
        let s = (0..n)
            .map(|k| {
                let t = k as f64 / fs;
                Complex64::new(p1.sqrt(), 0.0) + Complex64::from_polar(p2.sqrt(), 2.0 * PI * df * t)
            })
            .collect();
        let f = ComplexWaveform::new(s, fs, F0).unwrap();
        let i = photodetect(&f, &PdParams::noiseless(1.0)).unwrap();
        // a cosine of amplitude A has tone amplitude A/2 at +df
        let amp = 2.0 * i.tone_power(df).sqrt();
        let expect = 2.0 * (p1 * p2).sqrt();
        assert!((amp / expect - 1.0).abs() < 0.01);
    }

    #[test]
    fn thermal_floor_variance() {
        let fs = 10e9;
        let n = 200_000;
        let f = ComplexWaveform::zeros(n, fs, F0).unwrap();
        let pd = PdParams {
            responsivity: 1.0,
            thermal_noise_psd: 1e-22,
            include_shot: true,
            seed: 4,
        };
        let i = photodetect(&f, &pd).unwrap();
        let var = i.samples.iter().map(|s| s.re * s.re).sum::<f64>() / n as f64;
        let expect = 1e-22 * fs / 2.0;
        assert!((var / expect - 1.0).abs() < 0.05);
    }

    #[test]
    fn seeded_noise_repeats() {
        let f = ComplexWaveform::new(vec![Complex64::new(1e-2, 0.0); 256], 1e9, F0).unwrap();
        let pd = PdParams {
            responsivity: 0.8,
            thermal_noise_psd: 1e-22,
            include_shot: true,
            seed: 11,
        };
        assert_eq!(photodetect(&f, &pd).unwrap(), photodetect(&f, &pd).unwrap());
    }
}
