//! Carrier-suppressed subcarrier pair generation with a clock-driven MRM.

use std::f64::consts::PI;

use crate::dsp;
use crate::error::{Error, Result};
use crate::photonics::mrm::{apply_mrm, MrmKernel};
use crate::photonics::ring::RingParams;
use crate::waveform::ComplexWaveform;

/// Minimum tone-to-strongest-line ratio for a tone to count as present.
const TONE_PRESENT: f64 = 1e-3;

/// Offset (from `field.ref_freq`) of the strongest line within one linewidth
/// of the ring's biased resonance.
pub fn find_tone(field: &ComplexWaveform, params: &RingParams) -> Result<f64> {
    field.require_nonempty("generate_subcarriers")?;
    let n = field.len();
    let fs = field.sample_rate;
    let spec = field.spectrum();
    let target = params.biased_resonance() - field.ref_freq;
    let half = params.fwhm().max(fs / n as f64);
    let mut best_all = 0.0f64;
    let mut best = (0.0f64, f64::NAN);
    for (k, x) in spec.iter().enumerate() {
        let p = x.norm_sqr();
        best_all = best_all.max(p);
        let f = dsp::bin_freq(k, n, fs);
        if (f - target).abs() <= half && p > best.0 {
            best = (p, f);
        }
    }
    if best_all == 0.0 || best.0 < TONE_PRESENT * best_all {
        return Err(Error::ToneNotFound(format!(
            "no line within {:.3} GHz of resonance {:.6} THz",
            half / 1e9,
            params.biased_resonance() / 1e12
        )));
    }
    Ok(best.1)
}

fn clock(n: usize, fs: f64, freq: f64, volts: f64) -> Vec<f64> {
    (0..n)
        .map(|i| volts * (2.0 * PI * freq * i as f64 / fs).cos())
        .collect()
}

fn check_alias(field: &ComplexWaveform, tone: f64, clock_freq: f64) -> Result<()> {
    let edge = tone.abs() + clock_freq.abs();
    if edge >= field.nyquist() {
        return Err(Error::Aliasing {
            freq_hz: edge,
            nyquist_hz: field.nyquist(),
        });
    }
    Ok(())
}

/// Drive the ring with `clock_volts * cos(2π f_s t)` around its bias. With
/// the ring biased onto the tone (through-port null) the output is a pair of
/// lines at `tone ± f_s` with the carrier suppressed.
pub fn generate_subcarriers(
    field: &ComplexWaveform,
    params: &RingParams,
    clock_freq: f64,
    clock_volts: f64,
) -> Result<ComplexWaveform> {
    params.validate()?;
    let tone = find_tone(field, params)?;
    check_alias(field, tone, clock_freq)?;
    let drive = ComplexWaveform::from_real(
        &clock(field.len(), field.sample_rate, clock_freq, clock_volts),
        field.sample_rate,
    )?;
    apply_mrm(field, params, &drive)
}

/// Block-reusable form of [`generate_subcarriers`]. The tone search and
/// aliasing check run once at construction.
#[derive(Debug, Clone)]
pub struct SubcarrierGenerator {
    kernel: MrmKernel,
    volts: Vec<f64>,
    /// Clock periods per block when the clock is bin-aligned.
    periods: Option<usize>,
}

impl SubcarrierGenerator {
    pub fn new(
        probe: &ComplexWaveform,
        params: &RingParams,
        clock_freq: f64,
        clock_volts: f64,
    ) -> Result<Self> {
        params.validate()?;
        let tone = find_tone(probe, params)?;
        check_alias(probe, tone, clock_freq)?;
        let a = clock_volts.abs();
        let kernel = MrmKernel::new(
            params,
            probe.len(),
            probe.sample_rate,
            probe.ref_freq,
            params.bias_volt - a,
            params.bias_volt + a,
        )?;
        let volts = clock(probe.len(), probe.sample_rate, clock_freq, clock_volts)
            .into_iter()
            .map(|v| v + params.bias_volt)
            .collect();
        let cycles = clock_freq.abs() * probe.len() as f64 / probe.sample_rate;
        let periods = ((cycles - cycles.round()).abs() < 1e-9 && a > 0.0)
            .then_some(cycles.round() as usize);
        Ok(Self {
            kernel,
            volts,
            periods,
        })
    }

    pub fn apply(&self, field: &ComplexWaveform) -> Result<ComplexWaveform> {
        match self.periods {
            Some(k) => self.kernel.apply_cosine(field, k),
            None => self.kernel.apply(field, &self.volts),
        }
    }
}

/// Ratio of the mean subcarrier line power to the residual carrier (dB).
pub fn carrier_suppression_db(out: &ComplexWaveform, tone: f64, clock_freq: f64) -> f64 {
    let c = out.tone_power(tone).max(1e-300);
    let s = 0.5 * (out.tone_power(tone + clock_freq) + out.tone_power(tone - clock_freq));
    10.0 * (s / c).log10()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::photonics::comb::{comb_source, CombSpec};
    use crate::photonics::ring::thermal_tune;

    const F0: f64 = 193.4e12;
    const FS: f64 = 102.4e9;
    const N: usize = 4096;

    fn laser() -> ComplexWaveform {
        let spec = CombSpec {
            n_tones: 1,
            start_freq: F0,
            spacing: 100e9,
            power_per_tone: 1e-3,
            linewidth: 0.0,
            seed: 0,
        };
        comb_source(&spec, N as f64 / FS, FS, F0).unwrap()
    }

    fn ring() -> RingParams {
        RingParams::critically_coupled(F0, 1e12, 3e9)
    }

    #[test]
    fn twenty_ghz_clock_lines() {
        let out = generate_subcarriers(&laser(), &ring(), 20e9, 0.1).unwrap();
        let s = carrier_suppression_db(&out, 0.0, 20e9);
        assert!(s >= 20.0, "{s}");
        assert!(out.tone_power(20e9) > 1e-8);
        assert!((out.tone_power(20e9) / out.tone_power(-20e9) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn zero_clock_is_static_filter() {
        let out = generate_subcarriers(&laser(), &ring(), 20e9, 0.0).unwrap();
        assert!(out.mean_power() < 1e-20);
    }

    #[test]
    fn missing_tone() {
        let p = thermal_tune(&ring(), F0 + 30e9);
        assert!(matches!(
            generate_subcarriers(&laser(), &p, 20e9, 0.1),
            Err(Error::ToneNotFound(_))
        ));
    }

    #[test]
    fn aliasing_clock() {
        assert!(matches!(
            generate_subcarriers(&laser(), &ring(), 60e9, 0.2),
            Err(Error::Aliasing { .. })
        ));
    }

    #[test]
    fn generator_matches_free_function() {
        let g = SubcarrierGenerator::new(&laser(), &ring(), 10e9, 0.1).unwrap();
        let a = g.apply(&laser()).unwrap();
        let b = generate_subcarriers(&laser(), &ring(), 10e9, 0.1).unwrap();
        for (x, y) in a.samples.iter().zip(&b.samples) {
            assert!((x - y).norm() < 1e-12);
        }
    }
}
