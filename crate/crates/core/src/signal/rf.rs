//! Passband conversion and noise helpers for electrical signals.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use rand_distr::{Distribution, Normal};

use crate::dsp;
use crate::error::{Error, Result};
use crate::rng::SimRng;
use crate::waveform::ComplexWaveform;

/// Smallest `F` such that `[-F, F]` holds `fraction` of the waveform's power.
pub fn occupied_half_bandwidth(w: &ComplexWaveform, fraction: f64) -> f64 {
    let spec = w.spectrum();
    let n = spec.len();
    if n == 0 {
        return 0.0;
    }
    let mut bins: Vec<(f64, f64)> = spec
        .iter()
        .enumerate()
        .map(|(k, x)| (dsp::bin_freq(k, n, w.sample_rate).abs(), x.norm_sqr()))
        .collect();
    bins.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = bins.iter().map(|b| b.1).sum();
    if total == 0.0 {
        return 0.0;
    }
    let mut acc = 0.0;
    for (f, p) in bins {
        acc += p;
        if acc >= fraction * total {
            return f;
        }
    }
    w.nyquist()
}

/// Multiply by `exp(i 2π f t)`.
pub fn frequency_shift(w: &ComplexWaveform, freq: f64) -> ComplexWaveform {
    let step = 2.0 * PI * freq / w.sample_rate;
    w.with_samples(
        w.samples
            .iter()
            .enumerate()
            .map(|(i, s)| s * Complex64::from_polar(1.0, step * i as f64))
            .collect(),
    )
}

/// Real passband signal `sqrt(2) Re{x(t) exp(i 2π f_rf t)}`, power-preserving.
///
/// `f_rf == 0` returns the real part unchanged.
pub fn upconvert_real(waveform: &ComplexWaveform, f_rf: f64) -> Result<ComplexWaveform> {
    waveform.require_nonempty("upconvert_real")?;
    if f_rf == 0.0 {
        return Ok(waveform.with_samples(
            waveform
                .samples
                .iter()
                .map(|s| Complex64::new(s.re, 0.0))
                .collect(),
        ));
    }
    let half_bw = occupied_half_bandwidth(waveform, 0.999);
    if f_rf.abs() + half_bw >= waveform.nyquist() {
        return Err(Error::Aliasing {
            freq_hz: f_rf.abs() + half_bw,
            nyquist_hz: waveform.nyquist(),
        });
    }
    let shifted = frequency_shift(waveform, f_rf);
    Ok(waveform.with_samples(
        shifted
            .samples
            .iter()
            .map(|s| Complex64::new(SQRT_2 * s.re, 0.0))
            .collect(),
    ))
}

/// Recover the complex envelope of the band `[f_center - bw/2, f_center + bw/2]`
/// of a real passband signal. Inverse of [`upconvert_real`] for band-limited input.
pub fn downconvert(waveform: &ComplexWaveform, f_center: f64, bandwidth: f64) -> ComplexWaveform {
    let n = waveform.len();
    let fs = waveform.sample_rate;
    let spec = waveform.spectrum();
    let shift = dsp::freq_bin(f_center, n, fs);
    let residual = f_center - dsp::bin_freq(shift, n, fs);
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    let half = bandwidth / 2.0;
    for (k, o) in out.iter_mut().enumerate() {
        let f = dsp::bin_freq(k, n, fs);
        if f.abs() <= half {
            *o = spec[(k + shift) % n] * SQRT_2;
        }
    }
    let base = waveform.from_spectrum_like(out);
    let mut base = if residual != 0.0 {
        frequency_shift(&base, -residual)
    } else {
        base
    };
    base.ref_freq = 0.0;
    base
}

/// `(i, q)` drives for single-sideband modulation: `q` is the Hilbert
/// transform of the real part of `i`.
pub fn hilbert_pair(real: &ComplexWaveform) -> (ComplexWaveform, ComplexWaveform) {
    let n = real.len();
    let i = real.with_samples(real.samples.iter().map(|s| Complex64::new(s.re, 0.0)).collect());
    let mut spec = i.spectrum();
    for (k, x) in spec.iter_mut().enumerate() {
        let f = dsp::bin_freq(k, n, real.sample_rate);
        // H(f) = -i sign(f)
        *x *= if f > 0.0 {
            Complex64::new(0.0, -1.0)
        } else if f < 0.0 {
            Complex64::new(0.0, 1.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
        if n % 2 == 0 && k == n / 2 {
            *x = Complex64::new(0.0, 0.0);
        }
    }
    let mut q = i.from_spectrum_like(spec);
    for s in q.samples.iter_mut() {
        s.im = 0.0;
    }
    (i, q)
}

/// Add circular complex Gaussian noise of total variance `noise_power` per sample.
pub fn add_awgn(w: &ComplexWaveform, noise_power: f64, rng: &mut SimRng) -> ComplexWaveform {
    if noise_power <= 0.0 {
        return w.clone();
    }
    let normal = Normal::new(0.0, (noise_power / 2.0).sqrt()).expect("finite sigma");
    w.with_samples(
        w.samples
            .iter()
            .map(|s| s + Complex64::new(normal.sample(rng), normal.sample(rng)))
            .collect(),
    )
}
