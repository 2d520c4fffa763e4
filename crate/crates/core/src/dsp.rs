//! FFT plumbing shared by every frequency-domain model.
//!
//! Forward transforms are unnormalized; inverse transforms divide by `n`, so
//! `ifft(fft(x)) == x`. Bin `k` of an `n`-point transform at sample rate `fs`
//! sits at `k * fs / n` for `k < n/2` and at `(k - n) * fs / n` otherwise.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

pub fn fft(buf: &mut [Complex64]) {
    if buf.is_empty() {
        return;
    }
    plan(buf.len(), false).process(buf);
}

pub fn ifft(buf: &mut [Complex64]) {
    if buf.is_empty() {
        return;
    }
    plan(buf.len(), true).process(buf);
    let scale = 1.0 / buf.len() as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

/// Signed frequency (Hz) of FFT bin `k`.
#[inline]
pub fn bin_freq(k: usize, n: usize, fs: f64) -> f64 {
    let k = if k < n.div_ceil(2) {
        k as f64
    } else {
        k as f64 - n as f64
    };
    k * fs / n as f64
}

/// Nearest FFT bin to a signed frequency, wrapped into `0..n`.
#[inline]
pub fn freq_bin(f: f64, n: usize, fs: f64) -> usize {
    let k = (f * n as f64 / fs).round() as i64;
    k.rem_euclid(n as i64) as usize
}

pub fn bin_freqs(n: usize, fs: f64) -> Vec<f64> {
    (0..n).map(|k| bin_freq(k, n, fs)).collect()
}

/// Nearest integer to `target` whose only prime factors are 2, 3 and 5.
pub fn nearest_smooth(target: f64) -> usize {
    let target = target.max(1.0);
    let mut best = 1usize;
    let mut best_err = f64::INFINITY;
    let limit = (target * 2.0) as usize + 2;
    let mut p2 = 1usize;
    while p2 <= limit {
        let mut p3 = p2;
        while p3 <= limit {
            let mut p5 = p3;
            while p5 <= limit {
                let err = (p5 as f64 - target).abs();
                if err < best_err {
                    best_err = err;
                    best = p5;
                }
                p5 *= 5;
            }
            p3 *= 3;
        }
        p2 *= 2;
    }
    best
}

/// Raised-cosine gain: 1 for `|x| <= pass`, 0 for `|x| >= stop`.
#[inline]
pub fn raised_cosine(x: f64, pass: f64, stop: f64) -> f64 {
    let a = x.abs();
    if a <= pass {
        1.0
    } else if a >= stop {
        0.0
    } else {
        0.5 * (1.0 + (std::f64::consts::PI * (a - pass) / (stop - pass)).cos())
    }
}

/// Complex amplitude of the component at `freq` (Hz), estimated by projection
/// onto `exp(i 2π f t)`. Exact for tones with an integer number of cycles.
pub fn tone_amplitude(samples: &[Complex64], fs: f64, freq: f64) -> Complex64 {
    if samples.is_empty() {
        return Complex64::new(0.0, 0.0);
    }
    let w = -2.0 * std::f64::consts::PI * freq / fs;
    // Rotate with a recurrence, renormalized periodically against drift.
    let step = Complex64::from_polar(1.0, w);
    let mut rot = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, s) in samples.iter().enumerate() {
        if i % 1024 == 0 {
            rot = Complex64::from_polar(1.0, w * i as f64);
        }
        acc += s * rot;
        rot *= step;
    }
    acc / samples.len() as f64
}
