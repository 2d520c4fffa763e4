//! Quasi-static microring modulator.
//!
//! At every instant the ring's resonance sits at `bias + drive(t)` and the
//! field sees the corresponding through response:
//!
//! ```text
//! y(t) = sum_f X(f) H(f; v(t)) exp(i 2π f t)
//! ```
//!
//! Evaluating that directly costs one inverse transform per sample. Instead
//! `H(f; v)` is expanded in Chebyshev polynomials of the normalized voltage,
//! `H(f; v) ≈ sum_m c_m(f) T_m(u)`, so the output is a short sum of filtered
//! copies of the input weighted by `T_m(u(t))`. The expansion order adapts to
//! the voltage swing relative to the ring linewidth.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::dsp;
use crate::error::{Error, Result};
use crate::photonics::ring::{ring_response_at, RingParams};
use crate::waveform::ComplexWaveform;

/// Truncation threshold on Chebyshev coefficients (absolute, |H| <= 1).
const CHEB_TOL: f64 = 1e-6;
const MAX_ORDER: usize = 256;

/// Precomputed modulator response for a fixed grid and voltage range.
///
/// Reusable across blocks that share length, sample rate and reference
/// frequency. Drive voltages outside the range are clipped.
#[derive(Debug, Clone)]
pub struct MrmKernel {
    coeffs: Vec<Vec<Complex64>>,
    v_mid: f64,
    v_half: f64,
    len: usize,
    sample_rate: f64,
    ref_freq: f64,
}

impl MrmKernel {
    pub fn new(
        params: &RingParams,
        len: usize,
        sample_rate: f64,
        ref_freq: f64,
        v_lo: f64,
        v_hi: f64,
    ) -> Result<Self> {
        params.validate()?;
        let (v_lo, v_hi) = if v_lo <= v_hi { (v_lo, v_hi) } else { (v_hi, v_lo) };
        let freqs: Vec<f64> = (0..len)
            .map(|k| ref_freq + dsp::bin_freq(k, len, sample_rate))
            .collect();
        let v_mid = 0.5 * (v_lo + v_hi);
        let v_half = 0.5 * (v_hi - v_lo);
        if v_half == 0.0 {
            let c0 = freqs
                .iter()
                .map(|&f| ring_response_at(params, f, v_mid).0)
                .collect();
            return Ok(Self {
                coeffs: vec![c0],
                v_mid,
                v_half,
                len,
                sample_rate,
                ref_freq,
            });
        }
        let mut order = 8;
        loop {
            let coeffs = chebyshev_coeffs(params, &freqs, v_mid, v_half, order);
            let tail = coeffs[order * 3 / 4..]
                .iter()
                .map(|c| max_abs(c))
                .fold(0.0, f64::max);
            if tail < CHEB_TOL || order >= MAX_ORDER {
                let keep = coeffs
                    .iter()
                    .rposition(|c| max_abs(c) >= CHEB_TOL)
                    .map_or(1, |m| m + 1);
                let mut coeffs = coeffs;
                coeffs.truncate(keep);
                return Ok(Self {
                    coeffs,
                    v_mid,
                    v_half,
                    len,
                    sample_rate,
                    ref_freq,
                });
            }
            order *= 2;
        }
    }

    /// Number of Chebyshev terms retained.
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    fn check(&self, field: &ComplexWaveform, drive: Option<&ComplexWaveform>) -> Result<()> {
        if (field.sample_rate - self.sample_rate).abs() > 1e-9 * self.sample_rate {
            return Err(Error::SampleRateMismatch(field.sample_rate, self.sample_rate));
        }
        if field.len() != self.len {
            return Err(Error::LengthMismatch {
                left: field.len(),
                right: self.len,
            });
        }
        if (field.ref_freq - self.ref_freq).abs() > 1e-6 {
            return Err(Error::InvalidParameter(format!(
                "field reference {} Hz differs from kernel reference {} Hz",
                field.ref_freq, self.ref_freq
            )));
        }
        if let Some(d) = drive {
            field.check_same_rate(d)?;
            if d.len() != field.len() {
                return Err(Error::LengthMismatch {
                    left: field.len(),
                    right: d.len(),
                });
            }
        }
        Ok(())
    }

    /// Static response at the kernel's centre voltage (no modulation).
    pub fn apply_static(&self, field: &ComplexWaveform) -> Result<ComplexWaveform> {
        self.check(field, None)?;
        let mut spec = field.spectrum();
        let c0 = self.eval_constant(self.v_mid);
        for (x, c) in spec.iter_mut().zip(&c0) {
            *x *= c;
        }
        Ok(field.from_spectrum_like(spec))
    }

    fn eval_constant(&self, v: f64) -> Vec<Complex64> {
        let u = if self.v_half > 0.0 {
            ((v - self.v_mid) / self.v_half).clamp(-1.0, 1.0)
        } else {
            0.0
        };
        let mut out = vec![Complex64::new(0.0, 0.0); self.len];
        let (mut t_prev, mut t_cur) = (1.0, u);
        for (m, c) in self.coeffs.iter().enumerate() {
            let t = match m {
                0 => 1.0,
                1 => u,
                _ => {
                    let next = 2.0 * u * t_cur - t_prev;
                    t_prev = t_cur;
                    t_cur = next;
                    next
                }
            };
            for (o, cm) in out.iter_mut().zip(c) {
                *o += cm * t;
            }
        }
        out
    }

    /// Modulate `field` with the absolute voltage waveform `bias + drive(t)`.
    pub fn apply(&self, field: &ComplexWaveform, volts: &[f64]) -> Result<ComplexWaveform> {
        if volts.len() != field.len() {
            return Err(Error::LengthMismatch {
                left: field.len(),
                right: volts.len(),
            });
        }
        self.check(field, None)?;
        if self.coeffs.len() == 1 {
            return self.apply_static(field);
        }
        let n = self.len;
        let u: Vec<f64> = volts
            .iter()
            .map(|v| ((v - self.v_mid) / self.v_half).clamp(-1.0, 1.0))
            .collect();
        let spec = field.spectrum();
        let mut acc = vec![Complex64::new(0.0, 0.0); n];
        let mut t_prev = vec![1.0; n];
        let mut t_cur = u.clone();
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for (m, c) in self.coeffs.iter().enumerate() {
            for ((b, x), cm) in buf.iter_mut().zip(&spec).zip(c) {
                *b = x * cm;
            }
            dsp::ifft(&mut buf);
            match m {
                0 => {
                    for (a, b) in acc.iter_mut().zip(&buf) {
                        *a += b;
                    }
                }
                1 => {
                    for ((a, b), t) in acc.iter_mut().zip(&buf).zip(&u) {
                        *a += b * t;
                    }
                }
                _ => {
                    for i in 0..n {
                        let next = 2.0 * u[i] * t_cur[i] - t_prev[i];
                        t_prev[i] = t_cur[i];
                        t_cur[i] = next;
                        acc[i] += buf[i] * next;
                    }
                }
            }
        }
        Ok(field.with_samples(acc))
    }

    /// Response to a drive sweeping the full kernel range as
    /// `v_mid + v_half cos(2π k f_bin t)`, i.e. a clock that completes `k`
    /// periods per block. Since `T_m(cos θ) = cos(mθ)`, order `m` just moves
    /// its filtered copy by `±m k` bins, so the result is exact and needs a
    /// single inverse transform.
    pub fn apply_cosine(&self, field: &ComplexWaveform, k: usize) -> Result<ComplexWaveform> {
        self.check(field, None)?;
        let n = self.len;
        let spec = field.spectrum();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (m, c) in self.coeffs.iter().enumerate() {
            if m == 0 {
                for ((o, x), cm) in out.iter_mut().zip(&spec).zip(c) {
                    *o += x * cm;
                }
                continue;
            }
            let shift = (m * k) % n;
            for (b, (x, cm)) in spec.iter().zip(c).enumerate() {
                let y = x * cm * 0.5;
                out[(b + shift) % n] += y;
                out[(b + n - shift) % n] += y;
            }
        }
        dsp::ifft(&mut out);
        Ok(field.with_samples(out))
    }

    /// Modulate with an electrical drive waveform; `bias` is added to it.
    pub fn apply_drive(
        &self,
        field: &ComplexWaveform,
        drive: &ComplexWaveform,
        bias: f64,
    ) -> Result<ComplexWaveform> {
        self.check(field, Some(drive))?;
        let volts: Vec<f64> = drive.samples.iter().map(|s| bias + s.re).collect();
        self.apply(field, &volts)
    }
}

fn max_abs(c: &[Complex64]) -> f64 {
    c.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

fn chebyshev_coeffs(
    params: &RingParams,
    freqs: &[f64],
    v_mid: f64,
    v_half: f64,
    order: usize,
) -> Vec<Vec<Complex64>> {
    // DCT-II of the samples at the Chebyshev nodes, via a length-2M FFT of
    // the even extension; bins are batched through one planned transform.
    let m2 = 2 * order;
    let volts: Vec<f64> = (0..order)
        .map(|j| v_mid + v_half * (PI * (j as f64 + 0.5) / order as f64).cos())
        .collect();
    let twiddle: Vec<Complex64> = (0..order)
        .map(|m| {
            let s = if m == 0 { 1.0 } else { 2.0 } / (2.0 * order as f64);
            Complex64::from_polar(s, -PI * m as f64 / m2 as f64)
        })
        .collect();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(m2);
    let mut coeffs = vec![vec![Complex64::new(0.0, 0.0); freqs.len()]; order];
    let batch = (1 << 20) / m2;
    let mut buf = vec![Complex64::new(0.0, 0.0); batch * m2];
    for (b0, chunk) in freqs.chunks(batch).enumerate() {
        let buf = &mut buf[..chunk.len() * m2];
        for (row, &f) in buf.chunks_mut(m2).zip(chunk) {
            for (j, &v) in volts.iter().enumerate() {
                let h = ring_response_at(params, f, v).0;
                row[j] = h;
                row[m2 - 1 - j] = h;
            }
        }
        fft.process(buf);
        for (i, row) in buf.chunks(m2).enumerate() {
            let k = b0 * batch + i;
            for (m, tw) in twiddle.iter().enumerate() {
                coeffs[m][k] = row[m] * tw;
            }
        }
    }
    coeffs
}

/// Drive a microring modulator. The voltage seen by the ring is
/// `params.bias_volt + drive(t)`; only the real part of `drive` is used.
pub fn apply_mrm(
    field: &ComplexWaveform,
    params: &RingParams,
    drive: &ComplexWaveform,
) -> Result<ComplexWaveform> {
    field.check_same_rate(drive)?;
    if drive.len() != field.len() {
        return Err(Error::LengthMismatch {
            left: field.len(),
            right: drive.len(),
        });
    }
    let (lo, hi) = drive
        .samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
            (lo.min(s.re), hi.max(s.re))
        });
    let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (0.0, 0.0) };
    let kernel = MrmKernel::new(
        params,
        field.len(),
        field.sample_rate,
        field.ref_freq,
        params.bias_volt + lo,
        params.bias_volt + hi,
    )?;
    kernel.apply_drive(field, drive, params.bias_volt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const F0: f64 = 193.4e12;
    const FS: f64 = 102.4e9;

    fn tone(n: usize, offset: f64) -> ComplexWaveform {
        let s = (0..n)
            .map(|i| Complex64::from_polar(1e-3f64.sqrt(), 2.0 * PI * offset * i as f64 / FS))
            .collect();
        ComplexWaveform::new(s, FS, F0).unwrap()
    }

    fn real(v: Vec<f64>) -> ComplexWaveform {
        ComplexWaveform::from_real(&v, FS).unwrap()
    }

    #[test]
    fn expansion_matches_direct_evaluation() {
        let p = RingParams::critically_coupled(F0, 1e12, 3e9).with_bias(0.0);
        let n = 256;
        let k = MrmKernel::new(&p, n, FS, F0, -2.0, 2.0).unwrap();
        assert!(k.order() > 2);
        for &v in &[-2.0, -0.7, 0.0, 0.3, 1.9] {
            let c = k.eval_constant(v);
            for (b, cb) in c.iter().enumerate() {
                let f = F0 + dsp::bin_freq(b, n, FS);
                let direct = ring_response_at(&p, f, v).0;
                assert!((cb - direct).norm() < 1e-6, "v={v} bin={b}");
            }
        }
    }

    #[test]
    fn parked_ring_is_transparent() {
        let n = 4096;
        let field = tone(n, 10e9);
        let p = RingParams::critically_coupled(F0 + 500e9, 2e12, 2e9);
        let out = apply_mrm(&field, &p, &real(vec![0.0; n])).unwrap();
        let change = 10.0 * (out.mean_power() / field.mean_power()).log10();
        assert!(change.abs() < 0.05, "{change}");
    }

    #[test]
    fn constant_drive_equals_static_response() {
        let n = 1024;
        let field = tone(n, 0.0);
        let p = RingParams::critically_coupled(F0, 1e12, 4e9);
        let out = apply_mrm(&field, &p, &real(vec![1.5; n])).unwrap();
        let expect = ring_response_at(&p, F0, 1.5).0.norm_sqr() * field.mean_power();
        assert!((out.mean_power() - expect).abs() / expect < 1e-9);
    }

    #[test]
    fn sinusoidal_drive_makes_sidebands() {
        let n = 4096;
        let fm = 2e9; // 80 bins at 25 MHz spacing
        let field = tone(n, 0.0);
        let p = RingParams::critically_coupled(F0, 1e12, 4e9).with_bias(1.2);
        let drive: Vec<f64> = (0..n).map(|i| 0.5 * (2.0 * PI * fm * i as f64 / FS).cos()).collect();
        let out = apply_mrm(&field, &p, &real(drive)).unwrap();
        let carrier = out.tone_power(0.0);
        let up = out.tone_power(fm);
        let low = out.tone_power(-fm);
        assert!(up > 1e-3 * carrier && low > 1e-3 * carrier);
        assert!(out.tone_power(0.7e9) < 1e-12 * carrier);
    }

    #[test]
    fn cosine_path_matches_time_domain_kernel() {
        let n = 2048;
        let k = 40; // 2 GHz
        let p = RingParams::critically_coupled(F0, 1e12, 3e9).with_bias(0.0);
        let kernel = MrmKernel::new(&p, n, FS, F0, -3.0, 3.0).unwrap();
        let mut field = tone(n, 0.0);
        for (i, s) in field.samples.iter_mut().enumerate() {
            *s += Complex64::from_polar(0.01, 2.0 * PI * 7e9 * i as f64 / FS);
        }
        let volts: Vec<f64> = (0..n)
            .map(|i| 3.0 * (2.0 * PI * k as f64 * i as f64 / n as f64).cos())
            .collect();
        let a = kernel.apply(&field, &volts).unwrap();
        let b = kernel.apply_cosine(&field, k).unwrap();
        let err = a
            .samples
            .iter()
            .zip(&b.samples)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn mismatched_rates_rejected() {
        let field = tone(64, 0.0);
        let drive = ComplexWaveform::from_real(&[0.0; 64], FS / 2.0).unwrap();
        let p = RingParams::critically_coupled(F0, 1e12, 4e9);
        assert!(matches!(
            apply_mrm(&field, &p, &drive),
            Err(Error::SampleRateMismatch(..))
        ));
    }
}
