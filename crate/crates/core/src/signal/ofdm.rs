//! Pilot-aided OFDM modem.
//!
//! A frame is one known preamble symbol followed by `symbols_per_frame` data
//! symbols. Every `pilot_spacing`-th subcarrier of a data symbol carries a
//! fixed pilot. The receiver locates the preamble by correlation, estimates a
//! per-subcarrier channel from it (smoothed across neighbouring subcarriers)
//! and removes the common phase of each data symbol using the pilots.
//!
//! Waveforms are read circularly: a frame may wrap from the end of the buffer
//! to its start, matching the periodic-block simulation used by the pipeline.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dsp;
use crate::error::{Error, Result};
use crate::rng;
use crate::signal::qam::Qam;
use crate::waveform::ComplexWaveform;

fn default_symbols_per_frame() -> usize {
    8
}

fn default_eq_smoothing() -> usize {
    8
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OfdmConfig {
    pub n_subcarriers: usize,
    pub qam_order: u32,
    pub cp_fraction: f64,
    /// Target occupied bandwidth (Hz). The realized value is quantized so the
    /// FFT size at `sample_rate` is an integer; see [`OfdmConfig::effective_bandwidth`].
    pub occupied_bandwidth: f64,
    pub pilot_spacing: usize,
    pub seed: u64,
    /// Sample rate of generated and received waveforms (Hz).
    pub sample_rate: f64,
    #[serde(default = "default_symbols_per_frame")]
    pub symbols_per_frame: usize,
    /// Half-width, in subcarriers, of the channel-estimate smoothing window.
    #[serde(default = "default_eq_smoothing")]
    pub eq_smoothing: usize,
    /// Remove the per-symbol common phase using the pilots.
    #[serde(default = "default_true")]
    pub pilot_tracking: bool,
}

impl OfdmConfig {
    /// Config with the default frame/receiver settings and 4x oversampling.
    pub fn new(
        n_subcarriers: usize,
        qam_order: u32,
        cp_fraction: f64,
        occupied_bandwidth: f64,
        pilot_spacing: usize,
        seed: u64,
    ) -> Self {
        Self {
            n_subcarriers,
            qam_order,
            cp_fraction,
            occupied_bandwidth,
            pilot_spacing,
            seed,
            sample_rate: 4.0 * occupied_bandwidth,
            symbols_per_frame: default_symbols_per_frame(),
            eq_smoothing: default_eq_smoothing(),
            pilot_tracking: true,
        }
    }

    pub fn with_sample_rate(mut self, sample_rate: f64) -> Self {
        self.sample_rate = sample_rate;
        self
    }

    pub fn with_symbols_per_frame(mut self, n: usize) -> Self {
        self.symbols_per_frame = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(format!("OFDM config: {m}")));
        if self.n_subcarriers < 4 || !self.n_subcarriers.is_power_of_two() {
            return bad(format!(
                "n_subcarriers must be a power of two >= 4, got {}",
                self.n_subcarriers
            ));
        }
        Qam::new(self.qam_order)?;
        if !(0.0..=0.5).contains(&self.cp_fraction) {
            return bad(format!("cp_fraction {} outside [0, 0.5]", self.cp_fraction));
        }
        if !(self.occupied_bandwidth > 0.0) {
            return bad("occupied_bandwidth must be positive".into());
        }
        if self.pilot_spacing < 2 || self.pilot_spacing > self.n_subcarriers {
            return bad(format!(
                "pilot_spacing must be in 2..={}, got {}",
                self.n_subcarriers, self.pilot_spacing
            ));
        }
        if !(self.sample_rate >= self.occupied_bandwidth) {
            return bad(format!(
                "sample_rate {} below occupied bandwidth {}",
                self.sample_rate, self.occupied_bandwidth
            ));
        }
        if self.symbols_per_frame == 0 {
            return bad("symbols_per_frame must be >= 1".into());
        }
        Ok(())
    }

    pub fn fft_size(&self) -> usize {
        let raw = self.n_subcarriers as f64 * self.sample_rate / self.occupied_bandwidth;
        dsp::nearest_smooth(raw).max(self.n_subcarriers)
    }

    pub fn subcarrier_spacing(&self) -> f64 {
        self.sample_rate / self.fft_size() as f64
    }

    /// Realized occupied bandwidth after FFT-size quantization.
    pub fn effective_bandwidth(&self) -> f64 {
        self.n_subcarriers as f64 * self.subcarrier_spacing()
    }

    /// Receive filter width: the occupied band plus four subcarrier spacings
    /// on each side, so the edge subcarriers keep their main lobes.
    pub fn receive_bandwidth(&self) -> f64 {
        self.effective_bandwidth() + 8.0 * self.subcarrier_spacing()
    }

    pub fn cp_len(&self) -> usize {
        (self.cp_fraction * self.fft_size() as f64).round() as usize
    }

    pub fn symbol_len(&self) -> usize {
        self.fft_size() + self.cp_len()
    }

    pub fn frame_len(&self) -> usize {
        (1 + self.symbols_per_frame) * self.symbol_len()
    }

    pub fn pilot_indices(&self) -> Vec<usize> {
        (0..self.n_subcarriers).step_by(self.pilot_spacing).collect()
    }

    pub fn data_indices(&self) -> Vec<usize> {
        (0..self.n_subcarriers)
            .filter(|j| j % self.pilot_spacing != 0)
            .collect()
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.data_indices().len() * (self.qam_order as f64).log2() as usize
    }

    pub fn bits_per_frame(&self) -> usize {
        self.bits_per_symbol() * self.symbols_per_frame
    }

    /// Payload bit rate: bandwidth x bits/subcarrier x data fraction / (1 + CP).
    pub fn bit_rate(&self) -> f64 {
        let data_fraction = self.data_indices().len() as f64 / self.n_subcarriers as f64;
        let cp = self.cp_len() as f64 / self.fft_size() as f64;
        self.effective_bandwidth() * (self.qam_order as f64).log2() * data_fraction / (1.0 + cp)
    }

    /// Largest number of whole frames that fit in `samples`.
    pub fn frames_in(&self, samples: usize) -> usize {
        samples / self.frame_len()
    }

    fn bin_of(&self, j: usize) -> usize {
        let n = self.fft_size() as i64;
        (j as i64 - self.n_subcarriers as i64 / 2).rem_euclid(n) as usize
    }

    fn known_qpsk(&self, tag: &str, len: usize) -> Vec<Complex64> {
        let mut r = rng::seeded(rng::derive(self.seed, rng::tag(tag)));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        (0..len)
            .map(|_| Complex64::new(if r.gen() { s } else { -s }, if r.gen() { s } else { -s }))
            .collect()
    }

    /// Known preamble values, one per subcarrier.
    pub fn preamble_symbols(&self) -> Vec<Complex64> {
        self.known_qpsk("ofdm-preamble", self.n_subcarriers)
    }

    /// Known pilot values, one per pilot subcarrier.
    pub fn pilot_symbols(&self) -> Vec<Complex64> {
        self.known_qpsk("ofdm-pilots", self.pilot_indices().len())
    }

    /// Constellation points carried by `bits`, in transmission order.
    pub fn reference_symbols(&self, bits: &[u8]) -> Result<Vec<Complex64>> {
        let qam = Qam::new(self.qam_order)?;
        Ok(qam.map_all(bits))
    }

    fn symbol_samples(&self, carriers: &[Complex64], out: &mut Vec<Complex64>) {
        let n_fft = self.fft_size();
        let mut buf = vec![Complex64::new(0.0, 0.0); n_fft];
        for (j, &c) in carriers.iter().enumerate() {
            buf[self.bin_of(j)] = c;
        }
        dsp::ifft(&mut buf);
        let gain = n_fft as f64 / (self.n_subcarriers as f64).sqrt();
        let cp = self.cp_len();
        out.extend(buf[n_fft - cp..].iter().map(|v| v * gain));
        out.extend(buf.iter().map(|v| v * gain));
    }
}

/// Generate the OFDM waveform carrying `payload_bits`, unit mean power.
pub fn generate_ofdm(config: &OfdmConfig, payload_bits: &[u8]) -> Result<ComplexWaveform> {
    config.validate()?;
    let per_frame = config.bits_per_frame();
    if payload_bits.is_empty() || payload_bits.len() % per_frame != 0 {
        return Err(Error::Sizing(format!(
            "payload of {} bits is not a positive multiple of {} bits per frame",
            payload_bits.len(),
            per_frame
        )));
    }
    let qam = Qam::new(config.qam_order)?;
    let preamble = config.preamble_symbols();
    let pilots = config.pilot_symbols();
    let pilot_idx = config.pilot_indices();
    let data_idx = config.data_indices();
    let k = qam.bits_per_symbol();
    let n_frames = payload_bits.len() / per_frame;

    let mut out = Vec::with_capacity(n_frames * config.frame_len());
    let mut carriers = vec![Complex64::new(0.0, 0.0); config.n_subcarriers];
    let mut bit_chunks = payload_bits.chunks_exact(k);
    for _ in 0..n_frames {
        config.symbol_samples(&preamble, &mut out);
        for _ in 0..config.symbols_per_frame {
            for (&j, &p) in pilot_idx.iter().zip(&pilots) {
                carriers[j] = p;
            }
            for &j in &data_idx {
                carriers[j] = qam.map(bit_chunks.next().expect("sized above"));
            }
            config.symbol_samples(&carriers, &mut out);
        }
    }
    ComplexWaveform::new(out, config.sample_rate, 0.0)
}

/// Receiver output.
#[derive(Debug, Clone)]
pub struct OfdmRx {
    pub bits: Vec<u8>,
    /// Decision-directed RMS error vector magnitude (ratio, not percent).
    pub evm_rms: f64,
    /// Equalized data symbols in transmission order.
    pub symbols: Vec<Complex64>,
    pub frames: usize,
    /// Sample index of the first preamble's FFT body.
    pub timing: usize,
}

/// Demodulate every whole frame in `waveform`.
pub fn demodulate_ofdm(config: &OfdmConfig, waveform: &ComplexWaveform) -> Result<OfdmRx> {
    demodulate_frames(config, waveform, None)
}

/// Demodulate `n_frames` frames (or as many as fit when `None`).
pub fn demodulate_frames(
    config: &OfdmConfig,
    waveform: &ComplexWaveform,
    n_frames: Option<usize>,
) -> Result<OfdmRx> {
    let grid = ofdm_front_end(config, waveform, n_frames)?;
    ofdm_back_end(config, &grid)
}

/// Raw subcarrier values after synchronization, CP removal and FFT, before
/// any equalization. Row `f * (symbols_per_frame + 1)` is frame `f`'s
/// preamble; each row holds the used subcarriers in index order.
#[derive(Debug, Clone)]
pub struct OfdmGrid {
    pub rows: Vec<Vec<Complex64>>,
    pub frames: usize,
    pub timing: usize,
}

impl OfdmGrid {
    /// Grid of `gain * self` plus circular complex Gaussian noise of
    /// variance `bin_variance` on every entry.
    pub fn scaled_with_noise<R: Rng>(&self, gain: f64, bin_variance: f64, rng: &mut R) -> Self {
        let sigma = (bin_variance / 2.0).sqrt();
        let rows = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|y| {
                        let n = if sigma > 0.0 {
                            let re: f64 = StandardNormal.sample(rng);
                            let im: f64 = StandardNormal.sample(rng);
                            Complex64::new(re, im) * sigma
                        } else {
                            Complex64::new(0.0, 0.0)
                        };
                        y * gain + n
                    })
                    .collect()
            })
            .collect();
        Self {
            rows,
            frames: self.frames,
            timing: self.timing,
        }
    }
}

/// Per-bin variance seen on the grid for white complex noise of density
/// `psd` (W/Hz or A²/Hz) on the demodulated waveform.
pub fn grid_noise_variance(config: &OfdmConfig, psd: f64) -> f64 {
    psd * config.sample_rate * config.fft_size() as f64
}

/// Synchronize and transform `n_frames` frames.
pub fn ofdm_front_end(
    config: &OfdmConfig,
    waveform: &ComplexWaveform,
    n_frames: Option<usize>,
) -> Result<OfdmGrid> {
    config.validate()?;
    if (waveform.sample_rate - config.sample_rate).abs() > 1e-9 * config.sample_rate {
        return Err(Error::SampleRateMismatch(
            waveform.sample_rate,
            config.sample_rate,
        ));
    }
    let len = waveform.len();
    let available = config.frames_in(len);
    let frames = n_frames.unwrap_or(available);
    if frames == 0 || frames > available {
        return Err(Error::Synchronization(format!(
            "waveform of {len} samples holds {available} frames of {} samples, {frames} requested",
            config.frame_len()
        )));
    }
    let body = find_preamble(config, &waveform.samples)?;

    let n_fft = config.fft_size();
    let backoff = config.cp_len() / 2;
    let bins: Vec<usize> = (0..config.n_subcarriers).map(|j| config.bin_of(j)).collect();
    // undo the phase ramp caused by starting each window `backoff` samples early
    let ramp: Vec<Complex64> = bins
        .iter()
        .map(|&b| {
            let k = dsp::bin_freq(b, n_fft, n_fft as f64);
            Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k * backoff as f64 / n_fft as f64)
        })
        .collect();

    let mut buf = vec![Complex64::new(0.0, 0.0); n_fft];
    let mut rows = Vec::with_capacity(frames * (config.symbols_per_frame + 1));
    for f in 0..frames {
        let pre_start = (body + len - backoff + f * config.frame_len()) % len;
        for s in 0..=config.symbols_per_frame {
            let start = (pre_start + s * config.symbol_len()) % len;
            for (i, v) in buf.iter_mut().enumerate() {
                *v = waveform.samples[(start + i) % len];
            }
            dsp::fft(&mut buf);
            rows.push(bins.iter().zip(&ramp).map(|(&b, r)| buf[b] * r).collect());
        }
    }
    Ok(OfdmGrid {
        rows,
        frames,
        timing: body,
    })
}

/// Equalize and decide a synchronized grid.
pub fn ofdm_back_end(config: &OfdmConfig, grid: &OfdmGrid) -> Result<OfdmRx> {
    config.validate()?;
    let per_frame = config.symbols_per_frame + 1;
    if grid.rows.len() != grid.frames * per_frame
        || grid.rows.iter().any(|r| r.len() != config.n_subcarriers)
    {
        return Err(Error::InvalidParameter(format!(
            "grid of {} rows does not match {} frames of {per_frame} symbols x {} subcarriers",
            grid.rows.len(),
            grid.frames,
            config.n_subcarriers
        )));
    }
    let qam = Qam::new(config.qam_order)?;
    let n_sub = config.n_subcarriers;
    let preamble = config.preamble_symbols();
    let pilots = config.pilot_symbols();
    let pilot_idx = config.pilot_indices();
    let data_idx = config.data_indices();

    let frames = grid.frames;
    let mut bits = Vec::with_capacity(frames * config.bits_per_frame());
    let mut symbols = Vec::with_capacity(frames * config.symbols_per_frame * data_idx.len());
    let mut err_energy = 0.0;
    let mut ref_energy = 0.0;
    for frame in grid.rows.chunks(per_frame) {
        let raw: Vec<Complex64> = frame[0].iter().zip(&preamble).map(|(y, p)| y / p).collect();
        let h = smooth_channel(&raw, config.eq_smoothing.min(n_sub / 4));
        for y in &frame[1..] {
            let eq: Vec<Complex64> = y
                .iter()
                .zip(&h)
                .map(|(y, h)| if h.norm_sqr() > 0.0 { y / h } else { *y })
                .collect();
            let rot = if config.pilot_tracking {
                let g: Complex64 = pilot_idx
                    .iter()
                    .zip(&pilots)
                    .map(|(&j, p)| eq[j] * p.conj())
                    .sum();
                if g.norm() > 0.0 {
                    g.conj() / g.norm()
                } else {
                    Complex64::new(1.0, 0.0)
                }
            } else {
                Complex64::new(1.0, 0.0)
            };
            for &j in &data_idx {
                let x = eq[j] * rot;
                let d = qam.decide(x);
                err_energy += (x - d).norm_sqr();
                ref_energy += d.norm_sqr();
                qam.demap_into(x, &mut bits);
                symbols.push(x);
            }
        }
    }
    let evm_rms = if ref_energy > 0.0 {
        (err_energy / ref_energy).sqrt()
    } else {
        0.0
    };
    Ok(OfdmRx {
        bits,
        evm_rms,
        symbols,
        frames,
        timing: grid.timing,
    })
}

/// Moving-average smoothing with the dominant linear phase removed first.
fn smooth_channel(raw: &[Complex64], half_width: usize) -> Vec<Complex64> {
    if half_width == 0 {
        return raw.to_vec();
    }
    let n = raw.len();
    let slope = raw
        .windows(2)
        .map(|w| w[1] * w[0].conj())
        .sum::<Complex64>()
        .arg();
    let flat: Vec<Complex64> = raw
        .iter()
        .enumerate()
        .map(|(j, h)| h * Complex64::from_polar(1.0, -slope * j as f64))
        .collect();
    let mut prefix = vec![Complex64::new(0.0, 0.0); n + 1];
    for j in 0..n {
        prefix[j + 1] = prefix[j] + flat[j];
    }
    (0..n)
        .map(|j| {
            let lo = j.saturating_sub(half_width);
            let hi = (j + half_width + 1).min(n);
            let avg = (prefix[hi] - prefix[lo]) / (hi - lo) as f64;
            avg * Complex64::from_polar(1.0, slope * j as f64)
        })
        .collect()
}

/// Locate the FFT body of the first preamble by circular cross-correlation.
fn find_preamble(config: &OfdmConfig, samples: &[Complex64]) -> Result<usize> {
    let len = samples.len();
    let n_fft = config.fft_size();
    let mut pre = Vec::with_capacity(config.symbol_len());
    config.symbol_samples(&config.preamble_symbols(), &mut pre);
    let body = &pre[config.cp_len()..];

    let mut r = samples.to_vec();
    dsp::fft(&mut r);
    let mut p = vec![Complex64::new(0.0, 0.0); len];
    p[..n_fft].copy_from_slice(body);
    dsp::fft(&mut p);
    for (a, b) in r.iter_mut().zip(&p) {
        *a *= b.conj();
    }
    dsp::ifft(&mut r);

    let mut energy_prefix = vec![0.0; 2 * len + 1];
    for i in 0..2 * len {
        energy_prefix[i + 1] = energy_prefix[i] + samples[i % len].norm_sqr();
    }
    let body_energy: f64 = body.iter().map(|v| v.norm_sqr()).sum();
    let half = config.symbol_len() / 2;
    let expected = config.cp_len();
    let window = config.frame_len().min(len);
    let mut best = (0usize, 0.0f64);
    for o in 0..window {
        let d = (expected + len + o - half) % len;
        let e = energy_prefix[d + n_fft] - energy_prefix[d];
        if e <= 0.0 {
            continue;
        }
        let metric = r[d].norm() / (body_energy * e).sqrt();
        if metric > best.1 {
            best = (d, metric);
        }
    }
    if best.1 < 0.5 {
        return Err(Error::Synchronization(format!(
            "preamble not found (peak normalized correlation {:.3})",
            best.1
        )));
    }
    Ok(best.0)
}
