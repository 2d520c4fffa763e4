//! Direct-detection receivers shared by the ONU and the smart edge.

use num_complex::Complex64;

use crate::channel::detector::{photodetect, PdParams};
use crate::error::Result;
use crate::rng;
use crate::signal::metrics::{ber_evm_metrics, BerReport};
use crate::signal::ofdm::{
    demodulate_frames, grid_noise_variance, ofdm_back_end, ofdm_front_end, OfdmConfig, OfdmGrid,
};
use crate::units::ELECTRON_CHARGE;
use crate::signal::rf::downconvert;
use crate::waveform::ComplexWaveform;

/// Complex envelope of the band centred at `f_if` of a photocurrent. A
/// negative `f_if` is a lower-sideband signal: the real current only holds
/// its mirror, so the envelope is conjugated back.
pub fn band_envelope(current: &ComplexWaveform, f_if: f64, bandwidth: f64) -> ComplexWaveform {
    let mut env = downconvert(current, f_if.abs(), bandwidth);
    if f_if < 0.0 {
        for s in env.samples.iter_mut() {
            *s = s.conj();
        }
    }
    env
}

/// Demodulate an OFDM signal found at `f_if` in `current` and score it
/// against the transmitted bits.
pub fn score_ofdm(
    current: &ComplexWaveform,
    f_if: f64,
    ofdm: &OfdmConfig,
    tx_bits: &[u8],
    frames: usize,
    fec_threshold: f64,
) -> Result<BerReport> {
    let env = band_envelope(current, f_if, ofdm.receive_bandwidth());
    let rx = demodulate_frames(ofdm, &env, Some(frames))?;
    let tx_syms = ofdm.reference_symbols(tx_bits)?;
    ber_evm_metrics(tx_bits, &rx.bits, &rx.symbols, &tx_syms, fec_threshold)
}

/// Detect an optical field with the given receiver.
pub fn detect(field: &ComplexWaveform, pd: &PdParams) -> Result<ComplexWaveform> {
    photodetect(field, pd)
}

/// Strip the DC photocurrent, leaving the beat terms.
pub fn ac_coupled(current: &ComplexWaveform) -> ComplexWaveform {
    let n = current.len().max(1) as f64;
    let dc: Complex64 = current.samples.iter().sum::<Complex64>() / n;
    current.with_samples(current.samples.iter().map(|s| s - dc).collect())
}

/// Noiseless detection of one OFDM signal, kept at the synchronized-grid
/// stage. Receiver noise for any received power is added on the grid later,
/// so one optical simulation serves a whole power sweep. Timing comes from
/// the noiseless waveform.
#[derive(Debug, Clone)]
pub struct OfdmCapture {
    pub grid: OfdmGrid,
    /// Mean photocurrent of the branch at unit gain (A).
    pub mean_current: f64,
}

pub fn capture_ofdm(
    drop: &ComplexWaveform,
    responsivity: f64,
    f_if: f64,
    ofdm: &OfdmConfig,
    frames: usize,
) -> Result<OfdmCapture> {
    let current = photodetect(drop, &PdParams::noiseless(responsivity))?;
    let n = current.len().max(1) as f64;
    let mean_current = current.samples.iter().map(|s| s.re).sum::<f64>() / n;
    let env = band_envelope(&current, f_if, ofdm.receive_bandwidth());
    Ok(OfdmCapture {
        grid: ofdm_front_end(ofdm, &env, Some(frames))?,
        mean_current,
    })
}

/// Score a capture as if the optical power were scaled by `gain`, with the
/// thermal and (mean-current) shot noise of `pd`.
pub fn score_capture(
    capture: &OfdmCapture,
    ofdm: &OfdmConfig,
    tx_bits: &[u8],
    gain: f64,
    pd: &PdParams,
    seed: u64,
    fec_threshold: f64,
) -> Result<BerReport> {
    // a real current of one-sided density N0 gives a complex envelope of
    // density N0 after the power-preserving downconversion
    let mut psd = pd.thermal_noise_psd;
    if pd.include_shot {
        psd += 2.0 * ELECTRON_CHARGE * (gain * capture.mean_current).abs();
    }
    let mut r = rng::seeded(seed);
    let grid = capture
        .grid
        .scaled_with_noise(gain, grid_noise_variance(ofdm, psd), &mut r);
    let rx = ofdm_back_end(ofdm, &grid)?;
    let tx_syms = ofdm.reference_symbols(tx_bits)?;
    ber_evm_metrics(tx_bits, &rx.bits, &rx.symbols, &tx_syms, fec_threshold)
}
