//! Optical amplifier with amplified spontaneous emission.

use crate::error::{Error, Result};
use crate::rng;
use crate::signal::add_awgn;
use crate::units::{db_to_amplitude, db_to_lin, PLANCK};
use crate::waveform::ComplexWaveform;

/// Total (both quadratures) ASE power spectral density at the output, W/Hz.
pub fn ase_psd(gain_db: f64, nf_db: f64, optical_freq: f64) -> f64 {
    (db_to_lin(gain_db) - 1.0) * PLANCK * optical_freq * db_to_lin(nf_db)
}

/// Amplify by `gain_db` and add white circular Gaussian ASE over the
/// simulated bandwidth. Each quadrature carries half of [`ase_psd`].
pub fn amplify_ase(
    field: &ComplexWaveform,
    gain_db: f64,
    nf_db: f64,
    seed: u64,
) -> Result<ComplexWaveform> {
    if !(gain_db >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "amplifier gain must be >= 0 dB, got {gain_db}"
        )));
    }
    if !field.is_optical() {
        return Err(Error::InvalidParameter(
            "amplify_ase needs an optical field (ref_freq > 0)".into(),
        ));
    }
    let out = field.scaled(db_to_amplitude(gain_db));
    let noise = ase_psd(gain_db, nf_db, field.ref_freq) * field.sample_rate;
    Ok(add_awgn(&out, noise, &mut rng::seeded(seed)))
}
