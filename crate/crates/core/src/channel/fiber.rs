//! Single-mode fiber: loss, second-order dispersion and bulk delay.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dsp;
use crate::error::{Error, Result};
use crate::units::{db_to_amplitude, SPEED_OF_LIGHT};
use crate::waveform::ComplexWaveform;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberParams {
    pub length_km: f64,
    #[serde(default = "default_atten")]
    pub atten_db_per_km: f64,
    /// Chromatic dispersion, ps/(nm km).
    #[serde(default = "default_dispersion")]
    pub dispersion_ps_nm_km: f64,
    /// One-way group delay, µs/km.
    #[serde(default = "default_group_delay")]
    pub group_delay_us_per_km: f64,
    #[serde(default = "default_wavelength")]
    pub ref_wavelength_nm: f64,
}

fn default_atten() -> f64 {
    0.2
}
fn default_dispersion() -> f64 {
    17.0
}
fn default_group_delay() -> f64 {
    5.0
}
fn default_wavelength() -> f64 {
    1550.0
}

impl FiberParams {
    pub fn new(length_km: f64) -> Self {
        Self {
            length_km,
            atten_db_per_km: default_atten(),
            dispersion_ps_nm_km: default_dispersion(),
            group_delay_us_per_km: default_group_delay(),
            ref_wavelength_nm: default_wavelength(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length_km >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "fiber length must be >= 0 km, got {}",
                self.length_km
            )));
        }
        if !(self.atten_db_per_km >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "fiber attenuation must be >= 0 dB/km, got {}",
                self.atten_db_per_km
            )));
        }
        if !(self.ref_wavelength_nm > 0.0) || !self.group_delay_us_per_km.is_finite() {
            return Err(Error::InvalidParameter(
                "fiber wavelength must be positive and group delay finite".into(),
            ));
        }
        Ok(())
    }

    pub fn loss_db(&self) -> f64 {
        self.atten_db_per_km * self.length_km
    }

    /// One-way bulk delay (s).
    pub fn delay_s(&self) -> f64 {
        self.length_km * self.group_delay_us_per_km * 1e-6
    }

    /// `π λ² D L / c` in s², so that `H(f) = exp(-i beta f²)`.
    pub fn dispersion_coefficient(&self) -> f64 {
        let lambda = self.ref_wavelength_nm * 1e-9;
        let d = self.dispersion_ps_nm_km * 1e-6; // s/m²
        let l = self.length_km * 1e3;
        PI * lambda * lambda * d * l / SPEED_OF_LIGHT
    }

    /// All-pass dispersion response at baseband offset `f`.
    pub fn dispersion_response(&self, f: f64) -> Complex64 {
        Complex64::from_polar(1.0, -self.dispersion_coefficient() * f * f)
    }
}

/// Propagate an optical field. The bulk delay is added to `delay_s`.
pub fn propagate_fiber(field: &ComplexWaveform, params: &FiberParams) -> Result<ComplexWaveform> {
    params.validate()?;
    if !field.is_optical() {
        return Err(Error::InvalidParameter(
            "propagate_fiber needs an optical field (ref_freq > 0)".into(),
        ));
    }
    let amp = db_to_amplitude(-params.loss_db());
    let beta = params.dispersion_coefficient();
    let mut out = if beta == 0.0 || field.is_empty() {
        field.clone()
    } else {
        let n = field.len();
        let mut spec = field.spectrum();
        for (k, x) in spec.iter_mut().enumerate() {
            let f = dsp::bin_freq(k, n, field.sample_rate);
            *x *= Complex64::from_polar(1.0, -beta * f * f);
        }
        field.from_spectrum_like(spec)
    };
    if amp != 1.0 {
        for s in out.samples.iter_mut() {
            *s *= amp;
        }
    }
    out.delay_s += params.delay_s();
    Ok(out)
}

/// One branch of a `1:n_ways` power splitter with `excess_db` extra loss.
pub fn split_power(field: &ComplexWaveform, n_ways: u32, excess_db: f64) -> Result<ComplexWaveform> {
    if n_ways == 0 {
        return Err(Error::InvalidParameter("splitter needs n_ways >= 1".into()));
    }
    let db = splitter_loss_db(n_ways, excess_db);
    if db == 0.0 {
        return Ok(field.clone());
    }
    Ok(field.scaled(db_to_amplitude(-db)))
}

/// Insertion loss of a `1:n` splitter (dB).
pub fn splitter_loss_db(n_ways: u32, excess_db: f64) -> f64 {
    10.0 * (n_ways.max(1) as f64).log10() + excess_db
}

/// RF power transfer of a double-sideband tone pair at `f_rf` after the fiber,
/// `cos²(β f²)`.
pub fn dsb_fading(params: &FiberParams, f_rf: f64) -> f64 {
    (params.dispersion_coefficient() * f_rf * f_rf).cos().powi(2)
}

/// First frequency at which [`dsb_fading`] reaches zero.
pub fn first_fading_null(params: &FiberParams) -> f64 {
    (PI / 2.0 / params.dispersion_coefficient()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::lin_to_db;

    const F0: f64 = 193.4e12;

    fn tone(n: usize, fs: f64) -> ComplexWaveform {
        ComplexWaveform::new(vec![Complex64::new(1e-3f64.sqrt(), 0.0); n], fs, F0).unwrap()
    }

    #[test]
    fn zero_length_identity() {
        let t = tone(64, 10e9);
        assert_eq!(propagate_fiber(&t, &FiberParams::new(0.0)).unwrap(), t);
    }

    #[test]
    fn twenty_km_loss_and_delay() {
        let t = tone(64, 10e9);
        let out = propagate_fiber(&t, &FiberParams::new(20.0)).unwrap();
        assert!((lin_to_db(out.mean_power() / t.mean_power()) + 4.0).abs() < 0.01);
        assert!((out.delay_s - 100e-6).abs() < 1e-15);
    }

    #[test]
    fn fading_null_near_13_6_ghz() {
        // c / (2 λ² D L) with λ = 1550 nm, D = 17e-6 s/m², L = 20 km
        let lambda: f64 = 1550e-9;
        let expect = (SPEED_OF_LIGHT / (2.0 * lambda * lambda * 17e-6 * 20e3)).sqrt();
        let null = first_fading_null(&FiberParams::new(20.0));
        assert!((null - expect).abs() < 1.0);
        assert!((null - 13.6e9).abs() < 0.1e9);
    }

    #[test]
    fn electrical_input_rejected() {
        let w = ComplexWaveform::from_real(&[1.0, 2.0], 1e9).unwrap();
        assert!(propagate_fiber(&w, &FiberParams::new(1.0)).is_err());
    }

    #[test]
    fn splitter_values() {
        let t = tone(16, 1e9);
        assert_eq!(split_power(&t, 1, 0.0).unwrap(), t);
        let q = split_power(&t, 4, 0.0).unwrap();
        assert!((lin_to_db(q.mean_power() / t.mean_power()) + 6.0206).abs() < 1e-3);
        let q = split_power(&t, 4, 1.0).unwrap();
        assert!((lin_to_db(q.mean_power() / t.mean_power()) + 7.0206).abs() < 1e-3);
        assert!(split_power(&t, 0, 0.0).is_err());
    }
}
