//! Add-drop / all-pass microring transfer functions.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Behavioral parameters of one microring.
///
/// The effective resonance is `resonance_freq + tuning_offset`; an applied
/// voltage `v` shifts it further by `mod_efficiency * v`. `bias_volt` is the
/// DC operating point used when the ring is driven as a modulator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingParams {
    pub resonance_freq: f64,
    pub fsr: f64,
    pub self_coupling_t1: f64,
    /// 1.0 for an all-pass ring.
    #[serde(default = "one")]
    pub self_coupling_t2: f64,
    pub roundtrip_amplitude_a: f64,
    #[serde(default)]
    pub tuning_offset: f64,
    /// Resonance shift per volt (Hz/V).
    #[serde(default = "default_mod_efficiency")]
    pub mod_efficiency: f64,
    #[serde(default)]
    pub bias_volt: f64,
}

fn one() -> f64 {
    1.0
}

fn default_mod_efficiency() -> f64 {
    1e9
}

impl RingParams {
    /// Critically coupled all-pass ring with the given full-width at half-maximum.
    pub fn critically_coupled(resonance_freq: f64, fsr: f64, fwhm: f64) -> Self {
        let ta = roundtrip_product_for_fwhm(fsr, fwhm);
        let t = ta.sqrt();
        Self {
            resonance_freq,
            fsr,
            self_coupling_t1: t,
            self_coupling_t2: 1.0,
            roundtrip_amplitude_a: t,
            tuning_offset: 0.0,
            mod_efficiency: default_mod_efficiency(),
            bias_volt: 0.0,
        }
    }

    /// Symmetric add-drop ring (`t1 == t2`) with the given FWHM and round-trip loss.
    pub fn add_drop(resonance_freq: f64, fsr: f64, fwhm: f64, a: f64) -> Self {
        let prod = roundtrip_product_for_fwhm(fsr, fwhm);
        let t = (prod / a).sqrt().min(1.0);
        Self {
            resonance_freq,
            fsr,
            self_coupling_t1: t,
            self_coupling_t2: t,
            roundtrip_amplitude_a: a,
            tuning_offset: 0.0,
            mod_efficiency: default_mod_efficiency(),
            bias_volt: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let in_unit = |x: f64| x > 0.0 && x <= 1.0;
        if !(in_unit(self.self_coupling_t1)
            && in_unit(self.self_coupling_t2)
            && in_unit(self.roundtrip_amplitude_a))
        {
            return Err(Error::InvalidParameter(format!(
                "ring couplings/loss must lie in (0, 1]: t1={}, t2={}, a={}",
                self.self_coupling_t1, self.self_coupling_t2, self.roundtrip_amplitude_a
            )));
        }
        if !(self.fsr > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "ring FSR must be positive, got {}",
                self.fsr
            )));
        }
        Ok(())
    }

    /// Thermally set resonance (no applied voltage).
    pub fn effective_resonance(&self) -> f64 {
        self.resonance_freq + self.tuning_offset
    }

    /// Resonance at the DC bias point.
    pub fn biased_resonance(&self) -> f64 {
        self.effective_resonance() + self.mod_efficiency * self.bias_volt
    }

    /// Resonance full-width at half-maximum (Hz).
    pub fn fwhm(&self) -> f64 {
        let x = self.self_coupling_t1 * self.self_coupling_t2 * self.roundtrip_amplitude_a;
        self.fsr * (1.0 - x) / (PI * x.sqrt())
    }

    pub fn with_bias(mut self, volts: f64) -> Self {
        self.bias_volt = volts;
        self
    }
}

fn roundtrip_product_for_fwhm(fsr: f64, fwhm: f64) -> f64 {
    // fwhm = fsr (1 - y^2) / (pi y) with y = sqrt(t1 t2 a)
    let c = PI * fwhm / fsr;
    let y = (-c + (c * c + 4.0).sqrt()) / 2.0;
    y * y
}

/// Round-trip phase at `freq` with the resonance moved by `shift` Hz, wrapped
/// into one FSR so the response is exactly periodic.
#[inline]
fn roundtrip_phase(params: &RingParams, freq: f64, shift: f64) -> f64 {
    let detuning = freq - params.resonance_freq - params.tuning_offset - shift;
    let wrapped = detuning - params.fsr * (detuning / params.fsr).round();
    2.0 * PI * wrapped / params.fsr
}

#[inline]
fn response_at_phase(params: &RingParams, phi: f64) -> (Complex64, Complex64) {
    let t1 = params.self_coupling_t1;
    let t2 = params.self_coupling_t2;
    let a = params.roundtrip_amplitude_a;
    let e = Complex64::from_polar(1.0, phi);
    let denom = Complex64::new(1.0, 0.0) - e * (t1 * t2 * a);
    let through = (Complex64::new(t1, 0.0) - e * (t2 * a)) / denom;
    let k = ((1.0 - t1 * t1) * (1.0 - t2 * t2) * a).sqrt();
    let drop = -Complex64::from_polar(k, phi / 2.0) / denom;
    (through, drop)
}

/// `(through, drop)` field transfer at absolute frequency `freq`.
pub fn ring_response(params: &RingParams, freq: f64) -> (Complex64, Complex64) {
    response_at_phase(params, roundtrip_phase(params, freq, 0.0))
}

/// Response with `volts` applied (resonance shifted by `mod_efficiency * volts`).
pub fn ring_response_at(params: &RingParams, freq: f64, volts: f64) -> (Complex64, Complex64) {
    response_at_phase(
        params,
        roundtrip_phase(params, freq, params.mod_efficiency * volts),
    )
}

/// Thermally tune so the effective resonance lands on `target_freq`, using
/// the smallest shift modulo the FSR. Only `tuning_offset` changes.
pub fn thermal_tune(params: &RingParams, target_freq: f64) -> RingParams {
    let raw = target_freq - params.resonance_freq;
    let offset = raw - params.fsr * (raw / params.fsr).round();
    RingParams {
        tuning_offset: offset,
        ..*params
    }
}

/// One point of a frequency-response sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub freq_hz: f64,
    pub through_db: f64,
    pub drop_db: f64,
    pub phase_rad: f64,
}

/// Sweep the static (bias-included) response over `n` points in `[start, stop]`.
pub fn sweep(params: &RingParams, start: f64, stop: f64, n: usize) -> Vec<SweepPoint> {
    let n = n.max(2);
    (0..n)
        .map(|i| {
            let f = start + (stop - start) * i as f64 / (n - 1) as f64;
            let (t, d) = ring_response_at(params, f, params.bias_volt);
            SweepPoint {
                freq_hz: f,
                through_db: 10.0 * t.norm_sqr().max(1e-30).log10(),
                drop_db: 10.0 * d.norm_sqr().max(1e-30).log10(),
                phase_rad: t.arg(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const F0: f64 = 193.4e12;

    #[test]
    fn critical_coupling_null() {
        let p = RingParams::critically_coupled(F0, 1e12, 2e9);
        let (t, _) = ring_response(&p, F0);
        assert!(t.norm() <= 1e-12);
        assert!((p.fwhm() - 2e9).abs() / 2e9 < 1e-9);
    }

    #[test]
    fn anti_resonance_is_maximum_over_period() {
        let p = RingParams {
            self_coupling_t1: 0.9,
            roundtrip_amplitude_a: 0.95,
            ..RingParams::critically_coupled(F0, 1e12, 2e9)
        };
        let anti = ring_response(&p, F0 + 0.5e12).0.norm();
        for i in 0..2000 {
            let f = F0 + 1e12 * i as f64 / 2000.0;
            assert!(ring_response(&p, f).0.norm() <= anti + 1e-12);
        }
    }

    #[test]
    fn symmetric_lossless_add_drop_full_transfer() {
        let p = RingParams {
            self_coupling_t1: 0.8,
            self_coupling_t2: 0.8,
            roundtrip_amplitude_a: 1.0,
            ..RingParams::critically_coupled(F0, 1e12, 2e9)
        };
        let (t, d) = ring_response(&p, F0);
        assert!(t.norm() < 1e-12);
        assert!((d.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn thermal_tuning() {
        let p = RingParams::critically_coupled(F0, 1e12, 2e9);
        assert_eq!(thermal_tune(&p, F0).tuning_offset, 0.0);
        let band2 = thermal_tune(&p, F0 + 100e9);
        assert!((band2.effective_resonance() - (F0 + 100e9)).abs() < 1e-3);
        assert!(ring_response(&band2, F0 + 100e9).0.norm() < 1e-9);
        assert!(thermal_tune(&p, F0 + 1e12).tuning_offset.abs() < 1e-3);
        assert_eq!(thermal_tune(&band2, F0 + 100e9), band2);
    }

    #[test]
    fn validation_rejects_bad_couplings() {
        let mut p = RingParams::critically_coupled(F0, 1e12, 2e9);
        p.self_coupling_t1 = 0.0;
        assert!(p.validate().is_err());
        p.self_coupling_t1 = 1.2;
        assert!(p.validate().is_err());
    }

    #[test]
    fn sweep_shape() {
        let p = RingParams::critically_coupled(F0, 1e12, 2e9);
        let s = sweep(&p, F0 - 5e9, F0 + 5e9, 101);
        assert_eq!(s.len(), 101);
        assert!(s[50].through_db < -100.0);
        assert!(s[0].through_db > -1.0);
    }
}
