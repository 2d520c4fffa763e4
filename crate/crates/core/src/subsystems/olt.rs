//! Central-office transmitter: comb source plus an IQ microring bus that puts
//! each channel's digital signal on one side of its carrier.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::photonics::comb::{comb_source, CombSpec};
use crate::photonics::iq::{IqBus, IqBusRing, Sideband};
use crate::signal::ofdm::{generate_ofdm, OfdmConfig};
use crate::signal::rf::frequency_shift;
use crate::subsystems::plan::{RingDesign, WdmPlan};
use crate::units::{db_to_amplitude, dbm_to_watts};
use crate::waveform::ComplexWaveform;

/// Peak-to-RMS ratio the modulator kernels are built to cover. Rarer peaks
/// are clipped at the kernel edge.
pub(crate) const DRIVE_CREST: f64 = 4.0;

fn default_power() -> f64 {
    5.0
}

fn default_bias() -> f64 {
    1.0
}

fn default_loss() -> f64 {
    crate::photonics::DEFAULT_PASSBAND_LOSS_DB
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OltConfig {
    /// Launch power per comb line (dBm).
    #[serde(default = "default_power")]
    pub power_per_tone_dbm: f64,
    #[serde(default)]
    pub linewidth: f64,
    #[serde(default)]
    pub comb_seed: u64,
    #[serde(default)]
    pub ring: RingDesign,
    /// Ring detuning below the carrier, in half-linewidths.
    #[serde(default = "default_bias")]
    pub bias_hwhm: f64,
    /// RMS drive on each arm (V).
    pub drive_rms_volts: f64,
    /// Centre of the digital band relative to the carrier (Hz, signed).
    pub digital_if: f64,
    #[serde(default = "default_loss")]
    pub passband_loss_db: f64,
}

impl OltConfig {
    pub fn validate(&self) -> Result<()> {
        self.ring.validate()?;
        if !(self.drive_rms_volts >= 0.0 && self.linewidth >= 0.0 && self.passband_loss_db >= 0.0) {
            return Err(Error::InvalidParameter(
                "OLT drive, linewidth and loss must be non-negative".into(),
            ));
        }
        Ok(())
    }

    pub fn sideband(&self) -> Sideband {
        if self.digital_if >= 0.0 {
            Sideband::Upper
        } else {
            Sideband::Lower
        }
    }
}

/// `(i, q)` arm voltages that make an IQ modulator configured for `sideband`
/// emit the complex envelope `a(t)`.
pub fn iq_drives(a: &[Complex64], sideband: Sideband, rms_volts: f64) -> (Vec<f64>, Vec<f64>) {
    // a has unit mean power, so each quadrature has power 1/2
    let g = rms_volts * std::f64::consts::SQRT_2;
    let s = sideband.sign();
    a.iter().map(|x| (g * x.re, s * g * x.im)).unzip()
}

/// Block-reusable OLT for a fixed plan and block geometry.
#[derive(Debug, Clone)]
pub struct Olt {
    cfg: OltConfig,
    carriers: ComplexWaveform,
    bus: IqBus,
    loss: f64,
}

impl Olt {
    pub fn new(
        plan: &WdmPlan,
        cfg: &OltConfig,
        len: usize,
        sample_rate: f64,
        ref_freq: f64,
    ) -> Result<Self> {
        plan.validate()?;
        cfg.validate()?;
        let spacing = plan.grid_spacing().ok_or_else(|| {
            Error::Plan("OLT comb needs uniformly spaced channels".into())
        })?;
        let comb = CombSpec {
            n_tones: plan.len(),
            start_freq: plan.channels[0].center_freq,
            spacing,
            power_per_tone: dbm_to_watts(cfg.power_per_tone_dbm),
            linewidth: cfg.linewidth,
            seed: cfg.comb_seed,
        };
        let carriers = comb_source(&comb, len as f64 / sample_rate, sample_rate, ref_freq)?;
        let peak = DRIVE_CREST * cfg.drive_rms_volts;
        let rings: Vec<IqBusRing> = plan
            .channels
            .iter()
            .map(|ch| {
                let r = cfg.ring.at(ch.center_freq, cfg.bias_hwhm);
                IqBusRing {
                    ring_i: r,
                    ring_q: r,
                    peak_volts: peak,
                }
            })
            .collect();
        let bus = IqBus::new(
            &rings,
            std::f64::consts::FRAC_PI_2,
            cfg.sideband(),
            len,
            sample_rate,
            ref_freq,
        )?;
        // each ring of an arm is one bus stage
        let loss = db_to_amplitude(-cfg.passband_loss_db * plan.len() as f64);
        Ok(Self {
            cfg: *cfg,
            carriers,
            bus,
            loss,
        })
    }

    /// Unmodulated comb as launched.
    pub fn carriers(&self) -> &ComplexWaveform {
        &self.carriers
    }

    /// Modulate each channel with its unit-power complex baseband signal.
    /// An empty signal leaves its channel unmodulated.
    pub fn transmit(&self, signals: &[ComplexWaveform]) -> Result<ComplexWaveform> {
        if signals.len() != self.bus.len() {
            return Err(Error::Plan(format!(
                "{} digital signals for {} channels",
                signals.len(),
                self.bus.len()
            )));
        }
        let n = self.carriers.len();
        let drives = signals
            .iter()
            .map(|s| {
                if s.is_empty() {
                    return Ok((vec![0.0; n], vec![0.0; n]));
                }
                if s.len() != n {
                    return Err(Error::LengthMismatch {
                        left: n,
                        right: s.len(),
                    });
                }
                self.carriers.check_same_rate(s)?;
                let a = frequency_shift(s, self.cfg.digital_if);
                Ok(iq_drives(&a.samples, self.cfg.sideband(), self.cfg.drive_rms_volts))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.bus.apply(&self.carriers, &drives)?.scaled(self.loss))
    }
}

/// Generate each channel's OFDM frame(s) from its bits, zero-padded to
/// `len` samples.
pub fn digital_signals(
    payloads: &[Vec<u8>],
    ofdm: &OfdmConfig,
    len: usize,
) -> Result<Vec<ComplexWaveform>> {
    payloads
        .iter()
        .map(|bits| {
            if bits.is_empty() {
                return ComplexWaveform::zeros(0, ofdm.sample_rate, 0.0);
            }
            let mut w = generate_ofdm(ofdm, bits)?;
            if w.len() > len {
                return Err(Error::Sizing(format!(
                    "digital frame of {} samples exceeds the {len}-sample block",
                    w.len()
                )));
            }
            w.samples.resize(len, Complex64::new(0.0, 0.0));
            Ok(w)
        })
        .collect()
}

/// Comb plus SSB digital modulation of every channel.
pub fn olt_transmit(
    plan: &WdmPlan,
    cfg: &OltConfig,
    digital_payloads: &[Vec<u8>],
    ofdm: &OfdmConfig,
    len: usize,
    ref_freq: f64,
) -> Result<ComplexWaveform> {
    if digital_payloads.len() != plan.len() {
        return Err(Error::Plan(format!(
            "{} payloads for {} channels",
            digital_payloads.len(),
            plan.len()
        )));
    }
    let olt = Olt::new(plan, cfg, len, ofdm.sample_rate, ref_freq)?;
    olt.transmit(&digital_signals(digital_payloads, ofdm, len)?)
}
