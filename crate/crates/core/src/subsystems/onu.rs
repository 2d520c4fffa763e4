//! Colorless ONU: three drop filters strip the digital band and the two RoF
//! tunnels, each is direct detected, and the residual carrier is remodulated
//! with the uplink by an IQ microring modulator.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::detector::{photodetect, PdParams};
use crate::error::{Error, Result};
use crate::photonics::filter::DropFilterSpec;
use crate::photonics::iq::{IqBus, IqBusRing, Sideband};
use crate::signal::rf::frequency_shift;
use crate::subsystems::olt::{iq_drives, DRIVE_CREST};
use crate::subsystems::plan::{RingDesign, WdmChannel};
use crate::units::{db_to_amplitude, db_to_lin, dbm_to_watts, lin_to_db, watts_to_dbm};
use crate::waveform::ComplexWaveform;

fn default_loss() -> f64 {
    crate::photonics::DEFAULT_PASSBAND_LOSS_DB
}

fn default_bias() -> f64 {
    1.0
}

fn default_min_carrier() -> f64 {
    -30.0
}

/// A frequency band relative to the carrier (Hz).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub center: f64,
    pub width: f64,
}

impl Band {
    pub fn new(center: f64, width: f64) -> Self {
        Self { center, width }
    }

    pub fn lo(&self) -> f64 {
        self.center - self.width / 2.0
    }

    pub fn hi(&self) -> f64 {
        self.center + self.width / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UplinkConfig {
    #[serde(default)]
    pub ring: RingDesign,
    #[serde(default = "default_bias")]
    pub bias_hwhm: f64,
    /// RMS drive on each arm for the composite uplink (V).
    pub drive_rms_volts: f64,
    pub sideband: Sideband,
    /// Uplink digital band relative to the carrier.
    pub digital: Band,
    /// Uplink RoF band relative to the carrier.
    pub rof: Band,
    /// RoF power relative to the digital uplink in the composite drive (dB).
    #[serde(default)]
    pub rof_level_db: f64,
    /// Smallest residual carrier that can still be remodulated (dBm).
    #[serde(default = "default_min_carrier")]
    pub min_residual_carrier_dbm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OnuConfig {
    pub carrier_freq: f64,
    pub mrr1: DropFilterSpec,
    pub mrr2: DropFilterSpec,
    pub mrr3: DropFilterSpec,
    /// Fraction of carrier power MRR1 drops with the digital band.
    pub carrier_tap_fraction: f64,
    pub pd: PdParams,
    #[serde(default = "default_loss")]
    pub passband_loss_db: f64,
    /// Downlink bands (relative to the carrier) the ratio is measured against.
    pub downlink_bands: Vec<Band>,
    pub uplink: UplinkConfig,
}

/// Filter shape chosen by the designer; the centre is derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterShape {
    pub bandwidth: f64,
    #[serde(default = "crate::subsystems::onu::default_order")]
    pub order: u32,
}

pub(crate) fn default_order() -> u32 {
    3
}

impl OnuConfig {
    /// Place the three drop filters for `channel`:
    /// MRR1 on the digital band's side of the carrier so the carrier sees a
    /// drop of `carrier_tap_fraction`, MRR2/MRR3 centred on the subcarriers.
    #[allow(clippy::too_many_arguments)]
    pub fn design(
        channel: &WdmChannel,
        digital: Band,
        mrr1: FilterShape,
        tunnel: FilterShape,
        carrier_tap_fraction: f64,
        pd: PdParams,
        uplink: UplinkConfig,
    ) -> Self {
        let c = channel.center_freq;
        let probe = DropFilterSpec::new(c, mrr1.bandwidth, mrr1.order);
        let off = probe.edge_offset_for(carrier_tap_fraction.clamp(1e-12, 1.0 - 1e-12));
        let fs = channel.rof_subcarrier_offset;
        let half = channel.tunnel_half_bandwidth();
        Self {
            carrier_freq: c,
            mrr1: DropFilterSpec::new(c + digital.center.signum() * off, mrr1.bandwidth, mrr1.order),
            mrr2: DropFilterSpec::new(c + fs, tunnel.bandwidth, tunnel.order),
            mrr3: DropFilterSpec::new(c - fs, tunnel.bandwidth, tunnel.order),
            carrier_tap_fraction,
            pd,
            passband_loss_db: default_loss(),
            downlink_bands: vec![
                digital,
                Band::new(fs, 2.0 * half),
                Band::new(-fs, 2.0 * half),
            ],
            uplink,
        }
    }

    /// Same ONU thermally retuned by `delta` Hz (all filters and the carrier).
    pub fn retuned(&self, delta: f64) -> Self {
        Self {
            carrier_freq: self.carrier_freq + delta,
            mrr1: self.mrr1.shifted(delta),
            mrr2: self.mrr2.shifted(delta),
            mrr3: self.mrr3.shifted(delta),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.carrier_tap_fraction > 0.0 && self.carrier_tap_fraction < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "carrier_tap_fraction {} outside (0, 1)",
                self.carrier_tap_fraction
            )));
        }
        for f in [&self.mrr1, &self.mrr2, &self.mrr3] {
            f.validate()?;
        }
        self.pd.validate()?;
        self.uplink.ring.validate()?;
        let tap = self.mrr1.response(self.carrier_freq).0.norm_sqr();
        if (tap - self.carrier_tap_fraction).abs() > 0.01 {
            return Err(Error::InvalidParameter(format!(
                "MRR1 drops {tap:.3} of the carrier, configured tap is {:.3}",
                self.carrier_tap_fraction
            )));
        }
        if self.uplink.digital.center * self.uplink.rof.center <= 0.0 {
            return Err(Error::InvalidParameter(
                "uplink digital and RoF bands must sit on the same side of the carrier".into(),
            ));
        }
        Ok(())
    }

    /// Side of the carrier holding the downlink digital signal (+1 / -1).
    pub fn downlink_side(&self) -> f64 {
        self.downlink_bands
            .first()
            .map(|b| b.center.signum())
            .unwrap_or(1.0)
    }
}

/// Where the carrier's power went, all in dB relative to the ONU input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarrierLedger {
    pub input_dbm: f64,
    /// Carrier lost on the bus to the MRR1 beat-tone tap.
    pub broadband_tap_db: f64,
    /// Carrier lost on the bus to the MRR2/MRR3 tunnel drops.
    pub rof_drop_db: f64,
    pub residual_dbm: f64,
}

/// Optical outputs of the ONU filter bank, before detection.
#[derive(Debug, Clone)]
pub struct OnuDrops {
    pub broadband: ComplexWaveform,
    pub tunnels: [ComplexWaveform; 2],
    pub residual: ComplexWaveform,
    pub carrier: CarrierLedger,
}

impl OnuDrops {
    /// All outputs scaled by `gain` in power (a variable attenuator before
    /// the ONU). Linear optics make this exact.
    pub fn scaled(&self, gain: f64) -> Self {
        let a = gain.sqrt();
        let db = lin_to_db(gain);
        Self {
            broadband: self.broadband.scaled(a),
            tunnels: [self.tunnels[0].scaled(a), self.tunnels[1].scaled(a)],
            residual: self.residual.scaled(a),
            carrier: CarrierLedger {
                input_dbm: self.carrier.input_dbm + db,
                residual_dbm: self.carrier.residual_dbm + db,
                ..self.carrier
            },
        }
    }
}

/// Photocurrents of the three drops.
#[derive(Debug, Clone)]
pub struct OnuCurrents {
    pub broadband: ComplexWaveform,
    pub tunnels: [ComplexWaveform; 2],
}

/// Remodulated uplink.
#[derive(Debug, Clone)]
pub struct UplinkOutput {
    pub field: ComplexWaveform,
    /// Uplink PSD over the strongest residual downlink PSD (dB); `None`
    /// when the uplink adds no spectral content.
    pub uplink_to_residual_db: Option<f64>,
}

fn tone_dbm(field: &ComplexWaveform, abs_freq: f64) -> f64 {
    watts_to_dbm(field.tone_power(abs_freq - field.ref_freq).max(1e-300))
}

/// Block-reusable ONU.
#[derive(Debug, Clone)]
pub struct Onu {
    cfg: OnuConfig,
    uplink: IqBus,
    stage_loss: f64,
}

impl Onu {
    pub fn new(cfg: &OnuConfig, len: usize, sample_rate: f64, ref_freq: f64) -> Result<Self> {
        cfg.validate()?;
        let u = &cfg.uplink;
        let r = u.ring.at(cfg.carrier_freq, u.bias_hwhm);
        let uplink = IqBus::new(
            &[IqBusRing {
                ring_i: r,
                ring_q: r,
                peak_volts: DRIVE_CREST * u.drive_rms_volts,
            }],
            std::f64::consts::FRAC_PI_2,
            u.sideband,
            len,
            sample_rate,
            ref_freq,
        )?;
        Ok(Self {
            cfg: cfg.clone(),
            uplink,
            stage_loss: db_to_amplitude(-cfg.passband_loss_db),
        })
    }

    pub fn config(&self) -> &OnuConfig {
        &self.cfg
    }

    /// Run the filter bank.
    pub fn front_end(&self, field: &ComplexWaveform) -> Result<OnuDrops> {
        let c = self.cfg.carrier_freq;
        let off = c - field.ref_freq;
        if off.abs() >= field.nyquist() || field.tone_power(off) <= 0.0 {
            return Err(Error::ToneNotFound(format!(
                "ONU carrier {:.6} THz not present in the input field",
                c / 1e12
            )));
        }
        let input = tone_dbm(field, c);
        let (broadband, bus) = self.cfg.mrr1.apply(field)?;
        let bus = bus.scaled(self.stage_loss);
        let after_tap = tone_dbm(&bus, c);
        let (t0, bus) = self.cfg.mrr2.apply(&bus)?;
        let bus = bus.scaled(self.stage_loss);
        let (t1, bus) = self.cfg.mrr3.apply(&bus)?;
        let residual = bus.scaled(self.stage_loss);
        let residual_dbm = tone_dbm(&residual, c);
        Ok(OnuDrops {
            broadband,
            tunnels: [t0, t1],
            residual,
            carrier: CarrierLedger {
                input_dbm: input,
                broadband_tap_db: input - after_tap,
                rof_drop_db: after_tap - residual_dbm,
                residual_dbm,
            },
        })
    }

    /// Detect the three drops; noise seeds are derived from `seed`.
    pub fn detect(&self, drops: &OnuDrops, seed: u64) -> Result<OnuCurrents> {
        let pd = |w: &ComplexWaveform, tag: u64| {
            photodetect(w, &self.cfg.pd.with_seed(crate::rng::derive(seed, tag)))
        };
        Ok(OnuCurrents {
            broadband: pd(&drops.broadband, 1)?,
            tunnels: [pd(&drops.tunnels[0], 2)?, pd(&drops.tunnels[1], 3)?],
        })
    }

    /// Remodulate the residual carrier with the uplink. `digital` and `rof`
    /// are unit-power complex baseband signals (either may be absent).
    pub fn remodulate(
        &self,
        residual: &ComplexWaveform,
        digital: Option<&ComplexWaveform>,
        rof: Option<&ComplexWaveform>,
    ) -> Result<UplinkOutput> {
        let u = &self.cfg.uplink;
        let carrier = residual.tone_power(self.cfg.carrier_freq - residual.ref_freq);
        let min = dbm_to_watts(u.min_residual_carrier_dbm);
        if !(carrier >= min) {
            return Err(Error::InsufficientCarrier(format!(
                "residual carrier {:.2} dBm below the {:.2} dBm needed for the uplink",
                watts_to_dbm(carrier.max(1e-300)),
                u.min_residual_carrier_dbm
            )));
        }
        let n = residual.len();
        let mut a = vec![Complex64::new(0.0, 0.0); n];
        let mut total = 0.0;
        let parts = [
            (digital, u.digital.center, 1.0),
            (rof, u.rof.center, db_to_lin(u.rof_level_db)),
        ];
        for (sig, f, p) in parts {
            if let Some(s) = sig {
                if s.len() != n {
                    return Err(Error::LengthMismatch {
                        left: n,
                        right: s.len(),
                    });
                }
                let shifted = frequency_shift(s, f);
                for (x, y) in a.iter_mut().zip(&shifted.samples) {
                    *x += y * p.sqrt();
                }
                total += p;
            }
        }
        if total > 0.0 {
            let norm = total.sqrt().recip();
            for x in a.iter_mut() {
                *x *= norm;
            }
        }
        let drives = iq_drives(&a, u.sideband, if total > 0.0 { u.drive_rms_volts } else { 0.0 });
        let field = self.uplink.apply(residual, &[drives])?.scaled(self.stage_loss);
        let ratio = self.uplink_ratio(residual, &field);
        Ok(UplinkOutput {
            field,
            uplink_to_residual_db: ratio,
        })
    }

    fn uplink_ratio(&self, before: &ComplexWaveform, after: &ComplexWaveform) -> Option<f64> {
        let c = self.cfg.carrier_freq - after.ref_freq;
        let up = self.cfg.uplink.digital;
        let mean_psd = |w: &ComplexWaveform, b: &Band| {
            w.band_power(c + b.lo(), c + b.hi()) / b.width
        };
        let added = mean_psd(after, &up) - mean_psd(before, &up);
        if !(added > 1e-3 * mean_psd(before, &up).max(1e-300)) {
            return None;
        }
        let worst = self
            .cfg
            .downlink_bands
            .iter()
            .map(|b| mean_psd(after, b))
            .fold(0.0, f64::max);
        if worst <= 0.0 {
            return None;
        }
        Some(lin_to_db(mean_psd(after, &up) / worst))
    }
}

/// Filter bank plus detection in one call.
pub fn onu_receive(
    field: &ComplexWaveform,
    cfg: &OnuConfig,
    seed: u64,
) -> Result<(OnuDrops, OnuCurrents)> {
    let onu = Onu::new(cfg, field.len(), field.sample_rate, field.ref_freq)?;
    let drops = onu.front_end(field)?;
    let currents = onu.detect(&drops, seed)?;
    Ok((drops, currents))
}

/// One-shot uplink remodulation.
pub fn onu_remodulate(
    residual: &ComplexWaveform,
    cfg: &OnuConfig,
    uplink_digital: Option<&ComplexWaveform>,
    uplink_rof: Option<&ComplexWaveform>,
) -> Result<UplinkOutput> {
    Onu::new(cfg, residual.len(), residual.sample_rate, residual.ref_freq)?
        .remodulate(residual, uplink_digital, uplink_rof)
}
