//! Smart-edge add/drop unit: per WDM channel a subcarrier generator, two
//! tunnel modulators and, on the upstream path, an uplink intercept filter.

use serde::{Deserialize, Serialize};

use crate::channel::amp::amplify_ase;
use crate::channel::detector::{photodetect, PdParams};
use crate::error::{Error, Result};
use crate::photonics::filter::DropFilterSpec;
use crate::photonics::mrm::MrmKernel;
use crate::photonics::ring::RingParams;
use crate::photonics::subcarrier::SubcarrierGenerator;
use crate::subsystems::olt::DRIVE_CREST;
use crate::subsystems::plan::{RingDesign, WdmChannel, WdmPlan};
use crate::units::db_to_amplitude;
use crate::waveform::ComplexWaveform;

fn inflection() -> f64 {
    1.0 / 3f64.sqrt()
}

fn default_loss() -> f64 {
    crate::photonics::DEFAULT_PASSBAND_LOSS_DB
}

fn default_order() -> u32 {
    3
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmpConfig {
    pub gain_db: f64,
    pub nf_db: f64,
}

/// Uplink intercept filter, placed on the uplink side of the carrier so the
/// carrier sits on its skirt and `carrier_tap_fraction` of it is dropped
/// together with the uplink RoF band as a beat tone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterceptConfig {
    pub bandwidth: f64,
    #[serde(default = "default_order")]
    pub order: u32,
    pub carrier_tap_fraction: f64,
    /// Centre of the uplink RoF band relative to the carrier (Hz, signed).
    pub rof_if: f64,
    /// Occupied bandwidth of the uplink RoF band (Hz).
    pub rof_bandwidth: f64,
}

impl InterceptConfig {
    pub fn filter_for(&self, carrier: f64) -> DropFilterSpec {
        let probe = DropFilterSpec::new(carrier, self.bandwidth, self.order);
        let off = probe.edge_offset_for(self.carrier_tap_fraction);
        DropFilterSpec::new(carrier + self.rof_if.signum() * off, self.bandwidth, self.order)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.carrier_tap_fraction > 0.0 && self.carrier_tap_fraction < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "intercept carrier_tap_fraction {} outside (0, 1)",
                self.carrier_tap_fraction
            )));
        }
        let f = self.filter_for(0.0);
        f.validate()?;
        let lo = self.rof_if - self.rof_bandwidth / 2.0;
        let hi = self.rof_if + self.rof_bandwidth / 2.0;
        let edge = f.bandwidth / 2.0;
        if (lo - f.center).abs() > edge || (hi - f.center).abs() > edge || lo * hi <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "uplink RoF band [{lo}, {hi}] Hz is not inside the intercept passband centred at {} Hz",
                f.center
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmartEdgeConfig {
    #[serde(default)]
    pub ring: RingDesign,
    /// Peak clock voltage on the subcarrier generator.
    pub clock_volts: f64,
    /// Tunnel modulator detuning below its subcarrier, in half-linewidths.
    #[serde(default = "inflection")]
    pub tunnel_bias_hwhm: f64,
    /// RMS drive of a unit-power tunnel payload (V).
    pub tunnel_drive_rms_volts: f64,
    #[serde(default = "default_loss")]
    pub passband_loss_db: f64,
    #[serde(default)]
    pub amplifier: Option<AmpConfig>,
    pub intercept: InterceptConfig,
}

impl SmartEdgeConfig {
    pub fn validate(&self) -> Result<()> {
        self.ring.validate()?;
        self.intercept.validate()?;
        if !(self.clock_volts >= 0.0 && self.tunnel_drive_rms_volts >= 0.0) {
            return Err(Error::InvalidParameter(
                "smart-edge drive levels must be non-negative".into(),
            ));
        }
        if let Some(a) = self.amplifier {
            if a.gain_db < 0.0 {
                return Err(Error::InvalidParameter("amplifier gain must be >= 0 dB".into()));
            }
        }
        Ok(())
    }
}

/// Per-channel RoF payloads: real, unit-power electrical waveforms for the
/// upper (index 0) and lower (index 1) subcarrier tunnels.
pub type TunnelPayloads = [Option<ComplexWaveform>; 2];

#[derive(Debug, Clone)]
enum Stage {
    Clock(SubcarrierGenerator),
    Driven { kernel: MrmKernel, bias: f64, tunnel: usize },
    Parked(MrmKernel),
}

#[derive(Debug, Clone)]
struct ChannelGroup {
    stages: Vec<Stage>,
}

/// Block-reusable smart edge. Which tunnels carry payloads is fixed at
/// construction; idle channels have their three rings parked.
#[derive(Debug, Clone)]
pub struct SmartEdge {
    cfg: SmartEdgeConfig,
    channels: Vec<WdmChannel>,
    groups: Vec<ChannelGroup>,
    stage_loss: f64,
}

fn static_kernel(p: &RingParams, probe: &ComplexWaveform) -> Result<MrmKernel> {
    MrmKernel::new(
        p,
        probe.len(),
        probe.sample_rate,
        probe.ref_freq,
        p.bias_volt,
        p.bias_volt,
    )
}

impl SmartEdge {
    /// `probe` is a representative input field (used to locate carriers and
    /// fix the block geometry); `active[k][t]` marks tunnel `t` of channel `k`
    /// as carrying a payload.
    pub fn new(
        plan: &WdmPlan,
        cfg: &SmartEdgeConfig,
        probe: &ComplexWaveform,
        active: &[[bool; 2]],
    ) -> Result<Self> {
        plan.validate()?;
        cfg.validate()?;
        if active.len() != plan.len() {
            return Err(Error::Plan(format!(
                "tunnel activity given for {} of {} channels",
                active.len(),
                plan.len()
            )));
        }
        let peak = DRIVE_CREST * cfg.tunnel_drive_rms_volts;
        let mut groups = Vec::with_capacity(plan.len());
        for (ch, act) in plan.channels.iter().zip(active) {
            let mut stages = Vec::with_capacity(3);
            if act[0] || act[1] {
                let gen_ring = cfg.ring.at(ch.center_freq, 0.0);
                stages.push(Stage::Clock(SubcarrierGenerator::new(
                    probe,
                    &gen_ring,
                    ch.rof_subcarrier_offset,
                    cfg.clock_volts,
                )?));
            } else {
                stages.push(Stage::Parked(static_kernel(
                    &cfg.ring.parked(ch.center_freq),
                    probe,
                )?));
            }
            for (t, &on) in act.iter().enumerate() {
                let sub = ch.subcarrier_freq(t);
                if on {
                    let r = cfg.ring.at(sub, cfg.tunnel_bias_hwhm);
                    let kernel = MrmKernel::new(
                        &r,
                        probe.len(),
                        probe.sample_rate,
                        probe.ref_freq,
                        r.bias_volt - peak,
                        r.bias_volt + peak,
                    )?;
                    stages.push(Stage::Driven {
                        kernel,
                        bias: r.bias_volt,
                        tunnel: t,
                    });
                } else {
                    stages.push(Stage::Parked(static_kernel(&cfg.ring.parked(sub), probe)?));
                }
            }
            groups.push(ChannelGroup { stages });
        }
        Ok(Self {
            cfg: *cfg,
            channels: plan.channels.clone(),
            groups,
            stage_loss: db_to_amplitude(-cfg.passband_loss_db),
        })
    }

    pub fn config(&self) -> &SmartEdgeConfig {
        &self.cfg
    }

    /// Add the RoF tunnels to the downlink. `amp_seed` seeds the optional
    /// amplifier's noise.
    pub fn overlay(
        &self,
        field: &ComplexWaveform,
        payloads: &[TunnelPayloads],
        amp_seed: u64,
    ) -> Result<ComplexWaveform> {
        if payloads.len() != self.groups.len() {
            return Err(Error::Plan(format!(
                "RoF payloads for {} of {} channels",
                payloads.len(),
                self.groups.len()
            )));
        }
        let mut x = field.clone();
        for (group, pay) in self.groups.iter().zip(payloads) {
            for stage in &group.stages {
                x = match stage {
                    Stage::Clock(g) => g.apply(&x)?,
                    Stage::Parked(k) => k.apply_static(&x)?,
                    Stage::Driven {
                        kernel,
                        bias,
                        tunnel,
                    } => {
                        let p = pay[*tunnel].as_ref().ok_or_else(|| {
                            Error::Plan(format!("tunnel {tunnel} was built active but has no payload"))
                        })?;
                        let g = self.cfg.tunnel_drive_rms_volts;
                        let volts: Vec<f64> = p.samples.iter().map(|s| bias + g * s.re).collect();
                        kernel.apply(&x, &volts)?
                    }
                }
                .scaled(self.stage_loss);
            }
        }
        match self.cfg.amplifier {
            Some(a) => amplify_ase(&x, a.gain_db, a.nf_db, amp_seed),
            None => Ok(x),
        }
    }

    /// Intercept filter for channel `k`.
    pub fn intercept_filter(&self, k: usize) -> Result<DropFilterSpec> {
        let ch = self.channels.get(k).ok_or_else(|| {
            Error::Plan(format!("channel {k} not in plan of {}", self.channels.len()))
        })?;
        Ok(self.cfg.intercept.filter_for(ch.center_freq))
    }

    /// Drop channel `k`'s uplink RoF band with its carrier tap and detect it.
    /// Returns the photocurrent and the through field.
    pub fn intercept(
        &self,
        field: &ComplexWaveform,
        k: usize,
        pd: &PdParams,
    ) -> Result<(ComplexWaveform, ComplexWaveform)> {
        let (drop, through) = self.intercept_filter(k)?.apply(field)?;
        Ok((photodetect(&drop, pd)?, through.scaled(self.stage_loss)))
    }
}

/// One-shot form of [`SmartEdge::overlay`].
pub fn smart_edge_overlay(
    field: &ComplexWaveform,
    plan: &WdmPlan,
    cfg: &SmartEdgeConfig,
    rof_payloads: &[TunnelPayloads],
) -> Result<ComplexWaveform> {
    let active: Vec<[bool; 2]> = rof_payloads
        .iter()
        .map(|p| [p[0].is_some(), p[1].is_some()])
        .collect();
    for (k, (ch, p)) in plan.channels.iter().zip(rof_payloads).enumerate() {
        for w in p.iter().flatten() {
            let half = crate::signal::rf::occupied_half_bandwidth(w, 0.99);
            if half > ch.tunnel_half_bandwidth() {
                return Err(Error::Plan(format!(
                    "channel {k}: RoF payload occupies +-{:.3} GHz, tunnel allows +-{:.3} GHz",
                    half / 1e9,
                    ch.tunnel_half_bandwidth() / 1e9
                )));
            }
        }
    }
    SmartEdge::new(plan, cfg, field, &active)?.overlay(field, rof_payloads, 0)
}

/// One-shot uplink intercept of channel `channel_index`: the detected RoF
/// photocurrent.
pub fn smart_edge_intercept_uplink(
    field: &ComplexWaveform,
    plan: &WdmPlan,
    cfg: &SmartEdgeConfig,
    channel_index: usize,
    pd: &PdParams,
) -> Result<ComplexWaveform> {
    plan.validate()?;
    cfg.validate()?;
    let ch = plan.channels.get(channel_index).ok_or_else(|| {
        Error::Plan(format!("channel {channel_index} not in plan of {}", plan.len()))
    })?;
    let (drop, _) = cfg.intercept.filter_for(ch.center_freq).apply(field)?;
    photodetect(&drop, pd)
}
