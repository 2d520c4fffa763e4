//! End-to-end scenario execution.
//!
//! Each block of `block_len` samples is simulated once, noiselessly, through
//! OLT, feeder, smart edge, distribution fiber and the ONU filter bank. The
//! received-power sweep then rescales the dropped fields and adds receiver
//! noise on the demodulated OFDM grid, so all sweep points share the optical
//! simulation. Blocks are independent and run in parallel.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::detector::PdParams;
use crate::channel::amp::amplify_ase;
use crate::channel::fiber::propagate_fiber;
use crate::error::{Error, Result, StageExt};
use crate::photonics::filter::DropFilterSpec;
use crate::rng;
use crate::scenario::config::ScenarioConfig;
use crate::signal::metrics::BerReport;
use crate::signal::ofdm::{generate_ofdm, OfdmConfig};
use crate::signal::rf::upconvert_real;
use crate::subsystems::olt::{digital_signals, Olt};
use crate::subsystems::onu::{Band, Onu, OnuConfig};
use crate::subsystems::plan::WdmChannel;
use crate::subsystems::rx::{capture_ofdm, score_capture, score_ofdm};
use crate::subsystems::smart_edge::{SmartEdge, TunnelPayloads};
use crate::units::{dbm_to_watts, watts_to_dbm};
use crate::waveform::ComplexWaveform;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    /// Use `full_bits_per_point` instead of the desk-scale count.
    pub full: bool,
    /// Replace the configured master seed.
    pub seed: Option<u64>,
    /// Replace the configured received-power axis.
    pub sweep: Option<Vec<f64>>,
    /// Run exactly this many blocks (overrides the bit target).
    pub blocks: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerPoint {
    pub rx_power_dbm: f64,
    #[serde(flatten)]
    pub metrics: BerReport,
}

/// One received signal over the power sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalCurve {
    pub id: String,
    pub channel: usize,
    /// `None` for the broadband digital signal.
    pub tunnel: Option<usize>,
    /// RF carrier of a RoF stream (Hz).
    pub rf_freq: Option<f64>,
    pub bit_rate: f64,
    pub points: Vec<BerPoint>,
    /// Below the FEC threshold at the highest swept power.
    pub passes_at_top: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UplinkResult {
    pub channel: usize,
    /// Uplink PSD over the strongest residual downlink PSD at the ONU output.
    pub uplink_to_residual_db: Option<f64>,
    /// Uplink RoF recovered by the smart-edge intercept.
    pub intercept_rof: BerReport,
    /// Digital uplink after the intercept, detected at the central office.
    pub co_digital: BerReport,
    /// Uplink receptions where the preamble was not found. Those count as
    /// half their bits in error, with EVM 1.
    pub unsynchronized: usize,
}

/// Where a channel's carrier power goes on its way to the uplink modulator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarrierBudget {
    pub channel: usize,
    pub onu_input_dbm: f64,
    /// Carrier converted to subcarriers by the smart-edge clock, net of the
    /// bus insertion loss.
    pub smart_edge_conversion_db: f64,
    /// Carrier lost to the ONU tunnel drop filters.
    pub onu_rof_drop_db: f64,
    /// Total carrier reduction caused by the RoF tunnels.
    pub rof_cost_db: f64,
    /// Carrier tapped by MRR1 for the broadband beat tone.
    pub broadband_tap_db: f64,
    pub residual_dbm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub label: String,
    /// (offset from `ref_freq` in Hz, PSD in dBm/Hz).
    pub points: Vec<(f64, f64)>,
}

/// Everything needed to reproduce a run: the resolved config and the
/// derived quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub config: ScenarioConfig,
    pub seed: u64,
    pub full: bool,
    pub blocks: usize,
    pub digital_ofdm: OfdmConfig,
    pub rof_ofdm: OfdmConfig,
    pub uplink_rof_ofdm: OfdmConfig,
    pub digital_bits_per_block: usize,
    pub rof_bits_per_block: usize,
    pub ref_freq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub all_downlink_pass_at_top: bool,
    pub min_bits_per_point: u64,
    pub min_uplink_to_residual_db: Option<f64>,
    pub max_rof_cost_db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub scenario: String,
    pub manifest: Manifest,
    pub rx_power_dbm: Vec<f64>,
    pub downlink: Vec<SignalCurve>,
    pub uplink: Vec<UplinkResult>,
    pub carrier: Vec<CarrierBudget>,
    pub spectra: Vec<Spectrum>,
    pub summary: Summary,
}

/// A downlink signal to score.
#[derive(Debug, Clone)]
struct Target {
    id: String,
    channel: usize,
    tunnel: Option<usize>,
    f_if: f64,
    rof: bool,
}

struct Context<'a> {
    cfg: &'a ScenarioConfig,
    seed: u64,
    dig: OfdmConfig,
    rof: OfdmConfig,
    up_rof: OfdmConfig,
    olt: Olt,
    edge: SmartEdge,
    onus: Vec<Onu>,
    targets: Vec<Target>,
    powers: Vec<f64>,
}

struct BlockResult {
    /// [target][point]
    scores: Vec<Vec<BerReport>>,
    uplink: Vec<UplinkResult>,
    carrier: Vec<CarrierBudget>,
    spectra: Vec<Spectrum>,
}

fn spectrum(label: &str, w: &ComplexWaveform, bins: usize) -> Spectrum {
    Spectrum {
        label: label.to_string(),
        points: w
            .psd_binned(bins)
            .into_iter()
            .map(|(f, p)| (f, watts_to_dbm(p.max(1e-300))))
            .collect(),
    }
}

fn padded(w: ComplexWaveform, n: usize) -> Result<ComplexWaveform> {
    let mut w = w;
    if w.len() > n {
        return Err(Error::Sizing(format!(
            "frame of {} samples exceeds the {n}-sample block",
            w.len()
        )));
    }
    w.samples.resize(n, Complex64::new(0.0, 0.0));
    Ok(w)
}

fn stream_bits(block_seed: u64, label: &str, n: usize) -> Vec<u8> {
    rng::random_bits(&mut rng::seeded(rng::derive(block_seed, rng::tag(label))), n)
}

fn onu_config(cfg: &ScenarioConfig, ch: &WdmChannel, dig: &OfdmConfig) -> OnuConfig {
    let o = &cfg.onu;
    OnuConfig::design(
        ch,
        Band::new(cfg.olt.digital_if, dig.effective_bandwidth()),
        o.mrr1,
        o.tunnel_filter,
        o.carrier_tap_fraction,
        o.pd,
        o.uplink,
    )
}

impl<'a> Context<'a> {
    fn new(cfg: &'a ScenarioConfig, opts: &RunOptions) -> Result<Self> {
        let s = &cfg.simulation;
        let (n, fs, rf) = (s.block_len, s.sample_rate, s.ref_freq);
        let dig = cfg.digital_ofdm()?;
        let rof = cfg.rof_ofdm()?;
        let up_rof = cfg.uplink_rof_ofdm()?;
        let olt = Olt::new(&cfg.plan, &cfg.olt, n, fs, rf).stage("olt")?;
        let probe = propagate_fiber(olt.carriers(), &cfg.feeder).stage("feeder")?;
        let active: Vec<[bool; 2]> = cfg
            .plan
            .channels
            .iter()
            .map(|_| [cfg.rof.is_active(0), cfg.rof.is_active(1)])
            .collect();
        let edge = SmartEdge::new(&cfg.plan, &cfg.smart_edge, &probe, &active).stage("smart_edge")?;
        let onus = cfg
            .plan
            .channels
            .iter()
            .map(|ch| Onu::new(&onu_config(cfg, ch, &dig), n, fs, rf))
            .collect::<Result<Vec<_>>>()
            .stage("onu")?;
        let mut targets = Vec::new();
        for k in 0..cfg.plan.len() {
            targets.push(Target {
                id: format!("ch{k}/digital"),
                channel: k,
                tunnel: None,
                f_if: cfg.olt.digital_if,
                rof: false,
            });
            for t in 0..2 {
                for (i, &f) in cfg.rof.tunnel_carriers[t].iter().enumerate() {
                    targets.push(Target {
                        id: format!("ch{k}/tunnel{t}/rf{i}"),
                        channel: k,
                        tunnel: Some(t),
                        f_if: f,
                        rof: true,
                    });
                }
            }
        }
        let powers = match &opts.sweep {
            Some(p) => p.clone(),
            None => cfg.sweep.points()?,
        };
        Ok(Self {
            cfg,
            seed: opts.seed.unwrap_or(cfg.seed),
            dig,
            rof,
            up_rof,
            olt,
            edge,
            onus,
            targets,
            powers,
        })
    }

    fn tunnel_payload(&self, block_seed: u64, k: usize, t: usize) -> Result<Option<ComplexWaveform>> {
        let carriers = &self.cfg.rof.tunnel_carriers[t];
        if carriers.is_empty() {
            return Ok(None);
        }
        let n = self.cfg.simulation.block_len;
        let mut sum: Option<ComplexWaveform> = None;
        for (i, &f) in carriers.iter().enumerate() {
            let bits = stream_bits(block_seed, &format!("ch{k}/tunnel{t}/rf{i}"), self.rof.bits_per_frame());
            let w = upconvert_real(&padded(generate_ofdm(&self.rof, &bits)?, n)?, f)?;
            sum = Some(match sum {
                None => w,
                Some(s) => s.add(&w)?,
            });
        }
        // unit power for the composite, so the drive level is per tunnel
        Ok(sum.map(|s| s.scaled((carriers.len() as f64).sqrt().recip())))
    }

    fn target_bits(&self, block_seed: u64, t: &Target) -> Vec<u8> {
        let n = if t.rof {
            self.rof.bits_per_frame()
        } else {
            self.dig.bits_per_frame()
        };
        stream_bits(block_seed, &t.id, n)
    }

    fn block(&self, b: usize) -> Result<BlockResult> {
        let cfg = self.cfg;
        let sim = &cfg.simulation;
        let n = sim.block_len;
        let rf = sim.ref_freq;
        let block_seed = rng::derive(self.seed, b as u64);
        let first = b == 0;
        let mut spectra = Vec::new();

        let dbits: Vec<Vec<u8>> = (0..cfg.plan.len())
            .map(|k| stream_bits(block_seed, &format!("ch{k}/digital"), self.dig.bits_per_frame()))
            .collect();
        let tx = digital_signals(&dbits, &self.dig, n)
            .and_then(|s| self.olt.transmit(&s))
            .stage("olt")?;
        let fb = propagate_fiber(&tx, &cfg.feeder).stage("feeder")?;
        let payloads: Vec<TunnelPayloads> = (0..cfg.plan.len())
            .map(|k| Ok([self.tunnel_payload(block_seed, k, 0)?, self.tunnel_payload(block_seed, k, 1)?]))
            .collect::<Result<_>>()
            .stage("smart_edge")?;
        let se = self
            .edge
            .overlay(&fb, &payloads, rng::derive(block_seed, rng::tag("amp")))
            .stage("smart_edge")?;
        let dist = propagate_fiber(&se, &cfg.distribution).stage("distribution")?;
        if first {
            let bins = sim.spectrum_bins;
            spectra.push(spectrum("olt_output", &tx, bins));
            spectra.push(spectrum("smart_edge_output", &se, bins));
            spectra.push(spectrum("onu_input", &dist, bins));
        }

        let mut scores = vec![Vec::new(); self.targets.len()];
        let mut carrier = Vec::new();
        let mut uplink = Vec::new();
        for (k, ch) in cfg.plan.channels.iter().enumerate() {
            let onu = &self.onus[k];
            let drops = onu.front_end(&dist).stage("onu")?;
            let (lo, hi) = ch.slot_bounds();
            let slot_power = dist.band_power(lo - rf, hi - rf);
            let responsivity = cfg.onu.pd.responsivity;
            for (ti, t) in self.targets.iter().enumerate().filter(|(_, t)| t.channel == k) {
                let (drop, ofdm) = match t.tunnel {
                    None => (&drops.broadband, &self.dig),
                    Some(tn) => (&drops.tunnels[tn], &self.rof),
                };
                let capture = capture_ofdm(drop, responsivity, t.f_if, ofdm, 1).stage("onu_detect")?;
                let bits = self.target_bits(block_seed, t);
                let noise_seed = rng::derive(block_seed, rng::tag(&t.id));
                scores[ti] = self
                    .powers
                    .par_iter()
                    .enumerate()
                    .map(|(pi, p)| {
                        let gain = dbm_to_watts(*p) / slot_power;
                        score_capture(
                            &capture,
                            ofdm,
                            &bits,
                            gain,
                            &cfg.onu.pd,
                            rng::derive(noise_seed, pi as u64),
                            sim.fec_threshold,
                        )
                    })
                    .collect::<Result<Vec<_>>>()
                    .stage("onu_detect")?;
            }
            if first {
                let c = ch.center_freq - rf;
                let before = watts_to_dbm(fb.tone_power(c).max(1e-300));
                let after = watts_to_dbm(se.tone_power(c).max(1e-300));
                let insertion = cfg.smart_edge.passband_loss_db * 3.0 * cfg.plan.len() as f64;
                let conversion = before - after - insertion;
                let l = drops.carrier;
                carrier.push(CarrierBudget {
                    channel: k,
                    onu_input_dbm: l.input_dbm,
                    smart_edge_conversion_db: conversion,
                    onu_rof_drop_db: l.rof_drop_db,
                    rof_cost_db: conversion + l.rof_drop_db,
                    broadband_tap_db: l.broadband_tap_db,
                    residual_dbm: l.residual_dbm,
                });
                spectra.push(spectrum(&format!("ch{k}_onu_residual"), &drops.residual, sim.spectrum_bins));
            }
            if b < sim.uplink_blocks {
                let (res, field) = self.uplink(block_seed, k, ch, onu, &drops.residual)?;
                if first {
                    spectra.push(spectrum(&format!("ch{k}_uplink"), &field, sim.spectrum_bins));
                }
                uplink.push(res);
            }
        }
        Ok(BlockResult {
            scores,
            uplink,
            carrier,
            spectra,
        })
    }

    /// Remodulate, send back over the distribution fiber, intercept the RoF
    /// uplink at the smart edge, and detect the digital uplink at the CO.
    fn uplink(
        &self,
        block_seed: u64,
        k: usize,
        ch: &WdmChannel,
        onu: &Onu,
        residual: &ComplexWaveform,
    ) -> Result<(UplinkResult, ComplexWaveform)> {
        let cfg = self.cfg;
        let sim = &cfg.simulation;
        let n = sim.block_len;
        let ubits = stream_bits(block_seed, &format!("ch{k}/uplink/digital"), self.dig.bits_per_frame());
        let rbits = stream_bits(block_seed, &format!("ch{k}/uplink/rof"), self.up_rof.bits_per_frame());
        let usig = padded(generate_ofdm(&self.dig, &ubits)?, n).stage("onu_uplink")?;
        let rsig = padded(generate_ofdm(&self.up_rof, &rbits)?, n).stage("onu_uplink")?;
        let out = onu.remodulate(residual, Some(&usig), Some(&rsig)).stage("onu_uplink")?;
        let back = propagate_fiber(&out.field, &cfg.distribution).stage("uplink_distribution")?;
        let pd = |p: &PdParams, tag: &str| p.with_seed(rng::derive(block_seed, rng::tag(&format!("ch{k}/{tag}"))));
        let (current, through) = self
            .edge
            .intercept(&back, k, &pd(&cfg.uplink.intercept_pd, "intercept"))
            .stage("intercept")?;
        let mut unsynchronized = 0;
        let intercept_rof = tolerate_sync(
            score_ofdm(&current, cfg.onu.uplink.rof.center, &self.up_rof, &rbits, 1, sim.fec_threshold),
            rbits.len(),
            sim.fec_threshold,
            &mut unsynchronized,
        )
        .stage("intercept")?;
        let mut at_co = propagate_fiber(&through, &cfg.feeder).stage("uplink_feeder")?;
        if let Some(a) = cfg.uplink.co_preamp {
            let seed = rng::derive(block_seed, rng::tag(&format!("ch{k}/co_preamp")));
            at_co = amplify_ase(&at_co, a.gain_db, a.nf_db, seed).stage("co_uplink")?;
        }
        let dband = cfg.onu.uplink.digital;
        let filt = DropFilterSpec::new(
            ch.center_freq + dband.center / 2.0,
            cfg.uplink.co_filter_bandwidth,
            cfg.onu.mrr1.order,
        );
        let (drop, _) = filt.apply(&at_co).stage("co_uplink")?;
        let co_current = crate::channel::detector::photodetect(&drop, &pd(&cfg.uplink.co_pd, "co"))
            .stage("co_uplink")?;
        let co_digital = tolerate_sync(
            score_ofdm(&co_current, dband.center, &self.dig, &ubits, 1, sim.fec_threshold),
            ubits.len(),
            sim.fec_threshold,
            &mut unsynchronized,
        )
        .stage("co_uplink")?;
        Ok((
            UplinkResult {
                channel: k,
                uplink_to_residual_db: out.uplink_to_residual_db,
                intercept_rof,
                co_digital,
                unsynchronized,
            },
            out.field,
        ))
    }
}

/// A lost preamble on the uplink is a measurement outcome, not a failure of
/// the run: score it as random guessing.
fn tolerate_sync(r: Result<BerReport>, bits: usize, fec: f64, misses: &mut usize) -> Result<BerReport> {
    match r {
        Err(Error::Synchronization(_)) => {
            *misses += 1;
            Ok(BerReport::from_counts(bits as u64 / 2, bits as u64, 1.0, fec))
        }
        other => other,
    }
}

fn merge_or_empty(reports: &[BerReport], fec: f64) -> BerReport {
    BerReport::merge(reports).unwrap_or_else(|| BerReport::from_counts(0, 0, 0.0, fec))
}

/// Run a validated scenario.
pub fn run_scenario(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<MetricsReport> {
    cfg.validate()?;
    let sim = &cfg.simulation;
    let ctx = Context::new(cfg, opts)?;
    let target_bits = if opts.full {
        sim.full_bits_per_point
    } else {
        sim.bits_per_point
    };
    let blocks = match opts.blocks {
        Some(b) => b.max(1),
        None => cfg.blocks_for(target_bits)?,
    };
    let results = (0..blocks)
        .into_par_iter()
        .map(|b| ctx.block(b))
        .collect::<Result<Vec<_>>>()?;

    let fec = sim.fec_threshold;
    let downlink: Vec<SignalCurve> = ctx
        .targets
        .iter()
        .enumerate()
        .map(|(ti, t)| {
            let points: Vec<BerPoint> = ctx
                .powers
                .iter()
                .enumerate()
                .map(|(pi, &p)| {
                    let per_block: Vec<BerReport> =
                        results.iter().map(|r| r.scores[ti][pi].clone()).collect();
                    BerPoint {
                        rx_power_dbm: p,
                        metrics: merge_or_empty(&per_block, fec),
                    }
                })
                .collect();
            let top = points
                .iter()
                .max_by(|a, b| a.rx_power_dbm.total_cmp(&b.rx_power_dbm));
            SignalCurve {
                id: t.id.clone(),
                channel: t.channel,
                tunnel: t.tunnel,
                rf_freq: t.rof.then_some(t.f_if),
                bit_rate: if t.rof { ctx.rof.bit_rate() } else { ctx.dig.bit_rate() },
                passes_at_top: top.is_some_and(|p| p.metrics.passes_fec),
                points,
            }
        })
        .collect();

    let uplink: Vec<UplinkResult> = (0..cfg.plan.len())
        .filter_map(|k| {
            let per: Vec<&UplinkResult> = results
                .iter()
                .flat_map(|r| r.uplink.iter())
                .filter(|u| u.channel == k)
                .collect();
            if per.is_empty() {
                return None;
            }
            let ratios: Vec<f64> = per.iter().filter_map(|u| u.uplink_to_residual_db).collect();
            let ratio = (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64);
            let rof: Vec<BerReport> = per.iter().map(|u| u.intercept_rof.clone()).collect();
            let dig: Vec<BerReport> = per.iter().map(|u| u.co_digital.clone()).collect();
            Some(UplinkResult {
                channel: k,
                uplink_to_residual_db: ratio,
                intercept_rof: merge_or_empty(&rof, fec),
                co_digital: merge_or_empty(&dig, fec),
                unsynchronized: per.iter().map(|u| u.unsynchronized).sum(),
            })
        })
        .collect();

    let first = results.into_iter().next().ok_or_else(|| Error::Sizing("no blocks were run".into()))?;
    let summary = Summary {
        all_downlink_pass_at_top: !downlink.is_empty() && downlink.iter().all(|c| c.passes_at_top),
        min_bits_per_point: downlink
            .iter()
            .flat_map(|c| c.points.iter().map(|p| p.metrics.total_bits))
            .min()
            .unwrap_or(0),
        min_uplink_to_residual_db: uplink
            .iter()
            .filter_map(|u| u.uplink_to_residual_db)
            .reduce(f64::min),
        max_rof_cost_db: first.carrier.iter().map(|c| c.rof_cost_db).reduce(f64::max),
    };
    Ok(MetricsReport {
        scenario: cfg.name.clone(),
        manifest: Manifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: cfg.clone(),
            seed: ctx.seed,
            full: opts.full,
            blocks,
            digital_bits_per_block: ctx.dig.bits_per_frame(),
            rof_bits_per_block: ctx.rof.bits_per_frame(),
            digital_ofdm: ctx.dig.clone(),
            rof_ofdm: ctx.rof.clone(),
            uplink_rof_ofdm: ctx.up_rof.clone(),
            ref_freq: sim.ref_freq,
        },
        rx_power_dbm: ctx.powers.clone(),
        downlink,
        uplink,
        carrier: first.carrier,
        spectra: first.spectra,
        summary,
    })
}
