//! Scenario configuration: TOML schema, loading and validation.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::detector::PdParams;
use crate::channel::fiber::FiberParams;
use crate::error::{Error, Result};
use crate::signal::metrics::DEFAULT_FEC_THRESHOLD;
use crate::signal::ofdm::OfdmConfig;
use crate::subsystems::onu::{FilterShape, UplinkConfig};
use crate::subsystems::olt::OltConfig;
use crate::subsystems::plan::WdmPlan;
use crate::subsystems::smart_edge::{AmpConfig, SmartEdgeConfig};

pub const SCENARIO_A: &str = include_str!("../../scenarios/scenario_a.toml");
pub const SCENARIO_B: &str = include_str!("../../scenarios/scenario_b.toml");

/// Sections every scenario file must define.
pub const REQUIRED_SECTIONS: [&str; 13] = [
    "name",
    "seed",
    "simulation",
    "plan",
    "digital",
    "olt",
    "feeder",
    "smart_edge",
    "rof",
    "distribution",
    "onu",
    "uplink",
    "sweep",
];

fn default_fec() -> f64 {
    DEFAULT_FEC_THRESHOLD
}

fn default_full_bits() -> u64 {
    10_000_000
}

fn default_uplink_blocks() -> usize {
    2
}

fn default_spectrum_bins() -> usize {
    2048
}

fn default_eq_smoothing() -> usize {
    2
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSpec {
    pub sample_rate: f64,
    /// Samples per simulated block; a power of two.
    pub block_len: usize,
    /// Absolute frequency of the optical baseband origin (Hz).
    pub ref_freq: f64,
    /// Bits per received-power point, counted on the downlink digital signal.
    pub bits_per_point: u64,
    #[serde(default = "default_full_bits")]
    pub full_bits_per_point: u64,
    /// Blocks that also run the uplink path.
    #[serde(default = "default_uplink_blocks")]
    pub uplink_blocks: usize,
    #[serde(default = "default_fec")]
    pub fec_threshold: f64,
    /// Points per exported spectrum.
    #[serde(default = "default_spectrum_bins")]
    pub spectrum_bins: usize,
}

/// OFDM parameters without the sampling fields, which the scenario fixes:
/// every signal is sampled at the simulation rate and one frame fills a block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OfdmSpec {
    pub n_subcarriers: usize,
    pub qam_order: u32,
    pub cp_fraction: f64,
    pub occupied_bandwidth: f64,
    pub pilot_spacing: usize,
    pub seed: u64,
    #[serde(default = "default_eq_smoothing")]
    pub eq_smoothing: usize,
    #[serde(default = "default_true")]
    pub pilot_tracking: bool,
}

impl OfdmSpec {
    /// Full config at `sample_rate`, with as many symbols as fit in
    /// `block_len` samples alongside the preamble.
    pub fn resolve(&self, sample_rate: f64, block_len: usize) -> Result<OfdmConfig> {
        let mut c = OfdmConfig::new(
            self.n_subcarriers,
            self.qam_order,
            self.cp_fraction,
            self.occupied_bandwidth,
            self.pilot_spacing,
            self.seed,
        )
        .with_sample_rate(sample_rate);
        c.eq_smoothing = self.eq_smoothing;
        c.pilot_tracking = self.pilot_tracking;
        c.validate()?;
        let per_block = block_len / c.symbol_len();
        if per_block < 2 {
            return Err(Error::Validation(format!(
                "an OFDM symbol of {} samples does not fit twice in a {block_len}-sample block",
                c.symbol_len()
            )));
        }
        Ok(c.with_symbols_per_frame(per_block - 1))
    }
}

/// RoF payloads. Each tunnel carries a sum of independent OFDM streams, one
/// per listed RF carrier; an empty list leaves the tunnel idle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RofSpec {
    pub ofdm: OfdmSpec,
    pub tunnel_carriers: [Vec<f64>; 2],
}

impl RofSpec {
    pub fn is_active(&self, tunnel: usize) -> bool {
        !self.tunnel_carriers[tunnel].is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OnuSpec {
    pub mrr1: FilterShape,
    pub tunnel_filter: FilterShape,
    pub carrier_tap_fraction: f64,
    pub pd: PdParams,
    pub uplink: UplinkConfig,
}

/// Uplink payloads and the central-office uplink receiver. The digital
/// uplink reuses the downlink OFDM format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UplinkSpec {
    pub rof_ofdm: OfdmSpec,
    /// Drop filter bandwidth of the central-office uplink receiver (Hz).
    pub co_filter_bandwidth: f64,
    pub co_pd: PdParams,
    /// Optical preamplifier ahead of the central-office drop filter.
    #[serde(default)]
    pub co_preamp: Option<AmpConfig>,
    /// Receiver of the smart-edge intercept.
    pub intercept_pd: PdParams,
}

/// Received-power axis: an explicit list, or start/stop/step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub rx_power_dbm: Option<Vec<f64>>,
    #[serde(default)]
    pub start_dbm: Option<f64>,
    #[serde(default)]
    pub stop_dbm: Option<f64>,
    #[serde(default)]
    pub step_dbm: Option<f64>,
}

impl SweepSpec {
    pub fn range(start: f64, stop: f64, step: f64) -> Self {
        Self {
            rx_power_dbm: None,
            start_dbm: Some(start),
            stop_dbm: Some(stop),
            step_dbm: Some(step),
        }
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        match (&self.rx_power_dbm, self.start_dbm, self.stop_dbm, self.step_dbm) {
            (Some(list), None, None, None) => Ok(list.clone()),
            (None, Some(a), Some(b), Some(s)) => {
                if !(s > 0.0) || !(b >= a) {
                    return Err(Error::Validation(format!(
                        "sweep needs step > 0 and stop >= start, got {a}..{b} step {s}"
                    )));
                }
                let n = ((b - a) / s + 1e-9).floor() as usize + 1;
                Ok((0..n).map(|i| a + i as f64 * s).collect())
            }
            (None, None, None, None) => Ok(Vec::new()),
            _ => Err(Error::Validation(
                "sweep takes either rx_power_dbm or all of start_dbm/stop_dbm/step_dbm".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    /// Master seed; every random stream is derived from it.
    pub seed: u64,
    #[serde(default)]
    pub description: String,
    pub simulation: SimulationSpec,
    pub plan: WdmPlan,
    pub digital: OfdmSpec,
    pub olt: OltConfig,
    pub feeder: FiberParams,
    pub smart_edge: SmartEdgeConfig,
    pub rof: RofSpec,
    pub distribution: FiberParams,
    pub onu: OnuSpec,
    pub uplink: UplinkSpec,
    pub sweep: SweepSpec,
}

fn invalid(e: Error) -> Error {
    match e {
        e @ (Error::Validation(_) | Error::Parse(_)) => e,
        e => Error::Validation(e.to_string()),
    }
}

impl ScenarioConfig {
    /// Parse and validate scenario text.
    pub fn parse(text: &str) -> Result<Self> {
        let value: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;
        let missing: Vec<&str> = REQUIRED_SECTIONS
            .iter()
            .copied()
            .filter(|s| !value.contains_key(*s))
            .collect();
        if !missing.is_empty() {
            return Err(Error::Validation(format!(
                "missing sections: {}",
                missing.join(", ")
            )));
        }
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "scenario_a" | "a" => Self::parse(SCENARIO_A),
            "scenario_b" | "b" => Self::parse(SCENARIO_B),
            _ => Err(Error::Validation(format!(
                "unknown built-in scenario `{name}` (scenario_a, scenario_b)"
            ))),
        }
    }

    pub fn digital_ofdm(&self) -> Result<OfdmConfig> {
        self.digital
            .resolve(self.simulation.sample_rate, self.simulation.block_len)
    }

    pub fn rof_ofdm(&self) -> Result<OfdmConfig> {
        self.rof
            .ofdm
            .resolve(self.simulation.sample_rate, self.simulation.block_len)
    }

    pub fn uplink_rof_ofdm(&self) -> Result<OfdmConfig> {
        self.uplink
            .rof_ofdm
            .resolve(self.simulation.sample_rate, self.simulation.block_len)
    }

    /// Blocks needed for `bits` digital bits per point.
    pub fn blocks_for(&self, bits: u64) -> Result<usize> {
        let per_block = self.digital_ofdm()?.bits_per_frame() as u64;
        Ok(bits.div_ceil(per_block).max(1) as usize)
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_inner().map_err(invalid)
    }

    fn validate_inner(&self) -> Result<()> {
        let s = &self.simulation;
        if !(s.sample_rate > 0.0) {
            return Err(Error::Validation("simulation.sample_rate must be > 0".into()));
        }
        if s.block_len < 1024 || !s.block_len.is_power_of_two() {
            return Err(Error::Validation(format!(
                "simulation.block_len must be a power of two >= 1024, got {}",
                s.block_len
            )));
        }
        if s.bits_per_point == 0 || s.full_bits_per_point == 0 {
            return Err(Error::Validation("bits per point must be > 0".into()));
        }
        if !(s.fec_threshold > 0.0 && s.fec_threshold < 0.5) {
            return Err(Error::Validation(format!(
                "fec_threshold {} outside (0, 0.5)",
                s.fec_threshold
            )));
        }
        self.plan.validate()?;
        let nyq = s.sample_rate / 2.0;
        for (k, ch) in self.plan.channels.iter().enumerate() {
            let (lo, hi) = ch.slot_bounds();
            if (lo - s.ref_freq).abs() >= nyq || (hi - s.ref_freq).abs() >= nyq {
                return Err(Error::Validation(format!(
                    "slot of channel {k} lies outside the simulated band (ref {:.4} THz +- {:.1} GHz)",
                    s.ref_freq / 1e12,
                    nyq / 1e9
                )));
            }
        }
        if self.plan.len() > 1 && self.plan.grid_spacing().is_none() {
            return Err(Error::Validation("channels must be uniformly spaced".into()));
        }
        let dig = self.digital_ofdm()?;
        let half = dig.effective_bandwidth() / 2.0;
        for (k, ch) in self.plan.channels.iter().enumerate() {
            let d = self.olt.digital_if.abs();
            if d - half < 0.0 || d + half > ch.digital_subband / 2.0 {
                return Err(Error::Validation(format!(
                    "channel {k}: digital band at {:.2} GHz +- {:.2} GHz leaves the {:.1} GHz digital subband",
                    self.olt.digital_if / 1e9,
                    half / 1e9,
                    ch.digital_subband / 1e9
                )));
            }
        }
        self.olt.validate()?;
        self.feeder.validate()?;
        self.distribution.validate()?;
        self.smart_edge.validate()?;
        let rof = self.rof_ofdm()?;
        for (t, carriers) in self.rof.tunnel_carriers.iter().enumerate() {
            for &f in carriers {
                let edge = f.abs() + rof.effective_bandwidth() / 2.0;
                for ch in &self.plan.channels {
                    if f <= rof.effective_bandwidth() / 2.0 || edge > ch.tunnel_half_bandwidth() {
                        return Err(Error::Validation(format!(
                            "tunnel {t}: RF carrier {:.3} GHz does not fit in the +-{:.2} GHz tunnel",
                            f / 1e9,
                            ch.tunnel_half_bandwidth() / 1e9
                        )));
                    }
                }
            }
            let mut sorted = carriers.clone();
            sorted.sort_by(f64::total_cmp);
            for w in sorted.windows(2) {
                if w[1] - w[0] < rof.effective_bandwidth() {
                    return Err(Error::Validation(format!(
                        "tunnel {t}: RF carriers {} and {} Hz overlap",
                        w[0], w[1]
                    )));
                }
            }
        }
        let o = &self.onu;
        if !(o.carrier_tap_fraction > 0.0 && o.carrier_tap_fraction < 1.0) {
            return Err(Error::Validation(format!(
                "onu.carrier_tap_fraction {} outside (0, 1)",
                o.carrier_tap_fraction
            )));
        }
        o.pd.validate()?;
        let up_rof = self.uplink_rof_ofdm()?;
        if up_rof.effective_bandwidth() > o.uplink.rof.width {
            return Err(Error::Validation(format!(
                "uplink RoF OFDM occupies {:.3} GHz, uplink rof band is {:.3} GHz",
                up_rof.effective_bandwidth() / 1e9,
                o.uplink.rof.width / 1e9
            )));
        }
        if (o.uplink.rof.center - self.smart_edge.intercept.rof_if).abs() > 1.0 {
            return Err(Error::Validation(
                "onu.uplink.rof.center must equal smart_edge.intercept.rof_if".into(),
            ));
        }
        if !(self.uplink.co_filter_bandwidth > 0.0) {
            return Err(Error::Validation("uplink.co_filter_bandwidth must be > 0".into()));
        }
        self.uplink.co_pd.validate()?;
        self.uplink.intercept_pd.validate()?;
        self.sweep.points()?;
        Ok(())
    }
}

/// Read and validate a scenario file.
pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    ScenarioConfig::parse(&text)
}
