//! WDM channel plan and the ring design shared by the subsystem builders.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::photonics::ring::{thermal_tune, RingParams};

fn default_slot() -> f64 {
    50e9
}

fn default_digital() -> f64 {
    20e9
}

/// One WDM channel: a carrier, its slot, the digital subband around the
/// carrier and the RoF subcarrier offset `f_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WdmChannel {
    pub center_freq: f64,
    #[serde(default = "default_slot")]
    pub slot_width: f64,
    #[serde(default = "default_digital")]
    pub digital_subband: f64,
    pub rof_subcarrier_offset: f64,
}

impl WdmChannel {
    pub fn new(center_freq: f64, rof_subcarrier_offset: f64) -> Self {
        Self {
            center_freq,
            slot_width: default_slot(),
            digital_subband: default_digital(),
            rof_subcarrier_offset,
        }
    }

    pub fn slot_bounds(&self) -> (f64, f64) {
        (
            self.center_freq - self.slot_width / 2.0,
            self.center_freq + self.slot_width / 2.0,
        )
    }

    /// Largest half-bandwidth a RoF tunnel can occupy around a subcarrier
    /// without crossing into the digital subband or out of the slot.
    pub fn tunnel_half_bandwidth(&self) -> f64 {
        let fs = self.rof_subcarrier_offset;
        (fs - self.digital_subband / 2.0).min(self.slot_width / 2.0 - fs)
    }

    /// Absolute frequency of tunnel `k` (0 = upper subcarrier, 1 = lower).
    pub fn subcarrier_freq(&self, tunnel: usize) -> f64 {
        if tunnel == 0 {
            self.center_freq + self.rof_subcarrier_offset
        } else {
            self.center_freq - self.rof_subcarrier_offset
        }
    }

    fn validate(&self, id: usize) -> Result<()> {
        let c = |m: String| Err(Error::Plan(format!("channel {id}: {m}")));
        if !(self.center_freq > 0.0) {
            return c(format!("center_freq must be positive, got {}", self.center_freq));
        }
        if !(self.slot_width > 0.0 && self.digital_subband > 0.0) {
            return c("slot_width and digital_subband must be positive".into());
        }
        if self.digital_subband >= self.slot_width {
            return c(format!(
                "digital subband {} Hz does not fit in slot {} Hz",
                self.digital_subband, self.slot_width
            ));
        }
        let fs = self.rof_subcarrier_offset;
        if !(fs > self.digital_subband / 2.0 && fs < self.slot_width / 2.0) {
            return c(format!(
                "subcarrier offset {fs} Hz must lie between the digital subband edge {} Hz and the slot edge {} Hz",
                self.digital_subband / 2.0,
                self.slot_width / 2.0
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WdmPlan {
    pub channels: Vec<WdmChannel>,
}

impl WdmPlan {
    pub fn new(channels: Vec<WdmChannel>) -> Self {
        Self { channels }
    }

    /// `n` channels spaced `spacing` apart starting at `first`.
    pub fn uniform(n: usize, first: f64, spacing: f64, rof_subcarrier_offset: f64) -> Self {
        Self::new(
            (0..n)
                .map(|k| WdmChannel::new(first + k as f64 * spacing, rof_subcarrier_offset))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.channels.is_empty() {
            return Err(Error::Plan("plan has no channels".into()));
        }
        for (k, ch) in self.channels.iter().enumerate() {
            ch.validate(k)?;
        }
        for i in 0..self.channels.len() {
            for j in i + 1..self.channels.len() {
                let (a_lo, a_hi) = self.channels[i].slot_bounds();
                let (b_lo, b_hi) = self.channels[j].slot_bounds();
                if a_lo < b_hi && b_lo < a_hi {
                    return Err(Error::Plan(format!("slots of channels {i} and {j} overlap")));
                }
            }
        }
        Ok(())
    }

    /// Channel spacing when the channels form a uniform grid.
    pub fn grid_spacing(&self) -> Option<f64> {
        match self.channels.as_slice() {
            [] => None,
            [_] => Some(self.channels[0].slot_width),
            [a, b, ..] => {
                let s = b.center_freq - a.center_freq;
                let uniform = self
                    .channels
                    .windows(2)
                    .all(|w| ((w[1].center_freq - w[0].center_freq) - s).abs() < 1e-3);
                uniform.then_some(s)
            }
        }
    }
}

fn default_fsr() -> f64 {
    1e12
}

fn default_fwhm() -> f64 {
    3e9
}

fn default_efficiency() -> f64 {
    1e9
}

/// Template for the critically coupled rings used as modulators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingDesign {
    #[serde(default = "default_fsr")]
    pub fsr: f64,
    #[serde(default = "default_fwhm")]
    pub fwhm: f64,
    /// Resonance shift per volt (Hz/V).
    #[serde(default = "default_efficiency")]
    pub mod_efficiency: f64,
}

impl Default for RingDesign {
    fn default() -> Self {
        Self {
            fsr: default_fsr(),
            fwhm: default_fwhm(),
            mod_efficiency: default_efficiency(),
        }
    }
}

impl RingDesign {
    pub fn validate(&self) -> Result<()> {
        if !(self.fsr > 0.0 && self.fwhm > 0.0 && self.fwhm < self.fsr / 2.0) {
            return Err(Error::InvalidParameter(format!(
                "ring design needs 0 < fwhm < fsr/2, got fwhm {} fsr {}",
                self.fwhm, self.fsr
            )));
        }
        if self.mod_efficiency == 0.0 {
            return Err(Error::InvalidParameter("mod_efficiency must be non-zero".into()));
        }
        Ok(())
    }

    /// Ring thermally tuned onto `tone` and biased `detuning_hwhm`
    /// half-linewidths below it. The ring's base resonance sits on a fixed
    /// design grid, so tuning is a genuine thermal offset.
    pub fn at(&self, tone: f64, detuning_hwhm: f64) -> RingParams {
        let base = RingParams::critically_coupled(193.1e12, self.fsr, self.fwhm);
        let mut p = thermal_tune(&base, tone);
        p.mod_efficiency = self.mod_efficiency;
        let hwhm = p.fwhm() / 2.0;
        p.with_bias(-detuning_hwhm * hwhm / self.mod_efficiency)
    }

    /// Ring parked half an FSR away from `tone`: transparent apart from its
    /// Lorentzian tail.
    pub fn parked(&self, tone: f64) -> RingParams {
        self.at(tone + self.fsr / 2.0, 0.0)
    }

    /// Volts per half-linewidth of resonance shift.
    pub fn volts_per_hwhm(&self) -> f64 {
        self.at(0.0, 0.0).fwhm() / 2.0 / self.mod_efficiency
    }
}
