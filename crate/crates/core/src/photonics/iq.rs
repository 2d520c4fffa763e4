//! IQ modulator built from two MRM arms for single-sideband generation.
//!
//! The input is split equally into I and Q arms, each arm modulates with its
//! own ring, the Q arm is phase shifted by `±branch_phase` and the arms are
//! recombined. With a Hilbert drive pair and a quarter-wave shift the two
//! arms' sidebands cancel on one side of the carrier.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::photonics::mrm::MrmKernel;
use crate::photonics::ring::RingParams;
use crate::waveform::ComplexWaveform;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sideband {
    Upper,
    Lower,
}

impl Sideband {
    pub fn opposite(self) -> Self {
        match self {
            Sideband::Upper => Sideband::Lower,
            Sideband::Lower => Sideband::Upper,
        }
    }

    /// +1 for upper, -1 for lower.
    pub fn sign(self) -> f64 {
        match self {
            Sideband::Upper => 1.0,
            Sideband::Lower => -1.0,
        }
    }
}

fn quarter_wave() -> f64 {
    FRAC_PI_2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IqMrmConfig {
    pub ring_i: RingParams,
    pub ring_q: RingParams,
    #[serde(default = "quarter_wave")]
    pub branch_phase: f64,
    pub sideband: Sideband,
}

impl IqMrmConfig {
    pub fn new(ring: RingParams, sideband: Sideband) -> Self {
        Self {
            ring_i: ring,
            ring_q: ring,
            branch_phase: FRAC_PI_2,
            sideband,
        }
    }

    /// Phase applied to the Q arm before recombination.
    pub fn q_phase(&self) -> f64 {
        self.sideband.sign() * self.branch_phase
    }
}

fn drive_range(volts: &[f64]) -> (f64, f64) {
    let (lo, hi) = volts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if lo.is_finite() {
        (lo, hi)
    } else {
        (0.0, 0.0)
    }
}

/// Recombine arm outputs: `(i + e^{i psi} q) / sqrt(2)`.
fn combine(i_arm: &ComplexWaveform, q_arm: &ComplexWaveform, psi: f64) -> ComplexWaveform {
    let rot = Complex64::from_polar(FRAC_1_SQRT_2, psi);
    i_arm.with_samples(
        i_arm
            .samples
            .iter()
            .zip(&q_arm.samples)
            .map(|(a, b)| a * FRAC_1_SQRT_2 + b * rot)
            .collect(),
    )
}

/// Single-sideband modulation of the tone resonant with the configured rings.
///
/// `i_drive` and `q_drive` are real electrical waveforms (only the real part
/// is used); for SSB `q_drive` should be the Hilbert pair of `i_drive`.
pub fn iq_mrm_ssb(
    field: &ComplexWaveform,
    config: &IqMrmConfig,
    i_drive: &ComplexWaveform,
    q_drive: &ComplexWaveform,
) -> Result<ComplexWaveform> {
    field.check_same_rate(i_drive)?;
    field.check_same_rate(q_drive)?;
    for d in [i_drive, q_drive] {
        if d.len() != field.len() {
            return Err(Error::LengthMismatch {
                left: field.len(),
                right: d.len(),
            });
        }
    }
    let half = field.scaled(FRAC_1_SQRT_2);
    let arm = |ring: &RingParams, drive: &ComplexWaveform| -> Result<ComplexWaveform> {
        let volts: Vec<f64> = drive.samples.iter().map(|s| ring.bias_volt + s.re).collect();
        let (lo, hi) = drive_range(&volts);
        MrmKernel::new(ring, field.len(), field.sample_rate, field.ref_freq, lo, hi)?
            .apply(&half, &volts)
    };
    let i_arm = arm(&config.ring_i, i_drive)?;
    let q_arm = arm(&config.ring_q, q_drive)?;
    Ok(combine(&i_arm, &q_arm, config.q_phase()))
}

/// One ring in an IQ bus arm, with the peak drive amplitude it must support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IqBusRing {
    pub ring_i: RingParams,
    pub ring_q: RingParams,
    pub peak_volts: f64,
}

/// Block-reusable IQ modulator whose arms are buses of rings, one pair per
/// WDM channel. Each pair gets its own drive, so every channel can be
/// modulated independently with a single device.
#[derive(Debug, Clone)]
pub struct IqBus {
    i_arm: Vec<(MrmKernel, f64)>,
    q_arm: Vec<(MrmKernel, f64)>,
    psi: f64,
}

impl IqBus {
    pub fn new(
        rings: &[IqBusRing],
        branch_phase: f64,
        sideband: Sideband,
        len: usize,
        sample_rate: f64,
        ref_freq: f64,
    ) -> Result<Self> {
        let build = |p: &RingParams, peak: f64| -> Result<(MrmKernel, f64)> {
            let k = MrmKernel::new(
                p,
                len,
                sample_rate,
                ref_freq,
                p.bias_volt - peak.abs(),
                p.bias_volt + peak.abs(),
            )?;
            Ok((k, p.bias_volt))
        };
        Ok(Self {
            i_arm: rings
                .iter()
                .map(|r| build(&r.ring_i, r.peak_volts))
                .collect::<Result<_>>()?,
            q_arm: rings
                .iter()
                .map(|r| build(&r.ring_q, r.peak_volts))
                .collect::<Result<_>>()?,
            psi: sideband.sign() * branch_phase,
        })
    }

    pub fn len(&self) -> usize {
        self.i_arm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.i_arm.is_empty()
    }

    /// `drives[k]` is the `(i, q)` voltage pair for ring pair `k`, without bias.
    pub fn apply(
        &self,
        field: &ComplexWaveform,
        drives: &[(Vec<f64>, Vec<f64>)],
    ) -> Result<ComplexWaveform> {
        if drives.len() != self.i_arm.len() {
            return Err(Error::LengthMismatch {
                left: self.i_arm.len(),
                right: drives.len(),
            });
        }
        let half = field.scaled(FRAC_1_SQRT_2);
        let i_arm = run_arm(&half, &self.i_arm, drives.iter().map(|d| d.0.as_slice()))?;
        let q_arm = run_arm(&half, &self.q_arm, drives.iter().map(|d| d.1.as_slice()))?;
        Ok(combine(&i_arm, &q_arm, self.psi))
    }
}

fn run_arm<'a>(
    input: &ComplexWaveform,
    arm: &[(MrmKernel, f64)],
    drives: impl Iterator<Item = &'a [f64]>,
) -> Result<ComplexWaveform> {
    let mut x = input.clone();
    for ((kernel, bias), drive) in arm.iter().zip(drives) {
        let volts: Vec<f64> = drive.iter().map(|v| v + bias).collect();
        x = kernel.apply(&x, &volts)?;
    }
    Ok(x)
}

/// Analytic image rejection (dB) for a branch phase error `delta` (radians).
pub fn image_rejection_db(delta: f64) -> f64 {
    10.0 * ((1.0 + delta.cos()) / (1.0 - delta.cos())).log10()
}
