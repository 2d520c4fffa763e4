//! Fronthaul line-rate dimensioning for digital (CPRI, eCPRI) and analog
//! radio-over-fiber transport.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CPRI_CONTROL_OVERHEAD: f64 = 16.0 / 15.0;
pub const CPRI_LINE_CODING: f64 = 10.0 / 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FronthaulKind {
    #[serde(rename = "cpri")]
    Cpri,
    #[serde(rename = "ecpri")]
    Ecpri,
    #[serde(rename = "arof")]
    Arof,
}

/// Fields a kind does not use may be left out. CPRI overheads default to
/// 16/15 control and 8b/10b coding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FronthaulSpec {
    pub kind: FronthaulKind,
    pub rf_bandwidth: f64,
    #[serde(default)]
    pub sample_rate: Option<f64>,
    #[serde(default)]
    pub bit_width: Option<u32>,
    #[serde(default)]
    pub n_antenna_streams: Option<u32>,
    #[serde(default)]
    pub control_overhead: Option<f64>,
    #[serde(default)]
    pub line_coding: Option<f64>,
    #[serde(default)]
    pub ecpri_split_factor: Option<f64>,
    #[serde(default)]
    pub guard: Option<f64>,
}

impl FronthaulSpec {
    pub fn cpri(sample_rate: f64, bit_width: u32, streams: u32, rf_bandwidth: f64) -> Self {
        Self {
            kind: FronthaulKind::Cpri,
            rf_bandwidth,
            sample_rate: Some(sample_rate),
            bit_width: Some(bit_width),
            n_antenna_streams: Some(streams),
            control_overhead: None,
            line_coding: None,
            ecpri_split_factor: None,
            guard: None,
        }
    }

    pub fn ecpri(cpri: &FronthaulSpec, split_factor: f64) -> Self {
        Self {
            kind: FronthaulKind::Ecpri,
            ecpri_split_factor: Some(split_factor),
            ..cpri.clone()
        }
    }

    pub fn arof(rf_bandwidth: f64, guard: f64) -> Self {
        Self {
            kind: FronthaulKind::Arof,
            rf_bandwidth,
            sample_rate: None,
            bit_width: None,
            n_antenna_streams: None,
            control_overhead: None,
            line_coding: None,
            ecpri_split_factor: None,
            guard: Some(guard),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FronthaulRate {
    pub kind: FronthaulKind,
    /// Bit rate for digital transport, optical bandwidth (Hz) for ARoF.
    pub line_rate: f64,
    pub expansion_factor: f64,
}

fn need<T>(v: Option<T>, kind: FronthaulKind, field: &str) -> Result<T> {
    v.ok_or_else(|| Error::Validation(format!("{kind:?} fronthaul needs `{field}`")))
}

fn cpri_rate(spec: &FronthaulSpec) -> Result<f64> {
    let k = spec.kind;
    let fs = need(spec.sample_rate, k, "sample_rate")?;
    let bits = need(spec.bit_width, k, "bit_width")?;
    let streams = need(spec.n_antenna_streams, k, "n_antenna_streams")?;
    let ctrl = spec.control_overhead.unwrap_or(CPRI_CONTROL_OVERHEAD);
    let coding = spec.line_coding.unwrap_or(CPRI_LINE_CODING);
    if !(fs > 0.0) || bits == 0 || streams == 0 {
        return Err(Error::Validation(
            "sample_rate, bit_width and n_antenna_streams must be > 0".into(),
        ));
    }
    if !(ctrl >= 1.0 && coding >= 1.0) {
        return Err(Error::Validation(
            "control_overhead and line_coding are multiplicative overheads (>= 1)".into(),
        ));
    }
    Ok(fs * 2.0 * bits as f64 * streams as f64 * ctrl * coding)
}

pub fn fronthaul_dimension(spec: &FronthaulSpec) -> Result<FronthaulRate> {
    if !(spec.rf_bandwidth > 0.0) {
        return Err(Error::Validation("rf_bandwidth must be > 0".into()));
    }
    let line_rate = match spec.kind {
        FronthaulKind::Cpri => cpri_rate(spec)?,
        FronthaulKind::Ecpri => {
            let f = need(spec.ecpri_split_factor, spec.kind, "ecpri_split_factor")?;
            if !(f > 0.0) {
                return Err(Error::Validation("ecpri_split_factor must be > 0".into()));
            }
            cpri_rate(spec)? * f
        }
        FronthaulKind::Arof => {
            let g = need(spec.guard, spec.kind, "guard")?;
            if !(g >= 0.0) {
                return Err(Error::Validation("ARoF guard must be >= 0".into()));
            }
            spec.rf_bandwidth * (1.0 + g)
        }
    };
    Ok(FronthaulRate {
        kind: spec.kind,
        line_rate,
        expansion_factor: line_rate / spec.rf_bandwidth,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FronthaulPreset {
    pub name: String,
    pub spec: FronthaulSpec,
}

/// Standard LTE/NR carriers over CPRI, and analog transport of the same
/// carriers with a 10% guard.
pub fn presets() -> Vec<FronthaulPreset> {
    // (name, channel bandwidth, sample rate)
    let carriers = [
        ("lte_1m4", 1.4e6, 1.92e6),
        ("lte_3", 3e6, 3.84e6),
        ("lte_5", 5e6, 7.68e6),
        ("lte_10", 10e6, 15.36e6),
        ("lte_15", 15e6, 23.04e6),
        ("lte_20", 20e6, 30.72e6),
        ("nr_100", 100e6, 122.88e6),
        ("nr_400", 400e6, 491.52e6),
    ];
    let mut out = Vec::new();
    for (name, bw, fs) in carriers {
        out.push(FronthaulPreset {
            name: format!("cpri_{name}"),
            spec: FronthaulSpec::cpri(fs, 15, 1, bw),
        });
    }
    for (name, bw, _) in carriers {
        out.push(FronthaulPreset {
            name: format!("arof_{name}"),
            spec: FronthaulSpec::arof(bw, 0.1),
        });
    }
    out
}

pub fn find_preset(name: &str) -> Result<FronthaulSpec> {
    presets()
        .into_iter()
        .find(|p| p.name == name)
        .map(|p| p.spec)
        .ok_or_else(|| Error::Validation(format!("unknown fronthaul preset `{name}`")))
}
