//! Report files: JSON metrics, CSV waterfalls, spectra and device sweeps.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::photonics::ring::sweep;
use crate::scenario::config::ScenarioConfig;
use crate::scenario::runner::{MetricsReport, SignalCurve, Spectrum};
use crate::subsystems::onu::Band;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formats {
    Json,
    Csv,
    Both,
}

impl Formats {
    pub fn json(self) -> bool {
        matches!(self, Formats::Json | Formats::Both)
    }

    pub fn csv(self) -> bool {
        matches!(self, Formats::Csv | Formats::Both)
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |e| Error::Io {
        path: path.display().to_string(),
        source: e,
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source: std::io::Error::other(e.to_string()),
    }
}

/// File-name-safe form of a signal id (`ch0/tunnel1/rf0` -> `ch0_tunnel1_rf0`).
pub fn file_stem(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect()
}

/// Write `rows` under `header` as CSV. With no rows the file holds only the
/// header.
pub fn write_csv<const N: usize>(path: &Path, header: [&str; N], rows: &[[String; N]]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for r in rows {
        w.write_record(r).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn write_waterfall(path: &Path, curve: &SignalCurve) -> Result<()> {
    let rows: Vec<[String; 5]> = curve
        .points
        .iter()
        .map(|p| {
            [
                p.rx_power_dbm.to_string(),
                p.metrics.ber.to_string(),
                p.metrics.evm_rms.to_string(),
                p.metrics.bit_errors.to_string(),
                p.metrics.total_bits.to_string(),
            ]
        })
        .collect();
    write_csv(
        path,
        ["rx_power_dbm", "ber", "evm_rms", "bit_errors", "total_bits"],
        &rows,
    )
}

pub fn write_spectrum(path: &Path, s: &Spectrum) -> Result<()> {
    let rows: Vec<[String; 2]> = s
        .points
        .iter()
        .map(|(f, p)| [f.to_string(), p.to_string()])
        .collect();
    write_csv(path, ["freq_hz", "psd_dbm_per_hz"], &rows)
}

pub fn to_json(report: &MetricsReport) -> Result<String> {
    serde_json::to_string_pretty(report).map_err(|e| Error::Parse(e.to_string()))
}

/// Write the report into `dir`; returns the files written.
pub fn emit_reports(report: &MetricsReport, dir: &Path, formats: Formats) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    if formats.json() {
        let p = dir.join(format!("{}.json", file_stem(&report.scenario)));
        fs::write(&p, to_json(report)? + "\n").map_err(io_err(&p))?;
        written.push(p);
    }
    if formats.csv() {
        for c in &report.downlink {
            let p = dir.join(format!("waterfall_{}.csv", file_stem(&c.id)));
            write_waterfall(&p, c)?;
            written.push(p);
        }
        for s in &report.spectra {
            let p = dir.join(format!("spectrum_{}.csv", file_stem(&s.label)));
            write_spectrum(&p, s)?;
            written.push(p);
        }
    }
    Ok(written)
}

/// Read back a JSON report written by [`emit_reports`].
pub fn load_report(path: &Path) -> Result<MetricsReport> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Frequency responses of the devices serving channel 0 of a scenario, over
/// its slot plus one slot width either side. Columns: freq_hz (absolute),
/// through_db, drop_db.
pub fn device_sweeps(cfg: &ScenarioConfig, points: usize) -> Result<Vec<(String, Vec<[f64; 3]>)>> {
    cfg.validate()?;
    let ch = cfg.plan.channels[0];
    let (lo, hi) = ch.slot_bounds();
    let (start, stop) = (lo - ch.slot_width, hi + ch.slot_width);
    let n = points.max(2);
    let freqs: Vec<f64> = (0..n)
        .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
        .collect();
    let db = |x: f64| 10.0 * x.max(1e-30).log10();
    let mut out = Vec::new();
    let rings = [
        ("olt_iq_ring", cfg.olt.ring.at(ch.center_freq, cfg.olt.bias_hwhm)),
        ("smart_edge_clock_ring", cfg.smart_edge.ring.at(ch.center_freq, 0.0)),
        (
            "smart_edge_tunnel0_ring",
            cfg.smart_edge.ring.at(ch.subcarrier_freq(0), cfg.smart_edge.tunnel_bias_hwhm),
        ),
    ];
    for (name, r) in rings {
        let rows = sweep(&r, start, stop, n)
            .into_iter()
            .map(|p| [p.freq_hz, p.through_db, p.drop_db])
            .collect();
        out.push((name.to_string(), rows));
    }
    let dig = cfg.digital_ofdm()?;
    let onu = crate::subsystems::onu::OnuConfig::design(
        &ch,
        Band::new(cfg.olt.digital_if, dig.effective_bandwidth()),
        cfg.onu.mrr1,
        cfg.onu.tunnel_filter,
        cfg.onu.carrier_tap_fraction,
        cfg.onu.pd,
        cfg.onu.uplink,
    );
    let filters = [
        ("onu_mrr1", onu.mrr1),
        ("onu_mrr2", onu.mrr2),
        ("onu_mrr3", onu.mrr3),
        ("smart_edge_intercept", cfg.smart_edge.intercept.filter_for(ch.center_freq)),
    ];
    for (name, f) in filters {
        let rows = freqs
            .iter()
            .map(|&x| {
                let (t, d) = f.response(x);
                [x, db(t.norm_sqr()), db(d.norm_sqr())]
            })
            .collect();
        out.push((name.to_string(), rows));
    }
    Ok(out)
}

pub fn write_device_sweeps(cfg: &ScenarioConfig, dir: &Path, points: usize) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    for (name, rows) in device_sweeps(cfg, points)? {
        let p = dir.join(format!("device_{name}.csv"));
        let rows: Vec<[String; 3]> = rows
            .iter()
            .map(|r| [r[0].to_string(), r[1].to_string(), r[2].to_string()])
            .collect();
        write_csv(&p, ["freq_hz", "through_db", "drop_db"], &rows)?;
        written.push(p);
    }
    Ok(written)
}
