//! Access-network budgets: latency, CoMP synchronization, optical power and
//! fronthaul line rate over a tree topology. No waveforms involved.

pub mod fronthaul;
pub mod latency;
pub mod power;
pub mod services;
pub mod topology;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use fronthaul::{
    find_preset, fronthaul_dimension, presets, FronthaulKind, FronthaulPreset, FronthaulRate,
    FronthaulSpec,
};
pub use latency::{
    comp_feasibility, latency_budget, propagation_delay, FeasibilityReport, LatencyReport,
    COMP_LATENCY_LIMIT_US, COMP_SYNC_TOLERANCE_US, FIBER_DELAY_US_PER_KM,
};
pub use power::{power_budget, PowerReport};
pub use services::{catalog, find_service, ServiceRequirement};
pub use topology::{
    BudgetParams, ChipPackaging, ComponentLoss, Link, Node, NodeKind, TopologySpec,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatencyQuery {
    pub path: Vec<String>,
    pub service: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompQuery {
    pub controller: String,
    pub rus: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerQuery {
    pub path: Vec<String>,
}

/// Either a catalog preset by name or an inline spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FronthaulQuery {
    Preset { preset: String },
    Inline(FronthaulSpec),
}

/// A budget input file: the topology plus the analyses to run on it. With
/// no queries, every ONU/RU leaf is budgeted from the central office
/// against eMBB and all fronthaul presets are dimensioned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetFile {
    #[serde(default)]
    pub params: BudgetParams,
    pub nodes: Vec<Node>,
    pub links: Vec<Link>,
    #[serde(default)]
    pub latency: Vec<LatencyQuery>,
    #[serde(default)]
    pub comp: Vec<CompQuery>,
    #[serde(default)]
    pub power: Vec<PowerQuery>,
    #[serde(default)]
    pub fronthaul: Vec<FronthaulQuery>,
}

pub const SAMPLE_TOPOLOGY: &str = include_str!("../../scenarios/oan_topology.toml");

impl BudgetFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn topology(&self) -> Result<TopologySpec> {
        let t = TopologySpec {
            params: self.params,
            nodes: self.nodes.clone(),
            links: self.links.clone(),
        };
        t.validate()?;
        Ok(t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedRate {
    pub name: String,
    pub rf_bandwidth: f64,
    #[serde(flatten)]
    pub rate: FronthaulRate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetReport {
    pub params: BudgetParams,
    pub latency: Vec<LatencyReport>,
    pub comp: Vec<FeasibilityReport>,
    pub power: Vec<PowerReport>,
    pub fronthaul: Vec<NamedRate>,
}

fn leaves(t: &TopologySpec) -> Vec<&Node> {
    t.nodes
        .iter()
        .filter(|n| matches!(n.kind, NodeKind::Onu | NodeKind::Ru))
        .collect()
}

pub fn run_budget(file: &BudgetFile) -> Result<BudgetReport> {
    let topo = file.topology()?;
    let root = topo.root()?.id.clone();
    let mut latency_q = file.latency.clone();
    let mut power_q = file.power.clone();
    let mut fronthaul_q = file.fronthaul.clone();
    if latency_q.is_empty() && power_q.is_empty() && file.comp.is_empty() && fronthaul_q.is_empty() {
        for n in leaves(&topo) {
            let path = topo.path_between(&root, &n.id)?;
            latency_q.push(LatencyQuery {
                path: path.clone(),
                service: "embb".into(),
            });
            power_q.push(PowerQuery { path });
        }
        fronthaul_q = presets()
            .into_iter()
            .map(|p| FronthaulQuery::Preset { preset: p.name })
            .collect();
    }
    let latency = latency_q
        .iter()
        .map(|q| latency_budget(&topo, &q.path, &find_service(&q.service)?))
        .collect::<Result<_>>()?;
    let comp = file
        .comp
        .iter()
        .map(|q| comp_feasibility(&topo, &q.rus, &q.controller))
        .collect::<Result<_>>()?;
    let power = power_q
        .iter()
        .map(|q| power_budget(&topo, &q.path))
        .collect::<Result<_>>()?;
    let fronthaul = fronthaul_q
        .iter()
        .map(|q| {
            let (name, spec) = match q {
                FronthaulQuery::Preset { preset } => (preset.clone(), find_preset(preset)?),
                FronthaulQuery::Inline(s) => (format!("{:?}", s.kind).to_lowercase(), s.clone()),
            };
            Ok(NamedRate {
                name,
                rf_bandwidth: spec.rf_bandwidth,
                rate: fronthaul_dimension(&spec)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(BudgetReport {
        params: topo.params,
        latency,
        comp,
        power,
        fronthaul,
    })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Human-readable rendering of a budget report.
pub fn render_table(r: &BudgetReport) -> String {
    let mut s = String::new();
    if !r.latency.is_empty() {
        let _ = writeln!(s, "LATENCY (one way)");
        let _ = writeln!(
            s,
            "  {:<32} {:<16} {:>10} {:>10} {:>10}  result",
            "path", "service", "fiber_us", "proc_us", "limit_us"
        );
        for l in &r.latency {
            let _ = writeln!(
                s,
                "  {:<32} {:<16} {:>10.2} {:>10.2} {:>10.2}  {} ({:.2} us)",
                l.path.join(">"),
                l.service,
                l.propagation_us,
                l.processing_us,
                l.limit_us,
                verdict(l.pass),
                l.total_us
            );
        }
    }
    for c in &r.comp {
        let _ = writeln!(
            s,
            "\nCOMP at {} (sync compensation: {})",
            c.controller,
            if c.sync_compensation { "yes" } else { "no" }
        );
        for ru in &c.rus {
            let _ = writeln!(
                s,
                "  {:<16} {:>10.2} us  {}",
                ru.ru,
                ru.one_way_us,
                verdict(ru.within_limit)
            );
        }
        for p in &c.offending_pairs {
            let _ = writeln!(s, "  pair {} / {}: differential {:.2} us", p.a, p.b, p.differential_us);
        }
        let _ = writeln!(
            s,
            "  max differential {:.2} us  {}",
            c.max_differential_us,
            verdict(c.pass)
        );
    }
    for p in &r.power {
        let _ = writeln!(s, "\nPOWER {}", p.path.join(">"));
        for i in &p.items {
            let _ = writeln!(s, "  {:<48} {:>8.2} dB", i.label, i.db);
        }
        let _ = writeln!(
            s,
            "  total {:.2} dB, received {:.2} dBm, margin {:.2} dB  {}",
            p.total_db,
            p.received_power_dbm,
            p.margin_db,
            verdict(p.pass)
        );
    }
    if !r.fronthaul.is_empty() {
        let _ = writeln!(s, "\nFRONTHAUL");
        let _ = writeln!(
            s,
            "  {:<16} {:>12} {:>16} {:>10}",
            "name", "rf_MHz", "line_rate", "expansion"
        );
        for f in &r.fronthaul {
            let unit = if f.rate.kind == FronthaulKind::Arof { "MHz" } else { "Mb/s" };
            let _ = writeln!(
                s,
                "  {:<16} {:>12.2} {:>11.2} {:<4} {:>9.2}x",
                f.name,
                f.rf_bandwidth / 1e6,
                f.rate.line_rate / 1e6,
                unit,
                f.rate.expansion_factor
            );
        }
    }
    s
}
