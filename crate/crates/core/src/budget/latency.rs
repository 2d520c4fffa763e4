//! Propagation, latency and CoMP synchronization budgets.

use serde::{Deserialize, Serialize};

use crate::budget::services::ServiceRequirement;
use crate::budget::topology::{NodeKind, TopologySpec};
use crate::error::{Error, Result};

/// One-way group delay of standard fiber.
pub const FIBER_DELAY_US_PER_KM: f64 = 5.0;

/// CoMP joint processing: one-way latency must stay below this.
pub const COMP_LATENCY_LIMIT_US: f64 = 150.0;

/// CoMP joint processing: largest tolerated RU-to-RU delay difference.
pub const COMP_SYNC_TOLERANCE_US: f64 = 1.5;

/// Fiber delay in µs, one way or round trip.
pub fn propagation_delay(length_km: f64, round_trip: bool) -> f64 {
    let one_way = length_km * FIBER_DELAY_US_PER_KM;
    if round_trip {
        2.0 * one_way
    } else {
        one_way
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatencyItem {
    pub label: String,
    pub delay_us: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatencyReport {
    pub path: Vec<String>,
    pub service: String,
    pub items: Vec<LatencyItem>,
    pub propagation_us: f64,
    pub processing_us: f64,
    pub total_us: f64,
    pub limit_us: f64,
    pub pass: bool,
}

/// Processing a node adds when it forwards traffic, including the eCPRI
/// queueing allowance if it terminates eCPRI.
fn node_delay(topo: &TopologySpec, id: &str) -> Result<f64> {
    let n = topo.node(id)?;
    let ecpri = if n.ecpri { topo.params.ecpri_delay_us } else { 0.0 };
    Ok(n.processing_delay_us + ecpri)
}

/// One-way user-plane latency along `path`.
///
/// Each node except the last contributes its processing delay (it forwards
/// the traffic), so budgets over consecutive sub-paths add up exactly.
pub fn latency_budget(
    topo: &TopologySpec,
    path: &[String],
    service: &ServiceRequirement,
) -> Result<LatencyReport> {
    service.validate()?;
    let links = topo.path_links(path)?;
    let mut items = Vec::new();
    let mut processing = 0.0;
    let mut propagation = 0.0;
    for (i, id) in path.iter().enumerate() {
        if i + 1 == path.len() {
            break;
        }
        let d = node_delay(topo, id)?;
        if d > 0.0 {
            items.push(LatencyItem {
                label: format!("processing at {id}"),
                delay_us: d,
            });
        }
        processing += d;
        let l = links[i];
        let p = l.fiber.length_km * l.fiber.group_delay_us_per_km;
        items.push(LatencyItem {
            label: format!("fiber {} -> {} ({} km)", path[i], path[i + 1], l.fiber.length_km),
            delay_us: p,
        });
        propagation += p;
    }
    let total = propagation + processing;
    let limit = service.one_way_latency_limit_ms * 1e3;
    Ok(LatencyReport {
        path: path.to_vec(),
        service: service.name.clone(),
        items,
        propagation_us: propagation,
        processing_us: processing,
        total_us: total,
        limit_us: limit,
        pass: total <= limit,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuLatency {
    pub ru: String,
    pub one_way_us: f64,
    pub within_limit: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OffendingPair {
    pub a: String,
    pub b: String,
    pub differential_us: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub controller: String,
    pub sync_compensation: bool,
    pub rus: Vec<RuLatency>,
    pub max_differential_us: f64,
    /// RU pairs whose delay difference exceeds the sync tolerance. Listed
    /// even when the controller compensates.
    pub offending_pairs: Vec<OffendingPair>,
    pub latency_ok: bool,
    pub sync_ok: bool,
    pub pass: bool,
}

/// Can `controller` run CoMP joint processing across `ru_ids`?
pub fn comp_feasibility(
    topo: &TopologySpec,
    ru_ids: &[String],
    controller: &str,
) -> Result<FeasibilityReport> {
    let ctrl = topo.node(controller)?;
    let mut rus = Vec::with_capacity(ru_ids.len());
    for ru in ru_ids {
        let n = topo.node(ru)?;
        if n.kind != NodeKind::Ru && n.kind != NodeKind::Onu {
            return Err(Error::Topology(format!(
                "`{ru}` is a {:?} node, not a radio unit",
                n.kind
            )));
        }
        let path = topo.path_between(controller, ru)?;
        let r = latency_budget(topo, &path, &ServiceRequirement::comp())?;
        rus.push(RuLatency {
            ru: ru.clone(),
            one_way_us: r.total_us,
            within_limit: r.total_us < COMP_LATENCY_LIMIT_US,
        });
    }
    let mut offending = Vec::new();
    let mut max_diff: f64 = 0.0;
    for i in 0..rus.len() {
        for j in i + 1..rus.len() {
            let d = (rus[i].one_way_us - rus[j].one_way_us).abs();
            max_diff = max_diff.max(d);
            if d > COMP_SYNC_TOLERANCE_US {
                offending.push(OffendingPair {
                    a: rus[i].ru.clone(),
                    b: rus[j].ru.clone(),
                    differential_us: d,
                });
            }
        }
    }
    let latency_ok = rus.iter().all(|r| r.within_limit);
    let sync_ok = offending.is_empty() || ctrl.sync_compensation;
    Ok(FeasibilityReport {
        controller: controller.to_string(),
        sync_compensation: ctrl.sync_compensation,
        rus,
        max_differential_us: max_diff,
        offending_pairs: offending,
        latency_ok,
        sync_ok,
        pass: latency_ok && sync_ok,
    })
}
