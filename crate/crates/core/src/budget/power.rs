//! Optical power ledger along a path.

use serde::{Deserialize, Serialize};

use crate::budget::topology::{ChipPackaging, TopologySpec};
use crate::channel::fiber::splitter_loss_db;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerItem {
    pub label: String,
    /// Gain in dB; losses are negative.
    pub db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerReport {
    pub path: Vec<String>,
    pub items: Vec<PowerItem>,
    pub total_db: f64,
    pub launch_power_dbm: f64,
    pub received_power_dbm: f64,
    pub sensitivity_dbm: f64,
    pub margin_db: f64,
    pub pass: bool,
}

fn node_items(topo: &TopologySpec, id: &str, items: &mut Vec<PowerItem>) -> Result<()> {
    let n = topo.node(id)?;
    let p = &topo.params;
    if let Some(ports) = n.split_ports {
        items.push(PowerItem {
            label: format!("{id}: 1:{ports} split"),
            db: -splitter_loss_db(ports, 0.0),
        });
    }
    if let Some(chip) = n.chip {
        let (name, facet) = match chip {
            ChipPackaging::Packaged => ("packaged", p.packaged_facet_loss_db),
            ChipPackaging::Bare => ("bare", p.bare_facet_loss_db),
        };
        items.push(PowerItem {
            label: format!("{id}: chip coupling, 2 {name} facets"),
            db: -2.0 * facet,
        });
    }
    if n.bus_stages > 0 {
        items.push(PowerItem {
            label: format!("{id}: bus insertion, {} stages", n.bus_stages),
            db: -(n.bus_stages as f64) * p.bus_stage_loss_db,
        });
    }
    Ok(())
}

/// Itemized loss from the first to the last node of `path`, and the margin
/// left at the receiver.
pub fn power_budget(topo: &TopologySpec, path: &[String]) -> Result<PowerReport> {
    let links = topo.path_links(path)?;
    let mut items = Vec::new();
    for (i, id) in path.iter().enumerate() {
        node_items(topo, id, &mut items)?;
        if let Some(l) = links.get(i) {
            items.push(PowerItem {
                label: format!("fiber {} -> {} ({} km)", path[i], path[i + 1], l.fiber.length_km),
                db: -l.fiber.loss_db(),
            });
            for c in &l.component_losses {
                items.push(PowerItem {
                    label: format!("{} -> {}: {}", path[i], path[i + 1], c.label),
                    db: -c.db,
                });
            }
        }
    }
    let total: f64 = items.iter().map(|i| i.db).sum();
    let launch = topo.params.launch_power_dbm;
    let rx = launch + total;
    let sens = topo.params.receiver_sensitivity_dbm;
    Ok(PowerReport {
        path: path.to_vec(),
        items,
        total_db: total,
        launch_power_dbm: launch,
        received_power_dbm: rx,
        sensitivity_dbm: sens,
        margin_db: rx - sens,
        pass: rx >= sens,
    })
}
