//! Tree model of an optical access network.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::channel::fiber::FiberParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    CentralOffice,
    SmartEdge,
    Splitter,
    Onu,
    Ru,
}

/// How a photonic chip at a node is coupled to fiber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChipPackaging {
    Packaged,
    Bare,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    #[serde(default)]
    pub processing_delay_us: f64,
    /// Controller can compensate differential delay between its RUs.
    #[serde(default)]
    pub sync_compensation: bool,
    /// Node terminates eCPRI and adds the topology's eCPRI queueing delay.
    #[serde(default)]
    pub ecpri: bool,
    /// Output ports of a splitter.
    #[serde(default)]
    pub split_ports: Option<u32>,
    /// Photonic chip in the signal path (two fiber facets).
    #[serde(default)]
    pub chip: Option<ChipPackaging>,
    /// Ring stages the signal passes on the chip's bus.
    #[serde(default)]
    pub bus_stages: u32,
}

impl Node {
    pub fn new(id: &str, kind: NodeKind) -> Self {
        Self {
            id: id.to_string(),
            kind,
            processing_delay_us: 0.0,
            sync_compensation: false,
            ecpri: false,
            split_ports: None,
            chip: None,
            bus_stages: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentLoss {
    pub label: String,
    pub db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Link {
    pub from: String,
    pub to: String,
    pub fiber: FiberParams,
    #[serde(default)]
    pub component_losses: Vec<ComponentLoss>,
}

impl Link {
    pub fn new(from: &str, to: &str, length_km: f64) -> Self {
        Self {
            from: from.to_string(),
            to: to.to_string(),
            fiber: FiberParams::new(length_km),
            component_losses: Vec::new(),
        }
    }
}

fn default_ecpri_delay() -> f64 {
    50.0
}

fn default_packaged() -> f64 {
    2.5
}

fn default_bare() -> f64 {
    6.0
}

fn default_bus_stage() -> f64 {
    crate::photonics::DEFAULT_PASSBAND_LOSS_DB
}

fn default_launch() -> f64 {
    5.0
}

fn default_sensitivity() -> f64 {
    -20.0
}

/// Budget-wide constants. All have documented defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetParams {
    #[serde(default = "default_ecpri_delay")]
    pub ecpri_delay_us: f64,
    #[serde(default = "default_packaged")]
    pub packaged_facet_loss_db: f64,
    #[serde(default = "default_bare")]
    pub bare_facet_loss_db: f64,
    #[serde(default = "default_bus_stage")]
    pub bus_stage_loss_db: f64,
    #[serde(default = "default_launch")]
    pub launch_power_dbm: f64,
    /// Received power needed at the FEC threshold.
    #[serde(default = "default_sensitivity")]
    pub receiver_sensitivity_dbm: f64,
}

impl Default for BudgetParams {
    fn default() -> Self {
        Self {
            ecpri_delay_us: default_ecpri_delay(),
            packaged_facet_loss_db: default_packaged(),
            bare_facet_loss_db: default_bare(),
            bus_stage_loss_db: default_bus_stage(),
            launch_power_dbm: default_launch(),
            receiver_sensitivity_dbm: default_sensitivity(),
        }
    }
}

/// Validated access-network tree rooted at the central office.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologySpec {
    #[serde(default)]
    pub params: BudgetParams,
    pub nodes: Vec<Node>,
    pub links: Vec<Link>,
}

impl TopologySpec {
    pub fn new(nodes: Vec<Node>, links: Vec<Link>) -> Result<Self> {
        let t = Self {
            params: BudgetParams::default(),
            nodes,
            links,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn node(&self, id: &str) -> Result<&Node> {
        self.nodes
            .iter()
            .find(|n| n.id == id)
            .ok_or_else(|| Error::Topology(format!("unknown node `{id}`")))
    }

    pub fn root(&self) -> Result<&Node> {
        let mut roots = self.nodes.iter().filter(|n| n.kind == NodeKind::CentralOffice);
        match (roots.next(), roots.next()) {
            (Some(r), None) => Ok(r),
            (None, _) => Err(Error::Topology("no central_office node".into())),
            (Some(a), Some(b)) => Err(Error::Topology(format!(
                "more than one central_office: `{}` and `{}`",
                a.id, b.id
            ))),
        }
    }

    /// Check the strict-tree invariants.
    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeMap::new();
        for n in &self.nodes {
            if seen.insert(n.id.as_str(), ()).is_some() {
                return Err(Error::Topology(format!("duplicate node id `{}`", n.id)));
            }
            if !(n.processing_delay_us >= 0.0) {
                return Err(Error::Topology(format!(
                    "node `{}` has negative processing delay",
                    n.id
                )));
            }
            if n.kind == NodeKind::Splitter && n.split_ports.unwrap_or(0) < 2 {
                return Err(Error::Topology(format!(
                    "splitter `{}` needs split_ports >= 2",
                    n.id
                )));
            }
        }
        let root = self.root()?;
        let mut parent: BTreeMap<&str, &str> = BTreeMap::new();
        for l in &self.links {
            self.node(&l.from)?;
            self.node(&l.to)?;
            if !(l.fiber.length_km >= 0.0) {
                return Err(Error::Topology(format!(
                    "link {} -> {} has negative length",
                    l.from, l.to
                )));
            }
            if l.to == root.id {
                return Err(Error::Topology(format!(
                    "link {} -> {} points into the central office",
                    l.from, l.to
                )));
            }
            if let Some(p) = parent.insert(l.to.as_str(), l.from.as_str()) {
                return Err(Error::Topology(format!(
                    "node `{}` has two parents (`{p}` and `{}`)",
                    l.to, l.from
                )));
            }
        }
        // every node must reach the root by following parents, without cycles
        for n in &self.nodes {
            let mut cur = n.id.as_str();
            let mut steps = 0;
            while cur != root.id {
                cur = parent.get(cur).copied().ok_or_else(|| {
                    Error::Topology(format!("node `{}` is not connected to the central office", n.id))
                })?;
                steps += 1;
                if steps > self.nodes.len() {
                    return Err(Error::Topology(format!("cycle through node `{}`", n.id)));
                }
            }
        }
        Ok(())
    }

    /// Link joining two adjacent nodes, in either direction.
    pub fn link_between(&self, a: &str, b: &str) -> Option<&Link> {
        self.links
            .iter()
            .find(|l| (l.from == a && l.to == b) || (l.from == b && l.to == a))
    }

    /// The unique tree path from `from` to `to`, as node ids.
    pub fn path_between(&self, from: &str, to: &str) -> Result<Vec<String>> {
        self.node(from)?;
        self.node(to)?;
        let mut prev: BTreeMap<&str, &str> = BTreeMap::new();
        let mut queue = VecDeque::from([from]);
        prev.insert(from, from);
        while let Some(cur) = queue.pop_front() {
            if cur == to {
                break;
            }
            for l in &self.links {
                let next = if l.from == cur {
                    l.to.as_str()
                } else if l.to == cur {
                    l.from.as_str()
                } else {
                    continue;
                };
                if !prev.contains_key(next) {
                    prev.insert(next, cur);
                    queue.push_back(next);
                }
            }
        }
        if !prev.contains_key(to) {
            return Err(Error::Topology(format!("no path from `{from}` to `{to}`")));
        }
        let mut path = vec![to.to_string()];
        let mut cur = to;
        while cur != from {
            cur = prev[cur];
            path.push(cur.to_string());
        }
        path.reverse();
        Ok(path)
    }

    /// Links along a node path; fails on a hop with no link.
    pub fn path_links(&self, path: &[String]) -> Result<Vec<&Link>> {
        for id in path {
            self.node(id)?;
        }
        path.windows(2)
            .map(|w| {
                self.link_between(&w[0], &w[1]).ok_or_else(|| {
                    Error::Topology(format!("path is disconnected between `{}` and `{}`", w[0], w[1]))
                })
            })
            .collect()
    }
}
