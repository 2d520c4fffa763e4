//! 5G service requirements used as latency limits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceRequirement {
    pub name: String,
    pub one_way_latency_limit_ms: f64,
    #[serde(default)]
    pub dl_rate_bps: Option<f64>,
    #[serde(default)]
    pub ul_rate_bps: Option<f64>,
}

impl ServiceRequirement {
    pub fn new(name: &str, latency_ms: f64, dl: Option<f64>, ul: Option<f64>) -> Self {
        Self {
            name: name.to_string(),
            one_way_latency_limit_ms: latency_ms,
            dl_rate_bps: dl,
            ul_rate_bps: ul,
        }
    }

    /// CoMP joint processing latency bound.
    pub fn comp() -> Self {
        Self::new("comp", super::latency::COMP_LATENCY_LIMIT_US / 1e3, None, None)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.one_way_latency_limit_ms > 0.0) {
            return Err(Error::Validation(format!(
                "service `{}`: latency limit must be > 0",
                self.name
            )));
        }
        for r in [self.dl_rate_bps, self.ul_rate_bps].into_iter().flatten() {
            if !(r > 0.0) {
                return Err(Error::Validation(format!(
                    "service `{}`: rates must be > 0",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

/// Built-in service catalog (IMT-2020 targets and application figures).
pub fn catalog() -> Vec<ServiceRequirement> {
    vec![
        ServiceRequirement::new("embb", 4.0, Some(100e6), Some(50e6)),
        ServiceRequirement::new("embb_peak", 4.0, Some(20e9), Some(10e9)),
        ServiceRequirement::new("urllc", 0.5, None, None),
        ServiceRequirement::new("edge_computing", 1.0, None, None),
        ServiceRequirement::comp(),
        ServiceRequirement::new("vr_interactive", 10.0, Some(200e6), None),
        ServiceRequirement::new("vr_vision_limit", 10.0, Some(5.2e9), None),
    ]
}

pub fn find_service(name: &str) -> Result<ServiceRequirement> {
    catalog().into_iter().find(|s| s.name == name).ok_or_else(|| {
        let names: Vec<String> = catalog().into_iter().map(|s| s.name).collect();
        Error::Validation(format!("unknown service `{name}` (known: {})", names.join(", ")))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_is_valid() {
        for s in catalog() {
            s.validate().unwrap();
        }
        assert_eq!(find_service("urllc").unwrap().one_way_latency_limit_ms, 0.5);
        assert!(find_service("4g").is_err());
    }
}
