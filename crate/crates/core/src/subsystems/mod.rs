//! Central office, smart edge and ONU built from the device models.

pub mod olt;
pub mod onu;
pub mod plan;
pub mod rx;
pub mod smart_edge;

pub use olt::{digital_signals, iq_drives, olt_transmit, Olt, OltConfig};
pub use onu::{
    onu_receive, onu_remodulate, Band, CarrierLedger, FilterShape, Onu, OnuConfig, OnuCurrents,
    OnuDrops, UplinkConfig, UplinkOutput,
};
pub use plan::{RingDesign, WdmChannel, WdmPlan};
pub use rx::{band_envelope, score_ofdm};
pub use rx as receivers;
pub use smart_edge::{
    smart_edge_intercept_uplink, smart_edge_overlay, AmpConfig, InterceptConfig, SmartEdge,
    SmartEdgeConfig, TunnelPayloads,
};
