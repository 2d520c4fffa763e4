//! Behavioral models of the silicon-photonic building blocks.

pub mod bus;
pub mod comb;
pub mod filter;
pub mod iq;
pub mod mrm;
pub mod ring;
pub mod subcarrier;

pub use bus::{cascade_bus, BusStage, Device, DEFAULT_PASSBAND_LOSS_DB};
pub use comb::{comb_source, CombSpec};
pub use filter::{drop_filter, DropFilterSpec};
pub use iq::{image_rejection_db, iq_mrm_ssb, IqBus, IqBusRing, IqMrmConfig, Sideband};
pub use mrm::{apply_mrm, MrmKernel};
pub use ring::{ring_response, ring_response_at, sweep, thermal_tune, RingParams, SweepPoint};
pub use subcarrier::{carrier_suppression_db, find_tone, generate_subcarriers, SubcarrierGenerator};
