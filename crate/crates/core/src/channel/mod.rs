//! Fiber, splitters, amplifiers and photodetection.

pub mod amp;
pub mod detector;
pub mod fiber;

pub use amp::{amplify_ase, ase_psd};
pub use detector::{photodetect, PdParams};
pub use fiber::{
    dsb_fading, first_fading_null, propagate_fiber, split_power, splitter_loss_db, FiberParams,
};
