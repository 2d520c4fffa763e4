//! Signal generation, detection and quality metrics.

pub mod metrics;
pub mod ofdm;
pub mod qam;
pub mod rf;

pub use metrics::{analytic_awgn_ber, ber_evm_metrics, BerReport, DEFAULT_FEC_THRESHOLD};
pub use ofdm::{
    demodulate_frames, demodulate_ofdm, generate_ofdm, grid_noise_variance, ofdm_back_end,
    ofdm_front_end, OfdmConfig, OfdmGrid, OfdmRx,
};
pub use qam::Qam;
pub use rf::{add_awgn, downconvert, hilbert_pair, upconvert_real};
