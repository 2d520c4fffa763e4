//! Small-block test rig shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use rofsim_core::channel::PdParams;
use rofsim_core::photonics::Sideband;
use rofsim_core::rng;
use rofsim_core::signal::{generate_ofdm, upconvert_real, OfdmConfig};
use rofsim_core::subsystems::onu::{Band, FilterShape, OnuConfig, UplinkConfig};
use rofsim_core::subsystems::smart_edge::{InterceptConfig, SmartEdgeConfig};
use rofsim_core::subsystems::{OltConfig, RingDesign, WdmPlan};
use rofsim_core::ComplexWaveform;

pub const FS: f64 = 204.8e9;
pub const N: usize = 1 << 15;
pub const F0: f64 = 193.4e12;
pub const SPACING: f64 = 100e9;
pub const CLOCK: f64 = 20e9;
pub const DIGITAL_IF: f64 = 7e9;
pub const FEC: f64 = 3.8e-3;

/// Reference frequency halfway between the first two channels.
pub fn ref_freq() -> f64 {
    F0 + SPACING / 2.0
}

pub fn plan(n: usize) -> WdmPlan {
    WdmPlan::uniform(n, F0, SPACING, CLOCK)
}

fn fitted(cfg: OfdmConfig) -> OfdmConfig {
    let cfg = cfg.with_sample_rate(FS);
    let spf = N / cfg.symbol_len() - 1;
    cfg.with_symbols_per_frame(spf)
}

pub fn digital_ofdm() -> OfdmConfig {
    fitted(OfdmConfig::new(64, 4, 1.0 / 16.0, 5e9, 8, 31))
}

pub fn rof_ofdm() -> OfdmConfig {
    fitted(OfdmConfig::new(32, 4, 1.0 / 16.0, 1e9, 8, 32))
}

pub fn olt_config() -> OltConfig {
    OltConfig {
        power_per_tone_dbm: 5.0,
        linewidth: 0.0,
        comb_seed: 0,
        ring: RingDesign::default(),
        bias_hwhm: 1.0,
        drive_rms_volts: 0.15,
        digital_if: DIGITAL_IF,
        passband_loss_db: 0.1,
    }
}

pub fn smart_edge_config() -> SmartEdgeConfig {
    SmartEdgeConfig {
        ring: RingDesign::default(),
        clock_volts: 1.0,
        tunnel_bias_hwhm: 1.0 / 3f64.sqrt(),
        tunnel_drive_rms_volts: 0.3,
        passband_loss_db: 0.1,
        amplifier: None,
        intercept: InterceptConfig {
            bandwidth: 4e9,
            order: 3,
            carrier_tap_fraction: 0.37,
            rof_if: -2.5e9,
            rof_bandwidth: 1e9,
        },
    }
}

pub fn quiet_pd() -> PdParams {
    PdParams::noiseless(1.0)
}

pub fn noisy_pd(seed: u64) -> PdParams {
    PdParams {
        responsivity: 1.0,
        thermal_noise_psd: 1e-22,
        include_shot: true,
        seed,
    }
}

pub fn uplink_config(drive: f64) -> UplinkConfig {
    UplinkConfig {
        ring: RingDesign::default(),
        bias_hwhm: 1.0,
        drive_rms_volts: drive,
        sideband: Sideband::Lower,
        digital: Band::new(-8.45e9, digital_ofdm().effective_bandwidth()),
        rof: Band::new(-2.5e9, 1e9),
        rof_level_db: 0.0,
        min_residual_carrier_dbm: -30.0,
    }
}

pub fn onu_config(plan: &WdmPlan, k: usize, uplink_drive: f64) -> OnuConfig {
    OnuConfig::design(
        &plan.channels[k],
        Band::new(DIGITAL_IF, digital_ofdm().effective_bandwidth()),
        FilterShape {
            bandwidth: 12.8e9,
            order: 3,
        },
        FilterShape {
            bandwidth: 10e9,
            order: 3,
        },
        0.37,
        quiet_pd(),
        uplink_config(uplink_drive),
    )
}

pub fn bits(seed: u64, n: usize) -> Vec<u8> {
    rng::random_bits(&mut rng::seeded(seed), n)
}

/// Unit-power OFDM frame zero-padded to the block.
pub fn frame(cfg: &OfdmConfig, bits: &[u8]) -> ComplexWaveform {
    let mut w = generate_ofdm(cfg, bits).unwrap();
    w.samples.resize(N, Complex64::new(0.0, 0.0));
    w
}

/// Real RoF payload: OFDM upconverted to `f_if`.
pub fn rof_payload(bits: &[u8], f_if: f64) -> ComplexWaveform {
    upconvert_real(&frame(&rof_ofdm(), bits), f_if).unwrap()
}

/// EVM ratio expressed in dB.
pub fn evm_db(evm: f64) -> f64 {
    20.0 * evm.log10()
}
