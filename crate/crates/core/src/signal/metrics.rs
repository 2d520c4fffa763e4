//! Bit-error and error-vector metrics, plus the closed-form AWGN reference.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Hard-decision pre-FEC threshold for 7% overhead codes.
pub const DEFAULT_FEC_THRESHOLD: f64 = 3.8e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerReport {
    pub bit_errors: u64,
    pub total_bits: u64,
    pub ber: f64,
    pub evm_rms: f64,
    pub passes_fec: bool,
    pub fec_threshold: f64,
}

impl BerReport {
    pub fn from_counts(bit_errors: u64, total_bits: u64, evm_rms: f64, fec_threshold: f64) -> Self {
        let ber = if total_bits == 0 {
            0.0
        } else {
            bit_errors as f64 / total_bits as f64
        };
        Self {
            bit_errors,
            total_bits,
            ber,
            evm_rms,
            passes_fec: ber < fec_threshold,
            fec_threshold,
        }
    }

    /// Pool counts from several measurements; EVM is energy-averaged by bit count.
    pub fn merge(reports: &[BerReport]) -> Option<BerReport> {
        let first = reports.first()?;
        let errors = reports.iter().map(|r| r.bit_errors).sum();
        let total: u64 = reports.iter().map(|r| r.total_bits).sum();
        let evm = if total == 0 {
            0.0
        } else {
            (reports
                .iter()
                .map(|r| r.evm_rms * r.evm_rms * r.total_bits as f64)
                .sum::<f64>()
                / total as f64)
                .sqrt()
        };
        Some(Self::from_counts(errors, total, evm, first.fec_threshold))
    }
}

/// Count bit errors and compute data-aided EVM.
///
/// `rx_symbols`/`ref_symbols` may be empty, in which case EVM is reported as 0.
pub fn ber_evm_metrics(
    tx_bits: &[u8],
    rx_bits: &[u8],
    rx_symbols: &[Complex64],
    ref_symbols: &[Complex64],
    fec_threshold: f64,
) -> Result<BerReport> {
    if tx_bits.len() != rx_bits.len() {
        return Err(Error::LengthMismatch {
            left: tx_bits.len(),
            right: rx_bits.len(),
        });
    }
    if rx_symbols.len() != ref_symbols.len() {
        return Err(Error::LengthMismatch {
            left: rx_symbols.len(),
            right: ref_symbols.len(),
        });
    }
    let errors = tx_bits
        .iter()
        .zip(rx_bits)
        .filter(|(a, b)| (*a & 1) != (*b & 1))
        .count() as u64;
    Ok(BerReport::from_counts(
        errors,
        tx_bits.len() as u64,
        evm(rx_symbols, ref_symbols),
        fec_threshold,
    ))
}

/// RMS EVM of `rx` against `reference`, normalized by reference power.
pub fn evm(rx: &[Complex64], reference: &[Complex64]) -> f64 {
    let ref_energy: f64 = reference.iter().map(|s| s.norm_sqr()).sum();
    if ref_energy == 0.0 {
        return 0.0;
    }
    let err: f64 = rx
        .iter()
        .zip(reference)
        .map(|(r, s)| (r - s).norm_sqr())
        .sum();
    (err / ref_energy).sqrt()
}

/// Gaussian tail probability Q(x).
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Nearest-neighbour BER approximation for Gray-coded square QAM over AWGN.
pub fn analytic_awgn_ber(qam_order: u32, ebn0_db: f64) -> Result<f64> {
    if !matches!(qam_order, 4 | 16 | 64) {
        return Err(Error::UnsupportedQam(qam_order));
    }
    if ebn0_db == f64::INFINITY {
        return Ok(0.0);
    }
    let m = qam_order as f64;
    let k = m.log2();
    let ebn0 = 10f64.powf(ebn0_db / 10.0);
    let coeff = 4.0 / k * (1.0 - 1.0 / m.sqrt());
    Ok(coeff * q_function((3.0 * k * ebn0 / (m - 1.0)).sqrt()))
}
