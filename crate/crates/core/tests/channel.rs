mod common;

use std::f64::consts::PI;

use common::{F0, FS, N};
use num_complex::Complex64;
use rofsim_core::channel::{photodetect, propagate_fiber, split_power, FiberParams};
use rofsim_core::units::lin_to_db;
use rofsim_core::{rng, ComplexWaveform};

fn noise_field(seed: u64) -> ComplexWaveform {
    let bits = rng::random_bits(&mut rng::seeded(seed), 2 * N);
    let s = bits
        .chunks(2)
        .map(|b| Complex64::new(b[0] as f64 - 0.5, b[1] as f64 - 0.5) * 1e-2)
        .collect();
    ComplexWaveform::new(s, FS, F0).unwrap()
}

fn lossless(km: f64) -> FiberParams {
    let mut p = FiberParams::new(km);
    p.atten_db_per_km = 0.0;
    p
}

/// Carrier plus a small sideband pair (DSB) or one sideband (SSB) at `f`.
fn modulated(f: f64, dsb: bool) -> ComplexWaveform {
    let m = 0.1;
    let s = (0..N)
        .map(|i| {
            let ph = 2.0 * PI * f * i as f64 / FS;
            let side = if dsb {
                Complex64::new(m * ph.cos(), 0.0)
            } else {
                Complex64::from_polar(m / 2.0, ph)
            };
            (Complex64::new(1.0, 0.0) + side) * 1e-3f64.sqrt()
        })
        .collect();
    ComplexWaveform::new(s, FS, F0).unwrap()
}

fn rf_power(field: &ComplexWaveform, f: f64, km: f64) -> f64 {
    let rx = propagate_fiber(field, &lossless(km)).unwrap();
    let i = photodetect(&rx, &common::quiet_pd()).unwrap();
    i.tone_power(f) + i.tone_power(-f)
}

#[test]
fn dispersion_is_all_pass() {
    let x = noise_field(1);
    let y = propagate_fiber(&x, &lossless(80.0)).unwrap();
    assert!((y.energy() / x.energy() - 1.0).abs() < 1e-9);
    let p = FiberParams::new(80.0);
    for f in [-90e9, -3e9, 0.0, 17e9, 100e9] {
        assert!((p.dispersion_response(f).norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn spans_compose() {
    let x = noise_field(2);
    let two = propagate_fiber(&propagate_fiber(&x, &lossless(7.0)).unwrap(), &lossless(13.0)).unwrap();
    let one = propagate_fiber(&x, &lossless(20.0)).unwrap();
    let scale = x.samples.iter().map(|s| s.norm()).fold(0.0, f64::max);
    for (a, b) in two.samples.iter().zip(&one.samples) {
        assert!((a - b).norm() <= 1e-9 * scale);
    }
    assert!((two.delay_s - one.delay_s).abs() < 1e-15);
}

#[test]
fn single_tone_detection_ignores_dispersion() {
    let tone = ComplexWaveform::new(
        (0..N)
            .map(|i| Complex64::from_polar(1e-3f64.sqrt(), 2.0 * PI * 3e9 * i as f64 / FS))
            .collect(),
        FS,
        F0,
    )
    .unwrap();
    let before = photodetect(&tone, &common::quiet_pd()).unwrap();
    let after = photodetect(&propagate_fiber(&tone, &lossless(50.0)).unwrap(), &common::quiet_pd()).unwrap();
    for (a, b) in before.samples.iter().zip(&after.samples) {
        assert!((a - b).norm() < 1e-12);
    }
}

#[test]
fn split_then_propagate_losses_add() {
    let x = noise_field(3);
    let y = split_power(&propagate_fiber(&x, &FiberParams::new(20.0)).unwrap(), 4, 1.0).unwrap();
    let loss = -lin_to_db(y.mean_power() / x.mean_power());
    assert!((loss - (4.0 + 6.0206 + 1.0)).abs() < 0.01, "{loss}");
}

#[test]
fn dsb_fades_and_ssb_does_not() {
    let freqs: Vec<f64> = (10..=200).map(|k| k as f64 * 0.1e9).collect();
    let response = |dsb: bool| -> Vec<f64> {
        freqs
            .iter()
            .map(|&f| {
                let x = modulated(f, dsb);
                lin_to_db(rf_power(&x, f, 20.0) / rf_power(&x, f, 0.0))
            })
            .collect()
    };
    let dsb = response(true);
    let (k, depth) = dsb
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    assert!((freqs[k] - 13.6e9).abs() <= 0.5e9, "null at {}", freqs[k]);
    assert!(*depth < -20.0, "{depth}");
    let worst = response(false).into_iter().fold(0.0, f64::min);
    assert!(worst > -1.0, "{worst}");
}
