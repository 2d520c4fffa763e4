use std::f64::consts::PI;

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rofsim_core::budget::{run_budget, BudgetFile, SAMPLE_TOPOLOGY};
use rofsim_core::channel::{propagate_fiber, FiberParams};
use rofsim_core::photonics::{apply_mrm, ring_response, RingParams};
use rofsim_core::rng;
use rofsim_core::signal::{demodulate_ofdm, generate_ofdm, OfdmConfig};
use rofsim_core::ComplexWaveform;

const F0: f64 = 193.4e12;
const FS: f64 = 204.8e9;
const N: usize = 1 << 17;

fn carrier() -> ComplexWaveform {
    let mut w = ComplexWaveform::from_real(&vec![1e-3f64.sqrt(); N], FS).unwrap();
    w.ref_freq = F0;
    w
}

fn ring(c: &mut Criterion) {
    let p = RingParams::critically_coupled(F0, 1e12, 3e9);
    c.bench_function("ring_response x1000", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for k in 0..1000 {
                acc += ring_response(&p, F0 + k as f64 * 1e8).0.re;
            }
            black_box(acc)
        })
    });
}

fn mrm(c: &mut Criterion) {
    let p = RingParams::critically_coupled(F0, 1e12, 3e9).with_bias(-1.5);
    let field = carrier();
    let v: Vec<f64> = (0..N).map(|i| 0.3 * (2.0 * PI * 7.1e9 * i as f64 / FS).sin()).collect();
    let drive = ComplexWaveform::from_real(&v, FS).unwrap();
    c.bench_function("apply_mrm 128k", |b| {
        b.iter(|| black_box(apply_mrm(&field, &p, &drive).unwrap()))
    });
}

fn fiber(c: &mut Criterion) {
    let field = carrier();
    let f = FiberParams::new(20.0);
    c.bench_function("propagate_fiber 128k", |b| {
        b.iter(|| black_box(propagate_fiber(&field, &f).unwrap()))
    });
}

fn ofdm(c: &mut Criterion) {
    let cfg = OfdmConfig::new(256, 16, 1.0 / 16.0, 4.875e9, 8, 1).with_sample_rate(FS);
    let bits = rng::random_bits(&mut rng::seeded(1), cfg.bits_per_frame());
    let w = generate_ofdm(&cfg, &bits).unwrap();
    c.bench_function("ofdm generate", |b| {
        b.iter(|| black_box(generate_ofdm(&cfg, &bits).unwrap()))
    });
    c.bench_function("ofdm demodulate", |b| {
        b.iter(|| black_box(demodulate_ofdm(&cfg, &w).unwrap()))
    });
}

fn budget(c: &mut Criterion) {
    let file = BudgetFile::parse(SAMPLE_TOPOLOGY).unwrap();
    c.bench_function("budget sample topology", |b| {
        b.iter(|| black_box(run_budget(&file).unwrap()))
    });
}

criterion_group!(benches, ring, mrm, fiber, ofdm, budget);
criterion_main!(benches);
