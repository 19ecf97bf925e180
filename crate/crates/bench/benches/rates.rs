use criterion::{black_box, criterion_group, criterion_main, Criterion};
use qkd_core::channel::{expected_dv_stats, LinkParams};
use qkd_core::cv::{holevo_be_collective, CvState};
use qkd_core::dv;
use qkd_core::rate::EcModel;
use qkd_core::sim::{privacy_amplify, run_bb84, SimConfig};
use qkd_core::sources::PhotonStatistics;

fn bench_channel(c: &mut Criterion) {
    let lp = LinkParams::new(0.1, 1.0, 0.1, 1e-5, 0.99, 1.0).unwrap();
    let ps = PhotonStatistics::poissonian(0.5).unwrap();
    c.bench_function("expected_dv_stats_poissonian", |b| {
        b.iter(|| expected_dv_stats(black_box(&ps), black_box(&lp)))
    });
}

fn bench_holevo(c: &mut Criterion) {
    let cs = CvState::new(20.0, 0.1, 0.6, 0.01, 0.005, 0.9).unwrap();
    c.bench_function("holevo_be_collective", |b| {
        b.iter(|| holevo_be_collective(black_box(&cs)).unwrap())
    });
}

fn bench_optimizer(c: &mut Criterion) {
    let lp = LinkParams::new(0.1, 1.0, 0.1, 1e-5, 0.99, 1.0).unwrap();
    let ec = EcModel::new(1.2).unwrap();
    c.bench_function("optimize_decoy_sweep_point", |b| {
        b.iter(|| dv::optimize_decoy(black_box(&lp), black_box(&ec)))
    });
}

fn bench_sim(c: &mut Criterion) {
    let cfg = SimConfig {
        n_pulses: 10_000,
        p_intercept: 0.5,
        visibility: 0.98,
        t_total: 0.5,
        seed: 7,
        f_ec: 1.0,
        pa_rate: 0.1,
    };
    c.bench_function("run_bb84_10k_pulses", |b| {
        b.iter(|| run_bb84(black_box(&cfg)).unwrap())
    });
    let key: Vec<bool> = (0..4096).map(|i| i % 3 == 0).collect();
    c.bench_function("privacy_amplify_4096_to_2048", |b| {
        b.iter(|| privacy_amplify(black_box(&key), 2048, 7).unwrap())
    });
}

criterion_group!(benches, bench_channel, bench_holevo, bench_optimizer, bench_sim);
criterion_main!(benches);
