//! Throughput of the protocol Monte Carlo and the membership solver.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use qlayers_core::boxes::{is_local, Behavior, MEMBERSHIP_TOL};
use qlayers_core::protocols::{run_bb84_lkd, run_kcbs_lkd, EveStrategy};
use qlayers_core::rng::master_rng;

fn bench_protocol_runs(c: &mut Criterion) {
    c.bench_function("bb84 lkd 10k rounds", |b| {
        b.iter(|| {
            run_bb84_lkd(
                10_000,
                EveStrategy::InterceptResend { fraction: 0.5 },
                0.5,
                0.17,
                black_box(1),
            )
            .unwrap()
        })
    });
    c.bench_function("kcbs lkd 10k rounds", |b| {
        b.iter(|| run_kcbs_lkd(10_000, EveStrategy::Honest, 0.5, 0.05, black_box(2)).unwrap())
    });
}

fn bench_membership(c: &mut Criterion) {
    let mut rng = master_rng(9);
    let behaviors: Vec<Behavior> = (0..64)
        .map(|_| Behavior::random_no_signaling(&mut rng))
        .collect();
    c.bench_function("local membership x64", |b| {
        b.iter(|| {
            behaviors
                .iter()
                .filter(|beh| is_local(black_box(beh), MEMBERSHIP_TOL).is_some())
                .count()
        })
    });
}

criterion_group!(benches, bench_protocol_runs, bench_membership);
criterion_main!(benches);
