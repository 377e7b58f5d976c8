use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use msp_core::algorithms::{Algorithm, RunConfig};
use msp_core::analytics::{a_laminar, c_uniform, optimize_mixture, MixtureTarget};
use msp_core::arrival::AugmentMode;
use msp_core::harness::{estimate, exact_oracle, EstimateConfig};
use msp_core::instance_gen::{random_graph, tight_laminar, uniform_instance};
use msp_core::rng::seeded;

fn simulation(c: &mut Criterion) {
    let mut g = c.benchmark_group("estimate_1k_trials");
    g.sample_size(10);
    let cases = [
        ("greedy_uniform_500", uniform_instance(500, 50).unwrap(), Algorithm::Greedy, 0.37),
        ("greedy_tight_20x3", tight_laminar(20, 3, &mut seeded(1)).unwrap(), Algorithm::Greedy, 0.45),
        ("generation_graph_30", random_graph(30, 80, false, 0.2, &mut seeded(2)).unwrap(), Algorithm::Generation, 0.5),
        ("basic_graph_30", random_graph(30, 80, false, 0.2, &mut seeded(2)).unwrap(), Algorithm::Basic, 0.5),
    ];
    for (name, inst, alg, p) in cases {
        let cfg = EstimateConfig::new(alg, RunConfig::new(p), 1000, 7);
        g.bench_function(name, |b| b.iter(|| estimate(black_box(&inst), &cfg).unwrap()));
    }
    g.finish();
}

fn oracle(c: &mut Criterion) {
    let inst = uniform_instance(4, 2).unwrap();
    let cfg = RunConfig::new(0.4);
    c.bench_function("oracle_uniform_4_pinned", |b| {
        b.iter(|| exact_oracle(black_box(&inst), Algorithm::Greedy, &cfg, AugmentMode::Pinned).unwrap())
    });
}

fn analytics(c: &mut Criterion) {
    c.bench_function("c_uniform_500", |b| b.iter(|| c_uniform(black_box(500), black_box(0.37)).unwrap()));
    c.bench_function("a_laminar_500", |b| b.iter(|| a_laminar(black_box(500), black_box(0.5)).unwrap()));
    let mut g = c.benchmark_group("mixture");
    g.sample_size(10);
    g.bench_function("optimize_rank2", |b| b.iter(|| optimize_mixture(MixtureTarget::Rank2).unwrap()));
    g.finish();
}

criterion_group!(benches, simulation, oracle, analytics);
criterion_main!(benches);
