//! Compares the rayon-backed sweep path against the sequential reference on
//! the two hot loops: ERM-style cost sweeps and slice-scan grids.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use bclab_core::engine::{solve_bnc, BncConfig, PenaltySpec};
use bclab_core::exec::{map_indexed, map_indexed_sequential};
use bclab_core::instance::{generate_instance, Family, MipInstance};
use bclab_core::policy::{PolicyTemplate, SlotTemplate};
use bclab_core::probe::ParamSampler;

struct Workload {
    instances: Vec<MipInstance>,
    template: PolicyTemplate,
    cfg: BncConfig,
    penalties: PenaltySpec,
    draws: Vec<Vec<f64>>,
}

fn workload(n_instances: usize, n_draws: usize) -> Workload {
    let instances: Vec<MipInstance> = (0..n_instances)
        .map(|i| generate_instance(Family::Knapsack, 6, 0, 2, (1, 9), i as u64).unwrap())
        .collect();
    let template = PolicyTemplate::root_cuts(SlotTemplate::Linear { dim: 4 });
    let cfg = BncConfig {
        max_rounds: 24,
        kappa: 1,
        cut_cap: 4,
        ..BncConfig::default()
    };
    let draws = ParamSampler::new(n_draws, 99).sample(template.param_count());
    Workload {
        instances,
        template,
        cfg,
        penalties: PenaltySpec::default(),
        draws,
    }
}

fn sweep_cost(w: &Workload, i: usize) -> f64 {
    let bundle = w.template.assemble(&w.draws[i]).unwrap();
    w.instances
        .iter()
        .map(|inst| solve_bnc(inst, &bundle, &w.cfg, &w.penalties).unwrap().1)
        .sum()
}

fn bench_erm_sweep(c: &mut Criterion) {
    let w = workload(6, 32);
    let mut group = c.benchmark_group("erm-sweep");
    group.sample_size(10);
    group.bench_function(BenchmarkId::new("parallel", w.draws.len()), |b| {
        b.iter(|| black_box(map_indexed(w.draws.len(), |i| sweep_cost(&w, i))))
    });
    group.bench_function(BenchmarkId::new("sequential", w.draws.len()), |b| {
        b.iter(|| black_box(map_indexed_sequential(w.draws.len(), |i| sweep_cost(&w, i))))
    });
    group.finish();
}

fn bench_slice_grid(c: &mut Criterion) {
    let w = workload(1, 1);
    let anchor = vec![0.2, -0.4, 0.6, -0.8];
    let direction = vec![1.0, -0.5, 0.25, 0.75];
    let grid = 128usize;
    let eval = |i: usize| {
        let t = i as f64 / grid as f64;
        let params: Vec<f64> = anchor
            .iter()
            .zip(&direction)
            .map(|(a, d)| a + t * d)
            .collect();
        let bundle = w.template.assemble(&params).unwrap();
        solve_bnc(&w.instances[0], &bundle, &w.cfg, &w.penalties)
            .unwrap()
            .1
    };
    let mut group = c.benchmark_group("slice-grid");
    group.sample_size(10);
    group.bench_function(BenchmarkId::new("parallel", grid), |b| {
        b.iter(|| black_box(map_indexed(grid + 1, eval)))
    });
    group.bench_function(BenchmarkId::new("sequential", grid), |b| {
        b.iter(|| black_box(map_indexed_sequential(grid + 1, eval)))
    });
    group.finish();
}

criterion_group!(benches, bench_erm_sweep, bench_slice_grid);
criterion_main!(benches);
