use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use xychain::ed::Oracle;
use xychain::par::Execution;
use xychain::sweep::{evaluate_point, run_sweep, GridAxis, Preset, SweepConfig};

fn grid_config(t_steps: usize, gamma_steps: usize) -> SweepConfig {
    SweepConfig {
        t_axis: GridAxis::new(0.0, 50.0, t_steps).unwrap(),
        gamma_axis: GridAxis::new(0.0, 1.0, gamma_steps).unwrap(),
        ..SweepConfig::preset(Preset::Weak)
    }
}

fn sweep_modes(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    for (nt, ng) in [(51, 26), (201, 101)] {
        let config = grid_config(nt, ng);
        let label = format!("{nt}x{ng}");
        for (name, mode) in [
            ("sequential", Execution::Sequential),
            ("parallel", Execution::Parallel),
        ] {
            group.bench_with_input(BenchmarkId::new(name, &label), &config, |b, cfg| {
                b.iter(|| run_sweep(black_box(cfg), mode).unwrap())
            });
        }
    }
    group.finish();
}

fn point_routes(c: &mut Criterion) {
    let mut group = c.benchmark_group("point");
    let config = SweepConfig::preset(Preset::Intermediate);
    for n in [5usize, 8] {
        let cfg = SweepConfig {
            n_sites: n,
            ..config.clone()
        };
        let spec = cfg.spec(0.5).unwrap();
        group.bench_with_input(BenchmarkId::new("free_fermion", n), &spec, |b, s| {
            b.iter(|| evaluate_point(black_box(s), 5.0, 3, cfg.input).unwrap())
        });
        group.bench_with_input(
            BenchmarkId::new("exact_diagonalization", n),
            &spec,
            |b, s| {
                b.iter(|| {
                    Oracle::fermionic(black_box(s))
                        .unwrap()
                        .record(5.0, 3, cfg.input)
                        .unwrap()
                })
            },
        );
    }
    group.finish();
}

criterion_group!(benches, sweep_modes, point_routes);
criterion_main!(benches);
