//! Sequential vs rayon execution of the bootstrap and the per-setup LPs.
//!
//! Without the `parallel` feature both variants run sequentially, which makes
//! the fallback overhead visible as well.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use effrank_core::efficiency::point_efficiencies;
use effrank_core::stochastic::bootstrap_efficiencies_with;
use effrank_core::{
    BootstrapConfig, Direction, Execution, FrontierForm, MetricSummary, SetupSummary,
};

/// 17 setups, three inputs and one output, roughly 2% relative noise.
fn setups(n: usize) -> Vec<SetupSummary> {
    (0..n)
        .map(|i| {
            let f = i as f64;
            let metric = |name: &str, direction, mean: f64| MetricSummary {
                name: name.into(),
                direction,
                mean,
                stddev: 0.02 * mean,
            };
            SetupSummary {
                setup: format!("model{i:02}"),
                metrics: vec![
                    metric("gpu_ms", Direction::Input, 1.0 + (f * 1.37) % 9.0),
                    metric("edge_ms", Direction::Input, 20.0 + (f * 13.1) % 180.0),
                    metric("train_usd", Direction::Input, 50.0 + (f * 71.3) % 400.0),
                    metric("top1", Direction::Output, 55.0 + (f * 3.7) % 25.0),
                ],
            }
        })
        .collect()
}

fn bench_bootstrap(c: &mut Criterion) {
    let summaries = setups(17);
    let mut group = c.benchmark_group("bootstrap_n17");
    group.sample_size(20);
    for replicates in [100usize, 1000] {
        let config = BootstrapConfig {
            replicates,
            seed: 1,
            form: FrontierForm::Convex,
            ..Default::default()
        };
        for (label, exec) in [
            ("sequential", Execution::Sequential),
            ("parallel", Execution::Parallel),
        ] {
            group.bench_with_input(BenchmarkId::new(label, replicates), &config, |b, cfg| {
                b.iter(|| bootstrap_efficiencies_with(black_box(&summaries), cfg, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_scores(c: &mut Criterion) {
    let mut group = c.benchmark_group("efficiency_scores");
    for n in [17usize, 100] {
        let points: Vec<_> = setups(n).iter().map(SetupSummary::mean_point).collect();
        for (label, exec) in [
            ("sequential", Execution::Sequential),
            ("parallel", Execution::Parallel),
        ] {
            group.bench_with_input(BenchmarkId::new(label, n), &points, |b, pts| {
                b.iter(|| point_efficiencies(black_box(pts), FrontierForm::Convex, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_bootstrap, bench_scores);
criterion_main!(benches);
