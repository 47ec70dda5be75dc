use criterion::{criterion_group, criterion_main, Criterion};
use pebble_bench::{prepare, run, workloads};
use std::time::Duration;

fn corpus(c: &mut Criterion) {
    let mut group = c.benchmark_group("corpus");
    group.sample_size(10).measurement_time(Duration::from_secs(5));
    for w in workloads() {
        let s = prepare(&w);
        group.bench_function(w.name, |b| b.iter(|| run(&s, &w)));
    }
    group.finish();
}

criterion_group!(benches, corpus);
criterion_main!(benches);
