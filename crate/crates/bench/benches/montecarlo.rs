use acovdiff::montecarlo::run_experiment_with;
use acovdiff::tables::TableId;
use criterion::{criterion_group, criterion_main, Criterion};

fn table_cell(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_experiment");
    group.sample_size(10);
    let spec = TableId::T6.cell_spec(0, 0, 42, 100).unwrap();
    for workers in [1usize, 4] {
        group.bench_function(format!("T6 cell R=100 workers={workers}"), |b| {
            b.iter(|| run_experiment_with(&spec, Some(workers)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, table_cell);
criterion_main!(benches);
