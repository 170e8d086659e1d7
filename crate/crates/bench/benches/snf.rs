use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use khkit::homology::{smith_normal_form, smith_normal_form_dense};
use khkit_bench::sparse_matrix;

fn snf(c: &mut Criterion) {
    let mut group = c.benchmark_group("snf");
    for n in [20, 60, 150] {
        let m = sparse_matrix(n, 3, n as u64);
        group.bench_with_input(BenchmarkId::new("sparse_first", n), &m, |b, m| {
            b.iter(|| smith_normal_form(black_box(m)))
        });
        if n <= 60 {
            group.bench_with_input(BenchmarkId::new("dense", n), &m, |b, m| {
                b.iter(|| smith_normal_form_dense(black_box(m)))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, snf);
criterion_main!(benches);
