use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use cubic_core::archimedean::{region_volume_mc, DEFAULT_SEED};
use cubic_core::census::census;
use cubic_core::poly::{enumerate_region, HeightBound, RegionSpec, Sign};
use cubic_core::Exec;

fn modes() -> [(&'static str, Exec); 2] {
    [("sequential", Exec::sequential()), ("parallel", Exec::parallel(0))]
}

fn enumeration(c: &mut Criterion) {
    let mut g = c.benchmark_group("enumerate_region");
    g.sample_size(10);
    let region = RegionSpec::height_only(HeightBound::integer(8).unwrap()).with_window(0.0, 5e4, Sign::Both);
    for (name, exec) in modes() {
        g.bench_with_input(BenchmarkId::new(name, "Y=8"), &exec, |b, e| {
            b.iter(|| enumerate_region(&region, None, e).unwrap().len())
        });
    }
    g.finish();

    let mut g = c.benchmark_group("census");
    g.sample_size(10);
    for (name, exec) in modes() {
        g.bench_with_input(BenchmarkId::new(name, "X=2000"), &exec, |b, e| {
            b.iter(|| census(2000.0, 2.0, e).unwrap().records.len())
        });
    }
    g.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let mut g = c.benchmark_group("region_volume_mc");
    g.sample_size(10);
    let region = RegionSpec::height_only(HeightBound::integer(5).unwrap()).with_window(0.0, 1e4, Sign::Both);
    for (name, exec) in modes() {
        g.bench_with_input(BenchmarkId::new(name, "200k"), &exec, |b, e| {
            b.iter(|| region_volume_mc(&region, 200_000, DEFAULT_SEED, e).unwrap().value)
        });
    }
    g.finish();
}

criterion_group!(benches, enumeration, monte_carlo);
criterion_main!(benches);
