use bifrac::harness::power_weight;
use bifrac::*;
use bifrac_bench::grid;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn constants(c: &mut Criterion) {
    let mut group = c.benchmark_group("constants");
    for cells in [32, 64] {
        let spec = grid(cells);
        let idx = FamilyIndex::new(CubeFamily::lattice(spec));
        let pairs = PairFamily::nested(&idx);
        let wv = WeightVector::new(
            power_weight(spec, &[0.0], 0.2),
            power_weight(spec, &[0.5], -0.3),
        )
        .unwrap();
        group.bench_with_input(BenchmarkId::new("A_p", cells), &wv, |b, wv| {
            b.iter(|| ap_constant(wv.w1(), 2.0, &idx).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("multiple A_(P,q)", cells), &wv, |b, wv| {
            b.iter(|| multiple_apq_constant(wv, 2.0, 3.0, 1.5, &idx).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("pair", cells), &wv, |b, wv| {
            b.iter(|| iida_constant(wv, 4.0, 1.5, 2.0, 3.0, &pairs, &idx).unwrap())
        });
    }
    group.finish();
}

fn families(c: &mut Criterion) {
    let spec = grid(64);
    c.bench_function("nested pairs/64", |b| {
        b.iter(|| PairFamily::nested(&FamilyIndex::new(CubeFamily::lattice(spec))))
    });
}

criterion_group!(benches, constants, families);
criterion_main!(benches);
