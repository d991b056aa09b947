use bifrac::harness::spiked_pair;
use bifrac::*;
use bifrac_bench::{grid, item};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn integrals(c: &mut Criterion) {
    let mut group = c.benchmark_group("bi_frac");
    for cells in [64, 256, 1024] {
        let it = item(cells);
        let table = kernel_table(grid(cells), 0.5).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(cells), &it, |b, it| {
            b.iter(|| bi_frac_with(&it.f, &it.g, &table).unwrap())
        });
    }
    group.finish();
    c.bench_function("kernel_table/1024", |b| {
        b.iter(|| kernel_table(grid(1024), 0.5).unwrap())
    });
}

fn maximal_operators(c: &mut Criterion) {
    let mut group = c.benchmark_group("maximal");
    for cells in [64, 256] {
        let it = item(cells);
        let idx = FamilyIndex::new(CubeFamily::lattice(grid(cells))).with_dilation(3.0);
        group.bench_with_input(BenchmarkId::new("M", cells), &it, |b, it| {
            b.iter(|| maximal(&it.f, &idx).unwrap())
        });
        group.bench_with_input(
            BenchmarkId::new("weighted bilinear", cells),
            &it,
            |b, it| {
                b.iter(|| {
                    weighted_bilinear_maximal(
                        &it.f, &it.g, &it.w1, &it.w2, 0.3, 2.0, 2.0, 3.0, &idx,
                    )
                    .unwrap()
                })
            },
        );
    }
    group.finish();
}

fn decomposition(c: &mut Criterion) {
    let spec = GridSpec::new(1, 1.0, 64).unwrap();
    let q0 = Cube::interval(0.0, 1.0);
    let (f, g) = spiked_pair(11, spec, &q0);
    let m = bifrac::sparse::three_q_functional(&f, &g, &q0.dilate(3.0), 2.0, 2.0);
    let f = f.scale(0.999 / m);
    let grid = DyadicGrid::standard(1);
    c.bench_function("cz_decompose/64", |b| {
        b.iter(|| cz_decompose(&f, &g, 2.0, 2.0, &q0, &grid, default_base(1)).unwrap())
    });
}

criterion_group!(benches, integrals, maximal_operators, decomposition);
criterion_main!(benches);
