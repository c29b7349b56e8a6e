use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use evenparity::{
    four_component_pipeline, hb_coefficients, povm_element, wigner, BeamSplitterConvention,
    GridSpec,
};
use evenparity_bench::{flat_control, four_component, heralded_cat, real};

fn sectors(c: &mut Criterion) {
    let mut g = c.benchmark_group("beam_splitter");
    g.bench_function("sectors_0_to_60", |b| {
        let bs = BeamSplitterConvention::symmetric();
        b.iter(|| bs.sectors().take(61).map(|s| s.photons()).sum::<usize>())
    });
    for n in [20usize, 100] {
        g.bench_with_input(BenchmarkId::new("hb_coefficients", n), &n, |b, &n| {
            b.iter(|| hb_coefficients(black_box(n)))
        });
    }
    g.finish();
}

fn povm(c: &mut Criterion) {
    let mut g = c.benchmark_group("povm_element");
    g.sample_size(20);
    for (n, eta) in [(10usize, 1.0), (10, 0.9), (20, 0.9)] {
        let control = flat_control(n, eta);
        let cutoff = evenparity::default_cutoff(n, eta);
        g.bench_function(format!("n{n}_eta{eta}"), |b| {
            b.iter(|| povm_element(&control, n, eta, cutoff).unwrap())
        });
    }
    g.finish();
}

fn wigner_grid(c: &mut Criterion) {
    let mut g = c.benchmark_group("wigner");
    g.sample_size(10);
    let state = heralded_cat(10.0);
    for points in [101usize, 281] {
        let grid = GridSpec::square(real(10.0).re + 5.0, points);
        g.bench_with_input(BenchmarkId::new("cat10", points), &grid, |b, grid| {
            b.iter(|| wigner(&state, grid).unwrap())
        });
    }
    g.finish();
}

fn pipeline(c: &mut Criterion) {
    let mut g = c.benchmark_group("four_component");
    g.sample_size(10);
    let cfg = four_component(4.0);
    g.bench_function("pipeline_b2_4", |b| {
        b.iter(|| four_component_pipeline(&cfg).unwrap())
    });
    g.finish();
}

criterion_group!(benches, sectors, povm, wigner_grid, pipeline);
criterion_main!(benches);
