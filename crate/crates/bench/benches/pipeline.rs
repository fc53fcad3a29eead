use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use icech::cech::triangle_value;
use icech::{
    all_pairs_distances, build_filtration, delta_discretize, generate, reduce, shortest_system,
    GeneratorSpec, Model,
};

fn triangle(c: &mut Criterion) {
    let g = generate(&GeneratorSpec::Random { n: 8, m: 12, seed: 1 }).unwrap();
    let d = delta_discretize(&g, 0.2);
    let o = all_pairs_distances(&d.graph);
    let n = d.graph.vertex_count();
    c.bench_function("triangle_value", |b| {
        b.iter(|| triangle_value(&d.graph, &o, black_box(0), black_box(n / 3), black_box(2 * n / 3)))
    });
}

fn filtration(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_filtration");
    group.sample_size(10);
    let g = generate(&GeneratorSpec::cycle(12.0)).unwrap();
    for delta in [0.6, 0.3, 0.15] {
        let d = delta_discretize(&g, delta);
        for model in [Model::Cech, Model::Rips] {
            group.bench_with_input(BenchmarkId::new(model.to_string(), delta), &d, |b, d| {
                b.iter(|| build_filtration(d, model, 4.2))
            });
        }
    }
    group.finish();
}

fn reduction(c: &mut Criterion) {
    let mut group = c.benchmark_group("reduce");
    group.sample_size(10);
    let g = generate(&GeneratorSpec::cycle(12.0)).unwrap();
    for delta in [0.3, 0.15] {
        let fc = build_filtration(&delta_discretize(&g, delta), Model::Cech, 4.2);
        group.bench_with_input(BenchmarkId::from_parameter(delta), &fc, |b, fc| {
            b.iter(|| reduce(fc).unwrap())
        });
    }
    group.finish();
}

fn loops(c: &mut Criterion) {
    let mut group = c.benchmark_group("shortest_system");
    for (n, m) in [(10, 20), (30, 60), (60, 120)] {
        let g = generate(&GeneratorSpec::Random { n, m, seed: 7 }).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(format!("{n}x{m}")), &g, |b, g| {
            b.iter(|| shortest_system(g).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, triangle, filtration, reduction, loops);
criterion_main!(benches);
