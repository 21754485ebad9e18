use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use decolab::model::{build_model_m, sample_julia, ModelSpec};
use decolab::render::{render, render_deep, FrameSpec};
use decolab::verify::hausdorff_with;
use decolab::{Complex64, Execution, HpComplex};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn s1() -> HpComplex {
    HpComplex::parse("0.3626684938191616+0.6450238859863952i", 256).unwrap()
}

fn bench_render(c: &mut Criterion) {
    let mut g = c.benchmark_group("render");
    g.sample_size(10);
    let shallow = FrameSpec::new(HpComplex::real(-0.75, 64), 3.0, (160, 120), 500);
    let deep = FrameSpec::new(s1(), 1e-8, (64, 64), 4000);
    for (name, exec) in MODES {
        let f = shallow.clone().with_exec(exec);
        g.bench_with_input(BenchmarkId::new("f64", name), &f, |b, f| b.iter(|| render(black_box(f)).unwrap()));
        let f = deep.clone().with_exec(exec);
        g.bench_with_input(BenchmarkId::new("perturbation", name), &f, |b, f| {
            b.iter(|| render_deep(black_box(f)).unwrap())
        });
    }
    g.finish();
}

fn bench_hausdorff(c: &mut Criterion) {
    let mut g = c.benchmark_group("hausdorff");
    let a = sample_julia(Complex64::new(-0.12, 0.74), 20_000, 1);
    let b = sample_julia(Complex64::new(-0.10, 0.97), 20_000, 2);
    for (name, exec) in MODES {
        g.bench_function(name, |bench| bench.iter(|| hausdorff_with(black_box(&a), black_box(&b), exec)));
    }
    g.finish();
}

fn bench_model(c: &mut Criterion) {
    let mut g = c.benchmark_group("build_model_m");
    g.sample_size(10);
    let spec = ModelSpec::douady(Complex64::new(-0.10, 0.97), 220.0, 4, 300, 1).unwrap();
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| build_model_m(black_box(&spec), exec).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, bench_render, bench_hausdorff, bench_model);
criterion_main!(benches);
