use criterion::{criterion_group, criterion_main, Criterion};

use alphamap_core::minimizer::minimize;
use alphamap_core::{BoundaryClass, Init, MinimizeConfig};

fn degree_zero(c: &mut Criterion) {
    let mut group = c.benchmark_group("minimize");
    group.sample_size(10);
    for n in [257, 1025] {
        let mut cfg = MinimizeConfig::new(1.1, BoundaryClass::new(2));
        cfg.grid_size = n;
        cfg.init = Init::Lambda(2.0);
        group.bench_function(format!("m2/alpha1.1/{n}"), |b| b.iter(|| minimize(&cfg).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, degree_zero);
criterion_main!(benches);
