use cantor_transducers::constructions::example_g;
use cantor_transducers::group::GroupElement;
use cantor_transducers::par::Exec;
use cantor_transducers::suite::pool;
use cantor_transducers::viable::viable_combinations;
use cantor_transducers::Bounds;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Exec); 2] = [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)];

fn pools(c: &mut Criterion) {
    let bounds = Bounds::default();
    let mut group = c.benchmark_group("pool");
    group.sample_size(10);
    for (n, len) in [(3, 3), (4, 2)] {
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, format!("n{n}-len{len}")), &exec, |b, &exec| {
                b.iter(|| pool(n, len, &bounds, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn viable(c: &mut Criterion) {
    let g = GroupElement::new(&example_g(), &Bounds::default()).unwrap();
    let mut group = c.benchmark_group("viable");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, "g4-depth2-size4"), &exec, |b, &exec| {
            b.iter(|| viable_combinations(&g, 2, 4, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, pools, viable);
criterion_main!(benches);
