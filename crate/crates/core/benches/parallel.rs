use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use schubert_core::bpd::enumerate_bpds;
use schubert_core::growth::{structure_constants_separated, RuleOptions};
use schubert_core::par::{set_execution, Execution};
use schubert_core::Permutation;

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn bench_enumerate(c: &mut Criterion) {
    let w: Permutation = "15428763".parse().unwrap();
    let mut group = c.benchmark_group("enumerate_bpds");
    for (name, mode) in MODES {
        set_execution(mode);
        group.bench_with_input(BenchmarkId::new(name, &w), &w, |b, w| {
            b.iter(|| enumerate_bpds(w).len())
        });
    }
    group.finish();
}

fn bench_rule(c: &mut Criterion) {
    let w: Permutation = "1376542".parse().unwrap();
    let v: Permutation = "14325".parse().unwrap();
    let opts = RuleOptions {
        verify: false,
        ..RuleOptions::default()
    };
    let mut group = c.benchmark_group("structure_constants");
    for (name, mode) in MODES {
        set_execution(mode);
        group.bench_function(name, |b| {
            b.iter(|| structure_constants_separated(&w, &v, &opts).unwrap().len())
        });
    }
    group.finish();
    set_execution(Execution::Parallel);
}

criterion_group!(benches, bench_enumerate, bench_rule);
criterion_main!(benches);
