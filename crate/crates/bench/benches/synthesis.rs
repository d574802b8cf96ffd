use criterion::{criterion_group, criterion_main, Criterion};
use nsyn::noise::{cyclic_delete, digit_replace};
use nsyn::sfta::build_sfta_dataset;
use nsyn::synthesis::synthesize;
use nsyn::{BuildOptions, CostTable, Objective, PerExampleLoss, Task};
use nsyn_bench::*;

fn construction(c: &mut Criterion) {
    let g = toy();
    let data = toy_data(4);
    let loss = PerExampleLoss::squared();
    c.bench_function("toy sfta d=4", |b| {
        b.iter(|| build_sfta_dataset(&g, &data, &loss, BuildOptions::new(4)).unwrap())
    });

    let g = string_grammar(", ");
    let data = string_data(&g, NAME_PROGRAM, &NAMES);
    let loss = PerExampleLoss::zero_one();
    c.bench_function("names sfta d=2", |b| {
        b.iter(|| build_sfta_dataset(&g, &data, &loss, BuildOptions::new(2)).unwrap())
    });
}

fn end_to_end(c: &mut Criterion) {
    let mut group = c.benchmark_group("synthesize");
    group.sample_size(10);
    let costs = CostTable::unit();

    let g = string_grammar(", ");
    let data = cyclic_delete(&string_data(&g, NAME_PROGRAM, &NAMES), 1).unwrap();
    let loss = PerExampleLoss::one_delete();
    let task = Task { grammar: &g, data: &data, loss: &loss, costs: &costs, options: BuildOptions::new(3) };
    group.bench_function("names cyclic 1del d=3", |b| b.iter(|| synthesize(&task, &Objective::Lexicographic).unwrap()));

    let g = string_grammar("-");
    let data = digit_replace(&string_data(&g, PHONE_PROGRAM, &PHONES), 0.2, 7).unwrap();
    let loss = PerExampleLoss::n_substitution();
    let objective = Objective::tradeoff(0.1).unwrap();
    let task = Task { grammar: &g, data: &data, loss: &loss, costs: &costs, options: BuildOptions::new(3) };
    group.bench_function("phones digits nsub d=3", |b| b.iter(|| synthesize(&task, &objective).unwrap()));
    group.finish();
}

criterion_group!(benches, construction, end_to_end);
criterion_main!(benches);
