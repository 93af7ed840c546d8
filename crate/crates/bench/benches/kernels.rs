use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use limitpower::clone_power::ClonePowerAlgebra;
use limitpower::colimit::{directed_colimit, random_directed_system};
use limitpower::congruence::congruence_lattice;
use limitpower::filter::PartitionFilter;
use limitpower::logic::corpus::Corpus;
use limitpower::logic::eval_sentence;
use limitpower::partition::SetPartition;
use limitpower::table::TableSet;

fn kernels(c: &mut Criterion) {
    let tables = TableSet::standard(3).unwrap();
    let full = PartitionFilter::principal(SetPartition::discrete(2)).unwrap();
    let cp = ClonePowerAlgebra::build(3, full, &tables).unwrap();

    c.bench_function("table_set_standard_3", |b| b.iter(|| TableSet::standard(black_box(3)).unwrap()));

    c.bench_function("congruence_lattice_omega3_sq", |b| {
        b.iter(|| congruence_lattice(black_box(cp.algebra()), &tables).unwrap())
    });

    let corpus = Corpus::generate(3, 100, 2, 7).unwrap();
    c.bench_function("eval_corpus_omega3_sq", |b| {
        b.iter(|| {
            corpus
                .sentences()
                .iter()
                .filter(|s| eval_sentence(cp.algebra(), corpus.registry(), s).unwrap())
                .count()
        })
    });

    let (sys, sys_tables) = random_directed_system(11).unwrap();
    let mut g = c.benchmark_group("colimit");
    g.sample_size(10);
    g.bench_function("random_system", |b| b.iter(|| directed_colimit(black_box(&sys), &sys_tables).unwrap()));
    g.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
