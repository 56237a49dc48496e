use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use zeroref::cooccurrence::{extract_cooccurrences, extract_sharded, ClassWeighting};
use zeroref::evaluation::{generate_synthetic_corpus, loocv, EvalConfig, Resources, SynthParams};
use zeroref::pipeline::{CorpusDir, ModelBundle, ResolveOptions};

fn corpus() -> zeroref::evaluation::SyntheticCorpus {
    generate_synthetic_corpus(&SynthParams::fixture(), 0).unwrap()
}

fn extraction(c: &mut Criterion) {
    let corpus = corpus();
    let mut g = c.benchmark_group("extract");
    g.bench_function("sequential", |b| {
        b.iter(|| extract_cooccurrences(black_box(&corpus.unannotated), &corpus.thesaurus, ClassWeighting::PerClass))
    });
    g.bench_function("sharded", |b| {
        b.iter(|| extract_sharded(black_box(&corpus.unannotated), &corpus.thesaurus, ClassWeighting::PerClass, 64))
    });
    g.finish();
}

fn training_and_resolution(c: &mut Criterion) {
    let corpus = corpus();
    let counts = extract_sharded(&corpus.unannotated, &corpus.thesaurus, ClassWeighting::PerClass, 64);
    let dir = CorpusDir {
        documents: corpus.documents.clone(),
        unannotated: Vec::new(),
        lexicon: corpus.lexicon.clone(),
        thesaurus: corpus.thesaurus.clone(),
        counts: counts.clone(),
        rules: Default::default(),
    };
    let cfg = EvalConfig::default();
    c.bench_function("train/both2", |b| b.iter(|| ModelBundle::train(black_box(&dir), &cfg).unwrap()));

    let bundle = ModelBundle::train(&dir, &cfg).unwrap();
    let opts = ResolveOptions::default();
    c.bench_function("resolve/document", |b| {
        b.iter_batched(
            || corpus.documents[0].document.clone(),
            |doc| zeroref::pipeline::resolve_document(&bundle, &doc, &opts).unwrap(),
            BatchSize::SmallInput,
        )
    });

    let res = Resources {
        lexicon: &corpus.lexicon,
        thesaurus: &corpus.thesaurus,
        counts: &counts,
    };
    let mut g = c.benchmark_group("loocv");
    g.sample_size(10);
    g.bench_function("both2", |b| b.iter(|| loocv(black_box(&corpus.documents), res, &cfg).unwrap()));
    g.finish();
}

criterion_group!(benches, extraction, training_and_resolution);
criterion_main!(benches);
