//! Pattern-analysis costs: repeated-group detection and pair counting on
//! single files, plus a store-backed epsilon sweep over a synthetic
//! corpus, which is the shape of a full `pairs` invocation.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mpi_recon_core::patterns::{
    count_pair_cooccurrences, find_repeated_groups, sweep_epsilon, PatternQuery,
};
use mpi_recon_core::store::{FileSites, Site, Store};
use mpi_recon_testkit::corpus::{random_corpus, seed_store};

const NAMES: [&str; 4] = ["Allreduce", "Bcast", "Gather", "Scatter"];

fn synthetic_file(site_count: usize, seed: u64) -> FileSites {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sites: Vec<Site> = (0..site_count)
        .map(|_| Site {
            collective: NAMES[rng.gen_range(0..NAMES.len())].to_string(),
            line_number: rng.gen_range(1..=6000),
        })
        .collect();
    sites.sort_by(|a, b| {
        a.line_number
            .cmp(&b.line_number)
            .then_with(|| a.collective.cmp(&b.collective))
    });
    sites.dedup();
    FileSites {
        repo_id: "bench".to_string(),
        revision_id: "r1".to_string(),
        filename: "src/kernel.c".to_string(),
        sites,
    }
}

fn bench_groups(c: &mut Criterion) {
    let mut group = c.benchmark_group("groups");
    for &count in &[100usize, 1000] {
        let file = synthetic_file(count, 7);
        let query = PatternQuery::new(NAMES.iter().map(|s| s.to_string()), Some(50), 2)
            .expect("query builds");
        group.bench_with_input(BenchmarkId::new("find_repeated", count), &file, |b, f| {
            b.iter(|| find_repeated_groups(black_box(f), &query))
        });
    }
    group.finish();
}

fn bench_pair_counts(c: &mut Criterion) {
    let mut group = c.benchmark_group("pairs");
    for &count in &[100usize, 1000] {
        let file = synthetic_file(count, 11);
        group.bench_with_input(
            BenchmarkId::new("count_within_eps_50", count),
            &file,
            |b, f| b.iter(|| count_pair_cooccurrences(black_box(&f.sites), "Gather", "Scatter", 50)),
        );
    }
    group.finish();
}

fn bench_store_sweep(c: &mut Criterion) {
    let mut store = Store::open_in_memory().expect("store opens");
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for repo in 0..10 {
        let files = random_corpus(&mut rng, 40, 30, &NAMES);
        seed_store(&mut store, &format!("repo-{repo}"), &files);
    }
    let pairs = vec![
        ("Gather".to_string(), "Scatter".to_string()),
        ("Allreduce".to_string(), "Bcast".to_string()),
    ];
    let epsilons = [0u32, 5, 10, 20, 30, 50, 100];

    c.bench_function("sweep/two_pairs_seven_epsilons", |b| {
        b.iter(|| sweep_epsilon(black_box(&store), &pairs, &epsilons))
    });
}

criterion_group!(benches, bench_groups, bench_pair_counts, bench_store_sweep);
criterion_main!(benches);
