//! Benchmarks for the four kernels that dominate real runs: pseudo-cube
//! peeling, the rank dimension search, exact minimum covers, and boosted
//! compression.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use listcomb::compression::{boost_compress, random_realizable_sample, BoostParams};
use listcomb::covers::min_cover;
use listcomb::dims::{ds_dimension, max_pseudocube};
use listcomb::learning::erm;
use listcomb::{Caps, ConceptClass, Domain, LabelSpace, ListConcept};

fn class_from(
    points: usize,
    labels: usize,
    k: usize,
    rows: Vec<Vec<Option<Vec<usize>>>>,
) -> ConceptClass {
    let domain = Domain::new((0..points).map(|i| format!("x{i}")).collect()).unwrap();
    let space = LabelSpace::new((0..labels).map(|i| format!("y{i}")).collect()).unwrap();
    let concepts = rows
        .into_iter()
        .map(|r| ListConcept::new(None, r))
        .collect();
    ConceptClass::new(None, domain, space, k, concepts).unwrap()
}

fn thresholds(points: usize) -> ConceptClass {
    let rows = (0..=points)
        .map(|t| {
            (0..points)
                .map(|p| Some(vec![usize::from(p >= t)]))
                .collect()
        })
        .collect();
    class_from(points, 2, 1, rows)
}

fn random_total_class(
    seed: u64,
    points: usize,
    labels: usize,
    k: usize,
    count: usize,
) -> ConceptClass {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..count)
        .map(|_| {
            (0..points)
                .map(|_| {
                    let mut list: Vec<usize> = (0..labels).collect();
                    for i in (1..list.len()).rev() {
                        list.swap(i, rng.gen_range(0..=i));
                    }
                    list.truncate(k);
                    Some(list)
                })
                .collect()
        })
        .collect();
    class_from(points, labels, k, rows)
}

fn peeling(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let tuples: Vec<Vec<usize>> = (0..300)
        .map(|_| (0..4).map(|_| rng.gen_range(0..4)).collect())
        .collect();
    c.bench_function("peel 300 tuples arity 4 rank 2", |b| {
        b.iter(|| max_pseudocube(black_box(&tuples), 2).unwrap())
    });
}

fn rank_dimension(c: &mut Criterion) {
    let class = random_total_class(12, 5, 3, 2, 20);
    c.bench_function("ds dimension 5 points 20 concepts", |b| {
        b.iter(|| ds_dimension(black_box(&class), 2, None).unwrap())
    });
}

fn exact_cover(c: &mut Criterion) {
    let class = random_total_class(13, 3, 3, 1, 12);
    let caps = Caps::default();
    c.bench_function("exact cover 12 concepts lists of 2", |b| {
        b.iter(|| min_cover(black_box(&class), 2, &caps).unwrap())
    });
}

fn boosting(c: &mut Criterion) {
    let class = thresholds(8);
    let learner = erm(&class).unwrap();
    let params = BoostParams::for_k(1);
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let sample = random_realizable_sample(&class, 30, &mut rng).unwrap();
    c.bench_function("boost compress 30 pairs block 2", |b| {
        b.iter(|| boost_compress(&learner, &class, black_box(&sample), 2, &params, 7).unwrap())
    });
}

criterion_group!(kernels, peeling, rank_dimension, exact_cover, boosting);
criterion_main!(kernels);
