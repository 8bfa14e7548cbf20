//! Acceptance checks: eleven numbered end-to-end properties covering the
//! peeling oracle, the witnesses, the counting inequalities, compression,
//! generalization, disambiguation, and determinism. Each check prints one
//! pass or fail line and then asserts, so the suite output doubles as a
//! checklist.

use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use listcomb::algebra::product;
use listcomb::compression::{
    agnostic_from_realizable, boost_compress, boost_scheme, enumerate_samples,
    generalization_bound, random_realizable_sample, random_sample, validate_scheme, BoostParams,
    CompressionScheme, SizeProfile, ValidationMode,
};
use listcomb::covers::{cover_from_product_cover, min_cover, FactorCover};
use listcomb::dims::{ds_dimension, graph_dimension, max_pseudocube, natarajan_dimension};
use listcomb::learning::erm;
use listcomb::model::max_realizable_subsample;
use listcomb::util::derive_seed;
use listcomb::verify::{
    all_passed, check_graph_vs_ds, check_ssp, run_coding, run_direct_sum, run_disambiguation,
    run_product_dims, VerificationReport,
};
use listcomb::{
    Caps, ConceptClass, DiscreteDistribution, Domain, Error, LabelSpace, ListConcept,
    ListHypothesis, Sample,
};

const SEED: u64 = 20260822;

fn verdict(number: u32, what: &str, pass: bool) -> bool {
    println!(
        "check {number} ({what}): {}",
        if pass { "pass" } else { "fail" }
    );
    pass
}

fn rng_for(tag: u64, t: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(SEED, &[tag, t]))
}

fn random_class(
    rng: &mut ChaCha8Rng,
    max_points: usize,
    min_labels: usize,
    max_labels: usize,
    max_k: usize,
    max_concepts: usize,
    undefined_prob: f64,
) -> ConceptClass {
    let points = rng.gen_range(1..=max_points);
    let labels = rng.gen_range(min_labels..=max_labels);
    let k = rng.gen_range(1..=max_k.min(labels));
    let count = rng.gen_range(1..=max_concepts);
    let all_labels: Vec<usize> = (0..labels).collect();
    let concepts = (0..count)
        .map(|_| {
            let values = (0..points)
                .map(|_| {
                    if rng.gen_bool(undefined_prob) {
                        None
                    } else {
                        let mut pool = all_labels.clone();
                        pool.shuffle(rng);
                        pool.truncate(k);
                        Some(pool)
                    }
                })
                .collect();
            ListConcept::new(None, values)
        })
        .collect();
    let domain = Domain::new((0..points).map(|i| format!("x{i}")).collect()).unwrap();
    let space = LabelSpace::new((0..labels).map(|i| format!("y{i}")).collect()).unwrap();
    ConceptClass::new(None, domain, space, k, concepts).unwrap()
}

/// The 200-class corpus shared by the counting checks: total classes with
/// list sizes up to three.
fn total_class_corpus() -> Vec<ConceptClass> {
    (0..200)
        .map(|t| {
            let mut rng = rng_for(30, t);
            random_class(&mut rng, 4, 1, 4, 3, 16, 0.0)
        })
        .collect()
}

#[test]
fn check_01_peeling_matches_the_exhaustive_oracle() {
    let started = Instant::now();
    let mut all_equal = true;
    for t in 0..500u64 {
        let mut rng = rng_for(10, t);
        let arity = rng.gen_range(1..=3);
        let labels = rng.gen_range(1..=3usize);
        let count = rng.gen_range(1..=12);
        let rank = rng.gen_range(1..=3);
        let mut tuples: Vec<Vec<usize>> = (0..count)
            .map(|_| (0..arity).map(|_| rng.gen_range(0..labels)).collect())
            .collect();
        tuples.sort();
        tuples.dedup();
        let peeled = max_pseudocube(&tuples, rank).unwrap().subset.len();
        if peeled != oracle_max_pseudocube(&tuples, rank) {
            all_equal = false;
        }
    }
    let elapsed = started.elapsed();
    let pass = all_equal && elapsed < Duration::from_secs(10);
    assert!(
        verdict(1, "peeling equals the exhaustive subset maximum", pass),
        "equal on all sets: {all_equal}, elapsed {elapsed:?}"
    );
}

/// Largest subset in which every tuple keeps at least `rank` distinct
/// neighbors per direction, found by trying every subset.
fn oracle_max_pseudocube(tuples: &[Vec<usize>], rank: usize) -> usize {
    let m = tuples.len();
    let mut best = 0;
    'masks: for mask in 0usize..1 << m {
        let members: Vec<&Vec<usize>> = (0..m)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| &tuples[i])
            .collect();
        if members.len() <= best {
            continue;
        }
        for a in &members {
            for dir in 0..a.len() {
                let neighbors = members
                    .iter()
                    .filter(|b| {
                        (0..a.len()).all(|i| (b[i] == a[i]) == (i != dir)) && b[dir] != a[dir]
                    })
                    .count();
                if neighbors < rank {
                    continue 'masks;
                }
            }
        }
        best = members.len();
    }
    best
}

#[test]
fn check_02_positive_dimensions_carry_witnesses() {
    let mut all_good = true;
    for t in 0..200u64 {
        let mut rng = rng_for(20, t);
        let class = random_class(&mut rng, 5, 1, 4, 2, 16, 0.25);
        let mut results = vec![
            graph_dimension(&class, None).unwrap(),
            ds_dimension(&class, class.k(), None).unwrap(),
        ];
        if class.k() == 1 && class.is_total() {
            results.push(natarajan_dimension(&class, None).unwrap());
        }
        for (d, witness) in results {
            if d == 0 {
                continue;
            }
            match witness {
                Some(w) => {
                    if let Err(why) = w.check(&class) {
                        eprintln!("witness rejected on trial {t}: {why}");
                        all_good = false;
                    }
                }
                None => {
                    eprintln!("dimension {d} came without a witness on trial {t}");
                    all_good = false;
                }
            }
        }
    }
    assert!(verdict(
        2,
        "every positive dimension re-validates its witness",
        all_good
    ));
}

#[test]
fn check_03_selection_count_bound_holds_exactly() {
    let started = Instant::now();
    let corpus = total_class_corpus();
    let mut failures = 0;
    for class in &corpus {
        let rows = check_ssp(class).unwrap();
        failures += rows.iter().filter(|r| !r.pass).count();
    }
    let elapsed = started.elapsed();
    let pass = failures == 0 && elapsed < Duration::from_secs(30);
    assert!(
        verdict(3, "selection counting bound on 200 classes", pass),
        "failures {failures}, elapsed {elapsed:?}"
    );
}

#[test]
fn check_04_box_intersection_and_union_bounds_hold() {
    let reports = run_coding(100, SEED).unwrap();
    let pass = all_passed(&reports);
    assert!(
        verdict(
            4,
            "overlap and union bounds on 100 constructed witnesses",
            pass
        ),
        "{}",
        failing_rows(&reports)
    );
}

#[test]
fn check_05_dimension_gap_bound_holds_on_the_same_corpus() {
    let corpus = total_class_corpus();
    let mut failures = 0;
    for class in &corpus {
        let rows = check_graph_vs_ds(class).unwrap();
        failures += rows.iter().filter(|r| !r.pass).count();
    }
    assert!(
        verdict(
            5,
            "pivot-vs-rank dimension gap on the same 200 classes",
            failures == 0
        ),
        "failures {failures}"
    );
}

#[test]
fn check_06_product_dimension_laws_hold_as_stated() {
    let reports = run_product_dims(50, SEED).unwrap();
    let families = [
        "product-littlestone",
        "product-natarajan-lower",
        "product-natarajan-upper",
        "product-ds-rank-product",
        "product-ds-rank-min",
    ];
    let mut summary = String::new();
    let mut pass = true;
    for family in families {
        let rows: Vec<&VerificationReport> = reports.iter().filter(|r| r.lemma == family).collect();
        let ok = rows.iter().filter(|r| r.pass).count();
        if ok != rows.len() {
            pass = false;
        }
        summary.push_str(&format!("{family} {ok}/{} ", rows.len()));
    }
    assert!(
        verdict(6, "product dimension laws on 50 pairs", pass),
        "{summary}\n{}",
        failing_rows(&reports)
    );
}

#[test]
fn check_07_cover_direct_sum_and_extraction_hold() {
    let reports = run_direct_sum(50, SEED).unwrap();
    let inequality_holds = all_passed(&reports);
    let caps = Caps::default();
    let mut extraction_holds = true;
    for t in 0..200u64 {
        let mut rng = rng_for(70, t);
        let left = random_class(&mut rng, 2, 2, 3, 1, 3, 0.3);
        let right = random_class(&mut rng, 2, 2, 3, 1, 3, 0.3);
        let k_left = rng.gen_range(1..=2.min(left.labels().len()));
        let k_right = rng.gen_range(1..=2.min(right.labels().len()));
        let prod = product(&left, &right, &caps).unwrap();
        let cover = min_cover(prod.class(), k_left + k_right, &caps).unwrap();
        match cover_from_product_cover(&prod, &left, &right, &cover.hypotheses, k_left, k_right) {
            Ok(FactorCover::Left(hs)) => {
                let covered = left
                    .concepts()
                    .iter()
                    .all(|c| hs.iter().any(|h| h.covers(c)));
                if !covered || hs.len() > cover.hypotheses.len() {
                    eprintln!("left extraction broke on trial {t}");
                    extraction_holds = false;
                }
            }
            Ok(FactorCover::Right(hs)) => {
                let covered = right
                    .concepts()
                    .iter()
                    .all(|c| hs.iter().any(|h| h.covers(c)));
                if !covered || hs.len() > left.domain().len() * cover.hypotheses.len() {
                    eprintln!("right extraction broke on trial {t}");
                    extraction_holds = false;
                }
            }
            Err(e) => {
                eprintln!("extraction failed on trial {t}: {e}");
                extraction_holds = false;
            }
        }
    }
    let pass = inequality_holds && extraction_holds;
    assert!(
        verdict(7, "cover direct sum and factor extraction", pass),
        "inequality {inequality_holds}, extraction {extraction_holds}\n{}",
        failing_rows(&reports)
    );
}

/// Draws a class with at least one concept of nonempty support together
/// with a realizable sample of the requested length range.
fn class_and_realizable_sample(rng: &mut ChaCha8Rng, max_len: usize) -> (ConceptClass, Sample) {
    loop {
        let class = random_class(rng, 4, 2, 4, 2, 8, 0.2);
        let len = rng.gen_range(1..=max_len);
        for _ in 0..20 {
            let s = random_realizable_sample(&class, len, rng).unwrap();
            if !s.is_empty() {
                return (class, s);
            }
        }
    }
}

/// Boosts with doubling block sizes until compression succeeds, ending at
/// one block holding the whole sample, where the base learner is already
/// exact. Returns the block size along with the outputs.
fn boost_adaptive(
    class: &ConceptClass,
    sample: &Sample,
    seed: u64,
) -> Result<(usize, Sample, CompressionScheme), Error> {
    let learner = erm(class)?;
    let params = BoostParams::for_k(class.k());
    let mut d = 1;
    loop {
        match boost_compress(&learner, class, sample, d, &params, seed) {
            Ok((compressed, scheme)) => return Ok((d, compressed, scheme)),
            Err(Error::BoostFailure(_)) if d < sample.len() => {
                d = (d * 2).min(sample.len());
            }
            Err(e) => return Err(e),
        }
    }
}

#[test]
fn check_08_boosting_compresses_and_reduction_is_competitive() {
    let mut boost_failures = 0;
    let mut bad_outputs = 0;
    for t in 0..100u64 {
        let mut rng = rng_for(80, t);
        let (class, sample) = class_and_realizable_sample(&mut rng, 40);
        match boost_adaptive(&class, &sample, derive_seed(SEED, &[81, t])) {
            Ok((_, compressed, scheme)) => {
                let h = scheme.reconstruct(&compressed).unwrap();
                let misses = sample
                    .pairs()
                    .iter()
                    .filter(|&&(x, y)| !h.list(x).contains(&y))
                    .count();
                if misses != 0 || compressed.len() > scheme.profile().max_len(sample.len()) {
                    eprintln!("bad reconstruction on trial {t}: misses {misses}");
                    bad_outputs += 1;
                }
            }
            Err(e) => {
                eprintln!("boosting failed on trial {t}: {e}");
                boost_failures += 1;
            }
        }
    }
    let mut reduction_violations = 0;
    for t in 0..500u64 {
        let mut rng = rng_for(82, t);
        let class = random_class(&mut rng, 3, 2, 3, 2, 6, 0.2);
        let len = rng.gen_range(1..=8);
        let noisy = random_sample(class.domain().len(), class.labels().len(), len, &mut rng);
        let (sub, _) = max_realizable_subsample(&class, &noisy).unwrap();
        if sub.is_empty() {
            continue;
        }
        let learner = erm(&class).unwrap();
        let params = BoostParams::for_k(class.k());
        let mut d = 1;
        let outcome = loop {
            let scheme =
                match boost_scheme(&learner, &class, d, &params, derive_seed(SEED, &[83, t])) {
                    Ok(s) => s,
                    Err(e) => break Err(e),
                };
            match agnostic_from_realizable(&scheme, &class, &noisy) {
                Err(Error::BoostFailure(_)) if d < sub.len() => d = (d * 2).min(sub.len()),
                other => break other,
            }
        };
        match outcome {
            Ok(out) => {
                if out.loss > out.best {
                    reduction_violations += 1;
                }
            }
            Err(e) => {
                eprintln!("reduction failed on trial {t}: {e}");
                reduction_violations += 1;
            }
        }
    }
    let pass = boost_failures == 0 && bad_outputs == 0 && reduction_violations == 0;
    assert!(
        verdict(8, "boosted compression and the noisy reduction", pass),
        "boost failures {boost_failures}, bad outputs {bad_outputs}, reduction violations {reduction_violations}"
    );
}

/// Threshold concepts on six points: concept t labels a point with 1
/// exactly when the point index is at least t.
fn six_point_thresholds() -> ConceptClass {
    let domain = Domain::new((0..6).map(|i| format!("x{i}")).collect()).unwrap();
    let labels = LabelSpace::new(vec!["0".into(), "1".into()]).unwrap();
    let concepts = (0..=6)
        .map(|t| {
            ListConcept::new(
                None,
                (0..6).map(|p| Some(vec![usize::from(p >= t)])).collect(),
            )
        })
        .collect();
    ConceptClass::new(None, domain, labels, 1, concepts).unwrap()
}

/// Keeps the highest zero-labeled point and the lowest one-labeled point;
/// the reconstruction picks the least threshold above every kept zero.
fn threshold_scheme() -> CompressionScheme {
    let compress = |s: &Sample| {
        let top_zero = s.pairs().iter().filter(|p| p.1 == 0).max_by_key(|p| p.0);
        let low_one = s.pairs().iter().filter(|p| p.1 == 1).min_by_key(|p| p.0);
        Ok(Sample::new(
            top_zero.into_iter().chain(low_one).copied().collect(),
        ))
    };
    let reconstruct = |t: &Sample| {
        let threshold = match t.pairs().iter().find(|p| p.1 == 1) {
            Some(&(x, _)) => x,
            None => t.pairs().iter().map(|&(x, _)| x + 1).max().unwrap_or(6),
        };
        ListHypothesis::new(
            1,
            (0..6).map(|p| vec![usize::from(p >= threshold)]).collect(),
        )
    };
    CompressionScheme::new(
        "threshold pair",
        1,
        SizeProfile::Constant(2),
        compress,
        reconstruct,
    )
}

#[test]
fn check_09_learning_curve_stays_under_the_deviation_ceiling() {
    let started = Instant::now();
    let class = six_point_thresholds();
    let scheme = threshold_scheme();
    let mut validated = true;
    for len in 1..=3 {
        let batch = enumerate_samples(6, 2, len, 1 << 20).unwrap();
        let report = validate_scheme(&scheme, &class, ValidationMode::Realizable, &batch).unwrap();
        validated &= report.violations.is_empty();
    }
    let support = (0..6)
        .map(|p| (p, usize::from(p >= 3), 1.0 / 6.0))
        .collect();
    let dist = DiscreteDistribution::new(support).unwrap();
    let mut under_ceiling = true;
    for (i, &n) in [25usize, 100, 400].iter().enumerate() {
        let mut rng = rng_for(90, i as u64);
        let trials = 2000;
        let mut losses = Vec::with_capacity(trials);
        for _ in 0..trials {
            let s = dist.draw_sample(n, &mut rng);
            let h = scheme.reconstruct(&scheme.compress(&s).unwrap()).unwrap();
            let loss = (0..6)
                .filter(|&p| !h.list(p).contains(&usize::from(p >= 3)))
                .count() as f64
                / 6.0;
            losses.push(loss);
        }
        let mean = losses.iter().sum::<f64>() / trials as f64;
        let var = losses.iter().map(|l| (l - mean).powi(2)).sum::<f64>();
        let stderr = (var / (trials as f64 * (trials - 1) as f64)).sqrt();
        let (_, ceiling) = generalization_bound(2, n, 0.5).unwrap();
        if mean > ceiling + 3.0 * stderr {
            eprintln!("curve point n={n}: {mean} above {ceiling} + 3 * {stderr}");
            under_ceiling = false;
        }
    }
    let elapsed = started.elapsed();
    let pass = validated && under_ceiling && elapsed < Duration::from_secs(60);
    assert!(
        verdict(9, "curve under the deviation ceiling", pass),
        "validated {validated}, under ceiling {under_ceiling}, elapsed {elapsed:?}"
    );
}

#[test]
fn check_10_disambiguation_counting_and_equivalence_hold() {
    let reports = run_disambiguation(50, SEED).unwrap();
    let pass = all_passed(&reports);
    assert!(
        verdict(
            10,
            "disambiguation growth and equivalence on 50 classes",
            pass
        ),
        "{}",
        failing_rows(&reports)
    );
}

#[test]
fn check_11_repeated_verification_is_byte_identical() {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_listcomb"))
            .args(["verify", "all", "--seed", "7"])
            .env_remove("LISTCOMB_SEED")
            .output()
            .unwrap()
    };
    let first = run();
    let second = run();
    let pass = !first.stdout.is_empty() && first.stdout == second.stdout;
    assert!(verdict(11, "verification reports are byte-identical", pass));
}

fn failing_rows(reports: &[VerificationReport]) -> String {
    reports
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{} [{}] lhs={} rhs={}", r.lemma, r.instance, r.lhs, r.rhs))
        .collect::<Vec<_>>()
        .join("\n")
}
