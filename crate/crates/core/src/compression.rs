//! Sample compression: scheme representation and validation, boosting a
//! weak learner into a logarithmic-size scheme, the realizable-to-agnostic
//! reduction, and the generalization bound formulas.
//!
//! A scheme pairs a compressor, which maps a sample to a short sequence of
//! its own pairs, with a reconstructor mapping any such sequence back to a
//! list hypothesis. The boosted compressor solves a zero-sum game between
//! sample points and subsample-trained hypotheses, then draws enough
//! hypotheses from the optimal mixture that a pointwise majority margin
//! holds; the reconstructor replays the learner on each block and takes a
//! per-point plurality vote over labels.

use std::collections::BTreeSet;
use std::sync::Arc;

use itertools::Itertools;
use num_rational::{BigRational, Rational64};
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::format::SchemeDescriptor;
use crate::game::{solve_game_exact, solve_game_mw};
use crate::learning::{erm, LearningRule};
use crate::model::{
    best_class_loss, hypothesis_sample_loss, is_realizable, max_realizable_subsample, ConceptClass,
    ListHypothesis, Sample,
};
use crate::util::derive_seed;

/// Maximum compressed length as a function of the input sample length.
#[derive(Debug, Clone, PartialEq)]
pub enum SizeProfile {
    /// A fixed bound independent of the sample length.
    Constant(usize),
    /// Blocks of a fixed length, one per boosting round: the round count
    /// grows logarithmically with the sample length.
    LogBlocks { block: usize, epsilon: f64 },
}

impl SizeProfile {
    pub fn max_len(&self, n: usize) -> usize {
        match *self {
            SizeProfile::Constant(d) => d,
            SizeProfile::LogBlocks { block, epsilon } => block * round_count(n, epsilon),
        }
    }
}

/// Boosting rounds for a sample of length n: ceil(ln(3n) / epsilon^2).
pub fn round_count(n: usize, epsilon: f64) -> usize {
    if n == 0 {
        return 0;
    }
    ((3.0 * n as f64).ln() / (epsilon * epsilon)).ceil() as usize
}

type PairMap = Arc<dyn Fn(&Sample) -> Result<Sample> + Send + Sync>;
type Reconstructor = Arc<dyn Fn(&Sample) -> Result<ListHypothesis> + Send + Sync>;

/// A compressor and reconstructor pair with its size profile.
#[derive(Clone)]
pub struct CompressionScheme {
    name: String,
    k: usize,
    profile: SizeProfile,
    compress: PairMap,
    reconstruct: Reconstructor,
}

impl std::fmt::Debug for CompressionScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CompressionScheme")
            .field("name", &self.name)
            .field("k", &self.k)
            .field("profile", &self.profile)
            .finish()
    }
}

impl CompressionScheme {
    pub fn new(
        name: impl Into<String>,
        k: usize,
        profile: SizeProfile,
        compress: impl Fn(&Sample) -> Result<Sample> + Send + Sync + 'static,
        reconstruct: impl Fn(&Sample) -> Result<ListHypothesis> + Send + Sync + 'static,
    ) -> Self {
        CompressionScheme {
            name: name.into(),
            k,
            profile,
            compress: Arc::new(compress),
            reconstruct: Arc::new(reconstruct),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn profile(&self) -> &SizeProfile {
        &self.profile
    }

    pub fn compress(&self, sample: &Sample) -> Result<Sample> {
        (self.compress)(sample)
    }

    pub fn reconstruct(&self, compressed: &Sample) -> Result<ListHypothesis> {
        (self.reconstruct)(compressed)
    }
}

/// The always-valid scheme: compress to nothing, reconstruct the full
/// label set at every point.
pub fn full_list_scheme(arity: usize, labels: usize) -> CompressionScheme {
    let lists = vec![(0..labels).collect::<Vec<usize>>(); arity];
    CompressionScheme::new(
        "full-lists",
        labels,
        SizeProfile::Constant(0),
        |_| Ok(Sample::empty()),
        move |_| ListHypothesis::new(labels, lists.clone()),
    )
}

/// Knobs for the boosted compressor.
#[derive(Debug, Clone)]
pub struct BoostParams {
    /// Weak learner error budget; must stay below 1/(2(k+1)).
    pub epsilon: f64,
    /// Fresh-seed redraw attempts before giving up.
    pub retry_budget: usize,
    /// Largest hypothesis count solved exactly; larger games switch to
    /// multiplicative weights.
    pub lp_threshold: usize,
    /// Duality gap demanded from the approximate solver.
    pub mw_tolerance: f64,
    /// Iteration budget for the approximate solver.
    pub mw_iterations: usize,
    /// Largest number of candidate blocks materialized; beyond it a seeded
    /// random pool is drawn instead of all subsets.
    pub pool_cap: usize,
}

impl BoostParams {
    /// Defaults for list size k, with the error budget at half the
    /// admissible bound.
    pub fn for_k(k: usize) -> Self {
        BoostParams {
            epsilon: 1.0 / (4.0 * (k as f64 + 1.0)),
            retry_budget: 64,
            lp_threshold: 5000,
            mw_tolerance: 1e-6,
            mw_iterations: 1 << 22,
            pool_cap: 20_000,
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut out: u128 = 1;
    for i in 0..k.min(n - k) {
        out = out.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    out
}

/// Candidate blocks: all d-subsets of the distinct pairs when few enough,
/// otherwise a seeded random pool of distinct d-subsets. With fewer than d
/// distinct pairs the single block cycles through all of them.
fn candidate_blocks(
    distinct: &[(usize, usize)],
    d: usize,
    pool_cap: usize,
    seed: u64,
) -> Vec<Vec<(usize, usize)>> {
    let u = distinct.len();
    if d == 0 {
        return vec![Vec::new()];
    }
    if u <= d {
        return vec![(0..d).map(|i| distinct[i % u]).collect()];
    }
    if binomial(u, d) <= pool_cap as u128 {
        return distinct.iter().copied().combinations(d).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[0]));
    let mut chosen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut attempts = 0usize;
    while chosen.len() < pool_cap && attempts < 4 * pool_cap {
        let mut picks: Vec<usize> = Vec::with_capacity(d);
        while picks.len() < d {
            let i = rng.gen_range(0..u);
            if !picks.contains(&i) {
                picks.push(i);
            }
        }
        picks.sort_unstable();
        chosen.insert(picks);
        attempts += 1;
    }
    chosen
        .into_iter()
        .map(|picks| picks.into_iter().map(|i| distinct[i]).collect())
        .collect()
}

/// One round of the boosted compressor: hypotheses from subsample blocks,
/// the exact or approximate game solve, then seeded draws until every
/// sample point has majority margin strictly above kT/(k+1).
fn boost_kappa(
    learner: &LearningRule,
    class: &ConceptClass,
    d: usize,
    params: &BoostParams,
    seed: u64,
    sample: &Sample,
) -> Result<Sample> {
    if sample.is_empty() {
        return Ok(Sample::empty());
    }
    if is_realizable(class, sample)?.is_none() {
        return Err(Error::Unrealizable);
    }
    let k = learner.k();
    let distinct = sample.distinct_pairs();
    let blocks = candidate_blocks(&distinct, d, params.pool_cap, seed);

    let mut hypotheses: Vec<ListHypothesis> = Vec::new();
    let mut generators: Vec<usize> = Vec::new();
    for (bi, block) in blocks.iter().enumerate() {
        let h = learner.apply(&Sample::new(block.clone()))?;
        if !hypotheses.contains(&h) {
            hypotheses.push(h);
            generators.push(bi);
        }
    }
    let loss: Vec<Vec<u8>> = distinct
        .iter()
        .map(|&(x, y)| {
            hypotheses
                .iter()
                .map(|h| u8::from(!h.contains(x, y)))
                .collect()
        })
        .collect();

    let weights: Vec<f64> = if hypotheses.len() <= params.lp_threshold {
        let sol = solve_game_exact(&loss)?;
        let eps = BigRational::from_float(params.epsilon)
            .ok_or_else(|| Error::Format("epsilon is not finite".into()))?;
        if sol.value > eps {
            return Err(Error::BoostFailure(format!(
                "game value {} exceeds error budget {}",
                sol.value, params.epsilon
            )));
        }
        sol.strategy
            .iter()
            .map(|w| {
                use num_traits::ToPrimitive;
                w.to_f64().unwrap_or(0.0)
            })
            .collect()
    } else {
        let approx = solve_game_mw(&loss, params.mw_tolerance, params.mw_iterations)?;
        if approx.lower > params.epsilon {
            return Err(Error::BoostFailure(format!(
                "game value is at least {} which exceeds error budget {}",
                approx.lower, params.epsilon
            )));
        }
        approx.strategy
    };

    let rounds = round_count(sample.len(), params.epsilon);
    let picker = WeightedIndex::new(weights.iter().copied())
        .map_err(|e| Error::Format(format!("bad mixture weights: {e}")))?;
    for attempt in 0..params.retry_budget.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[1, attempt as u64]));
        let draws: Vec<usize> = (0..rounds).map(|_| picker.sample(&mut rng)).collect();
        let margins_hold = distinct.iter().all(|&(x, y)| {
            let phi = draws
                .iter()
                .filter(|&&j| hypotheses[j].contains(x, y))
                .count();
            phi * (k + 1) > k * rounds
        });
        if margins_hold {
            let mut out = Vec::with_capacity(d * rounds);
            for &j in &draws {
                out.extend_from_slice(&blocks[generators[j]]);
            }
            return Ok(Sample::new(out));
        }
    }
    Err(Error::BoostFailure(format!(
        "no draw of {rounds} hypotheses met the majority margin in {} attempts",
        params.retry_budget.max(1)
    )))
}

/// Majority-vote reconstruction: replay the learner on consecutive blocks
/// and keep, at every point, the k labels with the highest vote counts,
/// ties broken toward smaller label indices. This output is the
/// lexicographically least among the k-sets maximizing the total count.
fn majority_reconstruct(
    learner: &LearningRule,
    labels: usize,
    arity: usize,
    d: usize,
    compressed: &Sample,
) -> Result<ListHypothesis> {
    if compressed.is_empty() {
        return learner.apply(&Sample::empty());
    }
    let k = learner.k();
    let votes: Vec<ListHypothesis> = compressed
        .pairs()
        .chunks(d.max(1))
        .map(|chunk| learner.apply(&Sample::new(chunk.to_vec())))
        .collect::<Result<_>>()?;
    let lists = (0..arity)
        .map(|x| {
            let mut counts = vec![0usize; labels];
            for h in &votes {
                for &y in h.list(x) {
                    counts[y] += 1;
                }
            }
            let mut order: Vec<usize> = (0..labels).collect();
            order.sort_by_key(|&y| (std::cmp::Reverse(counts[y]), y));
            order.truncate(k);
            order.sort_unstable();
            order
        })
        .collect();
    ListHypothesis::new(k, lists)
}

/// Builds the boosted scheme around a weak learner trained on blocks of
/// size d. The compressor fails with BoostFailure when the learner's error
/// budget is not actually met on some input sample.
pub fn boost_scheme(
    learner: &LearningRule,
    class: &ConceptClass,
    d: usize,
    params: &BoostParams,
    seed: u64,
) -> Result<CompressionScheme> {
    let k = learner.k();
    if !(params.epsilon > 0.0 && params.epsilon < 1.0 / (2.0 * (k as f64 + 1.0))) {
        return Err(Error::Format(format!(
            "error budget {} outside (0, 1/{})",
            params.epsilon,
            2 * (k + 1)
        )));
    }
    let arity = class.domain().len();
    let labels = class.labels().len();
    let kappa_learner = learner.clone();
    let kappa_class = class.clone();
    let kappa_params = params.clone();
    let rho_learner = learner.clone();
    Ok(CompressionScheme::new(
        format!("boost({}, d={d})", learner.name()),
        k,
        SizeProfile::LogBlocks {
            block: d,
            epsilon: params.epsilon,
        },
        move |s| boost_kappa(&kappa_learner, &kappa_class, d, &kappa_params, seed, s),
        move |t| majority_reconstruct(&rho_learner, labels, arity, d, t),
    ))
}

/// Convenience wrapper: builds the boosted scheme and compresses one
/// realizable sample with it.
pub fn boost_compress(
    learner: &LearningRule,
    class: &ConceptClass,
    sample: &Sample,
    d: usize,
    params: &BoostParams,
    seed: u64,
) -> Result<(Sample, CompressionScheme)> {
    let scheme = boost_scheme(learner, class, d, params, seed)?;
    let compressed = scheme.compress(sample)?;
    Ok((compressed, scheme))
}

/// Rebuilds a boosted scheme from its serialized descriptor.
pub fn scheme_from_descriptor(
    descriptor: &SchemeDescriptor,
    class: &ConceptClass,
) -> Result<CompressionScheme> {
    if descriptor.learner != "erm" {
        return Err(Error::Format(format!(
            "unknown learner id {:?}",
            descriptor.learner
        )));
    }
    if descriptor.k != class.k() {
        return Err(Error::Format(format!(
            "descriptor list size {} does not match the class list size {}",
            descriptor.k,
            class.k()
        )));
    }
    let learner = erm(class)?;
    let params = BoostParams {
        epsilon: descriptor.epsilon,
        ..BoostParams::for_k(descriptor.k)
    };
    boost_scheme(&learner, class, descriptor.block, &params, descriptor.seed)
}

/// Which loss condition a validation run checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationMode {
    /// Zero loss on every realizable sample; non-realizable samples are
    /// skipped.
    Realizable,
    /// Loss at most the best in-class loss on every sample.
    Agnostic,
}

/// One failed check, tagged with the index of the offending sample.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    CompressFailed {
        index: usize,
        message: String,
    },
    ReconstructFailed {
        index: usize,
        message: String,
    },
    ForeignPair {
        index: usize,
    },
    TooLong {
        index: usize,
        len: usize,
        max: usize,
    },
    RealizableLoss {
        index: usize,
        loss: Rational64,
    },
    AgnosticGap {
        index: usize,
        loss: Rational64,
        best: Rational64,
    },
}

/// Outcome of validating a scheme over a batch of samples. Violations are
/// listed rather than raised.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub checked: usize,
    pub skipped: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks a scheme sample by sample: the compressed output must reuse the
/// sample's own pairs within the length profile, and the reconstruction
/// must meet the mode's loss condition.
pub fn validate_scheme(
    scheme: &CompressionScheme,
    class: &ConceptClass,
    mode: ValidationMode,
    samples: &[Sample],
) -> Result<ValidationReport> {
    let mut report = ValidationReport::default();
    for (index, s) in samples.iter().enumerate() {
        if s.is_empty() {
            report.skipped += 1;
            continue;
        }
        if mode == ValidationMode::Realizable && is_realizable(class, s)?.is_none() {
            report.skipped += 1;
            continue;
        }
        report.checked += 1;
        let compressed = match scheme.compress(s) {
            Ok(t) => t,
            Err(e) => {
                report.violations.push(Violation::CompressFailed {
                    index,
                    message: e.to_string(),
                });
                continue;
            }
        };
        let max = scheme.profile().max_len(s.len());
        if compressed.len() > max {
            report.violations.push(Violation::TooLong {
                index,
                len: compressed.len(),
                max,
            });
        }
        if compressed.pairs().iter().any(|p| !s.pairs().contains(p)) {
            report.violations.push(Violation::ForeignPair { index });
        }
        let h = match scheme.reconstruct(&compressed) {
            Ok(h) => h,
            Err(e) => {
                report.violations.push(Violation::ReconstructFailed {
                    index,
                    message: e.to_string(),
                });
                continue;
            }
        };
        let loss = hypothesis_sample_loss(&h, s)?;
        match mode {
            ValidationMode::Realizable => {
                if loss != Rational64::from_integer(0) {
                    report
                        .violations
                        .push(Violation::RealizableLoss { index, loss });
                }
            }
            ValidationMode::Agnostic => {
                let best = best_class_loss(class, s)?;
                if loss > best {
                    report
                        .violations
                        .push(Violation::AgnosticGap { index, loss, best });
                }
            }
        }
    }
    Ok(report)
}

/// All labeled sequences of the given length over a point set, for
/// exhaustive validation. The count (points*labels)^length must stay
/// within the cap.
pub fn enumerate_samples(
    points: usize,
    labels: usize,
    length: usize,
    cap: u128,
) -> Result<Vec<Sample>> {
    let pairs = (points as u128).saturating_mul(labels as u128);
    let total = pairs.saturating_pow(length as u32);
    if total > cap {
        return Err(Error::capacity("enumerated samples", total, cap));
    }
    if length == 0 {
        return Ok(vec![Sample::empty()]);
    }
    Ok((0..length)
        .map(|_| (0..points).cartesian_product(0..labels))
        .multi_cartesian_product()
        .map(Sample::new)
        .collect())
}

/// A sample drawn from one uniformly chosen concept: points uniform over
/// its support, labels uniform within its list there. Concepts with empty
/// support yield the empty sample.
pub fn random_realizable_sample(
    class: &ConceptClass,
    length: usize,
    rng: &mut impl Rng,
) -> Result<Sample> {
    if class.is_empty() {
        return Err(Error::EmptyClass);
    }
    let c = class.concept(rng.gen_range(0..class.len()));
    let support = c.support();
    if support.is_empty() {
        return Ok(Sample::empty());
    }
    let pairs = (0..length)
        .map(|_| {
            let x = support[rng.gen_range(0..support.len())];
            let list = c.value(x).unwrap();
            (x, list[rng.gen_range(0..list.len())])
        })
        .collect();
    Ok(Sample::new(pairs))
}

/// A sample of uniformly random pairs, with no realizability promise.
pub fn random_sample(points: usize, labels: usize, length: usize, rng: &mut impl Rng) -> Sample {
    Sample::new(
        (0..length)
            .map(|_| (rng.gen_range(0..points), rng.gen_range(0..labels)))
            .collect(),
    )
}

/// Result of running a realizable scheme on possibly unrealizable data.
#[derive(Debug, Clone)]
pub struct AgnosticOutcome {
    pub compressed: Sample,
    pub hypothesis: ListHypothesis,
    pub loss: Rational64,
    pub best: Rational64,
}

/// Applies the scheme to a maximum realizable subsample. Misses are then
/// confined to the discarded pairs, so the loss never exceeds the best
/// loss within the class; the comparison is exact and a failure reports
/// the scheme as invalid.
pub fn agnostic_from_realizable(
    scheme: &CompressionScheme,
    class: &ConceptClass,
    sample: &Sample,
) -> Result<AgnosticOutcome> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let (sub, _) = max_realizable_subsample(class, sample)?;
    let compressed = scheme.compress(&sub)?;
    let hypothesis = scheme.reconstruct(&compressed)?;
    let loss = hypothesis_sample_loss(&hypothesis, sample)?;
    let best = best_class_loss(class, sample)?;
    if loss > best {
        return Err(Error::InvalidScheme(format!(
            "loss {loss} exceeds the best in-class loss {best}"
        )));
    }
    Ok(AgnosticOutcome {
        compressed,
        hypothesis,
        loss,
        best,
    })
}

/// The same reduction packaged as a scheme: compress a maximum realizable
/// subsample, so the compressed pairs still come from the input sample and
/// the misses stay within the discarded pairs. When no pair at all is
/// realizable the reconstruction falls back to a fixed list, which is as
/// good as any hypothesis can be on such data.
pub fn agnostic_scheme(scheme: &CompressionScheme, class: &ConceptClass) -> CompressionScheme {
    let k = scheme.k();
    let arity = class.domain().len();
    let inner = scheme.clone();
    let cls = class.clone();
    let compress = move |s: &Sample| {
        let (sub, _) = max_realizable_subsample(&cls, s)?;
        if sub.is_empty() {
            return Ok(Sample::empty());
        }
        inner.compress(&sub)
    };
    let inner = scheme.clone();
    let reconstruct = move |t: &Sample| match inner.reconstruct(t) {
        Ok(h) => Ok(h),
        Err(e) if t.is_empty() => {
            let lists = vec![(0..k).collect::<Vec<usize>>(); arity];
            ListHypothesis::new(k, lists).map_err(|_| e)
        }
        Err(e) => Err(e),
    };
    CompressionScheme::new(
        format!("{} on best subsample", scheme.name()),
        k,
        scheme.profile().clone(),
        compress,
        reconstruct,
    )
}

/// Tail and curve bounds implied by a compression size d_n at sample
/// length n: the deviation probability 2 exp(d_n ln n - eps^2 n) and the
/// expected-loss ceiling sqrt((d_n+1) ln n / n) + 2/n.
pub fn generalization_bound(d_n: usize, n: usize, eps: f64) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::Format("the bound needs n >= 2".into()));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Format("the bound needs 0 < eps <= 1".into()));
    }
    let ln_n = (n as f64).ln();
    let prob = 2.0 * (d_n as f64 * ln_n - eps * eps * n as f64).exp();
    let curve = ((d_n as f64 + 1.0) * ln_n / n as f64).sqrt() + 2.0 / n as f64;
    Ok((prob, curve))
}
