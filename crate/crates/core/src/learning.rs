//! Learning rules and Monte Carlo loss curves.
//!
//! A learning rule maps samples to total list hypotheses. Curves estimate
//! expected population loss over i.i.d. samples of growing size; every trial
//! draws from its own counter-derived random stream, so results depend only
//! on the master seed and not on scheduling.

use std::sync::Arc;

use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{
    concept_population_loss, concept_sample_loss, hypothesis_population_loss, Caps, ConceptClass,
    DiscreteDistribution, ListHypothesis, Sample,
};
use crate::util::{derive_seed, mean_stderr, pairwise_sum};

/// A named sample-to-hypothesis map producing total k-list outputs.
#[derive(Clone)]
pub struct LearningRule {
    name: String,
    k: usize,
    rule: Arc<dyn Fn(&Sample) -> Result<ListHypothesis> + Send + Sync>,
}

impl LearningRule {
    pub fn new(
        name: impl Into<String>,
        k: usize,
        rule: impl Fn(&Sample) -> Result<ListHypothesis> + Send + Sync + 'static,
    ) -> Self {
        LearningRule {
            name: name.into(),
            k,
            rule: Arc::new(rule),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn apply(&self, s: &Sample) -> Result<ListHypothesis> {
        (self.rule)(s)
    }
}

impl std::fmt::Debug for LearningRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LearningRule")
            .field("name", &self.name)
            .field("k", &self.k)
            .finish()
    }
}

/// Empirical risk minimization over a fixed class: the first concept with the
/// fewest sample misses, made total by filling undefined points with the
/// smallest labels. The empty sample maps to the first concept.
pub fn erm(class: &ConceptClass) -> Result<LearningRule> {
    if class.is_empty() {
        return Err(Error::EmptyClass);
    }
    let class = class.clone();
    let name = match class.name() {
        Some(n) => format!("erm({n})"),
        None => "erm".to_string(),
    };
    let k = class.k();
    Ok(LearningRule::new(name, k, move |s: &Sample| {
        if s.is_empty() {
            return Ok(class.totalize(0));
        }
        let mut best = 0usize;
        let mut best_miss = usize::MAX;
        for (ci, c) in class.concepts().iter().enumerate() {
            let miss = crate::model::concept_miss_count(c, s)?;
            if miss < best_miss {
                best = ci;
                best_miss = miss;
            }
        }
        Ok(class.totalize(best))
    }))
}

/// One estimated point of a loss curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub n: usize,
    pub estimate: f64,
    pub stderr: f64,
    pub trials: usize,
}

/// Monte Carlo estimate of the expected population loss of a rule trained
/// on samples of each requested size. Trial `t` at size `n` uses the stream
/// seeded by `derive_seed(seed, [n, t])`.
pub fn learning_curve(
    rule: &LearningRule,
    dist: &DiscreteDistribution,
    sizes: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<CurvePoint>> {
    if trials == 0 {
        return Err(Error::Format("trial count must be at least 1".into()));
    }
    sizes
        .iter()
        .map(|&n| {
            let losses: Vec<f64> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng =
                        ChaCha8Rng::seed_from_u64(derive_seed(seed, &[n as u64, t as u64]));
                    let s = dist.draw_sample(n, &mut rng);
                    let h = rule.apply(&s)?;
                    hypothesis_population_loss(&h, dist)
                })
                .collect::<Result<_>>()?;
            let (estimate, stderr) = mean_stderr(&losses);
            Ok(CurvePoint {
                n,
                estimate,
                stderr,
                trials,
            })
        })
        .collect()
}

/// Exact expected population loss at one sample size, by enumerating every
/// support tuple with its probability. Feasible only while
/// `|support|^n` stays within the configured cap; `trials` reports the
/// number of enumerated samples and `stderr` is zero.
pub fn learning_curve_exact(
    rule: &LearningRule,
    dist: &DiscreteDistribution,
    n: usize,
    caps: &Caps,
) -> Result<CurvePoint> {
    let m = dist.len() as u128;
    let count = m.saturating_pow(n as u32);
    if count > caps.exact_curve_samples as u128 {
        return Err(Error::capacity(
            "exact curve enumeration",
            count,
            caps.exact_curve_samples as u128,
        ));
    }
    if n == 0 {
        let h = rule.apply(&Sample::empty())?;
        return Ok(CurvePoint {
            n,
            estimate: hypothesis_population_loss(&h, dist)?,
            stderr: 0.0,
            trials: 1,
        });
    }
    let tuples: Vec<Vec<usize>> = (0..n)
        .map(|_| 0..dist.len())
        .multi_cartesian_product()
        .collect();
    let terms: Vec<f64> = tuples
        .par_iter()
        .map(|tuple| {
            let mut weight = 1.0;
            let pairs = tuple
                .iter()
                .map(|&i| {
                    let (x, y, p) = dist.support()[i];
                    weight *= p;
                    (x, y)
                })
                .collect();
            if weight == 0.0 {
                return Ok(0.0);
            }
            let h = rule.apply(&Sample::new(pairs))?;
            Ok(weight * hypothesis_population_loss(&h, dist)?)
        })
        .collect::<Result<_>>()?;
    Ok(CurvePoint {
        n,
        estimate: pairwise_sum(&terms),
        stderr: 0.0,
        trials: tuples.len(),
    })
}

/// Monte Carlo estimate of the expected supremum, over the class, of the gap
/// between population loss and sample loss at size `n`.
pub fn uniform_convergence_rate(
    class: &ConceptClass,
    dist: &DiscreteDistribution,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if class.is_empty() {
        return Err(Error::EmptyClass);
    }
    if n == 0 {
        return Err(Error::EmptySample);
    }
    if trials == 0 {
        return Err(Error::Format("trial count must be at least 1".into()));
    }
    let gaps: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[n as u64, t as u64]));
            let s = dist.draw_sample(n, &mut rng);
            let mut sup = 0.0f64;
            for c in class.concepts() {
                let pop = concept_population_loss(c, dist)?;
                let emp = concept_sample_loss(c, &s)?;
                let emp = *emp.numer() as f64 / *emp.denom() as f64;
                sup = sup.max((pop - emp).abs());
            }
            Ok(sup)
        })
        .collect::<Result<_>>()?;
    Ok(mean_stderr(&gaps))
}

/// Worst-case realizable curve over a fixed marginal: for each total concept,
/// labels the marginal by that concept and measures the ERM curve, then takes
/// the pointwise maximum. Defined for total 1-list classes.
pub fn fixed_marginal_curve(
    class: &ConceptClass,
    marginal: &[(usize, f64)],
    sizes: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<CurvePoint>> {
    if class.k() != 1 || !class.is_total() {
        return Err(Error::UnsupportedClass(
            "fixed-marginal curves need a total 1-list class".into(),
        ));
    }
    let rule = erm(class)?;
    let mut best: Vec<Option<CurvePoint>> = vec![None; sizes.len()];
    for (ci, c) in class.concepts().iter().enumerate() {
        let support: Vec<(usize, usize, f64)> = marginal
            .iter()
            .map(|&(x, p)| {
                if x >= class.domain().len() {
                    return Err(Error::Index(format!("marginal point index {x}")));
                }
                Ok((x, c.value(x).unwrap()[0], p))
            })
            .collect::<Result<_>>()?;
        let dist = DiscreteDistribution::new(support)?;
        let curve = learning_curve(&rule, &dist, sizes, trials, derive_seed(seed, &[ci as u64]))?;
        for (slot, point) in best.iter_mut().zip(curve) {
            let replace = slot.map_or(true, |b| point.estimate > b.estimate);
            if replace {
                *slot = Some(point);
            }
        }
    }
    Ok(best.into_iter().map(|p| p.unwrap()).collect())
}
