//! Data model: named finite domains and label spaces, partial list concepts,
//! concept classes, samples, and finite discrete distributions.
//!
//! Everything is indexed. Points and labels are opaque strings at the edges;
//! inside the library a point or label is a `usize` into its domain or label
//! space. All types are immutable after construction and safe to share across
//! threads. Operations that build derived objects return new values.

use num_rational::Rational64;
use rand::Rng;

use crate::error::{Error, Result};

/// Ordered set of distinct point names. Index order is construction order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    points: Vec<String>,
}

impl Domain {
    pub fn new(points: Vec<String>) -> Result<Self> {
        check_distinct(&points, "domain point")?;
        Ok(Domain { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &str {
        &self.points[i]
    }

    pub fn names(&self) -> &[String] {
        &self.points
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.points.iter().position(|p| p == name)
    }
}

/// Ordered set of distinct label names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSpace {
    labels: Vec<String>,
}

impl LabelSpace {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Format("label space must be nonempty".into()));
        }
        check_distinct(&labels, "label")?;
        Ok(LabelSpace { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn names(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == name)
    }
}

fn check_distinct(names: &[String], what: &str) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for n in names {
        if !seen.insert(n.as_str()) {
            return Err(Error::Format(format!("duplicate {what} {n:?}")));
        }
    }
    Ok(())
}

/// A partial list concept: at each point either undefined or a set of exactly
/// `k` distinct labels (`k` is fixed by the owning class). Lists are kept
/// sorted so value equality is set equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ListConcept {
    name: Option<String>,
    values: Vec<Option<Vec<usize>>>,
}

impl ListConcept {
    /// Builds a concept, normalizing each list to sorted order.
    /// `None` means the concept is undefined at that point.
    pub fn new(name: Option<String>, mut values: Vec<Option<Vec<usize>>>) -> Self {
        for v in values.iter_mut().flatten() {
            v.sort_unstable();
        }
        ListConcept { name, values }
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn arity(&self) -> usize {
        self.values.len()
    }

    /// Label list at a point, or `None` where the concept is undefined.
    pub fn value(&self, point: usize) -> Option<&[usize]> {
        self.values[point].as_deref()
    }

    pub fn is_defined(&self, point: usize) -> bool {
        self.values[point].is_some()
    }

    pub fn is_total(&self) -> bool {
        self.values.iter().all(|v| v.is_some())
    }

    /// Points where the concept is defined, in index order.
    pub fn support(&self) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&i| self.values[i].is_some())
            .collect()
    }

    pub fn contains(&self, point: usize, label: usize) -> bool {
        match &self.values[point] {
            Some(list) => list.binary_search(&label).is_ok(),
            None => false,
        }
    }

    pub fn values(&self) -> &[Option<Vec<usize>>] {
        &self.values
    }

    fn project(&self, subset: &[usize]) -> ListConcept {
        ListConcept {
            name: self.name.clone(),
            values: subset.iter().map(|&i| self.values[i].clone()).collect(),
        }
    }
}

/// A finite class of partial `k`-list concepts over a shared domain and label
/// space. Construction validates arities, list sizes and label ranges, and
/// removes duplicate concepts (same value map), keeping the first occurrence.
#[derive(Debug, Clone)]
pub struct ConceptClass {
    name: Option<String>,
    domain: Domain,
    labels: LabelSpace,
    k: usize,
    concepts: Vec<ListConcept>,
}

impl ConceptClass {
    pub fn new(
        name: Option<String>,
        domain: Domain,
        labels: LabelSpace,
        k: usize,
        concepts: Vec<ListConcept>,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::Format("list size k must be at least 1".into()));
        }
        if k > labels.len() {
            return Err(Error::Format(format!(
                "list size {} exceeds label count {}",
                k,
                labels.len()
            )));
        }
        let mut seen: Vec<&ListConcept> = Vec::new();
        let mut kept = Vec::new();
        for c in &concepts {
            if c.arity() != domain.len() {
                return Err(Error::Arity {
                    expected: domain.len(),
                    got: c.arity(),
                });
            }
            for v in c.values.iter().flatten() {
                if v.len() != k {
                    return Err(Error::Format(format!(
                        "list has {} labels, class k is {}",
                        v.len(),
                        k
                    )));
                }
                if v.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::Format("list labels must be distinct".into()));
                }
                if let Some(&max) = v.last() {
                    if max >= labels.len() {
                        return Err(Error::Index(format!("label index {max}")));
                    }
                }
            }
            if !seen.iter().any(|p| p.values == c.values) {
                kept.push(c.clone());
            }
            seen.push(c);
        }
        Ok(ConceptClass {
            name,
            domain,
            labels,
            k,
            concepts: kept,
        })
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn labels(&self) -> &LabelSpace {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn concept(&self, i: usize) -> &ListConcept {
        &self.concepts[i]
    }

    pub fn concepts(&self) -> &[ListConcept] {
        &self.concepts
    }

    pub fn is_total(&self) -> bool {
        self.concepts.iter().all(|c| c.is_total())
    }

    /// Restriction to a subset of points, given as distinct point indices.
    /// The result's domain keeps the order of `subset`; duplicate restricted
    /// concepts collapse to the first occurrence.
    pub fn restrict(&self, subset: &[usize]) -> Result<ConceptClass> {
        if subset.is_empty() {
            return Err(Error::Format("restriction subset must be nonempty".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for &i in subset {
            if i >= self.domain.len() {
                return Err(Error::Index(format!("point index {i}")));
            }
            if !seen.insert(i) {
                return Err(Error::Format("restriction subset must be distinct".into()));
            }
        }
        let domain = Domain::new(
            subset
                .iter()
                .map(|&i| self.domain.points[i].clone())
                .collect(),
        )?;
        ConceptClass::new(
            None,
            domain,
            self.labels.clone(),
            self.k,
            self.concepts.iter().map(|c| c.project(subset)).collect(),
        )
    }

    /// Indices of concepts defined on every point of `subset`.
    pub fn total_on(&self, subset: &[usize]) -> Vec<usize> {
        (0..self.concepts.len())
            .filter(|&ci| subset.iter().all(|&p| self.concepts[ci].is_defined(p)))
            .collect()
    }

    /// Distinct labels appearing in some concept's list at `point`, sorted.
    pub fn labels_at(&self, point: usize) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for c in &self.concepts {
            if let Some(list) = c.value(point) {
                out.extend_from_slice(list);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Totalizes a concept into a hypothesis: undefined points get the
    /// smallest `k` labels.
    pub fn totalize(&self, concept: usize) -> ListHypothesis {
        let c = &self.concepts[concept];
        let lists = (0..self.domain.len())
            .map(|p| match c.value(p) {
                Some(list) => list.to_vec(),
                None => (0..self.k).collect(),
            })
            .collect();
        ListHypothesis::new(self.k, lists).expect("totalized lists are valid")
    }
}

/// A total list function over a domain: exactly `k` distinct labels per point.
/// This is the output type of learners, reconstructors and covers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ListHypothesis {
    k: usize,
    lists: Vec<Vec<usize>>,
}

impl ListHypothesis {
    pub fn new(k: usize, mut lists: Vec<Vec<usize>>) -> Result<Self> {
        for l in lists.iter_mut() {
            l.sort_unstable();
            if l.len() != k || l.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Format(format!(
                    "hypothesis list must hold {k} distinct labels"
                )));
            }
        }
        Ok(ListHypothesis { k, lists })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of domain points the hypothesis is defined over.
    pub fn arity(&self) -> usize {
        self.lists.len()
    }

    pub fn list(&self, point: usize) -> &[usize] {
        &self.lists[point]
    }

    pub fn lists(&self) -> &[Vec<usize>] {
        &self.lists
    }

    pub fn contains(&self, point: usize, label: usize) -> bool {
        self.lists[point].binary_search(&label).is_ok()
    }

    /// True when every defined value of `c` lies inside this hypothesis'
    /// list at the same point. Arities must match.
    pub fn covers(&self, c: &ListConcept) -> bool {
        assert_eq!(self.arity(), c.arity(), "cover check across arities");
        (0..c.arity()).all(|p| match c.value(p) {
            Some(list) => list.iter().all(|&y| self.contains(p, y)),
            None => true,
        })
    }
}

/// For each concept of `class`, the index of the first hypothesis covering
/// it, or `None` for the whole call if some concept is uncovered.
pub fn cover_assignment(class: &ConceptClass, hyps: &[ListHypothesis]) -> Option<Vec<usize>> {
    let mut out = Vec::with_capacity(class.len());
    for c in class.concepts() {
        let i = hyps.iter().position(|h| h.covers(c))?;
        out.push(i);
    }
    Some(out)
}

/// A finite labeled sample: an ordered sequence of (point, label) index
/// pairs. Repetitions are allowed and meaningful.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sample {
    pairs: Vec<(usize, usize)>,
}

impl Sample {
    pub fn new(pairs: Vec<(usize, usize)>) -> Self {
        Sample { pairs }
    }

    pub fn empty() -> Self {
        Sample { pairs: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Distinct pairs in order of first occurrence.
    pub fn distinct_pairs(&self) -> Vec<(usize, usize)> {
        let mut seen = std::collections::HashSet::new();
        self.pairs
            .iter()
            .filter(|p| seen.insert(**p))
            .copied()
            .collect()
    }
}

fn check_sample_points(s: &Sample, arity: usize) -> Result<()> {
    for &(x, _) in s.pairs() {
        if x >= arity {
            return Err(Error::Index(format!("sample point index {x}")));
        }
    }
    Ok(())
}

/// Number of sample pairs whose label is outside the hypothesis list.
pub fn hypothesis_miss_count(h: &ListHypothesis, s: &Sample) -> Result<usize> {
    check_sample_points(s, h.arity())?;
    Ok(s.pairs()
        .iter()
        .filter(|&&(x, y)| !h.contains(x, y))
        .count())
}

/// Empirical loss of a hypothesis: fraction of sample pairs missed. Exact.
pub fn hypothesis_sample_loss(h: &ListHypothesis, s: &Sample) -> Result<Rational64> {
    if s.is_empty() {
        return Err(Error::EmptySample);
    }
    let miss = hypothesis_miss_count(h, s)?;
    Ok(Rational64::new(miss as i64, s.len() as i64))
}

/// Pairs where a concept disagrees: undefined points count as misses.
pub fn concept_miss_count(c: &ListConcept, s: &Sample) -> Result<usize> {
    check_sample_points(s, c.arity())?;
    Ok(s.pairs()
        .iter()
        .filter(|&&(x, y)| !c.contains(x, y))
        .count())
}

/// Empirical loss of a partial concept. Undefined points count as misses.
pub fn concept_sample_loss(c: &ListConcept, s: &Sample) -> Result<Rational64> {
    if s.is_empty() {
        return Err(Error::EmptySample);
    }
    let miss = concept_miss_count(c, s)?;
    Ok(Rational64::new(miss as i64, s.len() as i64))
}

/// Smallest empirical loss over the class, as an exact rational.
pub fn best_class_loss(class: &ConceptClass, s: &Sample) -> Result<Rational64> {
    if class.is_empty() {
        return Err(Error::EmptyClass);
    }
    if s.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut best = None;
    for c in class.concepts() {
        let miss = concept_miss_count(c, s)?;
        best = Some(best.map_or(miss, |b: usize| b.min(miss)));
    }
    Ok(Rational64::new(best.unwrap() as i64, s.len() as i64))
}

/// Population loss of a hypothesis under a finite discrete distribution.
pub fn hypothesis_population_loss(h: &ListHypothesis, d: &DiscreteDistribution) -> Result<f64> {
    let mut loss = 0.0;
    for &(x, y, p) in d.support() {
        if x >= h.arity() {
            return Err(Error::Index(format!("distribution point index {x}")));
        }
        if !h.contains(x, y) {
            loss += p;
        }
    }
    Ok(loss)
}

/// Population loss of a partial concept; undefined points count as misses.
pub fn concept_population_loss(c: &ListConcept, d: &DiscreteDistribution) -> Result<f64> {
    let mut loss = 0.0;
    for &(x, y, p) in d.support() {
        if x >= c.arity() {
            return Err(Error::Index(format!("distribution point index {x}")));
        }
        if !c.contains(x, y) {
            loss += p;
        }
    }
    Ok(loss)
}

/// True when the concept is defined at every sample point and every sample
/// label sits in its list there.
pub fn concept_realizes(c: &ListConcept, s: &Sample) -> Result<bool> {
    check_sample_points(s, c.arity())?;
    Ok(s.pairs().iter().all(|&(x, y)| c.contains(x, y)))
}

/// First concept realizing the sample, if any. The empty sample is realized
/// by every concept.
pub fn is_realizable(class: &ConceptClass, s: &Sample) -> Result<Option<usize>> {
    for (i, c) in class.concepts().iter().enumerate() {
        if concept_realizes(c, s)? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

/// Largest subsequence of `s` realizable by the class, with the index of the
/// first concept attaining it. Its length equals `(1 - min_c loss(c, s)) * |s|`
/// exactly, because any realizable subsequence is realized by one concept.
pub fn max_realizable_subsample(
    class: &ConceptClass,
    s: &Sample,
) -> Result<(Sample, Option<usize>)> {
    if class.is_empty() {
        return Ok((Sample::empty(), None));
    }
    let mut best: Option<(usize, usize)> = None; // (kept count, concept)
    for (ci, c) in class.concepts().iter().enumerate() {
        check_sample_points(s, c.arity())?;
        let kept = s.pairs().iter().filter(|&&(x, y)| c.contains(x, y)).count();
        if best.map_or(true, |(b, _)| kept > b) {
            best = Some((kept, ci));
        }
    }
    let (_, ci) = best.unwrap();
    let c = class.concept(ci);
    let kept: Vec<(usize, usize)> = s
        .pairs()
        .iter()
        .filter(|&&(x, y)| c.contains(x, y))
        .copied()
        .collect();
    Ok((Sample::new(kept), Some(ci)))
}

/// Finite distribution over (point, label) pairs. Probabilities must be
/// nonnegative and sum to 1 within 1e-12; support pairs must be distinct.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    support: Vec<(usize, usize, f64)>,
}

impl DiscreteDistribution {
    pub fn new(support: Vec<(usize, usize, f64)>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::Format(
                "distribution support must be nonempty".into(),
            ));
        }
        let mut seen = std::collections::HashSet::new();
        let mut sum = 0.0;
        for &(x, y, p) in &support {
            if !(p >= 0.0) {
                return Err(Error::Format(format!("negative probability {p}")));
            }
            if !seen.insert((x, y)) {
                return Err(Error::Format(format!("duplicate support pair ({x}, {y})")));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Format(format!(
                "probabilities sum to {sum}, expected 1 within 1e-12"
            )));
        }
        Ok(DiscreteDistribution { support })
    }

    pub fn support(&self) -> &[(usize, usize, f64)] {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// One draw. Scans the cumulative sum, so identical RNG state gives an
    /// identical pair.
    pub fn draw(&self, rng: &mut impl Rng) -> (usize, usize) {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for &(x, y, p) in &self.support {
            acc += p;
            if u < acc {
                return (x, y);
            }
        }
        let &(x, y, _) = self.support.last().unwrap();
        (x, y)
    }

    pub fn draw_sample(&self, n: usize, rng: &mut impl Rng) -> Sample {
        Sample::new((0..n).map(|_| self.draw(rng)).collect())
    }

    /// Point marginal, aggregated in order of first occurrence.
    pub fn marginal(&self) -> Vec<(usize, f64)> {
        let mut out: Vec<(usize, f64)> = Vec::new();
        for &(x, _, p) in &self.support {
            match out.iter_mut().find(|(q, _)| *q == x) {
                Some((_, acc)) => *acc += p,
                None => out.push((x, p)),
            }
        }
        out
    }
}

/// Resource caps for operations that materialize combinatorial objects.
/// Exceeding a cap is reported as `Error::Capacity`, never silently truncated.
#[derive(Debug, Clone)]
pub struct Caps {
    /// Max points, and max labels, of a materialized product table.
    pub product_cells: usize,
    /// Max concepts materialized by selection-class expansion.
    pub selection_concepts: usize,
    /// Max concepts admitted to the exact minimum-cover search.
    pub exact_cover_concepts: usize,
    /// Max enumerated samples for exact learning-curve evaluation.
    pub exact_curve_samples: u128,
    /// Max enumerated pair sequences when unrolling a compression scheme.
    pub scheme_sequences: u128,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            product_cells: 100_000,
            selection_concepts: 1_000_000,
            exact_cover_concepts: 24,
            exact_curve_samples: 1_000_000,
            scheme_sequences: 1_000_000,
        }
    }
}
