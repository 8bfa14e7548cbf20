//! List covers: exact minimum covers, greedy covers, the covering size
//! function, and constructions that turn covers of derived classes back
//! into covers of the original class.
//!
//! A set of concepts fits one k-list hypothesis exactly when, at every
//! point, the union of their defined lists has at most k labels. Minimum
//! covers are therefore minimum partitions into such compatible groups.
//! The cover list size k is independent of the class's own list size; it
//! only has to be at least as large.

use itertools::Itertools;

use crate::algebra::ProductClass;
use crate::compression::CompressionScheme;
use crate::dims::ds_dimension;
use crate::error::{Error, Result};
use crate::model::{cover_assignment, Caps, ConceptClass, ListConcept, ListHypothesis, Sample};

/// A cover with its concept assignment. `optimal` records whether the
/// producing search proved minimality.
#[derive(Debug, Clone)]
pub struct CoverResult {
    pub hypotheses: Vec<ListHypothesis>,
    pub assignment: Vec<usize>,
    pub optimal: bool,
}

impl CoverResult {
    pub fn size(&self) -> usize {
        self.hypotheses.len()
    }
}

/// Sorts, dedups, trims to the k smallest, and pads with the smallest
/// absent labels so the result has exactly k distinct labels out of m.
fn exact_list(labels: impl IntoIterator<Item = usize>, k: usize, m: usize) -> Result<Vec<usize>> {
    if k > m {
        return Err(Error::Format(format!(
            "cannot build a {k}-list from {m} labels"
        )));
    }
    let mut list: Vec<usize> = labels.into_iter().collect();
    list.sort_unstable();
    list.dedup();
    list.truncate(k);
    let mut next = 0;
    while list.len() < k {
        if !list.contains(&next) {
            list.push(next);
        }
        next += 1;
    }
    list.sort_unstable();
    Ok(list)
}

fn check_list_size(class: &ConceptClass, k: usize) -> Result<()> {
    if k == 0 || k > class.labels().len() {
        return Err(Error::Format(format!(
            "cover list size {k} incompatible with {} labels",
            class.labels().len()
        )));
    }
    if class.k() > k {
        return Err(Error::Format(format!(
            "cover lists of size {k} cannot contain {}-label concept lists",
            class.k()
        )));
    }
    Ok(())
}

/// Per-point union of the defined lists of a group of concepts.
fn group_unions(class: &ConceptClass, group: &[usize]) -> Vec<Vec<usize>> {
    let n = class.domain().len();
    let mut unions = vec![Vec::new(); n];
    for &ci in group {
        let c = class.concept(ci);
        for (p, u) in unions.iter_mut().enumerate() {
            if let Some(list) = c.value(p) {
                for &y in list {
                    if !u.contains(&y) {
                        u.push(y);
                    }
                }
            }
        }
    }
    unions
}

fn fits(unions: &[Vec<usize>], c: &ListConcept, k: usize) -> bool {
    (0..c.arity()).all(|p| match c.value(p) {
        Some(list) => {
            let extra = list.iter().filter(|y| !unions[p].contains(y)).count();
            unions[p].len() + extra <= k
        }
        None => true,
    })
}

fn absorb(unions: &mut [Vec<usize>], c: &ListConcept) {
    for p in 0..c.arity() {
        if let Some(list) = c.value(p) {
            for &y in list {
                if !unions[p].contains(&y) {
                    unions[p].push(y);
                }
            }
        }
    }
}

/// The k-list hypothesis induced by a compatible group: at each point the
/// union of the group's lists, padded with the smallest unused labels.
pub fn hypothesis_for_group(
    class: &ConceptClass,
    group: &[usize],
    k: usize,
) -> Result<ListHypothesis> {
    check_list_size(class, k)?;
    let m = class.labels().len();
    let unions = group_unions(class, group);
    let lists = unions
        .into_iter()
        .map(|u| {
            if u.len() > k {
                return Err(Error::InvalidCover(format!(
                    "group needs {} labels at one point but lists hold {k}",
                    u.len()
                )));
            }
            exact_list(u, k, m)
        })
        .collect::<Result<_>>()?;
    ListHypothesis::new(k, lists)
}

fn result_from_groups(
    class: &ConceptClass,
    groups: &[Vec<usize>],
    k: usize,
    optimal: bool,
) -> Result<CoverResult> {
    let mut assignment = vec![usize::MAX; class.len()];
    for (gi, group) in groups.iter().enumerate() {
        for &ci in group {
            assignment[ci] = gi;
        }
    }
    let hypotheses = groups
        .iter()
        .map(|g| hypothesis_for_group(class, g, k))
        .collect::<Result<_>>()?;
    Ok(CoverResult {
        hypotheses,
        assignment,
        optimal,
    })
}

fn conflict(class: &ConceptClass, a: usize, b: usize, k: usize) -> bool {
    let (ca, cb) = (class.concept(a), class.concept(b));
    (0..class.domain().len()).any(|p| match (ca.value(p), cb.value(p)) {
        (Some(la), Some(lb)) => {
            let extra = lb.iter().filter(|y| !la.contains(y)).count();
            la.len() + extra > k
        }
        _ => false,
    })
}

/// Greedy cover: repeatedly takes the first unassigned concept and grows a
/// maximal compatible group through the remaining concepts in class order.
/// Always valid, not always minimum.
pub fn greedy_cover(class: &ConceptClass, k: usize) -> Result<CoverResult> {
    check_list_size(class, k)?;
    let mut assigned = vec![false; class.len()];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for start in 0..class.len() {
        if assigned[start] {
            continue;
        }
        let mut group = vec![start];
        assigned[start] = true;
        let mut unions = group_unions(class, &group);
        for ci in start + 1..class.len() {
            if !assigned[ci] && fits(&unions, class.concept(ci), k) {
                assigned[ci] = true;
                absorb(&mut unions, class.concept(ci));
                group.push(ci);
            }
        }
        groups.push(group);
    }
    result_from_groups(class, &groups, k, false)
}

struct CoverSearch<'a> {
    class: &'a ConceptClass,
    k: usize,
    order: Vec<usize>,
    lower: usize,
    best: Vec<Vec<usize>>,
    done: bool,
}

impl CoverSearch<'_> {
    fn dfs(&mut self, idx: usize, groups: &mut Vec<Vec<usize>>, unions: &mut Vec<Vec<Vec<usize>>>) {
        if self.done || groups.len() >= self.best.len() {
            return;
        }
        if idx == self.order.len() {
            self.best = groups.clone();
            if self.best.len() == self.lower {
                self.done = true;
            }
            return;
        }
        let ci = self.order[idx];
        let c = self.class.concept(ci);
        for gi in 0..groups.len() {
            if fits(&unions[gi], c, self.k) {
                let saved = unions[gi].clone();
                absorb(&mut unions[gi], c);
                groups[gi].push(ci);
                self.dfs(idx + 1, groups, unions);
                groups[gi].pop();
                unions[gi] = saved;
                if self.done {
                    return;
                }
            }
        }
        if groups.len() + 1 < self.best.len() {
            groups.push(vec![ci]);
            unions.push(group_unions(self.class, &[ci]));
            self.dfs(idx + 1, groups, unions);
            groups.pop();
            unions.pop();
        }
    }
}

/// Exact minimum k-list cover by branch and bound over group assignments.
/// Groups are opened in first-fit order, which kills relabeling symmetry.
pub fn min_cover(class: &ConceptClass, k: usize, caps: &Caps) -> Result<CoverResult> {
    check_list_size(class, k)?;
    if class.len() > caps.exact_cover_concepts {
        return Err(Error::capacity(
            "exact cover search",
            class.len() as u128,
            caps.exact_cover_concepts as u128,
        ));
    }
    if class.is_empty() {
        return Ok(CoverResult {
            hypotheses: Vec::new(),
            assignment: Vec::new(),
            optimal: true,
        });
    }
    let degrees: Vec<usize> = (0..class.len())
        .map(|a| {
            (0..class.len())
                .filter(|&b| b != a && conflict(class, a, b, k))
                .count()
        })
        .collect();
    let mut order: Vec<usize> = (0..class.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(degrees[i]));

    // Label-count bound: each hypothesis holds k of the labels the class
    // uses at a point.
    let label_bound = (0..class.domain().len())
        .map(|p| class.labels_at(p).len().div_ceil(k))
        .max()
        .unwrap_or(0)
        .max(1);
    // Pairwise conflicting concepts all need distinct hypotheses.
    let mut clique: Vec<usize> = Vec::new();
    for &i in &order {
        if clique.iter().all(|&j| conflict(class, i, j, k)) {
            clique.push(i);
        }
    }
    let lower = label_bound.max(clique.len());

    // First-fit over the search order seeds the incumbent.
    let mut greedy_groups: Vec<Vec<usize>> = Vec::new();
    let mut greedy_unions: Vec<Vec<Vec<usize>>> = Vec::new();
    for &ci in &order {
        let c = class.concept(ci);
        match (0..greedy_groups.len()).find(|&g| fits(&greedy_unions[g], c, k)) {
            Some(g) => {
                absorb(&mut greedy_unions[g], c);
                greedy_groups[g].push(ci);
            }
            None => {
                greedy_groups.push(vec![ci]);
                greedy_unions.push(group_unions(class, &[ci]));
            }
        }
    }

    let mut search = CoverSearch {
        class,
        k,
        order,
        lower,
        done: greedy_groups.len() == lower,
        best: greedy_groups,
    };
    if !search.done {
        let mut groups = Vec::new();
        let mut unions = Vec::new();
        search.dfs(0, &mut groups, &mut unions);
    }
    result_from_groups(class, &search.best, k, true)
}

/// The covering size function: the largest minimum k-list cover size over
/// all restrictions to exactly n domain points.
pub fn covering_size_function(
    class: &ConceptClass,
    n: usize,
    k: usize,
    caps: &Caps,
) -> Result<usize> {
    if n == 0 || n > class.domain().len() {
        return Err(Error::Format(format!(
            "covering size needs 1 <= n <= {}, got {n}",
            class.domain().len()
        )));
    }
    let mut worst = 0;
    for subset in (0..class.domain().len()).combinations(n) {
        let cover = min_cover(&class.restrict(&subset)?, k, caps)?;
        worst = worst.max(cover.size());
    }
    Ok(worst)
}

/// Which factor of a product a recovered cover applies to.
#[derive(Debug, Clone)]
pub enum FactorCover {
    Left(Vec<ListHypothesis>),
    Right(Vec<ListHypothesis>),
}

fn covers_product(
    prod: &ProductClass,
    f: &ListConcept,
    g: &ListConcept,
    h: &ListHypothesis,
) -> bool {
    f.support().into_iter().all(|u| {
        g.support().into_iter().all(|v| {
            h.contains(
                prod.point_index(u, v),
                prod.label_index(f.value(u).unwrap()[0], g.value(v).unwrap()[0]),
            )
        })
    })
}

/// Labels paired with `g(v)` inside `h` at the product point `(u, v)`.
fn slice_labels(
    prod: &ProductClass,
    h: &ListHypothesis,
    g: &ListConcept,
    v: usize,
    u: usize,
) -> Vec<usize> {
    let z = g.value(v).unwrap()[0];
    (0..prod.left_labels())
        .filter(|&y| h.contains(prod.point_index(u, v), prod.label_index(y, z)))
        .collect()
}

/// Win-win extraction from a product cover. Given a (k+k')-list cover of
/// `left x right` (both factors 1-list classes), produces either a k-list
/// cover of the left class of size at most |cover|, or a k'-list cover of
/// the right class of size at most |left domain| * |cover|.
///
/// A right concept g is called good when, for every left concept f and
/// every hypothesis covering their pair, each support point of f has some
/// support point of g where at most k labels are paired with g's value.
/// A good g lets the per-point intersections over its support be trimmed
/// into a k-list cover of the left class. When no g is good, at each
/// witnessing point the second coordinates number at most k', so
/// projecting the cover point by point covers the right class.
pub fn cover_from_product_cover(
    prod: &ProductClass,
    left: &ConceptClass,
    right: &ConceptClass,
    cover: &[ListHypothesis],
    k_left: usize,
    k_right: usize,
) -> Result<FactorCover> {
    if left.k() != 1 || right.k() != 1 {
        return Err(Error::UnsupportedClass(
            "product cover extraction needs 1-list factors".into(),
        ));
    }
    if k_left == 0 || k_right == 0 {
        return Err(Error::Format("list sizes must be at least 1".into()));
    }
    if k_left > left.labels().len() || k_right > right.labels().len() {
        return Err(Error::Format(
            "factor label spaces are too small for the requested list sizes".into(),
        ));
    }
    for h in cover {
        if h.arity() != prod.class().domain().len() || h.k() != k_left + k_right {
            return Err(Error::InvalidCover(
                "cover shape does not match the product class".into(),
            ));
        }
    }
    if cover_assignment(prod.class(), cover).is_none() {
        return Err(Error::InvalidCover(
            "hypotheses do not cover the product class".into(),
        ));
    }

    let good = right.concepts().iter().find(|g| {
        left.concepts().iter().all(|f| {
            cover
                .iter()
                .filter(|h| covers_product(prod, f, g, h))
                .all(|h| {
                    f.support().into_iter().all(|u| {
                        g.support()
                            .into_iter()
                            .any(|v| slice_labels(prod, h, g, v, u).len() <= k_left)
                    })
                })
        })
    });

    if let Some(g) = good {
        let mut out: Vec<ListHypothesis> = Vec::new();
        for h in cover {
            if !left
                .concepts()
                .iter()
                .any(|f| covers_product(prod, f, g, h))
            {
                continue;
            }
            let lists = (0..prod.left_points())
                .map(|u| {
                    let inter = g
                        .support()
                        .into_iter()
                        .map(|v| slice_labels(prod, h, g, v, u))
                        .reduce(|a, b| a.into_iter().filter(|y| b.contains(y)).collect())
                        .unwrap_or_else(|| (0..prod.left_labels()).collect());
                    exact_list(inter, k_left, left.labels().len())
                })
                .collect::<Result<_>>()?;
            let hyp = ListHypothesis::new(k_left, lists)?;
            if !out.contains(&hyp) {
                out.push(hyp);
            }
        }
        return Ok(FactorCover::Left(out));
    }

    let mut out: Vec<ListHypothesis> = Vec::new();
    for h in cover {
        for u in 0..prod.left_points() {
            let lists = (0..prod.right_points())
                .map(|v| {
                    let proj = h
                        .list(prod.point_index(u, v))
                        .iter()
                        .map(|&l| prod.label_parts(l).1);
                    exact_list(proj, k_right, right.labels().len())
                })
                .collect::<Result<_>>()?;
            let hyp = ListHypothesis::new(k_right, lists)?;
            if !out.contains(&hyp) {
                out.push(hyp);
            }
        }
    }
    Ok(FactorCover::Right(out))
}

/// Turns a (k+1)-list cover of the shared-label completion of a partial
/// 1-list class into a k-list cover of the class itself, with its size
/// bound. For each concept, the first hypothesis covering its completion
/// is specialized: where the shared label is absent the hypothesis pins
/// the concept's own value, padded to k labels; elsewhere the shared label
/// is dropped. The bound is (labels * points)^d * |cover|, where d is the
/// rank-1 shattering dimension of the class.
pub fn cover_from_minimal_disambiguation(
    class: &ConceptClass,
    star: Option<usize>,
    cover: &[ListHypothesis],
    k: usize,
) -> Result<(Vec<ListHypothesis>, u128)> {
    if class.k() != 1 {
        return Err(Error::UnsupportedClass(
            "completion cover extraction needs a 1-list class".into(),
        ));
    }
    let n = class.domain().len();
    let m = class.labels().len();
    if k == 0 || k > m {
        return Err(Error::Format(format!(
            "list size {k} incompatible with {m} labels"
        )));
    }
    for h in cover {
        if h.arity() != n || h.k() != k + 1 {
            return Err(Error::InvalidCover(
                "cover shape does not match the completed class".into(),
            ));
        }
    }
    let has_star = |h: &ListHypothesis, p: usize| star.is_some_and(|s| h.contains(p, s));
    let mut out: Vec<ListHypothesis> = Vec::new();
    for c in class.concepts() {
        // The completion of c maps support points to c's value and the rest
        // to the shared label, so covering it means exactly this:
        let covering = cover.iter().find(|h| {
            (0..n).all(|p| match c.value(p) {
                Some(list) => h.contains(p, list[0]),
                None => has_star(h, p),
            })
        });
        let h = covering.ok_or_else(|| {
            Error::InvalidCover("hypotheses do not cover the completed class".into())
        })?;
        let lists = (0..n)
            .map(|p| {
                if has_star(h, p) {
                    let trimmed = h.list(p).iter().copied().filter(|&y| Some(y) != star);
                    exact_list(trimmed, k, m)
                } else {
                    exact_list(c.value(p).unwrap().iter().copied(), k, m)
                }
            })
            .collect::<Result<_>>()?;
        let hyp = ListHypothesis::new(k, lists)?;
        if !out.contains(&hyp) {
            out.push(hyp);
        }
    }
    let (d, _) = ds_dimension(class, 1, None)?;
    let bound = ((m as u128).saturating_mul(n as u128))
        .saturating_pow(d as u32)
        .saturating_mul(cover.len() as u128);
    Ok((out, bound))
}

/// Covers of every n-point restriction obtained by unrolling a
/// compression scheme: the reconstructions of all short pair sequences
/// over a restricted domain must cover the restriction. The bound field
/// is the counting ceiling (n*labels)^d on the covering size.
#[derive(Debug, Clone)]
pub struct CompressionCover {
    pub subsets: Vec<(Vec<usize>, Vec<ListHypothesis>)>,
    pub bound: u128,
}

/// Enumerates every pair sequence up to the scheme's length profile over
/// each size-n subset, reconstructs, projects to the subset, and verifies
/// that the results cover the restricted class. A failure to cover means
/// the scheme is not realizably correct on the class.
pub fn cover_from_compression(
    scheme: &CompressionScheme,
    class: &ConceptClass,
    n: usize,
    caps: &Caps,
) -> Result<CompressionCover> {
    if n == 0 || n > class.domain().len() {
        return Err(Error::Format(format!(
            "restriction size must satisfy 1 <= n <= {}, got {n}",
            class.domain().len()
        )));
    }
    let m = class.labels().len();
    let d = scheme.profile().max_len(n);
    let per_len = (n as u128).saturating_mul(m as u128);
    let mut total: u128 = 0;
    let mut power: u128 = 1;
    for _ in 0..=d {
        total = total.saturating_add(power);
        power = power.saturating_mul(per_len);
    }
    if total > caps.scheme_sequences {
        return Err(Error::capacity(
            "compression unroll sequences",
            total,
            caps.scheme_sequences,
        ));
    }
    let bound = per_len.saturating_pow(d as u32);
    let mut subsets = Vec::new();
    for subset in (0..class.domain().len()).combinations(n) {
        let restricted = class.restrict(&subset)?;
        let pairs: Vec<(usize, usize)> = subset
            .iter()
            .flat_map(|&x| (0..m).map(move |y| (x, y)))
            .collect();
        let mut hypotheses: Vec<ListHypothesis> = Vec::new();
        for len in 0..=d {
            let sequences: Box<dyn Iterator<Item = Vec<(usize, usize)>>> = if len == 0 {
                Box::new(std::iter::once(Vec::new()))
            } else {
                Box::new(
                    (0..len)
                        .map(|_| pairs.iter().copied())
                        .multi_cartesian_product(),
                )
            };
            for seq in sequences {
                let h = scheme
                    .reconstruct(&Sample::new(seq))
                    .map_err(|e| Error::InvalidScheme(format!("reconstruction failed: {e}")))?;
                if h.arity() != class.domain().len() || h.k() != scheme.k() {
                    return Err(Error::InvalidScheme(
                        "reconstruction shape does not match the class".into(),
                    ));
                }
                let lists = subset.iter().map(|&x| h.list(x).to_vec()).collect();
                let projected = ListHypothesis::new(h.k(), lists)?;
                if !hypotheses.contains(&projected) {
                    hypotheses.push(projected);
                }
            }
        }
        if cover_assignment(&restricted, &hypotheses).is_none() {
            return Err(Error::InvalidScheme(format!(
                "reconstructions do not cover the restriction to points {subset:?}"
            )));
        }
        subsets.push((subset, hypotheses));
    }
    Ok(CompressionCover { subsets, bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{minimal_disambiguation, product};
    use crate::compression::{boost_scheme, full_list_scheme, BoostParams, SizeProfile};
    use crate::learning::erm;
    use crate::model::{Domain, LabelSpace};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn class_from(
        points: usize,
        labels: usize,
        k: usize,
        rows: &[Vec<Option<Vec<usize>>>],
    ) -> ConceptClass {
        let domain = Domain::new((0..points).map(|i| format!("x{i}")).collect()).unwrap();
        let space = LabelSpace::new((0..labels).map(|i| format!("y{i}")).collect()).unwrap();
        let concepts = rows
            .iter()
            .map(|row| ListConcept::new(None, row.clone()))
            .collect();
        ConceptClass::new(None, domain, space, k, concepts).unwrap()
    }

    fn random_class(rng: &mut ChaCha8Rng, max_c: usize) -> ConceptClass {
        let points = rng.gen_range(1..=3);
        let labels = rng.gen_range(1..=4);
        let k = rng.gen_range(1..=2.min(labels));
        let count = rng.gen_range(1..=max_c);
        let rows: Vec<Vec<Option<Vec<usize>>>> = (0..count)
            .map(|_| {
                (0..points)
                    .map(|_| {
                        if rng.gen_bool(0.2) {
                            None
                        } else {
                            let mut pool: Vec<usize> = (0..labels).collect();
                            for i in (1..pool.len()).rev() {
                                pool.swap(i, rng.gen_range(0..=i));
                            }
                            pool.truncate(k);
                            Some(pool)
                        }
                    })
                    .collect()
            })
            .collect();
        class_from(points, labels, k, &rows)
    }

    /// Minimum compatible-partition size by enumerating every set partition.
    fn oracle_min_cover(class: &ConceptClass, k: usize) -> usize {
        fn rec(
            class: &ConceptClass,
            k: usize,
            idx: usize,
            groups: &mut Vec<Vec<usize>>,
            best: &mut usize,
        ) {
            if groups.len() >= *best {
                return;
            }
            if idx == class.len() {
                *best = groups.len();
                return;
            }
            let c = class.concept(idx);
            for gi in 0..groups.len() {
                let unions = group_unions(class, &groups[gi]);
                if fits(&unions, c, k) {
                    groups[gi].push(idx);
                    rec(class, k, idx + 1, groups, best);
                    groups[gi].pop();
                }
            }
            groups.push(vec![idx]);
            rec(class, k, idx + 1, groups, best);
            groups.pop();
        }
        let mut best = class.len().max(1);
        let mut groups = Vec::new();
        rec(class, k, 0, &mut groups, &mut best);
        best
    }

    fn check_cover(class: &ConceptClass, cover: &[ListHypothesis], k: usize) {
        assert!(cover_assignment(class, cover).is_some());
        for h in cover {
            assert_eq!(h.k(), k);
            assert_eq!(h.arity(), class.domain().len());
        }
    }

    #[test]
    fn pairwise_conflicting_constants_need_one_group_each() {
        let rows: Vec<Vec<Option<Vec<usize>>>> =
            (0..3).map(|y| vec![Some(vec![y]), Some(vec![y])]).collect();
        let class = class_from(2, 3, 1, &rows);
        let exact = min_cover(&class, 1, &Caps::default()).unwrap();
        assert_eq!(exact.size(), 3);
        assert!(exact.optimal);
        check_cover(&class, &exact.hypotheses, 1);
        let greedy = greedy_cover(&class, 1).unwrap();
        assert_eq!(greedy.size(), 3);
        assert!(!greedy.optimal);
    }

    #[test]
    fn wider_lists_shrink_the_cover() {
        // The same three constants fit two 2-lists and one 3-list.
        let rows: Vec<Vec<Option<Vec<usize>>>> =
            (0..3).map(|y| vec![Some(vec![y]), Some(vec![y])]).collect();
        let class = class_from(2, 3, 1, &rows);
        let two = min_cover(&class, 2, &Caps::default()).unwrap();
        assert_eq!(two.size(), 2);
        check_cover(&class, &two.hypotheses, 2);
        let three = min_cover(&class, 3, &Caps::default()).unwrap();
        assert_eq!(three.size(), 1);
        check_cover(&class, &three.hypotheses, 3);
    }

    #[test]
    fn compatible_concepts_share_a_hypothesis() {
        let rows = vec![
            vec![Some(vec![0]), Some(vec![0])],
            vec![Some(vec![0]), None],
        ];
        let class = class_from(2, 2, 1, &rows);
        let cover = min_cover(&class, 1, &Caps::default()).unwrap();
        assert_eq!(cover.size(), 1);
        assert_eq!(cover.assignment, vec![0, 0]);
        assert_eq!(cover.hypotheses[0].list(0), &[0]);
        assert_eq!(cover.hypotheses[0].list(1), &[0]);
    }

    #[test]
    fn pair_lists_group_only_when_lists_agree() {
        // Distinct 2-lists at a shared point always union past 2 labels, so
        // only agreement or disjoint support lets concepts share a group.
        let rows = vec![
            vec![Some(vec![0, 1]), Some(vec![0, 1])],
            vec![Some(vec![0, 1]), None],
            vec![Some(vec![2, 3]), Some(vec![0, 1])],
        ];
        let class = class_from(2, 4, 2, &rows);
        let cover = min_cover(&class, 2, &Caps::default()).unwrap();
        assert_eq!(cover.size(), 2);
        check_cover(&class, &cover.hypotheses, 2);
        assert_eq!(cover.assignment[0], cover.assignment[1]);
        assert_ne!(cover.assignment[0], cover.assignment[2]);
    }

    #[test]
    fn cover_size_must_fit_concept_lists() {
        let rows = vec![vec![Some(vec![0, 1])]];
        let class = class_from(1, 2, 2, &rows);
        assert!(min_cover(&class, 1, &Caps::default()).is_err());
        assert!(min_cover(&class, 3, &Caps::default()).is_err());
    }

    #[test]
    fn search_matches_partition_oracle_on_random_classes() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..60 {
            let class = random_class(&mut rng, 7);
            let k = rng.gen_range(class.k()..=class.labels().len());
            let cover = min_cover(&class, k, &Caps::default()).unwrap();
            check_cover(&class, &cover.hypotheses, k);
            assert_eq!(cover.size(), oracle_min_cover(&class, k), "{class:?}");
            for (ci, &gi) in cover.assignment.iter().enumerate() {
                assert!(cover.hypotheses[gi].covers(class.concept(ci)));
            }
            let greedy = greedy_cover(&class, k).unwrap();
            check_cover(&class, &greedy.hypotheses, k);
            assert!(greedy.size() >= cover.size());
        }
    }

    #[test]
    fn concept_count_cap_applies() {
        let rows: Vec<Vec<Option<Vec<usize>>>> = (0..4).map(|y| vec![Some(vec![y % 2])]).collect();
        let class = class_from(1, 2, 1, &rows);
        let tight = Caps {
            exact_cover_concepts: 1,
            ..Caps::default()
        };
        assert!(matches!(
            min_cover(&class, 1, &tight),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn covering_size_grows_with_subset_size() {
        // Threshold concepts on three points: restrictions to one point need
        // two hypotheses, and each further point splits one more threshold.
        let rows: Vec<Vec<Option<Vec<usize>>>> = (0..=3)
            .map(|t| (0..3).map(|p| Some(vec![usize::from(p >= t)])).collect())
            .collect();
        let class = class_from(3, 2, 1, &rows);
        let caps = Caps::default();
        let values: Vec<usize> = (1..=3)
            .map(|n| covering_size_function(&class, n, 1, &caps).unwrap())
            .collect();
        assert_eq!(values, vec![2, 3, 4]);
        assert!(values.windows(2).all(|w| w[0] <= w[1]));
        assert!(covering_size_function(&class, 0, 1, &caps).is_err());
        assert!(covering_size_function(&class, 4, 1, &caps).is_err());
    }

    fn single_concept_class(points: usize, labels: usize, values: &[usize]) -> ConceptClass {
        let rows = vec![values.iter().map(|&y| Some(vec![y])).collect()];
        class_from(points, labels, 1, &rows)
    }

    #[test]
    fn product_extraction_left_branch_on_aligned_cover() {
        // One pair of single-point concepts. The cover hypothesis pairs both
        // right labels with a single left label, so the right concept is
        // good and a left cover falls out.
        let f = single_concept_class(1, 2, &[0]);
        let g = single_concept_class(1, 2, &[0]);
        let prod = product(&f, &g, &Caps::default()).unwrap();
        let h = ListHypothesis::new(
            2,
            vec![vec![prod.label_index(0, 0), prod.label_index(0, 1)]],
        )
        .unwrap();
        match cover_from_product_cover(&prod, &f, &g, &[h], 1, 1).unwrap() {
            FactorCover::Left(c) => {
                assert_eq!(c.len(), 1);
                check_cover(&f, &c, 1);
            }
            FactorCover::Right(_) => panic!("expected a left cover"),
        }
    }

    #[test]
    fn product_extraction_right_branch_when_no_concept_is_good() {
        // Here the hypothesis pairs two left labels with the same right
        // label, so the slice at the only support point is too big and no
        // right concept is good; projection covers the right side.
        let f = single_concept_class(1, 2, &[0]);
        let g = single_concept_class(1, 2, &[0]);
        let prod = product(&f, &g, &Caps::default()).unwrap();
        let h = ListHypothesis::new(
            2,
            vec![vec![prod.label_index(0, 0), prod.label_index(1, 0)]],
        )
        .unwrap();
        match cover_from_product_cover(&prod, &f, &g, &[h], 1, 1).unwrap() {
            FactorCover::Right(c) => {
                assert_eq!(c.len(), 1);
                check_cover(&g, &c, 1);
                assert_eq!(c[0].list(0), &[0]);
            }
            FactorCover::Left(_) => panic!("expected a right cover"),
        }
    }

    #[test]
    fn product_extraction_valid_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let caps = Caps::default();
        for _ in 0..40 {
            let f = random_class(&mut rng, 3);
            let g = random_class(&mut rng, 3);
            if f.k() != 1 || g.k() != 1 {
                continue;
            }
            let prod = match product(&f, &g, &caps) {
                Ok(p) => p,
                Err(_) => continue,
            };
            if prod.class().labels().len() < 2 {
                continue;
            }
            let cover = match min_cover(prod.class(), 2, &caps) {
                Ok(c) => c,
                Err(_) => continue,
            };
            match cover_from_product_cover(&prod, &f, &g, &cover.hypotheses, 1, 1) {
                Ok(FactorCover::Left(c)) => {
                    assert!(c.len() <= cover.size());
                    check_cover(&f, &c, 1);
                }
                Ok(FactorCover::Right(c)) => {
                    assert!(c.len() <= f.domain().len() * cover.size());
                    check_cover(&g, &c, 1);
                }
                Err(e) => panic!("extraction failed: {e}"),
            }
        }
    }

    #[test]
    fn second_coordinate_projection_claim_is_exhaustive() {
        // For any (k+k')-subset of a label grid and any column z, either at
        // most k cells sit in column z or the subset spans at most k'
        // distinct columns.
        for (k, k2) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            let (my, mz) = (3, 3);
            let cells: Vec<(usize, usize)> =
                (0..my).flat_map(|y| (0..mz).map(move |z| (y, z))).collect();
            for subset in cells.iter().combinations(k + k2) {
                for z in 0..mz {
                    let column = subset.iter().filter(|&&&(_, c)| c == z).count();
                    let span = subset.iter().map(|&&(_, c)| c).unique().count();
                    assert!(column <= k || span <= k2);
                }
            }
        }
    }

    #[test]
    fn completion_cover_specializes_back_to_the_class() {
        // Two partial concepts over two points with disjoint supports.
        let rows = vec![vec![Some(vec![0]), None], vec![None, Some(vec![1])]];
        let class = class_from(2, 2, 1, &rows);
        let (bar, star) = minimal_disambiguation(&class).unwrap();
        let cover = min_cover(&bar, 2, &Caps::default()).unwrap();
        let (back, bound) =
            cover_from_minimal_disambiguation(&class, star, &cover.hypotheses, 1).unwrap();
        check_cover(&class, &back, 1);
        assert!((back.len() as u128) <= bound);
    }

    fn thresholds(points: usize) -> ConceptClass {
        let rows: Vec<Vec<Option<Vec<usize>>>> = (0..=points)
            .map(|t| {
                (0..points)
                    .map(|p| Some(vec![usize::from(p >= t)]))
                    .collect()
            })
            .collect();
        class_from(points, 2, 1, &rows)
    }

    #[test]
    fn zero_length_scheme_unrolls_to_a_single_cover() {
        let class = thresholds(3);
        let scheme = full_list_scheme(3, 2);
        let unrolled = cover_from_compression(&scheme, &class, 2, &Caps::default()).unwrap();
        assert_eq!(unrolled.bound, 1);
        assert_eq!(unrolled.subsets.len(), 3);
        for (_, hyps) in &unrolled.subsets {
            assert_eq!(hyps.len(), 1);
            assert!((hyps.len() as u128) <= unrolled.bound);
        }
    }

    #[test]
    fn single_pair_scheme_covers_a_singleton_class() {
        let rows = vec![vec![Some(vec![0]), Some(vec![1])]];
        let class = class_from(2, 2, 1, &rows);
        let rule = erm(&class).unwrap();
        let scheme = crate::compression::CompressionScheme::new(
            "first-pair",
            1,
            SizeProfile::Constant(1),
            |s: &Sample| Ok(Sample::new(s.pairs().iter().take(1).copied().collect())),
            move |t: &Sample| rule.apply(t),
        );
        let unrolled = cover_from_compression(&scheme, &class, 2, &Caps::default()).unwrap();
        assert_eq!(unrolled.bound, 4);
        let (_, hyps) = &unrolled.subsets[0];
        assert_eq!(hyps.len(), 1);
    }

    #[test]
    fn non_covering_scheme_is_detected() {
        // The reconstructor ignores its input and always answers 0, so the
        // constant-1 concept is never covered.
        let rows = vec![vec![Some(vec![0])], vec![Some(vec![1])]];
        let class = class_from(1, 2, 1, &rows);
        let scheme = crate::compression::CompressionScheme::new(
            "blind",
            1,
            SizeProfile::Constant(0),
            |_: &Sample| Ok(Sample::empty()),
            |_: &Sample| ListHypothesis::new(1, vec![vec![0]]),
        );
        assert!(matches!(
            cover_from_compression(&scheme, &class, 1, &Caps::default()),
            Err(Error::InvalidScheme(_))
        ));
    }

    #[test]
    fn boosted_scheme_unrolls_within_capacity_on_a_one_label_class() {
        // With a single label the sequence space stays tiny even though
        // the profile demands dozens of rounds.
        let rows = vec![vec![Some(vec![0])]];
        let class = class_from(1, 1, 1, &rows);
        let learner = erm(&class).unwrap();
        let scheme = boost_scheme(&learner, &class, 1, &BoostParams::for_k(1), 2).unwrap();
        let unrolled = cover_from_compression(&scheme, &class, 1, &Caps::default()).unwrap();
        assert_eq!(unrolled.bound, 1);
        assert_eq!(unrolled.subsets[0].1.len(), 1);
    }

    #[test]
    fn boosted_profile_trips_the_sequence_cap_on_real_classes() {
        let class = thresholds(3);
        let learner = erm(&class).unwrap();
        let scheme = boost_scheme(&learner, &class, 2, &BoostParams::for_k(1), 2).unwrap();
        assert!(matches!(
            cover_from_compression(&scheme, &class, 3, &Caps::default()),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn completion_cover_extraction_on_random_classes() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let caps = Caps::default();
        let mut ran = 0;
        for _ in 0..60 {
            let class = random_class(&mut rng, 4);
            if class.k() != 1 {
                continue;
            }
            let (bar, star) = minimal_disambiguation(&class).unwrap();
            if bar.labels().len() < 2 {
                continue;
            }
            let cover = match min_cover(&bar, 2, &caps) {
                Ok(c) => c,
                Err(_) => continue,
            };
            let (back, bound) =
                cover_from_minimal_disambiguation(&class, star, &cover.hypotheses, 1).unwrap();
            check_cover(&class, &back, 1);
            assert!((back.len() as u128) <= bound);
            ran += 1;
        }
        assert!(ran >= 20);
    }
}
