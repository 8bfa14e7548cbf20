//! Shattering dimensions of finite list concept classes.
//!
//! All four searches are exhaustive over point subsets, smallest size first,
//! and return the largest size at which a witness exists together with that
//! witness. Failure at one size is not used to rule out larger sizes; the
//! scan always runs to the domain size or the caller's cap. For a partial
//! class, a subset is only tested against the concepts defined on all of it.

mod pseudocube;

pub use pseudocube::{max_pseudocube, PseudoCube};

use std::collections::HashMap;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::model::ConceptClass;

/// Proof object returned by a successful dimension search. `check`
/// re-validates it against the class straight from the definitions,
/// independent of how the search found it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShatterWitness {
    /// `cube` is a rank-`rank` pseudo-cube of realizable tuples over `points`.
    Ds {
        points: Vec<usize>,
        rank: usize,
        cube: Vec<Vec<usize>>,
    },
    /// `selectors[b]` is a concept whose list at `points[i]` contains
    /// `pivot[i]` exactly when bit `i` of `b` is set.
    Graph {
        points: Vec<usize>,
        pivot: Vec<usize>,
        selectors: Vec<usize>,
    },
    /// `selectors[b]` takes value `pairs[i].0` at `points[i]` when bit `i`
    /// of `b` is set, and `pairs[i].1` otherwise.
    Natarajan {
        points: Vec<usize>,
        pairs: Vec<(usize, usize)>,
        selectors: Vec<usize>,
    },
}

impl ShatterWitness {
    pub fn check(&self, class: &ConceptClass) -> std::result::Result<(), String> {
        match self {
            ShatterWitness::Ds { points, rank, cube } => check_ds(class, points, *rank, cube),
            ShatterWitness::Graph {
                points,
                pivot,
                selectors,
            } => check_graph(class, points, pivot, selectors),
            ShatterWitness::Natarajan {
                points,
                pairs,
                selectors,
            } => check_natarajan(class, points, pairs, selectors),
        }
    }
}

fn check_points(class: &ConceptClass, points: &[usize]) -> std::result::Result<(), String> {
    if points.is_empty() {
        return Err("witness has no points".into());
    }
    let mut seen = std::collections::HashSet::new();
    for &p in points {
        if p >= class.domain().len() {
            return Err(format!("point index {p} out of range"));
        }
        if !seen.insert(p) {
            return Err(format!("point index {p} repeated"));
        }
    }
    Ok(())
}

fn check_ds(
    class: &ConceptClass,
    points: &[usize],
    rank: usize,
    cube: &[Vec<usize>],
) -> std::result::Result<(), String> {
    check_points(class, points)?;
    if rank == 0 || cube.is_empty() {
        return Err("cube must be nonempty with rank at least 1".into());
    }
    let n = points.len();
    let total = class.total_on(points);
    for t in cube {
        if t.len() != n {
            return Err("cube tuple arity mismatch".into());
        }
        let realized = total.iter().any(|&ci| {
            let c = class.concept(ci);
            t.iter().enumerate().all(|(i, &y)| c.contains(points[i], y))
        });
        if !realized {
            return Err(format!("tuple {t:?} is not realizable on the subset"));
        }
    }
    for (i, t) in cube.iter().enumerate() {
        if cube[..i].contains(t) {
            return Err(format!("tuple {t:?} repeated"));
        }
        for dir in 0..n {
            let deg = cube
                .iter()
                .filter(|u| {
                    u.iter()
                        .zip(t.iter())
                        .enumerate()
                        .all(|(d, (a, b))| (a == b) != (d == dir))
                })
                .count();
            if deg < rank {
                return Err(format!(
                    "tuple {t:?} has degree {deg} < {rank} in direction {dir}"
                ));
            }
        }
    }
    Ok(())
}

fn check_graph(
    class: &ConceptClass,
    points: &[usize],
    pivot: &[usize],
    selectors: &[usize],
) -> std::result::Result<(), String> {
    check_points(class, points)?;
    let n = points.len();
    if pivot.len() != n {
        return Err("pivot arity mismatch".into());
    }
    for &p in pivot {
        if p >= class.labels().len() {
            return Err(format!("pivot label {p} out of range"));
        }
    }
    if selectors.len() != 1 << n {
        return Err("selector table must list every pattern".into());
    }
    for (b, &ci) in selectors.iter().enumerate() {
        if ci >= class.len() {
            return Err(format!("selector concept {ci} out of range"));
        }
        let c = class.concept(ci);
        for (i, &x) in points.iter().enumerate() {
            if !c.is_defined(x) {
                return Err(format!("selector concept {ci} undefined at point {x}"));
            }
            let want = b & (1 << i) != 0;
            if c.contains(x, pivot[i]) != want {
                return Err(format!("pattern {b:#b} wrong at coordinate {i}"));
            }
        }
    }
    Ok(())
}

fn check_natarajan(
    class: &ConceptClass,
    points: &[usize],
    pairs: &[(usize, usize)],
    selectors: &[usize],
) -> std::result::Result<(), String> {
    check_points(class, points)?;
    let n = points.len();
    if pairs.len() != n {
        return Err("pair list arity mismatch".into());
    }
    for &(a, b) in pairs {
        if a == b {
            return Err("pair labels must differ".into());
        }
        if a >= class.labels().len() || b >= class.labels().len() {
            return Err("pair label out of range".into());
        }
    }
    if selectors.len() != 1 << n {
        return Err("selector table must list every pattern".into());
    }
    for (b, &ci) in selectors.iter().enumerate() {
        if ci >= class.len() {
            return Err(format!("selector concept {ci} out of range"));
        }
        let c = class.concept(ci);
        for (i, &x) in points.iter().enumerate() {
            let want = if b & (1 << i) != 0 {
                pairs[i].0
            } else {
                pairs[i].1
            };
            match c.value(x) {
                Some([v]) if *v == want => {}
                _ => return Err(format!("pattern {b:#b} wrong at coordinate {i}")),
            }
        }
    }
    Ok(())
}

/// All single-label selection tuples over `subset` drawn from concepts
/// defined on the whole subset: every way of picking one label per point
/// from one concept's lists. Sorted and deduplicated.
pub fn realizable_tuples(class: &ConceptClass, subset: &[usize]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for &ci in &class.total_on(subset) {
        let c = class.concept(ci);
        let lists: Vec<&[usize]> = subset.iter().map(|&x| c.value(x).unwrap()).collect();
        for pick in lists
            .iter()
            .map(|l| l.iter().copied())
            .multi_cartesian_product()
        {
            if seen.insert(pick.clone()) {
                out.push(pick);
            }
        }
    }
    out.sort();
    out
}

/// Largest subset size carrying a rank-`rank` pseudo-cube of realizable
/// tuples, up to `max_size` when given. Returns 0 with no witness when no
/// single point qualifies.
pub fn ds_dimension(
    class: &ConceptClass,
    rank: usize,
    max_size: Option<usize>,
) -> Result<(usize, Option<ShatterWitness>)> {
    if rank == 0 {
        return Err(Error::Format("pseudo-cube rank must be at least 1".into()));
    }
    let cap = max_size.unwrap_or(usize::MAX).min(class.domain().len());
    let mut best = (0, None);
    for n in 1..=cap {
        for subset in (0..class.domain().len()).combinations(n) {
            let tuples = realizable_tuples(class, &subset);
            // A rank-r cube needs r+1 tuples in every line through it.
            if tuples.len() <= rank {
                continue;
            }
            let cube = max_pseudocube(&tuples, rank)?;
            if !cube.subset.is_empty() {
                best = (
                    n,
                    Some(ShatterWitness::Ds {
                        points: subset,
                        rank,
                        cube: cube.subset,
                    }),
                );
                break;
            }
        }
    }
    Ok(best)
}

fn floor_log2(x: usize) -> usize {
    (usize::BITS - 1 - x.leading_zeros()) as usize
}

/// Largest subset size admitting a pivot whose membership patterns across
/// the class cover every bit pattern. Pivot candidates at each point are the
/// labels some concept lists there, plus one label listed by none (when one
/// exists); other labels generate the same patterns.
pub fn graph_dimension(
    class: &ConceptClass,
    max_size: Option<usize>,
) -> Result<(usize, Option<ShatterWitness>)> {
    if class.is_empty() {
        return Ok((0, None));
    }
    let cap = max_size
        .unwrap_or(usize::MAX)
        .min(class.domain().len())
        .min(floor_log2(class.len()));
    let mut best = (0, None);
    for n in 1..=cap {
        'subsets: for subset in (0..class.domain().len()).combinations(n) {
            let total = class.total_on(&subset);
            if total.len() < (1usize << n) {
                continue;
            }
            let mut candidates: Vec<Vec<usize>> = Vec::with_capacity(n);
            for &x in &subset {
                let mut occurring: Vec<usize> = Vec::new();
                for &ci in &total {
                    occurring.extend_from_slice(class.concept(ci).value(x).unwrap());
                }
                occurring.sort_unstable();
                occurring.dedup();
                if let Some(absent) = (0..class.labels().len()).find(|l| !occurring.contains(l)) {
                    occurring.push(absent);
                }
                candidates.push(occurring);
            }
            for pivot in candidates
                .iter()
                .map(|c| c.iter().copied())
                .multi_cartesian_product()
            {
                let mut selectors: Vec<Option<usize>> = vec![None; 1 << n];
                let mut filled = 0;
                for &ci in &total {
                    let c = class.concept(ci);
                    let mut mask = 0usize;
                    for (i, &x) in subset.iter().enumerate() {
                        if c.contains(x, pivot[i]) {
                            mask |= 1 << i;
                        }
                    }
                    if selectors[mask].is_none() {
                        selectors[mask] = Some(ci);
                        filled += 1;
                        if filled == 1 << n {
                            break;
                        }
                    }
                }
                if filled == 1 << n {
                    best = (
                        n,
                        Some(ShatterWitness::Graph {
                            points: subset,
                            pivot,
                            selectors: selectors.into_iter().map(Option::unwrap).collect(),
                        }),
                    );
                    continue 'subsets;
                }
            }
        }
    }
    Ok(best)
}

/// Largest subset size with one label pair per point such that every way of
/// picking one label from each pair is realized by some concept. Requires a
/// total 1-list class.
pub fn natarajan_dimension(
    class: &ConceptClass,
    max_size: Option<usize>,
) -> Result<(usize, Option<ShatterWitness>)> {
    if class.k() != 1 {
        return Err(Error::UnsupportedClass(
            "pair shattering is defined for 1-list classes".into(),
        ));
    }
    if !class.is_total() {
        return Err(Error::UnsupportedClass(
            "pair shattering is defined for total classes".into(),
        ));
    }
    if class.is_empty() {
        return Ok((0, None));
    }
    let cap = max_size
        .unwrap_or(usize::MAX)
        .min(class.domain().len())
        .min(floor_log2(class.len()));
    let mut best = (0, None);
    for n in 1..=cap {
        for subset in (0..class.domain().len()).combinations(n) {
            // values[c][i] = the single label of concept c at subset[i]
            let values: Vec<Vec<usize>> = class
                .concepts()
                .iter()
                .map(|c| subset.iter().map(|&x| c.value(x).unwrap()[0]).collect())
                .collect();
            let groups = vec![(0..class.len()).collect::<Vec<usize>>()];
            let mut pairs = Vec::new();
            if let Some((pairs, selectors)) = nat_search(&values, n, 0, groups, &mut pairs) {
                best = (
                    n,
                    Some(ShatterWitness::Natarajan {
                        points: subset,
                        pairs,
                        selectors,
                    }),
                );
                break;
            }
        }
    }
    Ok(best)
}

/// Depth-first pair selection. `groups[b]` holds the concepts matching the
/// first `depth` coordinates of pattern `b`; every group must split into two
/// nonempty halves at each new coordinate.
fn nat_search(
    values: &[Vec<usize>],
    n: usize,
    depth: usize,
    groups: Vec<Vec<usize>>,
    pairs: &mut Vec<(usize, usize)>,
) -> Option<(Vec<(usize, usize)>, Vec<usize>)> {
    if depth == n {
        let selectors = groups.iter().map(|g| g[0]).collect();
        return Some((pairs.clone(), selectors));
    }
    let mut labels: Vec<usize> = groups.iter().flatten().map(|&c| values[c][depth]).collect();
    labels.sort_unstable();
    labels.dedup();
    for (i, &y) in labels.iter().enumerate() {
        'pair: for &yp in &labels[i + 1..] {
            let mut next: Vec<Vec<usize>> = vec![Vec::new(); groups.len() * 2];
            for (b, g) in groups.iter().enumerate() {
                let hi: Vec<usize> = g
                    .iter()
                    .filter(|&&c| values[c][depth] == y)
                    .copied()
                    .collect();
                let lo: Vec<usize> = g
                    .iter()
                    .filter(|&&c| values[c][depth] == yp)
                    .copied()
                    .collect();
                if hi.is_empty() || lo.is_empty() {
                    continue 'pair;
                }
                next[b | (1 << depth)] = hi;
                next[b] = lo;
            }
            pairs.push((y, yp));
            if let Some(found) = nat_search(values, n, depth + 1, next, pairs) {
                return Some(found);
            }
            pairs.pop();
        }
    }
    None
}

/// Mistake-tree depth of a total 1-list class: 0 for at most one concept,
/// else one more than the best point and label pair over which both
/// restricted subclasses still admit deep trees.
pub fn littlestone_dimension(class: &ConceptClass) -> Result<usize> {
    if class.k() != 1 {
        return Err(Error::UnsupportedClass(
            "mistake trees are defined for 1-list classes".into(),
        ));
    }
    if !class.is_total() {
        return Err(Error::UnsupportedClass(
            "mistake trees are defined for total classes".into(),
        ));
    }
    let vectors: Vec<Vec<usize>> = class
        .concepts()
        .iter()
        .map(|c| {
            (0..class.domain().len())
                .map(|x| c.value(x).unwrap()[0])
                .collect()
        })
        .collect();
    let mut memo = HashMap::new();
    Ok(ldim(canon(vectors), &mut memo))
}

fn canon(mut vectors: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    vectors.sort();
    vectors
}

fn ldim(class: Vec<Vec<usize>>, memo: &mut HashMap<Vec<Vec<usize>>, usize>) -> usize {
    if class.len() <= 1 {
        return 0;
    }
    if let Some(&v) = memo.get(&class) {
        return v;
    }
    let n = class[0].len();
    let mut best = 0;
    for x in 0..n {
        let mut labels: Vec<usize> = class.iter().map(|c| c[x]).collect();
        labels.sort_unstable();
        labels.dedup();
        for (i, &y) in labels.iter().enumerate() {
            for &yp in &labels[i + 1..] {
                let cy: Vec<Vec<usize>> = class.iter().filter(|c| c[x] == y).cloned().collect();
                let cyp: Vec<Vec<usize>> = class.iter().filter(|c| c[x] == yp).cloned().collect();
                let v = 1 + ldim(cy, memo).min(ldim(cyp, memo));
                best = best.max(v);
            }
        }
    }
    memo.insert(class, best);
    best
}
