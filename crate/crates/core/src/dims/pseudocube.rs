//! Maximal pseudo-cube extraction by iterated peeling.
//!
//! Fix an arity n and a rank r. Call two distinct tuples i-neighbors when
//! they differ in coordinate i and nowhere else. A set B of tuples is a
//! rank-r pseudo-cube when every tuple in B has at least r distinct
//! i-neighbors inside B for every direction i. Rank-r pseudo-cubes are
//! closed under union, so every finite tuple set holds a unique maximal one.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Result of the peel: the unique maximal pseudo-cube inside the input.
/// `rank` is the requested rank, or 0 when the cube is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoCube {
    pub subset: Vec<Vec<usize>>,
    pub rank: usize,
}

/// Removes tuples whose neighbor degree drops below `rank` in some direction
/// until none remain, which yields the unique maximal rank-`rank` pseudo-cube.
/// Duplicates in the input collapse; the result is sorted.
pub fn max_pseudocube(tuples: &[Vec<usize>], rank: usize) -> Result<PseudoCube> {
    if rank == 0 {
        return Err(Error::Format("pseudo-cube rank must be at least 1".into()));
    }
    if tuples.is_empty() {
        return Ok(PseudoCube {
            subset: Vec::new(),
            rank: 0,
        });
    }
    let n = tuples[0].len();
    if n == 0 {
        return Err(Error::Format("tuples must have arity at least 1".into()));
    }
    let mut set: Vec<Vec<usize>> = Vec::new();
    {
        let mut seen = std::collections::HashSet::new();
        for t in tuples {
            if t.len() != n {
                return Err(Error::Arity {
                    expected: n,
                    got: t.len(),
                });
            }
            if seen.insert(t.clone()) {
                set.push(t.clone());
            }
        }
    }

    // Per direction, group tuples that agree everywhere else. All distinct
    // members of a group are mutual i-neighbors, so a live tuple's degree in
    // direction i is its group's live size minus one.
    let m = set.len();
    let mut group_of = vec![vec![0usize; n]; m];
    let mut members: Vec<Vec<Vec<usize>>> = Vec::with_capacity(n);
    let mut live: Vec<Vec<usize>> = Vec::with_capacity(n);
    for dir in 0..n {
        let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut mem: Vec<Vec<usize>> = Vec::new();
        for (idx, t) in set.iter().enumerate() {
            let mut key = t.clone();
            key.remove(dir);
            let gid = *ids.entry(key).or_insert_with(|| {
                mem.push(Vec::new());
                mem.len() - 1
            });
            group_of[idx][dir] = gid;
            mem[gid].push(idx);
        }
        live.push(mem.iter().map(Vec::len).collect());
        members.push(mem);
    }

    let mut alive = vec![true; m];
    let mut queue: Vec<usize> = (0..m)
        .filter(|&i| (0..n).any(|d| live[d][group_of[i][d]] <= rank))
        .collect();
    while let Some(idx) = queue.pop() {
        if !alive[idx] {
            continue;
        }
        alive[idx] = false;
        for dir in 0..n {
            let gid = group_of[idx][dir];
            live[dir][gid] -= 1;
            if live[dir][gid] <= rank {
                for &other in &members[dir][gid] {
                    if alive[other] {
                        queue.push(other);
                    }
                }
            }
        }
    }

    let mut subset: Vec<Vec<usize>> = (0..m)
        .filter(|&i| alive[i])
        .map(|i| set[i].clone())
        .collect();
    subset.sort();
    let rank = if subset.is_empty() { 0 } else { rank };
    Ok(PseudoCube { subset, rank })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive reference: largest subset satisfying the degree condition,
    /// found by scanning all subsets. Union closure makes it unique.
    fn oracle(tuples: &[Vec<usize>], rank: usize) -> Vec<Vec<usize>> {
        let mut distinct: Vec<Vec<usize>> = Vec::new();
        for t in tuples {
            if !distinct.contains(t) {
                distinct.push(t.clone());
            }
        }
        let m = distinct.len();
        assert!(m <= 20, "oracle is exponential");
        let n = if m > 0 { distinct[0].len() } else { 0 };
        let valid = |mask: u32| -> bool {
            for i in 0..m {
                if mask & (1 << i) == 0 {
                    continue;
                }
                for dir in 0..n {
                    let mut deg = 0;
                    for j in 0..m {
                        if i == j || mask & (1 << j) == 0 {
                            continue;
                        }
                        let differs: Vec<usize> = (0..n)
                            .filter(|&d| distinct[i][d] != distinct[j][d])
                            .collect();
                        if differs == [dir] {
                            deg += 1;
                        }
                    }
                    if deg < rank {
                        return false;
                    }
                }
            }
            true
        };
        let mut best: u32 = 0;
        for mask in 0..(1u32 << m) {
            if mask.count_ones() > best.count_ones() && valid(mask) {
                best = mask;
            }
        }
        let mut out: Vec<Vec<usize>> = (0..m)
            .filter(|&i| best & (1 << i) != 0)
            .map(|i| distinct[i].clone())
            .collect();
        out.sort();
        out
    }

    fn tupleize(raw: &[&[usize]]) -> Vec<Vec<usize>> {
        raw.iter().map(|t| t.to_vec()).collect()
    }

    #[test]
    fn missing_corner_cascades_to_empty() {
        let ts = tupleize(&[&[0, 0], &[0, 1], &[1, 0]]);
        let cube = max_pseudocube(&ts, 1).unwrap();
        assert!(cube.subset.is_empty());
        assert_eq!(cube.rank, 0);
    }

    #[test]
    fn full_square_is_rank_two() {
        let mut ts = Vec::new();
        for a in 0..3 {
            for b in 0..3 {
                ts.push(vec![a, b]);
            }
        }
        let cube = max_pseudocube(&ts, 2).unwrap();
        assert_eq!(cube.subset.len(), 9);
        assert_eq!(cube.rank, 2);
        // Rank 3 is impossible with three values per coordinate.
        assert!(max_pseudocube(&ts, 3).unwrap().subset.is_empty());
    }

    #[test]
    fn full_boolean_cube_survives() {
        let mut ts = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    ts.push(vec![a, b, c]);
                }
            }
        }
        let cube = max_pseudocube(&ts, 1).unwrap();
        assert_eq!(cube.subset.len(), 8);
    }

    #[test]
    fn four_corners_survive_rank_one() {
        let ts = tupleize(&[&[0, 0], &[0, 1], &[1, 0], &[1, 1]]);
        let cube = max_pseudocube(&ts, 1).unwrap();
        assert_eq!(cube.subset.len(), 4);
    }

    #[test]
    fn singleton_and_unary_cases() {
        assert!(max_pseudocube(&tupleize(&[&[0, 1]]), 1)
            .unwrap()
            .subset
            .is_empty());
        // Three unary tuples: each has two neighbors in the one direction.
        let ts = tupleize(&[&[0], &[1], &[2]]);
        assert_eq!(max_pseudocube(&ts, 2).unwrap().subset.len(), 3);
        assert!(max_pseudocube(&ts, 3).unwrap().subset.is_empty());
    }

    #[test]
    fn duplicates_collapse() {
        let ts = tupleize(&[&[0], &[0], &[1], &[1]]);
        let cube = max_pseudocube(&ts, 1).unwrap();
        assert_eq!(cube.subset, tupleize(&[&[0], &[1]]));
    }

    #[test]
    fn rejects_mixed_arity_and_zero_rank() {
        assert!(max_pseudocube(&tupleize(&[&[0], &[0, 1]]), 1).is_err());
        assert!(max_pseudocube(&tupleize(&[&[0]]), 0).is_err());
    }

    #[test]
    fn peel_matches_oracle_on_seeded_sets() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..120 {
            let n = rng.gen_range(1..=3);
            let labels = rng.gen_range(1..=3);
            let count = rng.gen_range(0..=12);
            let tuples: Vec<Vec<usize>> = (0..count)
                .map(|_| (0..n).map(|_| rng.gen_range(0..labels)).collect())
                .collect();
            for rank in 1..=2 {
                let cube = max_pseudocube(&tuples, rank).unwrap();
                assert_eq!(cube.subset, oracle(&tuples, rank), "rank {rank} {tuples:?}");
            }
        }
    }
}
