//! Small numeric and seeding helpers shared across modules.

/// Derives an independent stream seed from a master seed and a list of tags
/// (for example `[n, trial]`). SplitMix64 finalization per step, so nearby
/// tags give unrelated streams and the result is stable across platforms.
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    let mut x = master;
    for &t in tags {
        x = splitmix64(x ^ splitmix64(t.wrapping_add(0x9e37_79b9_7f4a_7c15)));
    }
    splitmix64(x)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Pairwise summation. The reduction tree depends only on the slice length,
/// so sums are bit-stable regardless of how the values were produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Mean and standard error of the mean, via pairwise sums.
/// Returns (0, 0) for an empty slice and stderr 0 for a single value.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let sq: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&sq) / (n - 1.0);
    (mean, (var / n).sqrt())
}
