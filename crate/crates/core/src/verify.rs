//! Inequality checks that pit every module against exactly computed bounds.
//!
//! Each check evaluates both sides of a stated inequality with exact integer
//! or rational arithmetic and emits one report row per inequality instance.
//! The seeded harnesses below generate random instances and run the checks in
//! parallel; rows are merged into a deterministic order afterwards, so a fixed
//! seed always produces byte-identical CSV and text output.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::{free_disambiguation, minimal_disambiguation, product};
use crate::covers::covering_size_function;
use crate::dims::{
    ds_dimension, graph_dimension, littlestone_dimension, natarajan_dimension, realizable_tuples,
    ShatterWitness,
};
use crate::error::{Error, Result};
use crate::learning::erm;
use crate::model::{is_realizable, Caps, ConceptClass, Domain, LabelSpace, ListConcept, Sample};
use crate::util::derive_seed;

/// Outcome of one inequality instance. Left and right hand sides are kept as
/// exact decimal strings so reports stay faithful to the arithmetic that was
/// actually performed. The elapsed time is informational and is excluded from
/// the deterministic renderings.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub lemma: String,
    pub instance: String,
    pub lhs: String,
    pub rhs: String,
    pub pass: bool,
    pub elapsed: Duration,
}

impl VerificationReport {
    fn new(
        lemma: &str,
        instance: String,
        lhs: String,
        rhs: String,
        pass: bool,
        started: Instant,
    ) -> Self {
        VerificationReport {
            lemma: lemma.to_string(),
            instance,
            lhs,
            rhs,
            pass,
            elapsed: started.elapsed(),
        }
    }
}

/// Sorts rows by lemma name and then instance label. Harnesses label
/// instances with zero-padded trial numbers, so the order is total and stable.
pub fn sort_reports(reports: &mut [VerificationReport]) {
    reports.sort_by(|a, b| {
        a.lemma
            .cmp(&b.lemma)
            .then_with(|| a.instance.cmp(&b.instance))
    });
}

/// Renders rows as CSV with a fixed header. Field values never contain
/// commas or quotes, so no escaping is applied.
pub fn render_csv(reports: &[VerificationReport]) -> String {
    let mut out = String::from("lemma,instance,lhs,rhs,pass\n");
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.lemma, r.instance, r.lhs, r.rhs, r.pass
        ));
    }
    out
}

/// Renders a per-lemma pass summary followed by every failing row.
pub fn render_text(reports: &[VerificationReport]) -> String {
    let mut lemmas: Vec<&str> = reports.iter().map(|r| r.lemma.as_str()).collect();
    lemmas.sort_unstable();
    lemmas.dedup();
    let mut out = String::new();
    for lemma in &lemmas {
        let total = reports.iter().filter(|r| r.lemma == *lemma).count();
        let passed = reports
            .iter()
            .filter(|r| r.lemma == *lemma && r.pass)
            .count();
        out.push_str(&format!("{lemma}: {passed}/{total} passed\n"));
    }
    let failures: Vec<&VerificationReport> = reports.iter().filter(|r| !r.pass).collect();
    if failures.is_empty() {
        out.push_str("all checks passed\n");
    } else {
        out.push_str(&format!("failures: {}\n", failures.len()));
        for r in failures {
            out.push_str(&format!(
                "  {} [{}] lhs={} rhs={}\n",
                r.lemma, r.instance, r.lhs, r.rhs
            ));
        }
    }
    out
}

pub fn all_passed(reports: &[VerificationReport]) -> bool {
    reports.iter().all(|r| r.pass)
}

fn big(v: usize) -> BigInt {
    BigInt::from(v)
}

fn pow(base: usize, exp: usize) -> BigInt {
    big(base).pow(exp as u32)
}

fn binomial(n: usize, r: usize) -> BigInt {
    if r > n {
        return BigInt::zero();
    }
    let mut out = BigInt::one();
    for i in 0..r {
        out = out * big(n - i) / big(i + 1);
    }
    out
}

fn rational(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

/// Size bound for the selection tuples of a total k-list class in terms of
/// their rank-k pseudo-cube dimension d. The tuple count is bounded by a
/// binomial sum that is tight on full cubes, and by a coarser closed form.
/// Both sides use exact big integer arithmetic.
pub fn check_ssp(class: &ConceptClass) -> Result<Vec<VerificationReport>> {
    let started = Instant::now();
    if !class.is_total() {
        return Err(Error::UnsupportedClass(
            "the size bound applies to total classes".into(),
        ));
    }
    let n = class.domain().len();
    let m = class.labels().len();
    let k = class.k();
    let (d, _) = ds_dimension(class, k, None)?;
    let points: Vec<usize> = (0..n).collect();
    let size = big(realizable_tuples(class, &points).len());
    let mut exact = BigInt::zero();
    for i in 0..=d {
        exact += binomial(n, i) * binomial(m, k + 1).pow(i as u32) * pow(k, n - i);
    }
    let relaxed = pow(k, n) * pow(n, d) * pow(m, (k + 1) * d);
    let instance = format!("n={n} m={m} k={k} d={d}");
    Ok(vec![
        VerificationReport::new(
            "ssp",
            instance.clone(),
            size.to_string(),
            exact.to_string(),
            size <= exact,
            started,
        ),
        VerificationReport::new(
            "ssp-relaxed",
            instance,
            size.to_string(),
            relaxed.to_string(),
            size <= relaxed,
            started,
        ),
    ])
}

/// Volume bounds for the label boxes attached to a pivot shattering witness.
/// For each bit vector b the witness concept defines a box of label tuples;
/// the union of all boxes is large while any two boxes overlap in at most
/// k^(n-h) * (k-1)^h tuples, h being the Hamming distance of their bit
/// vectors. Both sides are computed exactly by enumeration.
pub fn check_coding_bound(
    class: &ConceptClass,
    witness: &ShatterWitness,
) -> Result<Vec<VerificationReport>> {
    let started = Instant::now();
    let (points, selectors) = match witness {
        ShatterWitness::Graph {
            points, selectors, ..
        } => (points, selectors),
        _ => {
            return Err(Error::UnsupportedClass(
                "the box volume bound needs a pivot shattering witness".into(),
            ))
        }
    };
    witness.check(class).map_err(Error::InvalidCover)?;
    let n = points.len();
    let m = class.labels().len();
    let k = class.k();
    let mut lists: Vec<Vec<&[usize]>> = Vec::with_capacity(selectors.len());
    for &ci in selectors {
        let c = class.concept(ci);
        let row: Option<Vec<&[usize]>> = points.iter().map(|&p| c.value(p)).collect();
        let row = row.ok_or_else(|| {
            Error::UnsupportedClass("witness concepts must be defined on the shattered set".into())
        })?;
        lists.push(row);
    }

    let tuple_count = (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if tuple_count > 1 << 20 {
        return Err(Error::capacity(
            "label tuple enumeration",
            tuple_count,
            1 << 20,
        ));
    }
    let mut union = 0usize;
    let mut tuple = vec![0usize; n];
    loop {
        let covered = lists
            .iter()
            .any(|row| (0..n).all(|i| row[i].contains(&tuple[i])));
        if covered {
            union += 1;
        }
        let mut i = 0;
        while i < n {
            tuple[i] += 1;
            if tuple[i] < m {
                break;
            }
            tuple[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
    }
    let union_rhs = rational(pow(2 * k, n) * pow(k, n), big(4) * pow(2 * k - 1, n));
    let union_lhs = BigRational::from_integer(big(union));

    let mut worst_pair: Option<(BigInt, BigInt)> = None;
    let mut pairwise_ok = true;
    for a in 0..lists.len() {
        for b in a + 1..lists.len() {
            let h = (a ^ b).count_ones() as usize;
            let mut overlap = BigInt::one();
            for i in 0..n {
                let shared = lists[a][i]
                    .iter()
                    .filter(|y| lists[b][i].contains(y))
                    .count();
                overlap *= big(shared);
            }
            let bound = pow(k, n - h) * pow(k - 1, h);
            if overlap > bound {
                pairwise_ok = false;
            }
            let tighter = match &worst_pair {
                None => true,
                Some((o, bd)) => &overlap - &bound > o - bd,
            };
            if tighter {
                worst_pair = Some((overlap, bound));
            }
        }
    }
    let (pair_lhs, pair_rhs) = worst_pair.unwrap_or((BigInt::zero(), BigInt::zero()));
    let instance = format!("n={n} m={m} k={k} boxes={}", lists.len());
    Ok(vec![
        VerificationReport::new(
            "coding-union",
            instance.clone(),
            union_lhs.to_string(),
            union_rhs.to_string(),
            union_lhs >= union_rhs,
            started,
        ),
        VerificationReport::new(
            "coding-pairwise",
            instance,
            pair_lhs.to_string(),
            pair_rhs.to_string(),
            pairwise_ok,
            started,
        ),
    ])
}

/// Relates the pivot shattering dimension g to the pseudo-cube dimension d of
/// a total k-list class over m labels: 4 * g^d * m^((k+1)d) >= (2k/(2k-1))^g,
/// with 0^0 read as 1. Both sides are exact rationals.
pub fn check_graph_vs_ds(class: &ConceptClass) -> Result<Vec<VerificationReport>> {
    let started = Instant::now();
    if !class.is_total() {
        return Err(Error::UnsupportedClass(
            "the dimension gap bound applies to total classes".into(),
        ));
    }
    let m = class.labels().len();
    let k = class.k();
    let (g, _) = graph_dimension(class, None)?;
    let (d, _) = ds_dimension(class, k, None)?;
    let lhs = BigRational::from_integer(big(4) * pow(g, d) * pow(m, (k + 1) * d));
    let rhs = rational(pow(2 * k, g), pow(2 * k - 1, g));
    Ok(vec![VerificationReport::new(
        "graph-vs-ds",
        format!("n={} m={m} k={k} g={g} d={d}", class.domain().len()),
        lhs.to_string(),
        rhs.to_string(),
        lhs >= rhs,
        started,
    )])
}

/// Least k for which the rank-k pseudo-cube dimension vanishes. A rank-k cube
/// of positive dimension exists exactly when some point carries more than k
/// distinct defined lists, so this is the largest per-point list count.
pub fn list_number(class: &ConceptClass) -> usize {
    let mut best = 1;
    for p in 0..class.domain().len() {
        let mut seen: HashSet<&[usize]> = HashSet::new();
        for c in class.concepts() {
            if let Some(v) = c.value(p) {
                seen.insert(v);
            }
        }
        best = best.max(seen.len());
    }
    best
}

/// Dimension arithmetic under the disjoint pair product. Pair shattering and
/// mistake trees need total 1-list factors; the pseudo-cube rows accept any
/// partial factors and use each factor's own list size as its rank.
pub fn check_product_dimensions(
    left: &ConceptClass,
    right: &ConceptClass,
    caps: &Caps,
) -> Result<Vec<VerificationReport>> {
    let started = Instant::now();
    let prod = product(left, right, caps)?;
    let prod = prod.class();
    let instance = format!(
        "|F|={} |G|={} n={} m={}",
        left.len(),
        right.len(),
        prod.domain().len(),
        prod.labels().len()
    );
    let mut rows = Vec::new();

    if left.k() == 1 && right.k() == 1 && left.is_total() && right.is_total() {
        let (nl, _) = natarajan_dimension(left, None)?;
        let (nr, _) = natarajan_dimension(right, None)?;
        let (np, _) = natarajan_dimension(prod, None)?;
        let lower = (nl + nr).saturating_sub(2);
        rows.push(VerificationReport::new(
            "product-natarajan-lower",
            instance.clone(),
            lower.to_string(),
            np.to_string(),
            lower <= np,
            started,
        ));
        rows.push(VerificationReport::new(
            "product-natarajan-upper",
            instance.clone(),
            np.to_string(),
            (nl + nr).to_string(),
            np <= nl + nr,
            started,
        ));
        let ll = littlestone_dimension(left)?;
        let lr = littlestone_dimension(right)?;
        let lp = littlestone_dimension(prod)?;
        rows.push(VerificationReport::new(
            "product-littlestone",
            instance.clone(),
            lp.to_string(),
            (ll + lr).to_string(),
            lp == ll + lr,
            started,
        ));
    }

    let kl = left.k();
    let kr = right.k();
    let (dl, _) = ds_dimension(left, kl, None)?;
    let (dr, _) = ds_dimension(right, kr, None)?;
    let (d_prod_rank, _) = ds_dimension(prod, kl * kr, None)?;
    rows.push(VerificationReport::new(
        "product-ds-rank-product",
        instance.clone(),
        dl.min(dr).to_string(),
        d_prod_rank.to_string(),
        dl.min(dr) <= d_prod_rank,
        started,
    ));
    let (d_prod_min, _) = ds_dimension(prod, kl.min(kr), None)?;
    let sum_low = (dl + dr).saturating_sub(1);
    rows.push(VerificationReport::new(
        "product-ds-rank-min",
        instance.clone(),
        sum_low.to_string(),
        d_prod_min.to_string(),
        sum_low <= d_prod_min,
        started,
    ));

    let lhs = list_number(prod);
    let (vl, vr) = (list_number(left), list_number(right));
    let lo = vl.saturating_sub(1) * vr.saturating_sub(1);
    let hi = vl * vr;
    rows.push(VerificationReport::new(
        "product-list-number",
        format!("{instance} informational"),
        lhs.to_string(),
        format!("{lo}..{hi}"),
        lo <= lhs && lhs <= hi,
        started,
    ));
    Ok(rows)
}

/// The smaller of two factor covering numbers is bounded by the product
/// covering number at the combined list size, scaled by the smaller sample
/// budget. All covering numbers here are exact minima.
pub fn check_direct_sum_cover(
    left: &ConceptClass,
    right: &ConceptClass,
    n_left: usize,
    n_right: usize,
    k_left: usize,
    k_right: usize,
    caps: &Caps,
) -> Result<Vec<VerificationReport>> {
    let started = Instant::now();
    let cl = covering_size_function(left, n_left, k_left, caps)?;
    let cr = covering_size_function(right, n_right, k_right, caps)?;
    let prod = product(left, right, caps)?;
    let cp = covering_size_function(prod.class(), n_left * n_right, k_left + k_right, caps)?;
    let lhs = cl.min(cr);
    let rhs = n_left.min(n_right) * cp;
    Ok(vec![VerificationReport::new(
        "direct-sum",
        format!(
            "|F|={} |G|={} n={n_left} n'={n_right} k={k_left} k'={k_right}",
            left.len(),
            right.len()
        ),
        lhs.to_string(),
        rhs.to_string(),
        lhs <= rhs,
        started,
    )])
}

/// Three facts about completing a partial 1-list class with a shared fresh
/// label: the covering number grows by at most (mn)^d when the completion is
/// covered with one extra list slot, the per-concept fresh completion leaves
/// realizability of label samples unchanged, and any empirical risk minimizer
/// for the original class turns into a consistent 2-list learner for the
/// completion by adjoining the fresh label.
pub fn check_disambiguation(class: &ConceptClass, caps: &Caps) -> Result<Vec<VerificationReport>> {
    let started = Instant::now();
    if class.k() != 1 {
        return Err(Error::UnsupportedClass(
            "disambiguation checks need a 1-list class".into(),
        ));
    }
    let n = class.domain().len();
    let m = class.labels().len();
    let instance = format!("n={n} m={m} size={}", class.len());
    let mut rows = Vec::new();

    let (bar, star) = minimal_disambiguation(class)?;
    let (d, _) = ds_dimension(class, 1, None)?;
    let c_orig = covering_size_function(class, n, 1, caps)?;
    let c_bar = covering_size_function(&bar, n, 2, caps)?;
    let rhs = pow(m * n, d) * big(c_bar);
    rows.push(VerificationReport::new(
        "disambiguation-growth",
        format!("{instance} d={d}"),
        c_orig.to_string(),
        rhs.to_string(),
        big(c_orig) <= rhs,
        started,
    ));

    let free = free_disambiguation(class)?;
    let mut orig_count = 0usize;
    let mut free_count = 0usize;
    let mut pointwise = true;
    for len in 1..=4usize {
        let total = (n * m).checked_pow(len as u32).unwrap_or(usize::MAX);
        if total > 4096 {
            break;
        }
        let mut idx = vec![0usize; len];
        loop {
            let pairs: Vec<(usize, usize)> = idx.iter().map(|&i| (i / m, i % m)).collect();
            let s = Sample::new(pairs);
            let a = is_realizable(class, &s)?.is_some();
            let b = is_realizable(&free, &s)?.is_some();
            orig_count += usize::from(a);
            free_count += usize::from(b);
            if a != b {
                pointwise = false;
            }
            let mut i = 0;
            while i < len {
                idx[i] += 1;
                if idx[i] < n * m {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
            if i == len {
                break;
            }
        }
    }
    rows.push(VerificationReport::new(
        "disambiguation-free",
        instance.clone(),
        orig_count.to_string(),
        free_count.to_string(),
        pointwise && orig_count == free_count,
        started,
    ));

    let rule = erm(class)?;
    let mut violations = 0usize;
    for c in bar.concepts() {
        let pairs: Vec<(usize, usize)> = (0..n).map(|x| (x, c.value(x).unwrap()[0])).collect();
        let kept: Vec<(usize, usize)> = pairs
            .iter()
            .copied()
            .filter(|&(_, y)| Some(y) != star)
            .collect();
        let h = rule.apply(&Sample::new(kept))?;
        for (x, y) in pairs {
            let ok = Some(y) == star || h.list(x).contains(&y);
            if !ok {
                violations += 1;
            }
        }
    }
    rows.push(VerificationReport::new(
        "disambiguation-wrapped",
        instance,
        violations.to_string(),
        "0".to_string(),
        violations == 0,
        started,
    ));
    Ok(rows)
}

fn shuffled_prefix(rng: &mut ChaCha8Rng, pool: usize, take: usize) -> Vec<usize> {
    let mut items: Vec<usize> = (0..pool).collect();
    for i in (1..items.len()).rev() {
        items.swap(i, rng.gen_range(0..=i));
    }
    items.truncate(take);
    items
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
    let domain = Domain::new((0..points).map(|i| format!("x{i}")).collect()).unwrap();
    let space = LabelSpace::new((0..labels).map(|i| format!("y{i}")).collect()).unwrap();
    let concepts = (0..count)
        .map(|_| {
            let values = (0..points)
                .map(|_| {
                    if rng.gen_bool(undefined_prob) {
                        None
                    } else {
                        let mut list = shuffled_prefix(rng, labels, k);
                        list.sort_unstable();
                        Some(list)
                    }
                })
                .collect();
            ListConcept::new(None, values)
        })
        .collect();
    ConceptClass::new(None, domain, space, k, concepts).unwrap()
}

fn label_trials(rows: Vec<Vec<VerificationReport>>) -> Vec<VerificationReport> {
    let mut out = Vec::new();
    for (t, batch) in rows.into_iter().enumerate() {
        for mut r in batch {
            r.instance = format!("t{t:03} {}", r.instance);
            out.push(r);
        }
    }
    out
}

fn run_trials<F>(trials: usize, seed: u64, tag: u64, body: F) -> Result<Vec<VerificationReport>>
where
    F: Fn(&mut ChaCha8Rng) -> Result<Vec<VerificationReport>> + Sync,
{
    let batches: Result<Vec<Vec<VerificationReport>>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[tag, t as u64]));
            body(&mut rng)
        })
        .collect();
    let mut out = label_trials(batches?);
    sort_reports(&mut out);
    Ok(out)
}

/// Random total classes through the size bound check.
pub fn run_ssp(trials: usize, seed: u64) -> Result<Vec<VerificationReport>> {
    run_trials(trials, seed, 1, |rng| {
        let class = random_class(rng, 5, 1, 4, 3, 16, 0.0);
        check_ssp(&class)
    })
}

/// Randomly constructed pivot shattering witnesses through the box volume
/// check. For every bit vector the concept list at each shattered point is
/// drawn to contain the pivot exactly when the bit is set, which makes the
/// family a valid witness by construction.
pub fn run_coding(trials: usize, seed: u64) -> Result<Vec<VerificationReport>> {
    run_trials(trials, seed, 2, |rng| {
        let k = rng.gen_range(1..=2usize);
        let n = rng.gen_range(1..=4usize);
        let m = rng.gen_range(k + 1..=4usize);
        let pivot: Vec<usize> = (0..n).map(|_| rng.gen_range(0..m)).collect();
        let mut rows = Vec::with_capacity(1 << n);
        for b in 0..1usize << n {
            let values = (0..n)
                .map(|i| {
                    let mut list = if b >> i & 1 == 1 {
                        let mut others: Vec<usize> = (0..m).filter(|&y| y != pivot[i]).collect();
                        for j in (1..others.len()).rev() {
                            others.swap(j, rng.gen_range(0..=j));
                        }
                        let mut l = vec![pivot[i]];
                        l.extend(others.into_iter().take(k - 1));
                        l
                    } else {
                        let mut others: Vec<usize> = (0..m).filter(|&y| y != pivot[i]).collect();
                        for j in (1..others.len()).rev() {
                            others.swap(j, rng.gen_range(0..=j));
                        }
                        others.truncate(k);
                        others
                    };
                    list.sort_unstable();
                    Some(list)
                })
                .collect();
            rows.push(ListConcept::new(None, values));
        }
        let domain = Domain::new((0..n).map(|i| format!("x{i}")).collect()).unwrap();
        let space = LabelSpace::new((0..m).map(|i| format!("y{i}")).collect()).unwrap();
        let class = ConceptClass::new(None, domain, space, k, rows)?;
        let witness = ShatterWitness::Graph {
            points: (0..n).collect(),
            pivot,
            selectors: (0..1 << n).collect(),
        };
        check_coding_bound(&class, &witness)
    })
}

/// Random total classes through the dimension gap check.
pub fn run_graph_vs_ds(trials: usize, seed: u64) -> Result<Vec<VerificationReport>> {
    run_trials(trials, seed, 3, |rng| {
        let class = random_class(rng, 5, 1, 4, 3, 16, 0.0);
        check_graph_vs_ds(&class)
    })
}

/// Random factor pairs through the product dimension checks. Half the checks
/// need total 1-list factors, so factors are drawn that way; the pseudo-cube
/// and list number rows run on separately drawn partial factors.
pub fn run_product_dims(trials: usize, seed: u64) -> Result<Vec<VerificationReport>> {
    let caps = Caps::default();
    run_trials(trials, seed, 4, |rng| {
        let left = random_class(rng, 2, 2, 3, 1, 6, 0.0);
        let right = random_class(rng, 2, 2, 3, 1, 6, 0.0);
        let mut rows = check_product_dimensions(&left, &right, &caps)?;
        let pl = random_class(rng, 2, 1, 3, 2, 4, 0.3);
        let pr = random_class(rng, 2, 1, 3, 2, 4, 0.3);
        let mut partial_rows = check_product_dimensions(&pl, &pr, &caps)?;
        for r in &mut partial_rows {
            r.instance = format!("partial {}", r.instance);
        }
        rows.append(&mut partial_rows);
        Ok(rows)
    })
}

/// Random partial 1-list factor pairs through the covering number check.
pub fn run_direct_sum(trials: usize, seed: u64) -> Result<Vec<VerificationReport>> {
    let caps = Caps::default();
    run_trials(trials, seed, 5, |rng| {
        let left = random_class(rng, 2, 2, 3, 1, 3, 0.3);
        let right = random_class(rng, 2, 2, 3, 1, 3, 0.3);
        let n_left = rng.gen_range(1..=left.domain().len());
        let n_right = rng.gen_range(1..=right.domain().len());
        let k_left = rng.gen_range(1..=2.min(left.labels().len()));
        let k_right = rng.gen_range(1..=2.min(right.labels().len()));
        check_direct_sum_cover(&left, &right, n_left, n_right, k_left, k_right, &caps)
    })
}

/// Random partial 1-list classes through the disambiguation checks.
pub fn run_disambiguation(trials: usize, seed: u64) -> Result<Vec<VerificationReport>> {
    let caps = Caps::default();
    run_trials(trials, seed, 6, |rng| {
        let class = random_class(rng, 3, 2, 3, 1, 4, 0.4);
        check_disambiguation(&class, &caps)
    })
}

/// Every harness in sequence, merged into one deterministically ordered list.
pub fn run_all(trials: usize, seed: u64) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    out.extend(run_ssp(trials, seed)?);
    out.extend(run_coding(trials, seed)?);
    out.extend(run_graph_vs_ds(trials, seed)?);
    out.extend(run_product_dims(trials, seed)?);
    out.extend(run_direct_sum(trials, seed)?);
    out.extend(run_disambiguation(trials, seed)?);
    sort_reports(&mut out);
    Ok(out)
}

/// Total wall time across rows, for progress reporting on the side channel.
pub fn total_elapsed(reports: &[VerificationReport]) -> Duration {
    reports.iter().map(|r| r.elapsed).sum()
}
