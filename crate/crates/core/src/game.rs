//! Zero-sum game solving over 0/1 loss matrices. Rows are points, columns
//! are hypotheses, and the sought strategy is a distribution over columns
//! minimizing the worst-case row loss. Small games are solved exactly with
//! rational arithmetic; larger ones approximately with multiplicative
//! weights and a certified duality gap.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// An exact minimizing column strategy together with the game value.
#[derive(Debug, Clone)]
pub struct GameSolution {
    pub strategy: Vec<BigRational>,
    pub value: BigRational,
}

/// An approximate column strategy with a two-sided certificate: the true
/// value lies in [lower, upper] and gap = upper - lower.
#[derive(Debug, Clone)]
pub struct ApproxSolution {
    pub strategy: Vec<f64>,
    pub upper: f64,
    pub lower: f64,
    pub gap: f64,
    pub iterations: usize,
}

fn check_matrix(loss: &[Vec<u8>]) -> Result<usize> {
    let cols = loss.first().map_or(0, Vec::len);
    if loss.iter().any(|row| row.len() != cols) {
        return Err(Error::Format("loss matrix rows differ in length".into()));
    }
    if !loss.is_empty() && cols == 0 {
        return Err(Error::Format("loss matrix has no columns".into()));
    }
    if loss.iter().flatten().any(|&e| e > 1) {
        return Err(Error::Format("loss entries must be 0 or 1".into()));
    }
    Ok(cols)
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact min-max solve by simplex on the shifted matrix. Adding 1 to every
/// entry makes the value positive, so maximizing the total mass x with
/// (A+1)x <= 1, x >= 0 yields value 1/sum(x) - 1 and strategy x/sum(x).
/// Bland's pivot rule guarantees termination.
pub fn solve_game_exact(loss: &[Vec<u8>]) -> Result<GameSolution> {
    let n = check_matrix(loss)?;
    let m = loss.len();
    if m == 0 {
        if n == 0 {
            return Err(Error::Format("empty game".into()));
        }
        let w = ratio(1, n as i64);
        return Ok(GameSolution {
            strategy: vec![w; n],
            value: BigRational::zero(),
        });
    }

    let width = n + m + 1;
    let rhs = width - 1;
    let mut tableau: Vec<Vec<BigRational>> = (0..m)
        .map(|i| {
            let mut row = vec![BigRational::zero(); width];
            for j in 0..n {
                row[j] = ratio(i64::from(loss[i][j]) + 1, 1);
            }
            row[n + i] = BigRational::one();
            row[rhs] = BigRational::one();
            row
        })
        .collect();
    let mut objective = vec![BigRational::zero(); width];
    for cell in objective.iter_mut().take(n) {
        *cell = BigRational::one();
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    loop {
        let entering = match (0..n + m).find(|&j| objective[j].is_positive()) {
            Some(j) => j,
            None => break,
        };
        let mut pivot: Option<usize> = None;
        for r in 0..m {
            if !tableau[r][entering].is_positive() {
                continue;
            }
            pivot = match pivot {
                None => Some(r),
                Some(p) => {
                    let lhs = &tableau[r][rhs] * &tableau[p][entering];
                    let cur = &tableau[p][rhs] * &tableau[r][entering];
                    if lhs < cur || (lhs == cur && basis[r] < basis[p]) {
                        Some(r)
                    } else {
                        Some(p)
                    }
                }
            };
        }
        let r = pivot.ok_or_else(|| Error::Format("game program is unbounded".into()))?;
        let factor = tableau[r][entering].clone();
        for cell in &mut tableau[r] {
            *cell /= &factor;
        }
        for i in 0..m {
            if i != r && !tableau[i][entering].is_zero() {
                let scale = tableau[i][entering].clone();
                for j in 0..width {
                    let delta = &scale * &tableau[r][j];
                    tableau[i][j] -= delta;
                }
            }
        }
        if !objective[entering].is_zero() {
            let scale = objective[entering].clone();
            for j in 0..width {
                let delta = &scale * &tableau[r][j];
                objective[j] -= delta;
            }
        }
        basis[r] = entering;
    }

    let mut x = vec![BigRational::zero(); n];
    for (r, &b) in basis.iter().enumerate() {
        if b < n {
            x[b] = tableau[r][rhs].clone();
        }
    }
    let total: BigRational = x.iter().sum();
    if !total.is_positive() {
        return Err(Error::Format("game solve produced no mass".into()));
    }
    let strategy = x.into_iter().map(|v| v / &total).collect();
    let value = total.recip() - BigRational::one();
    Ok(GameSolution { strategy, value })
}

fn mw_round_averages(loss: &[Vec<u8>], horizon: usize) -> (Vec<f64>, f64, f64) {
    let m = loss.len();
    let n = loss[0].len();
    let eta = (8.0 * (m as f64).max(2.0).ln() / horizon as f64).sqrt();
    let mut weights = vec![1.0f64; m];
    let mut row_avg = vec![0.0f64; m];
    let mut counts = vec![0usize; n];
    for _ in 0..horizon {
        let total: f64 = weights.iter().sum();
        let mut best = 0usize;
        let mut best_score = f64::INFINITY;
        for j in 0..n {
            let score: f64 = (0..m)
                .map(|i| weights[i] / total * f64::from(loss[i][j]))
                .sum();
            if score < best_score {
                best_score = score;
                best = j;
            }
        }
        counts[best] += 1;
        for i in 0..m {
            row_avg[i] += weights[i] / total;
            if loss[i][best] == 1 {
                weights[i] *= eta.exp();
            }
        }
        let peak = weights.iter().cloned().fold(f64::MIN, f64::max);
        if peak > 1e100 {
            for w in &mut weights {
                *w /= peak;
            }
        }
    }
    let strategy: Vec<f64> = counts.iter().map(|&c| c as f64 / horizon as f64).collect();
    let upper = (0..m)
        .map(|i| {
            (0..n)
                .map(|j| strategy[j] * f64::from(loss[i][j]))
                .sum::<f64>()
        })
        .fold(f64::MIN, f64::max);
    let lower = (0..n)
        .map(|j| {
            (0..m)
                .map(|i| row_avg[i] / horizon as f64 * f64::from(loss[i][j]))
                .sum::<f64>()
        })
        .fold(f64::MAX, f64::min);
    (strategy, upper, lower)
}

/// Multiplicative-weights solve: the row player runs exponential weights
/// against best-response columns, over doubling horizons until the duality
/// gap certificate meets the tolerance. The averaged strategies always
/// sandwich the true value between lower and upper.
pub fn solve_game_mw(
    loss: &[Vec<u8>],
    tolerance: f64,
    max_iterations: usize,
) -> Result<ApproxSolution> {
    let n = check_matrix(loss)?;
    let m = loss.len();
    if m == 0 {
        if n == 0 {
            return Err(Error::Format("empty game".into()));
        }
        return Ok(ApproxSolution {
            strategy: vec![1.0 / n as f64; n],
            upper: 0.0,
            lower: 0.0,
            gap: 0.0,
            iterations: 0,
        });
    }
    if !(tolerance > 0.0) {
        return Err(Error::Format("tolerance must be positive".into()));
    }
    let mut spent = 0usize;
    let mut horizon = 128usize;
    let mut best: Option<ApproxSolution> = None;
    loop {
        if spent + horizon > max_iterations {
            return match best {
                Some(b) if b.gap <= tolerance => Ok(b),
                _ => Err(Error::capacity(
                    "multiplicative weights iterations",
                    (spent + horizon) as u128,
                    max_iterations as u128,
                )),
            };
        }
        let (strategy, upper, lower) = mw_round_averages(loss, horizon);
        spent += horizon;
        let gap = upper - lower;
        let solution = ApproxSolution {
            strategy,
            upper,
            lower,
            gap,
            iterations: spent,
        };
        if gap <= tolerance {
            return Ok(solution);
        }
        if best.as_ref().is_none_or(|b| gap < b.gap) {
            best = Some(solution);
        }
        horizon *= 2;
    }
}
