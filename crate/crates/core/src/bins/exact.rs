use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{BinsError, BinsQuery};
use crate::rng::substream;

/// Default limit on `q·n` for the exact computation.
pub const DEFAULT_EXACT_CAP: u128 = 4096;

pub fn exact_max_load_expectation(query: BinsQuery) -> Result<BigRational, BinsError> {
    exact_max_load_expectation_with_cap(query, DEFAULT_EXACT_CAP)
}

/// Exact `E M_{q,n}`.
///
/// With `N_t` the number of assignments whose loads are all at most `t`,
/// `E M = Σ_{t≥0} P(M > t) = n − Σ_{t<n} N_t / q^n`. `N_t` is zero below
/// `⌈n/q⌉`; when `2(t+1) > n` at most one bin can exceed `t`, so `N_t`
/// follows from a single binomial tail. The remaining `N_t` are
/// `n!·[x^n](Σ_{j≤t} x^j/j!)^q`, computed on integer polynomials scaled by
/// `n!/j!`.
pub fn exact_max_load_expectation_with_cap(
    query: BinsQuery,
    cap: u128,
) -> Result<BigRational, BinsError> {
    let BinsQuery { q, n } = BinsQuery::new(query.q, query.n)?;
    let size = q as u128 * n as u128;
    if size > cap {
        return Err(BinsError::CapExceeded { size, cap });
    }
    if q == 1 {
        return Ok(BigRational::from_integer(n.into()));
    }
    let n_us = n as usize;
    let total = BigUint::from(q).pow(n as u32);
    let binom = binomial_row(n_us);
    let q_minus_1 = BigUint::from(q - 1);
    let pow_qm1: Vec<BigUint> = {
        let mut v = vec![BigUint::one(); n_us + 1];
        for i in 1..=n_us {
            v[i] = &v[i - 1] * &q_minus_1;
        }
        v
    };
    let t_min = n.div_ceil(q) as usize;

    let mut sum_n = BigUint::zero();
    for t in t_min..n_us {
        let count = if 2 * (t + 1) > n_us {
            // assignments where some bin holds more than t balls
            let over: BigUint = (t + 1..=n_us)
                .map(|j| &binom[j] * &pow_qm1[n_us - j])
                .sum();
            &total - over * BigUint::from(q)
        } else {
            bounded_count(q, n_us, t)
        };
        sum_n += count;
    }
    let num = BigUint::from(n) * &total - sum_n;
    Ok(BigRational::new(BigInt::from(num), BigInt::from(total)))
}

fn binomial_row(n: usize) -> Vec<BigUint> {
    let mut row = vec![BigUint::one(); n + 1];
    for j in 1..=n {
        row[j] = &row[j - 1] * BigUint::from(n - j + 1) / BigUint::from(j);
    }
    row
}

// Number of maps [n] → [q] with every fibre of size ≤ t.
fn bounded_count(q: u64, n: usize, t: usize) -> BigUint {
    let mut fact = vec![BigUint::one(); n + 1];
    for i in 1..=n {
        fact[i] = &fact[i - 1] * BigUint::from(i);
    }
    let scale = &fact[n];
    // coefficient j holds (n!/j!)·[x^j]
    let base: Vec<BigUint> = (0..=n)
        .map(|j| if j <= t { scale / &fact[j] } else { BigUint::zero() })
        .collect();
    let mut unit = vec![BigUint::zero(); n + 1];
    unit[0] = scale.clone();
    let result = scaled_pow(&base, q, &unit, scale);
    // (n!/n!)·[x^n]·n! = N_t
    result[n].clone()
}

fn scaled_mul(a: &[BigUint], b: &[BigUint], scale: &BigUint) -> Vec<BigUint> {
    let n = a.len() - 1;
    let mut out = vec![BigUint::zero(); n + 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(n + 1 - i) {
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    for c in &mut out {
        let (quot, rem) = c.div_rem(scale);
        debug_assert!(rem.is_zero());
        *c = quot;
    }
    out
}

fn scaled_pow(base: &[BigUint], mut e: u64, unit: &[BigUint], scale: &BigUint) -> Vec<BigUint> {
    let mut acc = unit.to_vec();
    let mut b = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = scaled_mul(&acc, &b, scale);
        }
        e >>= 1;
        if e > 0 {
            b = scaled_mul(&b, &b, scale);
        }
    }
    acc
}

pub fn w(query: BinsQuery) -> Result<BigRational, BinsError> {
    w_with_cap(query, DEFAULT_EXACT_CAP)
}

/// `W(q,n) = E M_{q,n} / n`.
pub fn w_with_cap(query: BinsQuery, cap: u128) -> Result<BigRational, BinsError> {
    let m = exact_max_load_expectation_with_cap(query, cap)?;
    Ok(m / BigRational::from_integer(query.n.into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
}

/// Sample mean and standard error of the maximum load. Trial `i` draws from
/// the substream `(seed, i)`, so the estimate does not depend on threads.
pub fn monte_carlo_max_load(query: BinsQuery, trials: u64, seed: u64) -> Result<McEstimate, BinsError> {
    let BinsQuery { q, n } = BinsQuery::new(query.q, query.n)?;
    if trials == 0 {
        return Err(BinsError::Domain("trials must be at least 1".into()));
    }
    let samples: Vec<u64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, &[i]);
            let mut load = vec![0u64; q as usize];
            for _ in 0..n {
                load[rng.gen_range(0..q as usize)] += 1;
            }
            load.into_iter().max().unwrap_or(0)
        })
        .collect();
    let t = trials as f64;
    let mean = samples.iter().map(|&x| x as f64).sum::<f64>() / t;
    let var = if trials > 1 {
        samples.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / (t - 1.0)
    } else {
        0.0
    };
    Ok(McEstimate {
        mean,
        stderr: (var / t).sqrt(),
        trials,
    })
}
