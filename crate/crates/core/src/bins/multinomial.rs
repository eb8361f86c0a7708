use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::BinsError;

/// Default limit on the number of compositions enumerated.
pub const DEFAULT_MULTINOMIAL_CAP: u128 = 10_000_000;

/// `X ~ Mult(n; p)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultinomialSpec {
    probabilities: Vec<BigRational>,
    n: u64,
}

impl MultinomialSpec {
    pub fn new(probabilities: Vec<BigRational>, n: u64) -> Result<Self, BinsError> {
        if probabilities.is_empty() {
            return Err(BinsError::InvalidSpec("no bins".into()));
        }
        if n == 0 {
            return Err(BinsError::InvalidSpec("n must be at least 1".into()));
        }
        if probabilities.iter().any(|p| p.is_negative()) {
            return Err(BinsError::InvalidSpec("negative probability".into()));
        }
        let sum: BigRational = probabilities.iter().sum();
        if !sum.is_one() {
            return Err(BinsError::InvalidSpec(format!("probabilities sum to {sum}")));
        }
        Ok(MultinomialSpec { probabilities, n })
    }

    pub fn probabilities(&self) -> &[BigRational] {
        &self.probabilities
    }

    pub fn n(&self) -> u64 {
        self.n
    }
}

pub fn multinomial_max_expectation(spec: &MultinomialSpec) -> Result<BigRational, BinsError> {
    multinomial_max_expectation_with_cap(spec, DEFAULT_MULTINOMIAL_CAP)
}

/// Exact `E max_i X_i` by enumerating the compositions of `n` over the
/// support of `p`.
pub fn multinomial_max_expectation_with_cap(
    spec: &MultinomialSpec,
    cap: u128,
) -> Result<BigRational, BinsError> {
    let support: Vec<&BigRational> = spec.probabilities.iter().filter(|p| !p.is_zero()).collect();
    let n = spec.n as usize;
    let s = support.len();
    let count = compositions(n, s);
    if count > cap {
        return Err(BinsError::CapExceeded { size: count, cap });
    }
    // powers[i][k] = p_i^k / k!
    let mut fact = vec![BigInt::one(); n + 1];
    for i in 1..=n {
        fact[i] = &fact[i - 1] * BigInt::from(i);
    }
    let powers: Vec<Vec<BigRational>> = support
        .iter()
        .map(|p| {
            let mut v = Vec::with_capacity(n + 1);
            let mut acc = BigRational::one();
            for k in 0..=n {
                v.push(&acc / BigRational::from_integer(fact[k].clone()));
                acc *= *p;
            }
            v
        })
        .collect();

    let mut total = BigRational::zero();
    let mut parts = vec![0usize; s];
    enumerate(&powers, n, 0, &mut parts, &mut |parts| {
        let mut weight = BigRational::from_integer(fact[n].clone());
        for (i, &k) in parts.iter().enumerate() {
            weight *= &powers[i][k];
        }
        let max = *parts.iter().max().unwrap();
        total += weight * BigRational::from_integer(max.into());
    });
    Ok(total)
}

fn enumerate<F: FnMut(&[usize])>(
    powers: &[Vec<BigRational>],
    left: usize,
    i: usize,
    parts: &mut Vec<usize>,
    f: &mut F,
) {
    if i + 1 == parts.len() {
        parts[i] = left;
        f(parts);
        return;
    }
    for k in 0..=left {
        parts[i] = k;
        enumerate(powers, left - k, i + 1, parts, f);
    }
}

fn compositions(n: usize, s: usize) -> u128 {
    // C(n + s − 1, s − 1), saturating
    let mut c: u128 = 1;
    for i in 1..s {
        c = c.saturating_mul((n + i) as u128) / i as u128;
    }
    c
}

/// `p_i ← λp_i + (1−λ)p_j`, `p_j ← λp_j + (1−λ)p_i`; indices are 0-based.
pub fn t_transform(
    p: &[BigRational],
    i: usize,
    j: usize,
    lambda: &BigRational,
) -> Result<Vec<BigRational>, BinsError> {
    if i == j || i >= p.len() || j >= p.len() {
        return Err(BinsError::Domain(format!(
            "indices ({i}, {j}) must be distinct and below {}",
            p.len()
        )));
    }
    if lambda.is_negative() || *lambda > BigRational::one() {
        return Err(BinsError::Domain(format!("lambda {lambda} outside [0, 1]")));
    }
    let mu = BigRational::one() - lambda;
    let mut out = p.to_vec();
    out[i] = lambda * &p[i] + &mu * &p[j];
    out[j] = lambda * &p[j] + &mu * &p[i];
    Ok(out)
}
