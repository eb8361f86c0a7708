use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{BinsError, BinsQuery};

fn binomial(n: u64, k: u64) -> BigInt {
    let mut c = BigInt::one();
    for i in 0..k {
        c = c * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    c
}

fn pow(x: &BigRational, e: u64) -> BigRational {
    num_traits::pow(x.clone(), e as usize)
}

/// `P(Bin(n, p) ≥ t)`, exactly.
pub fn binomial_tail(n: u64, p: &BigRational, t: u64) -> BigRational {
    if t == 0 {
        return BigRational::one();
    }
    let comp = BigRational::one() - p;
    (t..=n)
        .map(|j| BigRational::from_integer(binomial(n, j)) * pow(p, j) * pow(&comp, n - j))
        .fold(BigRational::zero(), |a, b| a + b)
}

/// `(P(Y_1 ≥ t), P(Y_1 ≥ t, Y_2 ≥ t))` for the loads of two fixed bins,
/// conditioning on the first bin's count.
pub fn joint_top2_tail(query: BinsQuery, t: u64) -> Result<(BigRational, BigRational), BinsError> {
    let BinsQuery { q, n } = BinsQuery::new(query.q, query.n)?;
    if t == 0 || t > n {
        return Err(BinsError::Domain(format!("t={t} must lie in 1..={n}")));
    }
    let p = BigRational::new(BigInt::one(), BigInt::from(q));
    let single = binomial_tail(n, &p, t);
    if q == 1 {
        return Ok((single, BigRational::zero()));
    }
    let comp = BigRational::one() - &p;
    let cond = &p / &comp;
    let mut joint = BigRational::zero();
    let mut k = t;
    while k + t <= n {
        let first = BigRational::from_integer(binomial(n, k)) * pow(&p, k) * pow(&comp, n - k);
        joint += first * binomial_tail(n - k, &cond, t);
        k += 1;
    }
    Ok((single, joint))
}
