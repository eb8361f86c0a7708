//! Balls into bins: the maximum load `M_{q,n}` of `n` balls thrown
//! uniformly into `q` bins, its normalised mean `W(q,n) = E M_{q,n} / n`,
//! and the analytic bounds used to lower-bound it.
//!
//! Exact quantities are [`BigRational`]s. Logarithms are natural.

mod analytic;
pub mod checks;
mod exact;
mod multinomial;
mod tails;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

pub use analytic::{
    gautschi_bounds, lb_unified, lower_bound_usable, solve_x_log_x, stirling_gamma_bounds,
    UnifiedBound, UnifiedBranch,
};
pub use exact::{
    exact_max_load_expectation, exact_max_load_expectation_with_cap, monte_carlo_max_load, w,
    w_with_cap, McEstimate, DEFAULT_EXACT_CAP,
};
pub use multinomial::{
    multinomial_max_expectation, multinomial_max_expectation_with_cap, t_transform,
    MultinomialSpec, DEFAULT_MULTINOMIAL_CAP,
};
pub use tails::{binomial_tail, joint_top2_tail};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BinsError {
    #[error("q and n must be at least 1 (got q={q}, n={n})")]
    EmptyQuery { q: u64, n: u64 },
    #[error("q·n = {size} exceeds the exact cap {cap}; use Monte Carlo instead")]
    CapExceeded { size: u128, cap: u128 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid probability vector: {0}")]
    InvalidSpec(String),
}

/// `q` bins, `n` balls.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BinsQuery {
    pub q: u64,
    pub n: u64,
}

impl BinsQuery {
    pub fn new(q: u64, n: u64) -> Result<Self, BinsError> {
        if q == 0 || n == 0 {
            return Err(BinsError::EmptyQuery { q, n });
        }
        Ok(BinsQuery { q, n })
    }
}

/// Exact mean maximum load together with the analytic lower bounds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BinsStats {
    pub q: u64,
    pub n: u64,
    #[serde(serialize_with = "as_string")]
    pub expected_max: BigRational,
    #[serde(serialize_with = "as_string")]
    pub w: BigRational,
    pub x: f64,
    pub lb_unified: f64,
    pub lb_unified_branch: UnifiedBranch,
    /// `None` for `q = 1`, where the usable bound is undefined.
    pub lb_usable: Option<f64>,
}

fn as_string<S: serde::Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

impl BinsStats {
    pub fn compute(query: BinsQuery, cap: u128) -> Result<Self, BinsError> {
        let expected_max = exact_max_load_expectation_with_cap(query, cap)?;
        let w = &expected_max / BigRational::from_integer(query.n.into());
        let unified = lb_unified(query.q, query.n);
        let lb_usable = if query.q > 1 {
            Some(lower_bound_usable(query.q as f64, query.n as f64)?)
        } else {
            None
        };
        Ok(BinsStats {
            q: query.q,
            n: query.n,
            expected_max,
            w,
            x: unified.x,
            lb_unified: unified.value,
            lb_unified_branch: unified.branch,
            lb_usable,
        })
    }

    pub fn expected_max_f64(&self) -> f64 {
        self.expected_max.to_f64().unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats_json_shape() {
        let s = BinsStats::compute(BinsQuery::new(2, 2).unwrap(), DEFAULT_EXACT_CAP).unwrap();
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(v["expected_max"], "3/2");
        assert_eq!(v["w"], "3/4");
        assert_eq!(v["q"], 2);
        assert!(v["x"].as_f64().unwrap() >= 1.0);
        assert!(v["lb_usable"].as_f64().unwrap() > 0.0);
        let s = BinsStats::compute(BinsQuery::new(1, 5).unwrap(), DEFAULT_EXACT_CAP).unwrap();
        assert_eq!(serde_json::to_value(&s).unwrap()["expected_max"], "5");
        assert!(s.lb_usable.is_none());
    }

    #[test]
    fn empty_query_rejected() {
        assert!(BinsQuery::new(0, 3).is_err());
        assert!(BinsQuery::new(3, 0).is_err());
    }
}
