use num_rational::BigRational;
use num_traits::Signed;
use serde::Serialize;

use super::BinsError;

/// The unique `x ≥ 1` with `x ln x = c`; `c ≤ 0` gives 1.
pub fn solve_x_log_x(c: f64) -> f64 {
    if c.is_nan() {
        return f64::NAN;
    }
    if c <= 0.0 {
        return 1.0;
    }
    let f = |x: f64| x * x.ln() - c;
    let (mut lo, mut hi) = (1.0_f64, (c + 2.0).max(2.0));
    while hi - lo > 1e-13 * hi {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..3 {
        let step = f(x) / (x.ln() + 1.0);
        let next = x - step;
        if !(next >= 1.0) || (next - x).abs() > hi - lo + 1e-9 * x {
            break;
        }
        x = next;
    }
    x
}

/// `ln q0 / (120·n0·ln(q0 ln q0 / (2 n0) + 1))`.
pub fn lower_bound_usable(q0: f64, n0: f64) -> Result<f64, BinsError> {
    if !(q0 > 1.0) {
        return Err(BinsError::Domain(format!("q0 = {q0} must exceed 1")));
    }
    if !(n0 >= 1.0) {
        return Err(BinsError::Domain(format!("n0 = {n0} must be at least 1")));
    }
    let lq = q0.ln();
    Ok(lq / (120.0 * n0 * (q0 * lq / (2.0 * n0)).ln_1p()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UnifiedBranch {
    /// `q ≤ 24` or `q ln q ≤ 2n`: the bound follows from `E M ≥ n/q`.
    Pigeonhole,
    /// `q ≥ 25` and `q ln q > 2n`: the second-moment argument.
    SecondMoment,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UnifiedBound {
    pub x: f64,
    pub value: f64,
    pub branch: UnifiedBranch,
}

/// `x·n/(10q)` with `x ln x = q ln q/(2n)`.
pub fn lb_unified(q: u64, n: u64) -> UnifiedBound {
    let (qf, nf) = (q as f64, n as f64);
    let c = qf * qf.ln() / (2.0 * nf);
    let x = solve_x_log_x(c);
    let branch = if q <= 24 || qf * qf.ln() <= 2.0 * nf {
        UnifiedBranch::Pigeonhole
    } else {
        UnifiedBranch::SecondMoment
    };
    UnifiedBound {
        x,
        value: x * nf / (10.0 * qf),
        branch,
    }
}

/// Bounds on `Γ(x+1)`:
/// `√(2π)·x^{x+1/2}·e^{−x+1/(12x+1)}` and `√(2π)·x^{x+1/2}·e^{−x+1/(12x)}`.
/// At `x = 0` the upper bound is `+∞`.
pub fn stirling_gamma_bounds(x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (0.0, f64::INFINITY);
    }
    let base = 0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * x.ln() - x;
    let lower = (base + 1.0 / (12.0 * x + 1.0)).exp();
    let upper = (base + 1.0 / (12.0 * x)).exp();
    (lower, upper)
}

/// `(x^{x−y}, (x+1)^{x−y})`, bracketing `Γ(x+1)/Γ(y+1)` for `x−1 < y < x`.
pub fn gautschi_bounds(x: f64, y: f64) -> Result<(f64, f64), BinsError> {
    if !(x >= 0.0 && y < x && y > x - 1.0) {
        return Err(BinsError::Domain(format!("need x ≥ 0 and x−1 < y < x, got x={x}, y={y}")));
    }
    let d = x - y;
    Ok((x.powf(d), (x + 1.0).powf(d)))
}

/// Relative slack applied to float bounds before comparing them with exact
/// values, always in the direction that makes the comparison stricter.
pub(crate) const FLOAT_SLACK: f64 = 1e-12;

/// `exact ≥ bound`, with the bound nudged upward first.
pub(crate) fn at_least(exact: &BigRational, bound: f64) -> bool {
    if bound.is_infinite() {
        return bound < 0.0;
    }
    let nudged = bound + FLOAT_SLACK * bound.abs();
    match BigRational::from_float(nudged) {
        Some(b) => *exact >= b,
        None => nudged == f64::NEG_INFINITY,
    }
}

/// Signed relative margin `(exact − bound)/|bound|`, for reporting.
pub(crate) fn margin(exact: &BigRational, bound: f64) -> f64 {
    use num_traits::ToPrimitive;
    let e = exact.to_f64().unwrap_or(f64::NAN);
    if bound == 0.0 {
        return if exact.is_positive() { f64::INFINITY } else { e };
    }
    (e - bound) / bound.abs()
}
