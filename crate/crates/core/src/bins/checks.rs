//! Exhaustive and sampled verification of the balls-and-bins inequalities
//! against the exact oracle.

use std::collections::HashMap;
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use super::analytic::{at_least, margin, FLOAT_SLACK};
use super::{
    binomial_tail, exact_max_load_expectation_with_cap, gautschi_bounds, joint_top2_tail,
    lb_unified, lower_bound_usable, multinomial_max_expectation, stirling_gamma_bounds,
    t_transform, BinsError, BinsQuery, MultinomialSpec,
};
use crate::rng::substream;

/// Outward relative tolerance when bracketing float gamma values.
pub const GAMMA_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid {
    pub q: RangeInclusive<u64>,
    pub n: RangeInclusive<u64>,
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    /// Replaces every per-check `(q, n)` grid when set.
    pub grid: Option<Grid>,
    pub exact_cap: u128,
    pub seed: u64,
    pub schur_samples: usize,
    /// Negative control: the oracle reports `E M / (10q)` instead of `E M`.
    pub corrupt_oracle: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            grid: None,
            exact_cap: super::DEFAULT_EXACT_CAP,
            seed: 0,
            schur_samples: 1000,
            corrupt_oracle: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckSummary {
    pub name: String,
    pub cases: u64,
    pub violations: u64,
    /// Smallest relative slack over all cases (negative on violation).
    pub min_margin: Option<f64>,
    pub first_violation: Option<String>,
}

impl CheckSummary {
    fn new(name: &str) -> Self {
        CheckSummary {
            name: name.to_owned(),
            cases: 0,
            violations: 0,
            min_margin: None,
            first_violation: None,
        }
    }

    fn record(&mut self, ok: bool, margin: f64, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !margin.is_nan() {
            self.min_margin = Some(self.min_margin.map_or(margin, |m| m.min(margin)));
        }
        if !ok {
            self.violations += 1;
            if self.first_violation.is_none() {
                self.first_violation = Some(describe());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub checks: Vec<CheckSummary>,
    pub total_violations: u64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.total_violations == 0
    }
}

/// Memoised exact `E M_{q,n}`, filled in parallel.
pub struct Oracle {
    table: HashMap<(u64, u64), BigRational>,
    cap: u128,
    corrupt: bool,
}

impl Oracle {
    pub fn new(cap: u128, corrupt: bool) -> Self {
        Oracle {
            table: HashMap::new(),
            cap,
            corrupt,
        }
    }

    pub fn prefetch(&mut self, cells: impl IntoIterator<Item = (u64, u64)>) -> Result<(), BinsError> {
        let mut todo: Vec<(u64, u64)> = cells.into_iter().filter(|c| !self.table.contains_key(c)).collect();
        todo.sort_unstable();
        todo.dedup();
        let cap = self.cap;
        let values: Vec<Result<((u64, u64), BigRational), BinsError>> = todo
            .into_par_iter()
            .map(|(q, n)| {
                let m = exact_max_load_expectation_with_cap(BinsQuery::new(q, n)?, cap)?;
                Ok(((q, n), m))
            })
            .collect();
        for v in values {
            let (key, m) = v?;
            self.table.insert(key, m);
        }
        Ok(())
    }

    pub fn expected_max(&mut self, q: u64, n: u64) -> Result<BigRational, BinsError> {
        self.prefetch([(q, n)])?;
        let m = self.table[&(q, n)].clone();
        if self.corrupt {
            return Ok(m / BigRational::from_integer((10 * q).into()));
        }
        Ok(m)
    }

    pub fn w(&mut self, q: u64, n: u64) -> Result<BigRational, BinsError> {
        Ok(self.expected_max(q, n)? / BigRational::from_integer(n.into()))
    }
}

fn cells(q: &RangeInclusive<u64>, n: &RangeInclusive<u64>) -> Vec<(u64, u64)> {
    q.clone().flat_map(|q| n.clone().map(move |n| (q, n))).collect()
}

fn rat(a: u64, b: u64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn rel(a: &BigRational, b: &BigRational) -> f64 {
    let d = to_f64(&(a - b));
    let s = to_f64(b).abs();
    if s == 0.0 {
        d
    } else {
        d / s
    }
}

/// `E M_{q,n} ≥ x·n/(10q)`.
pub fn check_unified(oracle: &mut Oracle, grid: &Grid) -> Result<CheckSummary, BinsError> {
    let mut s = CheckSummary::new("unified: E M ≥ xn/(10q)");
    let q_lo = (*grid.q.start()).max(2);
    for (q, n) in cells(&(q_lo..=*grid.q.end()), &grid.n) {
        let m = oracle.expected_max(q, n)?;
        let b = lb_unified(q, n);
        s.record(at_least(&m, b.value), margin(&m, b.value), || {
            format!("q={q} n={n}: E M = {m} < {} ({:?})", b.value, b.branch)
        });
    }
    Ok(s)
}

fn half_steps(lo: u64, hi: u64) -> impl Iterator<Item = f64> {
    (2 * lo..=2 * hi).map(|h| h as f64 / 2.0)
}

/// `W(q,n) ≥ lower_bound_usable(q0, n0)` for `q ≤ q0`, `n ≤ n0` on a
/// half-integer grid.
pub fn check_usable(oracle: &mut Oracle, grid: &Grid) -> Result<CheckSummary, BinsError> {
    let mut s = CheckSummary::new("usable: W(q,n) ≥ usable(q0,n0)");
    let (q_hi, n_hi) = (*grid.q.end(), *grid.n.end());
    let q_lo = (*grid.q.start()).max(2);
    for (q, n) in cells(&(q_lo..=q_hi), &grid.n) {
        let w = oracle.w(q, n)?;
        for q0 in half_steps(q, q_hi) {
            for n0 in half_steps(n, n_hi) {
                let b = lower_bound_usable(q0, n0)?;
                s.record(at_least(&w, b), margin(&w, b), || {
                    format!("q={q} n={n} q0={q0} n0={n0}: W = {w} < {b}")
                });
            }
        }
    }
    Ok(s)
}

/// `W(q,n) ≥ max(1/q, 1/n)`.
pub fn check_w_floor(oracle: &mut Oracle, grid: &Grid) -> Result<CheckSummary, BinsError> {
    let mut s = CheckSummary::new("w-floor: W(q,n) ≥ max(1/q, 1/n)");
    for (q, n) in cells(&grid.q, &grid.n) {
        let w = oracle.w(q, n)?;
        let floor = rat(1, q.min(n));
        s.record(w >= floor, rel(&w, &floor), || format!("q={q} n={n}: W = {w} < {floor}"));
    }
    Ok(s)
}

/// `W(q,n) ≤ W(q,n−1)` and `E M_{q+1,n} ≤ E M_{q,n}`.
pub fn check_monotone(oracle: &mut Oracle, grid: &Grid) -> Result<Vec<CheckSummary>, BinsError> {
    let mut in_n = CheckSummary::new("monotone-n: W(q,n) ≤ W(q,n−1)");
    let mut in_q = CheckSummary::new("monotone-q: E M(q+1,n) ≤ E M(q,n)");
    for (q, n) in cells(&grid.q, &grid.n) {
        if n >= 2 {
            let (a, b) = (oracle.w(q, n)?, oracle.w(q, n - 1)?);
            in_n.record(a <= b, rel(&b, &a), || format!("q={q} n={n}: {a} > {b}"));
        }
        let (a, b) = (oracle.expected_max(q + 1, n)?, oracle.expected_max(q, n)?);
        in_q.record(a <= b, rel(&b, &a), || format!("q={q} n={n}: {a} > {b}"));
    }
    Ok(vec![in_n, in_q])
}

/// `M(p') ≤ M(p)` for random T-transforms over at most 4 bins, `n ≤ 6`.
pub fn check_schur(samples: usize, seed: u64) -> Result<CheckSummary, BinsError> {
    let results: Vec<Result<(bool, f64, String), BinsError>> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, &[0x5c, i]);
            let bins = rng.gen_range(2..=4usize);
            let n = rng.gen_range(1..=6u64);
            let mut weights: Vec<u64> = (0..bins).map(|_| rng.gen_range(0..=12)).collect();
            if weights.iter().all(|&w| w == 0) {
                weights[0] = 1;
            }
            let total: u64 = weights.iter().sum();
            let p: Vec<BigRational> = weights.iter().map(|&w| rat(w, total)).collect();
            let a = rng.gen_range(0..bins);
            let b = (a + rng.gen_range(1..bins)) % bins;
            let lambda = rat(rng.gen_range(0..=12), 12);
            let p2 = t_transform(&p, a, b, &lambda)?;
            let m1 = multinomial_max_expectation(&MultinomialSpec::new(p.clone(), n)?)?;
            let m2 = multinomial_max_expectation(&MultinomialSpec::new(p2, n)?)?;
            let desc = format!("p={weights:?}/{total} n={n} i={a} j={b} λ={lambda}: {m2} > {m1}");
            Ok((m2 <= m1, rel(&m1, &m2), desc))
        })
        .collect();
    let mut s = CheckSummary::new("schur: M(T p) ≤ M(p)");
    for r in results {
        let (ok, m, desc) = r?;
        s.record(ok, m, || desc);
    }
    Ok(s)
}

/// `E max{X_a, n−X_a} ≥ E max{X_b, n−X_b}` for `0 ≤ a < b ≤ 1/2` on a
/// grid of step 1/20 and `n ≤ 10`.
pub fn check_two_bin() -> Result<CheckSummary, BinsError> {
    let mut s = CheckSummary::new("two-bin: max decreases toward 1/2");
    let mut value = HashMap::new();
    for n in 1..=10u64 {
        for a in 0..=10u64 {
            let p = vec![rat(a, 20), rat(20 - a, 20)];
            value.insert((n, a), multinomial_max_expectation(&MultinomialSpec::new(p, n)?)?);
        }
    }
    for n in 1..=10u64 {
        for a in 0..=10u64 {
            for b in a + 1..=10 {
                let (ma, mb) = (&value[&(n, a)], &value[&(n, b)]);
                s.record(ma >= mb, rel(ma, mb), || format!("n={n} p={a}/20 q={b}/20: {ma} < {mb}"));
            }
        }
    }
    Ok(s)
}

/// `P(Y_1 ≥ t, Y_2 ≥ t) ≤ exp(n/q² + 1/q)·P(Y_1 ≥ t)²`.
pub fn check_joint_tail(grid: &Grid) -> Result<CheckSummary, BinsError> {
    let mut s = CheckSummary::new("joint-tail: joint ≤ exp(n/q²+1/q)·single²");
    let q_lo = (*grid.q.start()).max(4);
    let mut work = Vec::new();
    for (q, n) in cells(&(q_lo..=*grid.q.end()), &grid.n) {
        if n < q {
            continue;
        }
        for t in n.div_ceil(q)..=n {
            work.push((q, n, t));
        }
    }
    let results: Vec<Result<_, BinsError>> = work
        .into_par_iter()
        .map(|(q, n, t)| {
            let (single, joint) = joint_top2_tail(BinsQuery::new(q, n)?, t)?;
            let factor = (n as f64 / (q * q) as f64 + 1.0 / q as f64).exp();
            let sq = &single * &single;
            let nudged = factor * (1.0 - FLOAT_SLACK);
            let ok = joint <= BigRational::from_float(nudged).unwrap() * &sq;
            let bound = factor * to_f64(&sq);
            Ok((ok, margin_le(&joint, bound), format!("q={q} n={n} t={t}: joint {joint} vs {bound}")))
        })
        .collect();
    for r in results {
        let (ok, m, d) = r?;
        s.record(ok, m, || d);
    }
    Ok(s)
}

fn margin_le(exact: &BigRational, bound: f64) -> f64 {
    if bound == 0.0 {
        return if exact.is_zero() { 0.0 } else { -1.0 };
    }
    (bound - to_f64(exact)) / bound.abs()
}

/// `P(Bin(⌊n(1−p)⌋, p/(1−p)) ≥ t) ≤ e^{p²n+p}·P(Bin(n,p) ≥ t)` for `p ≤ 1/4`.
pub fn check_thinned_tail(grid: &Grid) -> Result<CheckSummary, BinsError> {
    let mut s = CheckSummary::new("thinned-tail: thinned ≤ e^{p²n+p}·tail");
    let mut ps: Vec<BigRational> = (1..=5).map(|k| rat(k, 20)).collect();
    ps.extend((4..=20).map(|d| rat(1, d)));
    ps.sort();
    ps.dedup();
    let mut work = Vec::new();
    for p in &ps {
        for n in grid.n.clone() {
            for t in 1..=n {
                work.push((p.clone(), n, t));
            }
        }
    }
    let results: Vec<(bool, f64, String)> = work
        .into_par_iter()
        .map(|(p, n, t)| {
            let one = BigRational::one();
            let m = (BigRational::from_integer(n.into()) * (&one - &p)).floor();
            let m = m.to_integer().to_u64().unwrap();
            let left = binomial_tail(m, &(&p / (&one - &p)), t);
            let right = binomial_tail(n, &p, t);
            let pf = to_f64(&p);
            let factor = (pf * pf * n as f64 + pf).exp() * (1.0 - FLOAT_SLACK);
            let f = BigRational::from_float(factor).unwrap();
            let ok = left <= &f * &right;
            let bound = factor * to_f64(&right);
            (ok, margin_le(&left, bound), format!("p={p} n={n} t={t}: {left} vs {bound}"))
        })
        .collect();
    for (ok, m, d) in results {
        s.record(ok, m, || d);
    }
    Ok(s)
}

fn x_grid() -> impl Iterator<Item = f64> {
    (1..=100).map(|i| i as f64 / 10.0)
}

/// Stirling-type bracket of `Γ(x+1)` for `x ∈ {0.1, …, 10}`.
pub fn check_stirling() -> CheckSummary {
    let mut s = CheckSummary::new("stirling: bracket of Γ(x+1)");
    for x in x_grid() {
        let (lo, hi) = stirling_gamma_bounds(x);
        let g = ln_gamma(x + 1.0).exp();
        let ok = lo <= g * (1.0 + GAMMA_TOLERANCE) && g <= hi * (1.0 + GAMMA_TOLERANCE);
        let m = ((g - lo) / g).min((hi - g) / g);
        s.record(ok, m, || format!("x={x}: {lo} ≤ {g} ≤ {hi} fails"));
    }
    s
}

/// `x^{x−y} ≤ Γ(x+1)/Γ(y+1) ≤ (x+1)^{x−y}` for `x ∈ {0.1, …, 10}` and
/// `y = x − d`, `d ∈ {0.1, …, 0.9}`.
pub fn check_gautschi() -> Result<CheckSummary, BinsError> {
    let mut s = CheckSummary::new("gautschi: bracket of Γ(x+1)/Γ(y+1)");
    for x in x_grid() {
        for d in (1..=9).map(|i| i as f64 / 10.0) {
            let y = x - d;
            let (lo, hi) = gautschi_bounds(x, y)?;
            let ratio = (ln_gamma(x + 1.0) - ln_gamma(y + 1.0)).exp();
            let ok = lo <= ratio * (1.0 + GAMMA_TOLERANCE) && ratio <= hi * (1.0 + GAMMA_TOLERANCE);
            let m = ((ratio - lo) / ratio).min((hi - ratio) / ratio);
            s.record(ok, m, || format!("x={x} y={y}: {lo} ≤ {ratio} ≤ {hi} fails"));
        }
    }
    Ok(s)
}

/// Default grids of each check when no override is given.
pub mod default_grids {
    use super::Grid;

    pub fn unified() -> Grid {
        Grid { q: 2..=24, n: 1..=24 }
    }
    pub fn usable() -> Grid {
        Grid { q: 2..=16, n: 1..=16 }
    }
    pub fn w_floor() -> Grid {
        Grid { q: 1..=24, n: 1..=24 }
    }
    pub fn monotone() -> Grid {
        Grid { q: 1..=11, n: 1..=12 }
    }
    pub fn joint_tail() -> Grid {
        Grid { q: 4..=8, n: 1..=16 }
    }
    pub fn thinned_tail() -> Grid {
        Grid { q: 1..=1, n: 1..=16 }
    }
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport, BinsError> {
    let pick = |default: Grid| cfg.grid.clone().unwrap_or(default);
    let mut oracle = Oracle::new(cfg.exact_cap, cfg.corrupt_oracle);
    let (g_uni, g_use, g_floor, g_mono) = (
        pick(default_grids::unified()),
        pick(default_grids::usable()),
        pick(default_grids::w_floor()),
        pick(default_grids::monotone()),
    );
    let mut wanted = cells(&g_uni.q, &g_uni.n);
    wanted.extend(cells(&g_use.q, &g_use.n));
    wanted.extend(cells(&g_floor.q, &g_floor.n));
    wanted.extend(cells(&(*g_mono.q.start()..=*g_mono.q.end() + 1), &g_mono.n));
    oracle.prefetch(wanted.into_iter().filter(|&(q, _)| q >= 1))?;

    let mut checks = vec![
        check_unified(&mut oracle, &g_uni)?,
        check_usable(&mut oracle, &g_use)?,
        check_w_floor(&mut oracle, &g_floor)?,
    ];
    checks.extend(check_monotone(&mut oracle, &g_mono)?);
    checks.push(check_schur(cfg.schur_samples, cfg.seed)?);
    checks.push(check_two_bin()?);
    checks.push(check_joint_tail(&pick(default_grids::joint_tail()))?);
    checks.push(check_thinned_tail(&pick(default_grids::thinned_tail()))?);
    checks.push(check_stirling());
    checks.push(check_gautschi()?);
    let total_violations = checks.iter().map(|c| c.violations).sum();
    Ok(SuiteReport {
        checks,
        total_violations,
    })
}
