//! The full colouring driver.
//!
//! Stages run in order, each drawing fresh colours from the next free index:
//!
//! 1. low-degree refinement (at most `r/3` colours),
//! 2. an initial star colouring with `⌊r/6⌋` colours,
//! 3. rounds `i = 0, 1, …`, each spending at most `r·ρ^i/6` colours on
//!    repeated key-lemma extractions followed by a star colouring,
//! 4. an endgame: a star colouring with `⌈56·r^{3/4}⌉` colours and a proper
//!    colouring of what is left, or the proper colouring alone once
//!    `Δ ≤ r/7`.
//!
//! Stage spending is checked against exact rational budgets. Overspending is
//! an internal error, never a soft failure. Running out of the overall
//! budget `r` is a soft failure recorded in the report.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::colour::{
    proper_edge_colouring, star_colouring, vizing_type_refinement, Colour, ColourError, EdgeColouring,
};
use crate::extract::{key_lemma_extract, ExtractError, Selection, DEFAULT_TRIALS};
use crate::graph::{header_value, Edge, Graph, ParseError};
use crate::rng::derive_seed;

const STREAM_ROUNDS: u64 = 1;

/// Hard cap on the number of rounds. The round budget hits zero long before
/// this for any `r` that fits in memory.
const MAX_ROUNDS: usize = 256;

#[derive(Debug, Error, PartialEq)]
pub enum PipelineError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("colouring does not match the graph: {0}")]
    Contract(String),
}

fn rat(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn int(x: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn ser_rational<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn floor_usize(x: &BigRational) -> usize {
    x.floor().to_integer().to_usize().unwrap_or(usize::MAX)
}

/// `ln(1/β)` must exceed this for the first closing inequality.
fn beta0_log_threshold() -> f64 {
    30.0 * (2.0 * std::f64::consts::E * 360.0 * 60.0).ln()
}

/// Whether `β` satisfies `(1/β)^{1/30} > 2e·360·60` and
/// `(1/β)^{1/30} > ln(5/β²)`, evaluated in log space.
pub fn beta0_admissible(beta: f64) -> bool {
    if !(beta > 0.0 && beta < 1.0) {
        return false;
    }
    let u = -beta.ln();
    u > beta0_log_threshold() && u / 30.0 > (5f64.ln() + 2.0 * u).ln()
}

/// The largest admissible `β_0` (to float precision), about `1e-152`.
pub fn beta0_default() -> f64 {
    let mut u = beta0_log_threshold();
    loop {
        let beta = (-u).exp();
        if beta0_admissible(beta) {
            return beta;
        }
        u += u * 1e-15;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineParams {
    pub r: usize,
    pub k: usize,
    #[serde(serialize_with = "ser_rational")]
    pub eta: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub zeta: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub rho: BigRational,
    pub beta0: f64,
    /// Set when `beta0` was supplied rather than solved for.
    pub beta0_overridden: bool,
    pub c0: f64,
    pub trials_per_extraction: usize,
    pub seed: u64,
    /// Refuse to run when `k ≥ 100·ln r` or `e(G) ≤ c0·r²·ln r·k` fails.
    pub enforce_preconditions: bool,
    /// Test hook: makes the first budget check see one colour too many.
    #[doc(hidden)]
    #[serde(skip)]
    pub inject_overspend: bool,
}

impl PipelineParams {
    pub fn new(r: usize, k: usize) -> Self {
        let beta0 = beta0_default();
        PipelineParams {
            r,
            k,
            eta: rat(1, 10),
            zeta: rat(1, 3),
            rho: rat(2, 5),
            beta0,
            beta0_overridden: false,
            c0: beta0 / 576.0,
            trials_per_extraction: DEFAULT_TRIALS,
            seed: 0,
            enforce_preconditions: false,
            inject_overspend: false,
        }
    }

    /// Replaces `β_0` (and `c0 = β_0/576` with it).
    pub fn with_beta0(mut self, beta0: f64) -> Self {
        self.beta0 = beta0;
        self.c0 = beta0 / 576.0;
        self.beta0_overridden = true;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials_per_extraction = trials;
        self
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::InvalidParams(m));
        if self.r == 0 {
            return bad("r must be at least 1".into());
        }
        if self.k < 2 {
            return bad(format!("k={} must be at least 2", self.k));
        }
        if self.trials_per_extraction == 0 {
            return bad("at least one extraction trial is needed".into());
        }
        let zero = BigRational::zero();
        if self.eta <= zero || self.zeta <= zero || self.rho <= zero {
            return bad("eta, zeta and rho must be positive".into());
        }
        if self.rho >= rat(1, 2) {
            return bad(format!("rho={} must be below 1/2", self.rho));
        }
        if self.eta >= &self.rho * &self.zeta {
            return bad(format!("eta={} must be below rho·zeta", self.eta));
        }
        let (z, p) = (self.zeta.to_f64().unwrap_or(1.0), self.rho.to_f64().unwrap_or(0.0));
        if z.powf(0.9) >= p {
            return bad(format!("zeta^0.9 = {} must be below rho={p}", z.powf(0.9)));
        }
        if !(self.beta0 > 0.0 && self.beta0 <= 1.0) {
            return bad(format!("beta0={} must lie in (0, 1]", self.beta0));
        }
        if !(self.c0 > 0.0) || self.c0 > self.beta0 / 576.0 * (1.0 + 1e-12) {
            return bad(format!("c0={} must lie in (0, beta0/576]", self.c0));
        }
        Ok(())
    }

    fn ln_r(&self) -> f64 {
        (self.r as f64).ln()
    }

    /// `ζ^i·β_0·r·ln r`, the degree bound round `i` starts from.
    pub fn degree_target(&self, i: usize) -> f64 {
        self.zeta.to_f64().unwrap_or(0.0).powi(i as i32) * self.beta0 * self.r as f64 * self.ln_r()
    }

    /// `r·ρ^i/6`.
    pub fn round_budget(&self, i: usize) -> BigRational {
        int(self.r) * num_traits::pow(self.rho.clone(), i) / int(6)
    }

    /// `⌊r·ρ^i/12⌋`: the cap on extractions and the star size in round `i`.
    pub fn round_part(&self, i: usize) -> usize {
        floor_usize(&(self.round_budget(i) / int(2)))
    }

    /// Smallest `s` with `s ≥ 56·r^{3/4}`, computed exactly as `s⁴ ≥ 56⁴r³`.
    pub fn endgame_star_size(&self) -> usize {
        let target = BigInt::from(56u32).pow(4) * BigInt::from(self.r).pow(3);
        let mut s = (56.0 * (self.r as f64).powf(0.75)).floor().max(0.0) as usize;
        s = s.saturating_sub(2);
        while BigInt::from(s).pow(4) < target {
            s += 1;
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Preconditions {
    pub edges: usize,
    /// `c0·r²·ln r·k`.
    pub edge_bound: f64,
    pub edge_bound_held: bool,
    /// `100·ln r`.
    pub k_bound: f64,
    pub k_bound_held: bool,
    pub beta0_admissible: bool,
}

impl Preconditions {
    pub fn evaluate(g: &Graph, params: &PipelineParams) -> Self {
        let (r, k) = (params.r as f64, params.k as f64);
        let edge_bound = params.c0 * r * r * params.ln_r() * k;
        let k_bound = 100.0 * params.ln_r();
        Preconditions {
            edges: g.edge_count(),
            edge_bound,
            edge_bound_held: g.edge_count() as f64 <= edge_bound,
            k_bound,
            k_bound_held: k >= k_bound,
            beta0_admissible: beta0_admissible(params.beta0),
        }
    }

    pub fn all_held(&self) -> bool {
        self.edge_bound_held && self.k_bound_held && self.beta0_admissible
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationReason {
    /// `e(G_t) ≤ r^{7/4}·k`.
    EdgeFloor,
    /// `ζ^t·β_0·r·ln r < r/7`.
    DegreeFloor,
    /// The round budget `⌊r·ρ^t/12⌋` reached zero.
    Budget,
    /// A round removed no edges.
    Stalled,
    /// An extraction found no certified subgraph.
    ExtractionFailed,
}

/// Which of the three round conclusions held: the edge count dropped by a
/// factor `η`, the maximum degree fell below the next round's target, and
/// the round stayed within `r·ρ^i/6` colours.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Conclusions {
    pub edges_reduced: bool,
    pub degree_reduced: bool,
    pub within_budget: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundTrace {
    pub round_index: usize,
    pub edges_before: usize,
    pub edges_after: usize,
    pub max_degree_before: usize,
    pub max_degree_after: usize,
    pub first_colour: Colour,
    pub colours_spent: usize,
    pub extraction_colours: usize,
    pub star_colours: usize,
    #[serde(serialize_with = "ser_rational")]
    pub budget: BigRational,
    /// `e(H)/e(F_j)` for each extraction.
    pub extractions: Vec<f64>,
    pub selections: Vec<Selection>,
    pub degree_target_before: f64,
    pub degree_target_after: f64,
    pub degree_precondition_held: bool,
    pub conclusions: Conclusions,
    pub notes: Vec<String>,
    pub termination_reason: Option<TerminationReason>,
}

pub struct RoundOutcome {
    pub g_next: Graph,
    pub colouring: EdgeColouring,
    pub trace: RoundTrace,
}

/// One round of the recursion on `g_i`.
///
/// Extractions continue until `10·e(F) ≤ e(g_i)`, the extraction cap
/// `⌊r·ρ^i/12⌋` is reached, or an extraction comes back empty; a star
/// colouring with `⌊r·ρ^i/12⌋` colours then removes the high-degree edges.
/// A failed extraction ends the round early with whatever was coloured.
/// Randomness comes from `params.seed` mixed with the round and extraction
/// indices.
pub fn run_round(
    g_i: &Graph,
    i: usize,
    params: &PipelineParams,
    colour_base: Colour,
) -> Result<RoundOutcome, PipelineError> {
    let (r, k) = (params.r, params.k);
    let e_before = g_i.edge_count();
    let part = params.round_part(i);
    let mut f = g_i.clone();
    let mut colouring = EdgeColouring::new();
    let mut extractions = Vec::new();
    let mut selections = Vec::new();
    let mut notes = Vec::new();
    let mut termination = None;
    let target = &params.eta * int(e_before);

    while int(f.edge_count()) > target && extractions.len() < part {
        let j = extractions.len();
        let seed = derive_seed(params.seed, &[STREAM_ROUNDS, i as u64, j as u64]);
        let kx = match key_lemma_extract(&f, r, k, params.trials_per_extraction, seed) {
            Ok(kx) => kx,
            Err(ExtractError::NoCertified { trials, .. }) => {
                notes.push(format!("extraction {j}: no certified subgraph in {trials} trials"));
                termination = Some(TerminationReason::ExtractionFailed);
                break;
            }
            Err(e) => return Err(PipelineError::Invariant(format!("round {i}, extraction {j}: {e}"))),
        };
        if kx.result.h.is_empty() {
            notes.push(format!("extraction {j} returned no edges"));
            break;
        }
        let colour = colour_base + j;
        for e in kx.result.h.edges() {
            colouring
                .assign(*e, colour)
                .map_err(|e| PipelineError::Invariant(e.to_string()))?;
        }
        f = f
            .subtract(&kx.result.h)
            .map_err(|e| PipelineError::Invariant(format!("extracted edge not in F: {e}")))?;
        extractions.push(kx.achieved_ratio);
        selections.push(kx.selection);
    }
    let extraction_colours = extractions.len();

    let mut star_colours = 0;
    if termination.is_none() && part > 0 && !f.is_empty() {
        if k < 4 {
            notes.push(format!("star step skipped: k={k} is below 4"));
        } else {
            match star_colouring(&f, part, k, colour_base + extraction_colours) {
                Ok(res) => {
                    star_colours = res.colours_used;
                    colouring
                        .absorb(res.colouring)
                        .map_err(|e| PipelineError::Invariant(e.to_string()))?;
                    f = res.residual;
                }
                Err(ColourError::BudgetExceeded { needed, budget }) => {
                    notes.push(format!("star step skipped: needs {needed} colours, budget {budget}"));
                }
                Err(e) => return Err(PipelineError::Invariant(e.to_string())),
            }
        }
    }

    let colours_spent = extraction_colours + star_colours;
    let budget = params.round_budget(i);
    let degree_target_after = params.degree_target(i + 1);
    let trace = RoundTrace {
        round_index: i,
        edges_before: e_before,
        edges_after: f.edge_count(),
        max_degree_before: g_i.max_degree(),
        max_degree_after: f.max_degree(),
        first_colour: colour_base,
        colours_spent,
        extraction_colours,
        star_colours,
        extractions,
        selections,
        degree_target_before: params.degree_target(i),
        degree_target_after,
        degree_precondition_held: g_i.max_degree() as f64 <= params.degree_target(i),
        conclusions: Conclusions {
            edges_reduced: int(f.edge_count()) <= target,
            degree_reduced: f.max_degree() as f64 <= degree_target_after,
            within_budget: int(colours_spent) <= budget,
        },
        budget,
        notes,
        termination_reason: termination,
    };
    Ok(RoundOutcome {
        g_next: f,
        colouring,
        trace,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageReport {
    pub name: String,
    /// Hard limit on this stage's colours, as an exact rational.
    pub budget: String,
    /// The stage's share of `r` in the colour accounting, where it differs
    /// from the hard limit.
    pub nominal: Option<String>,
    pub first_colour: Colour,
    pub colours_used: usize,
    pub edges_coloured: usize,
    pub edges_left: usize,
    pub skipped: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EndgameCase {
    /// `Δ ≤ r/7`: proper colouring only.
    LowDegree,
    /// Star colouring with `⌈56·r^{3/4}⌉` colours, then proper colouring.
    StarThenProper,
    /// Star colouring unavailable (`k < 4` or over budget): proper only.
    ProperOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EndgameReport {
    pub case: EndgameCase,
    pub edges: usize,
    pub max_degree: usize,
    /// Whether `e(G_t) ≤ r^{7/4}·k`.
    pub edge_floor_held: bool,
    pub star_size: Option<usize>,
    pub star_colours: usize,
    pub proper_colours: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub params: PipelineParams,
    pub vertices: usize,
    pub edges: usize,
    pub preconditions: Preconditions,
    pub stages: Vec<StageReport>,
    /// Whether `Δ ≤ β_0·r·ln r` held after the initial star colouring.
    pub initial_degree_target_met: bool,
    pub rounds: Vec<RoundTrace>,
    pub termination: Option<TerminationReason>,
    pub endgame: Option<EndgameReport>,
    pub colours_used: usize,
    pub success: bool,
    pub failure: Option<String>,
}

pub struct PipelineRun {
    pub colouring: EdgeColouring,
    pub report: RunReport,
}

/// Spending ledger: hands out colour ranges and checks each stage against
/// its exact budget.
struct Accounts {
    next: Colour,
    inject: bool,
    stages: Vec<StageReport>,
}

impl Accounts {
    fn charge(
        &mut self,
        name: String,
        used: usize,
        budget: &BigRational,
        nominal: Option<String>,
        edges: (usize, usize),
    ) -> Result<(), PipelineError> {
        let mut seen = used;
        if std::mem::take(&mut self.inject) {
            seen = floor_usize(budget) + 1;
        }
        if int(seen) > *budget {
            return Err(PipelineError::Invariant(format!(
                "stage {name} spent {seen} colours, budget {budget}"
            )));
        }
        self.stages.push(StageReport {
            name,
            budget: budget.to_string(),
            nominal,
            first_colour: self.next,
            colours_used: used,
            edges_coloured: edges.0,
            edges_left: edges.1,
            skipped: None,
        });
        self.next += used;
        Ok(())
    }

    fn skip(&mut self, name: &str, budget: &BigRational, reason: String, edges_left: usize) {
        self.stages.push(StageReport {
            name: name.into(),
            budget: budget.to_string(),
            nominal: None,
            first_colour: self.next,
            colours_used: 0,
            edges_coloured: 0,
            edges_left,
            skipped: Some(reason),
        });
    }
}

/// Relabels the colours of `c` onto `base, base+1, …` in increasing order.
fn compact(c: EdgeColouring, base: Colour) -> (EdgeColouring, usize) {
    let map: BTreeMap<Colour, Colour> = c
        .colours()
        .into_iter()
        .enumerate()
        .map(|(i, x)| (x, base + i))
        .collect();
    let n = map.len();
    (c.iter().map(|(e, x)| (e, map[&x])).collect(), n)
}

fn merge(into: &mut EdgeColouring, from: EdgeColouring) -> Result<(), PipelineError> {
    into.absorb(from).map_err(|e| PipelineError::Invariant(e.to_string()))
}

/// Colours every edge of `g`. The colouring is complete even when it uses
/// more than `r` colours; `report.success` says whether it fits.
pub fn colour_graph(g: &Graph, params: &PipelineParams) -> Result<PipelineRun, PipelineError> {
    params.validate()?;
    let pre = Preconditions::evaluate(g, params);
    if params.enforce_preconditions && !pre.all_held() {
        return Err(PipelineError::Precondition(format!(
            "e(G)={} vs bound {:.3e}, k={} vs bound {:.3}, beta0 admissible: {}",
            pre.edges, pre.edge_bound, params.k, pre.k_bound, pre.beta0_admissible
        )));
    }
    let (r, k) = (params.r, params.k);
    let mut acc = Accounts {
        next: 0,
        inject: params.inject_overspend,
        stages: Vec::new(),
    };
    let mut colouring = EdgeColouring::new();
    let mut current = g.clone();

    // low-degree refinement
    let budget = int(r) / int(3);
    match vizing_type_refinement(&current, r, k, acc.next) {
        Ok(res) => {
            let done = res.colouring.len();
            acc.charge("low_degree".into(), res.colours_used, &budget, None, (done, res.residual.edge_count()))?;
            merge(&mut colouring, res.colouring)?;
            current = res.residual;
        }
        Err(e @ (ColourError::BudgetExceeded { .. } | ColourError::InvalidParameter(_))) => {
            acc.skip("low_degree", &budget, e.to_string(), current.edge_count());
        }
        Err(e) => return Err(PipelineError::Invariant(e.to_string())),
    }

    // initial star colouring
    let budget = int(r) / int(6);
    let s = r / 6;
    let skip = if k < 4 {
        Some(format!("k={k} is below 4"))
    } else if s == 0 {
        Some(format!("floor(r/6) = 0 for r={r}"))
    } else {
        None
    };
    match skip {
        Some(reason) => acc.skip("initial_star", &budget, reason, current.edge_count()),
        None => match star_colouring(&current, s, k, acc.next) {
            Ok(res) => {
                let done = res.colouring.len();
                acc.charge("initial_star".into(), res.colours_used, &budget, None, (done, res.residual.edge_count()))?;
                merge(&mut colouring, res.colouring)?;
                current = res.residual;
            }
            Err(e @ ColourError::BudgetExceeded { .. }) => {
                acc.skip("initial_star", &budget, e.to_string(), current.edge_count())
            }
            Err(e) => return Err(PipelineError::Invariant(e.to_string())),
        },
    }
    let initial_degree_target_met = current.max_degree() as f64 <= params.degree_target(0);

    // rounds
    let mut rounds: Vec<RoundTrace> = Vec::new();
    let edge_floor = (r as f64).powf(1.75) * k as f64;
    let termination;
    let mut i = 0;
    loop {
        let reason = if 7.0 * params.degree_target(i) < r as f64 {
            Some(TerminationReason::DegreeFloor)
        } else if current.edge_count() as f64 <= edge_floor {
            Some(TerminationReason::EdgeFloor)
        } else if params.round_part(i) == 0 || i >= MAX_ROUNDS {
            Some(TerminationReason::Budget)
        } else {
            None
        };
        if let Some(reason) = reason {
            termination = reason;
            break;
        }
        let out = run_round(&current, i, params, acc.next)?;
        let t = out.trace;
        acc.charge(
            format!("round_{i}"),
            t.colours_spent,
            &t.budget,
            None,
            (out.colouring.len(), out.g_next.edge_count()),
        )?;
        if out.colouring.len() + t.edges_after != t.edges_before {
            return Err(PipelineError::Invariant(format!(
                "round {i}: {} coloured + {} left != {} edges",
                out.colouring.len(),
                t.edges_after,
                t.edges_before
            )));
        }
        merge(&mut colouring, out.colouring)?;
        current = out.g_next;
        let stop = t.termination_reason.or((t.edges_after >= t.edges_before).then_some(TerminationReason::Stalled));
        rounds.push(t);
        if let Some(reason) = stop {
            termination = reason;
            break;
        }
        i += 1;
    }
    if let Some(last) = rounds.last_mut() {
        last.termination_reason = Some(termination);
    }

    // endgame
    let delta = current.max_degree();
    let edges_t = current.edge_count();
    let mut star_size = None;
    let mut star_colours = 0;
    let case = if 7 * delta <= r {
        EndgameCase::LowDegree
    } else if k < 4 {
        acc.skip("endgame_star", &BigRational::zero(), format!("k={k} is below 4"), edges_t);
        EndgameCase::ProperOnly
    } else {
        let s = params.endgame_star_size();
        star_size = Some(s);
        match star_colouring(&current, s, k, acc.next) {
            Ok(res) => {
                star_colours = res.colours_used;
                let done = res.colouring.len();
                acc.charge(
                    "endgame_star".into(),
                    res.colours_used,
                    &int(s),
                    Some("56·r^(3/4)".into()),
                    (done, res.residual.edge_count()),
                )?;
                merge(&mut colouring, res.colouring)?;
                current = res.residual;
                EndgameCase::StarThenProper
            }
            Err(e @ ColourError::BudgetExceeded { .. }) => {
                acc.skip("endgame_star", &int(s), e.to_string(), edges_t);
                EndgameCase::ProperOnly
            }
            Err(e) => return Err(PipelineError::Invariant(e.to_string())),
        }
    };
    let (proper, proper_colours) = compact(proper_edge_colouring(&current), acc.next);
    acc.charge(
        "endgame_proper".into(),
        proper_colours,
        &int(current.max_degree() + 1),
        Some(format!("{}", r.div_ceil(7) + 1)),
        (proper.len(), 0),
    )?;
    merge(&mut colouring, proper)?;

    if colouring.len() != g.edge_count() {
        return Err(PipelineError::Invariant(format!(
            "{} of {} edges coloured",
            colouring.len(),
            g.edge_count()
        )));
    }
    let colours_used = acc.next;
    if colouring.colours_used() != colours_used || colouring.max_colour().map_or(0, |c| c + 1) != colours_used {
        return Err(PipelineError::Invariant(format!(
            "colour ranges are not contiguous: {} distinct, {} allotted",
            colouring.colours_used(),
            colours_used
        )));
    }
    let success = colours_used <= r;
    let failure = (!success).then(|| format!("used {colours_used} colours, budget r={r}"));
    Ok(PipelineRun {
        colouring,
        report: RunReport {
            params: params.clone(),
            vertices: g.vertex_count(),
            edges: g.edge_count(),
            preconditions: pre,
            stages: acc.stages,
            initial_degree_target_met,
            rounds,
            termination: Some(termination),
            endgame: Some(EndgameReport {
                case,
                edges: edges_t,
                max_degree: delta,
                edge_floor_held: edges_t as f64 <= edge_floor,
                star_size,
                star_colours,
                proper_colours,
            }),
            colours_used,
            success,
            failure,
        },
    })
}

/// Writes a colouring of `g` as `u v c` lines sorted by `(u, v)`, after a
/// `# n=…` line and a `# r=… k=… colours_used=…` line.
pub fn serialize_colouring(
    g: &Graph,
    colouring: &EdgeColouring,
    r: usize,
    k: usize,
) -> Result<String, PipelineError> {
    for e in g.edges() {
        if colouring.colour_of(e).is_none() {
            return Err(PipelineError::Contract(format!("edge {e} has no colour")));
        }
    }
    if let Some(e) = colouring.edges().find(|e| !g.contains_edge(e.u, e.v)) {
        return Err(PipelineError::Contract(format!("coloured pair {e} is not an edge")));
    }
    let mut out = format!(
        "# n={}\n# r={r} k={k} colours_used={}\n",
        g.vertex_count(),
        colouring.colours_used()
    );
    for (e, c) in colouring.iter() {
        out.push_str(&format!("{} {} {c}\n", e.u, e.v));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ColouringFile {
    pub n: Option<usize>,
    pub r: Option<usize>,
    pub k: Option<usize>,
    pub colouring: EdgeColouring,
}

pub fn parse_colouring(text: &str) -> Result<ColouringFile, ParseError> {
    let mut file = ColouringFile {
        n: None,
        r: None,
        k: None,
        colouring: EdgeColouring::new(),
    };
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |message: String| ParseError { line: line_no, message };
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            for (key, slot) in [("n", &mut file.n), ("r", &mut file.r), ("k", &mut file.k)] {
                if let Some(v) = header_value(comment, key) {
                    *slot = Some(v.parse().map_err(|_| err(format!("bad {key} value {v:?}")))?);
                }
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [u, v, c] = fields[..] else {
            return Err(err(format!("expected \"u v c\", got {line:?}")));
        };
        let num = |s: &str| s.parse::<usize>().map_err(|_| err(format!("{s:?} is not a non-negative integer")));
        let (u, v, c) = (num(u)?, num(v)?, num(c)?);
        if u == v {
            return Err(err(format!("self-loop at vertex {u}")));
        }
        let edge = Edge::new(u, v);
        match file.colouring.colour_of(&edge) {
            Some(old) if old != c => return Err(err(format!("edge {edge} coloured both {old} and {c}"))),
            Some(_) => {}
            None => file.colouring.assign(edge, c).expect("checked above"),
        }
    }
    if let (Some(n), Some(e)) = (file.n, file.colouring.edges().map(|e| e.v).max()) {
        if e >= n {
            return Err(ParseError {
                line: 0,
                message: format!("header declares n={n} but vertex {e} appears"),
            });
        }
    }
    Ok(file)
}
