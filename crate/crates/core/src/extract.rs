//! Large subgraphs without a `P_k`.
//!
//! Split the vertices into `A` and `B`, cut `A` into `q` random labelled
//! pieces `A_1, …, A_q` and send every `x ∈ B` to the piece holding most of
//! its neighbours. Keeping only the edges between `A_i` and its own `B_i`
//! leaves components that are stars of stars around each small `A_i`, so
//! no component contains a long path.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{random_balanced_bipartition, Edge, Graph, GraphError, Vertex, VertexPartition};
use crate::rng::{substream, StreamRng};
use crate::verify::components_of;

pub const DEFAULT_TRIALS: usize = 200;
/// `c1 = e^{−2}`: ratio between consecutive degree bands.
pub const C1: f64 = 0.135_335_283_236_612_7;

#[derive(Debug, Error, PartialEq)]
pub enum ExtractError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("no certified subgraph in {trials} trials (best uncertified kept {} edges)", .best.h.edge_count())]
    NoCertified { trials: usize, best: Box<ExtractionResult> },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

/// Which check certified `H`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertTier {
    /// Every `|A_i| < k/2 − 1`.
    PartSize,
    /// Every component of `H` has fewer than `k` vertices.
    ComponentOrder,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtractionResult {
    pub h: Graph,
    pub a_parts: VertexPartition,
    pub b_parts: VertexPartition,
    pub q: usize,
    pub certified: bool,
    pub tier: Option<CertTier>,
    /// Edges between `A` and `B` in the chosen trial.
    pub e_ab: usize,
    pub trial: usize,
    pub trials_run: usize,
    pub certified_trials: usize,
}

/// Sends each `x ∈ b` to the part `i` maximising `|N(x) ∩ A_i|`, lowest
/// index on ties.
pub fn greedy_bin_assignment(g: &Graph, a_parts: &VertexPartition, b: &[Vertex]) -> VertexPartition {
    let q = a_parts.len().max(1);
    let mut label = vec![usize::MAX; g.vertex_count()];
    for (i, part) in a_parts.parts().iter().enumerate() {
        for &v in part {
            label[v] = i;
        }
    }
    let mut parts = vec![Vec::new(); q];
    let mut count = vec![0usize; q];
    for &x in b {
        count.iter_mut().for_each(|c| *c = 0);
        for &y in g.neighbours(x) {
            if label[y] != usize::MAX {
                count[label[y]] += 1;
            }
        }
        let mut best = 0;
        for i in 1..q {
            if count[i] > count[best] {
                best = i;
            }
        }
        parts[best].push(x);
    }
    VertexPartition::new(parts, b).expect("each b-vertex placed once")
}

/// One sample of the construction for a fixed split `(a, b)`.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub h: Graph,
    pub a_parts: VertexPartition,
    pub b_parts: VertexPartition,
}

/// Labels `a` uniformly with `0..q`, assigns `b` greedily and keeps the
/// edges of `∪ G[A_i, B_i]`.
pub fn sample_candidate<R: Rng + ?Sized>(g: &Graph, a: &[Vertex], b: &[Vertex], q: usize, rng: &mut R) -> Candidate {
    let q = q.max(1);
    let mut label = vec![usize::MAX; g.vertex_count()];
    for &v in a {
        label[v] = rng.gen_range(0..q);
    }
    let a_parts = VertexPartition::from_labels(a, &label, q);
    let b_parts = greedy_bin_assignment(g, &a_parts, b);
    let mut side = vec![usize::MAX; g.vertex_count()];
    for (i, part) in b_parts.parts().iter().enumerate() {
        for &x in part {
            side[x] = i;
        }
    }
    let keep = |e: &Edge| {
        let (la, lb) = (label[e.u], label[e.v]);
        (la != usize::MAX && side[e.v] == la) || (lb != usize::MAX && side[e.u] == lb)
    };
    Candidate {
        h: g.filter_edges(keep),
        a_parts,
        b_parts,
    }
}

/// `q = ⌊(6/k)·⌈|v|/2⌉⌋`, at least 1.
pub fn part_count(v_len: usize, k: usize) -> usize {
    (6 * v_len.div_ceil(2) / k).max(1)
}

fn certify(c: &Candidate, k: usize) -> Option<CertTier> {
    if c.a_parts.parts().iter().all(|p| 2 * p.len() + 2 < k) {
        return Some(CertTier::PartSize);
    }
    if components_of(&c.h).iter().all(|comp| comp.order() < k) {
        return Some(CertTier::ComponentOrder);
    }
    None
}

/// Runs `trials` independent rounds of the construction on `g` with
/// `V = v`, `U = u` and returns the certified `H` with most edges (lowest
/// trial index on ties).
pub fn find_pk_free_subgraph(
    g: &Graph,
    v: &[Vertex],
    u: &[Vertex],
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<ExtractionResult, ExtractError> {
    if k < 3 {
        return Err(ExtractError::InvalidInput(format!("k={k} is below 3")));
    }
    if trials == 0 {
        return Err(ExtractError::InvalidInput("trials must be at least 1".into()));
    }
    let in_v = g.mask(v)?;
    let in_u = g.mask(u)?;
    if let Some(x) = u.iter().find(|&&x| in_v[x]) {
        return Err(ExtractError::InvalidInput(format!("vertex {x} lies in both v and u")));
    }
    if let Some(e) = g.edges().iter().find(|e| !in_v[e.u] && !in_v[e.v]) {
        let msg = if in_u[e.u] && in_u[e.v] {
            format!("u is not independent: edge {e}")
        } else {
            format!("edge {e} has no endpoint in v")
        };
        return Err(ExtractError::InvalidInput(msg));
    }
    let mut v_sorted = v.to_vec();
    v_sorted.sort_unstable();
    v_sorted.dedup();
    let q = part_count(v_sorted.len(), k);

    let outcomes: Vec<(Candidate, usize, Option<CertTier>)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng: StreamRng = substream(seed, &[i as u64]);
            let split = random_balanced_bipartition(g, &v_sorted, &mut rng).expect("v is in range");
            let mut b = split.b;
            b.extend_from_slice(u);
            let cand = sample_candidate(g, &split.a, &b, q, &mut rng);
            let tier = certify(&cand, k);
            (cand, split.crossing, tier)
        })
        .collect();

    let certified_trials = outcomes.iter().filter(|o| o.2.is_some()).count();
    let pick = |want_certified: bool| {
        outcomes
            .iter()
            .enumerate()
            .filter(|(_, o)| !want_certified || o.2.is_some())
            .max_by(|(i, a), (j, b)| a.0.h.edge_count().cmp(&b.0.h.edge_count()).then(j.cmp(i)))
            .map(|(i, _)| i)
    };
    let build = |i: usize| {
        let (cand, e_ab, tier) = &outcomes[i];
        ExtractionResult {
            h: cand.h.clone(),
            a_parts: cand.a_parts.clone(),
            b_parts: cand.b_parts.clone(),
            q,
            certified: tier.is_some(),
            tier: *tier,
            e_ab: *e_ab,
            trial: i,
            trials_run: trials,
            certified_trials,
        }
    };
    match pick(true) {
        Some(i) => Ok(build(i)),
        None => Err(ExtractError::NoCertified {
            trials,
            best: Box::new(build(pick(false).expect("trials ≥ 1"))),
        }),
    }
}

/// One degree band of the decomposition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeClass {
    /// Band index `j ≥ 1`: degrees in `[c1^j·Δ, c1^{j−1}·Δ]`.
    pub j: usize,
    pub vertices: Vec<Vertex>,
    /// Endpoints of class edges outside `vertices`.
    pub others: Vec<Vertex>,
    pub edges: Graph,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decomposition {
    pub classes: Vec<DegreeClass>,
    pub residual_vertices: Vec<Vertex>,
    pub residual_edges: Graph,
    pub c1: f64,
    pub t_max: usize,
    pub max_degree: usize,
}

/// Peels degree bands `V_1, V_2, …` off `g` down to `degree_floor`.
///
/// `T` is the least integer with `Δ·c1^T ≤ degree_floor`. Class `j` takes
/// every unclassified vertex whose degree in the remaining graph is at
/// least `c1^j·Δ`, together with all remaining edges at those vertices.
pub fn degree_class_decompose(g: &Graph, c1: f64, degree_floor: f64) -> Result<Decomposition, ExtractError> {
    if !(c1 > 0.0 && c1 < 1.0) {
        return Err(ExtractError::InvalidInput(format!("c1={c1} must lie in (0, 1)")));
    }
    let n = g.vertex_count();
    let delta = g.max_degree();
    let mut t_max = 0;
    if delta > 0 {
        while delta as f64 * c1.powi(t_max as i32) > degree_floor {
            t_max += 1;
        }
    }
    let mut remaining = g.clone();
    let mut classified = vec![false; n];
    let mut classes = Vec::new();
    for j in 1..=t_max {
        let lo = c1.powi(j as i32) * delta as f64;
        let hi = c1.powi(j as i32 - 1) * delta as f64;
        let vertices: Vec<Vertex> = (0..n)
            .filter(|&x| !classified[x] && remaining.degree(x) > 0 && remaining.degree(x) as f64 >= lo)
            .collect();
        for &x in &vertices {
            let d = remaining.degree(x) as f64;
            if d > hi * (1.0 + 1e-12) {
                return Err(ExtractError::Invariant(format!(
                    "vertex {x} has degree {d} above band {j} ceiling {hi}"
                )));
            }
            classified[x] = true;
        }
        let in_class = remaining.mask(&vertices)?;
        let edges = remaining.filter_edges(|e| in_class[e.u] || in_class[e.v]);
        let mut others: Vec<Vertex> = edges
            .edges()
            .iter()
            .flat_map(|e| [e.u, e.v])
            .filter(|&x| !in_class[x])
            .collect();
        others.sort_unstable();
        others.dedup();
        remaining = remaining.filter_edges(|e| !in_class[e.u] && !in_class[e.v]);
        classes.push(DegreeClass {
            j,
            vertices,
            others,
            edges,
        });
    }
    let residual_vertices = (0..n).filter(|&x| !classified[x]).collect();
    Ok(Decomposition {
        classes,
        residual_vertices,
        residual_edges: remaining,
        c1,
        t_max,
        max_degree: delta,
    })
}

/// Which part of the decomposition was extracted from.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    Class { j: usize, edges: usize },
    Residual { edges: usize },
    Empty,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KeyExtraction {
    pub result: ExtractionResult,
    pub selection: Selection,
    /// `e(H)/e(g)`.
    pub achieved_ratio: f64,
    pub t_max: usize,
}

/// Decomposes `g` with `c1 = e^{−2}` and floor `r`, picks the first class
/// with `e(E_j) ≥ e^{−j}·e(g)` (or the residual when `3·e(R) ≥ e(g)`), and
/// extracts a `P_k`-free subgraph from it.
///
/// `β` only enters through the degree precondition, which is reported by
/// the caller rather than enforced here.
pub fn key_lemma_extract(
    g: &Graph,
    r: usize,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<KeyExtraction, ExtractError> {
    let total = g.edge_count();
    let dec = degree_class_decompose(g, C1, r as f64)?;
    if total == 0 {
        let result = find_pk_free_subgraph(g, &[], &[], k, 1, seed)?;
        return Ok(KeyExtraction {
            result,
            selection: Selection::Empty,
            achieved_ratio: 0.0,
            t_max: dec.t_max,
        });
    }
    let heavy = dec
        .classes
        .iter()
        .find(|c| c.edges.edge_count() as f64 >= (-(c.j as f64)).exp() * total as f64);
    let (result, selection) = match heavy {
        Some(c) => (
            find_pk_free_subgraph(&c.edges, &c.vertices, &c.others, k, trials, seed)?,
            Selection::Class {
                j: c.j,
                edges: c.edges.edge_count(),
            },
        ),
        None => {
            let r_edges = dec.residual_edges.edge_count();
            if 3 * r_edges < total {
                return Err(ExtractError::Invariant(format!(
                    "no heavy class and residual has {r_edges} of {total} edges"
                )));
            }
            let v: Vec<Vertex> = dec
                .residual_vertices
                .iter()
                .copied()
                .filter(|&x| dec.residual_edges.degree(x) > 0)
                .collect();
            (
                find_pk_free_subgraph(&dec.residual_edges, &v, &[], k, trials, seed)?,
                Selection::Residual { edges: r_edges },
            )
        }
    };
    Ok(KeyExtraction {
        achieved_ratio: result.h.edge_count() as f64 / total as f64,
        result,
        selection,
        t_max: dec.t_max,
    })
}
