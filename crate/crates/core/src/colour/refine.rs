use std::collections::BTreeMap;

use serde::Serialize;

use crate::graph::{Edge, Graph, Vertex};

use super::{proper_edge_colouring, Colour, ColourError, EdgeColouring};

/// Uncoloured residual plus a colouring of the removed edges.
#[derive(Clone, Debug, PartialEq)]
pub struct RefinementResult {
    pub residual: Graph,
    pub colouring: EdgeColouring,
    pub colours_used: usize,
    pub detail: RefinementDetail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum RefinementDetail {
    /// Low-degree refinement: colours spent on `G[V']` and on the
    /// `V'`-to-rest bipartite edges.
    LowDegree {
        low_vertices: usize,
        inner_colours: usize,
        bipartite_colours: usize,
    },
    /// Star colouring: `centres[i]` covers every edge of colour `base + i`.
    Star {
        threshold: (u64, u64),
        centres: Vec<Vec<Vertex>>,
    },
}

/// Colours every edge touching a vertex of degree at most `r/7`.
///
/// Edges inside the low-degree set `V'` get a proper colouring; edges from
/// `V'` to the rest get distinct colours at each `V'` endpoint, so each
/// such class is a union of vertex-disjoint stars. No class contains a path
/// on 4 vertices. The residual is `G[V ∖ V']`.
///
/// Fails when the two ranges together exceed `r/3` colours, which can
/// happen for small `r`.
pub fn vizing_type_refinement(
    g: &Graph,
    r: usize,
    k: usize,
    colour_base: Colour,
) -> Result<RefinementResult, ColourError> {
    if k < 4 {
        return Err(ColourError::InvalidParameter(format!(
            "low-degree refinement only avoids paths on 4 vertices, k={k} is too small"
        )));
    }
    let n = g.vertex_count();
    let low: Vec<bool> = (0..n).map(|v| 7 * g.degree(v) <= r).collect();
    let inner = g.filter_edges(|e| low[e.u] && low[e.v]);

    let proper = proper_edge_colouring(&inner);
    // compact to a contiguous range
    let remap: BTreeMap<Colour, Colour> = proper
        .colours()
        .into_iter()
        .enumerate()
        .map(|(i, c)| (c, colour_base + i))
        .collect();
    let inner_colours = remap.len();
    let mut colouring: EdgeColouring = proper.iter().map(|(e, c)| (e, remap[&c])).collect();

    let bip_base = colour_base + inner_colours;
    let mut bipartite_colours = 0;
    for v in (0..n).filter(|&v| low[v]) {
        let mut slot = 0;
        for &w in g.neighbours(v) {
            if !low[w] {
                colouring
                    .assign(Edge::new(v, w), bip_base + slot)
                    .expect("bipartite edges have one low endpoint");
                slot += 1;
            }
        }
        bipartite_colours = bipartite_colours.max(slot);
    }

    let total = inner_colours + bipartite_colours;
    if 3 * total > r {
        return Err(ColourError::BudgetExceeded {
            needed: total,
            budget: format!("{r}/3"),
        });
    }
    let residual = g.filter_edges(|e| !low[e.u] && !low[e.v]);
    Ok(RefinementResult {
        residual,
        colouring,
        colours_used: total,
        detail: RefinementDetail::LowDegree {
            low_vertices: low.iter().filter(|&&b| b).count(),
            inner_colours,
            bipartite_colours,
        },
    })
}

/// Largest number of centres one star colour may hold while keeping every
/// path in the class below `k` vertices.
///
/// A class whose edges are all covered by `c` centres has paths of at most
/// `2c + 1` vertices. `⌊k/3⌋` satisfies this for every `k ≥ 4`.
pub fn star_part_capacity(k: usize) -> usize {
    k / 3
}

/// Colours all edges at vertices of degree at least `8·e(g)/(k·s)` with at
/// most `s` colours; the residual has maximum degree below that threshold.
///
/// High-degree vertices are split in id order into groups of
/// [`star_part_capacity`] centres; an edge takes the colour of its
/// endpoint's group (the lower group when both endpoints are centres).
pub fn star_colouring(
    g: &Graph,
    s: usize,
    k: usize,
    colour_base: Colour,
) -> Result<RefinementResult, ColourError> {
    if s == 0 {
        return Err(ColourError::InvalidParameter("s must be at least 1".into()));
    }
    if k < 4 {
        return Err(ColourError::InvalidParameter(format!(
            "star colouring cannot avoid paths on {k} vertices"
        )));
    }
    let n = g.vertex_count();
    let e = g.edge_count() as u128;
    let ks = (k as u128) * (s as u128);
    // deg ≥ 8e/(ks), compared exactly
    let high: Vec<bool> = (0..n)
        .map(|v| g.degree(v) > 0 && (g.degree(v) as u128) * ks >= 8 * e)
        .collect();
    let centres_all: Vec<Vertex> = (0..n).filter(|&v| high[v]).collect();
    let cap = star_part_capacity(k);
    let groups: Vec<Vec<Vertex>> = centres_all.chunks(cap).map(<[_]>::to_vec).collect();
    if groups.len() > s {
        return Err(ColourError::BudgetExceeded {
            needed: groups.len(),
            budget: format!("s={s} (|V'|={} with {cap} centres per colour)", centres_all.len()),
        });
    }
    let mut group_of = vec![usize::MAX; n];
    for (i, grp) in groups.iter().enumerate() {
        for &v in grp {
            group_of[v] = i;
        }
    }
    let mut owned: Vec<Vec<Edge>> = vec![Vec::new(); groups.len()];
    for edge in g.edges() {
        let i = group_of[edge.u].min(group_of[edge.v]);
        if i != usize::MAX {
            owned[i].push(*edge);
        }
    }
    // a group can lose all its edges to lower groups; drop it
    let mut colouring = EdgeColouring::new();
    let mut kept = Vec::new();
    for (grp, edges) in groups.into_iter().zip(owned).filter(|(_, e)| !e.is_empty()) {
        for e in edges {
            colouring.assign(e, colour_base + kept.len()).expect("fresh edge");
        }
        kept.push(grp);
    }
    let groups = kept;
    let residual = g.filter_edges(|e| !high[e.u] && !high[e.v]);
    let threshold = reduce(8 * e as u64, ks as u64);
    Ok(RefinementResult {
        residual,
        colours_used: groups.len(),
        colouring,
        detail: RefinementDetail::Star {
            threshold,
            centres: groups,
        },
    })
}

fn reduce(num: u64, den: u64) -> (u64, u64) {
    let g = num_integer::gcd(num, den).max(1);
    (num / g, den / g)
}
