//! Certification that no colour class contains a path on `k` vertices.
//!
//! Each monochromatic component is checked with the cheapest certificate
//! that settles it: order below `k`, exact longest path in a tree, a vertex
//! cover bound, and finally an exact subset DP for components up to the
//! exact cap. Larger components that none of these settle get a bounded
//! witness search and, failing that, an indeterminate verdict.

use std::collections::{BTreeMap, HashMap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::colour::{Colour, EdgeColouring};
use crate::graph::{Edge, Graph, Vertex};

pub const DEFAULT_EXACT_CAP: usize = 24;
/// Node budget for the witness search on components above the exact cap.
pub const DEFAULT_SEARCH_BUDGET: u64 = 2_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("component has {order} vertices, above the exact cap {cap}")]
    CapExceeded { order: usize, cap: usize },
}

/// A connected monochromatic piece, in global vertex ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
}

impl Component {
    pub fn order(&self) -> usize {
        self.vertices.len()
    }

    /// The component relabelled onto `0..order`, vertices in sorted order.
    pub fn local_graph(&self) -> Graph {
        let idx = |v: Vertex| self.vertices.binary_search(&v).expect("edge inside component");
        Graph::from_pairs(self.order(), self.edges.iter().map(|e| (idx(e.u), idx(e.v))))
            .expect("relabelled edges are valid")
    }
}

/// Connected components of `h` that contain at least one edge.
pub fn components_of(h: &Graph) -> Vec<Component> {
    let n = h.vertex_count();
    let mut comp = vec![usize::MAX; n];
    let mut out: Vec<Component> = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX || h.degree(s) == 0 {
            continue;
        }
        let id = out.len();
        let mut vertices = vec![s];
        comp[s] = id;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &y in h.neighbours(x) {
                if comp[y] == usize::MAX {
                    comp[y] = id;
                    vertices.push(y);
                    queue.push_back(y);
                }
            }
        }
        vertices.sort_unstable();
        out.push(Component {
            vertices,
            edges: Vec::new(),
        });
    }
    for e in h.edges() {
        out[comp[e.u]].edges.push(*e);
    }
    out
}

/// Components of every colour class. Colour classes are taken over the
/// vertex universe of `g`; coloured pairs outside `g` are still grouped.
pub fn monochromatic_components(
    g: &Graph,
    colouring: &EdgeColouring,
) -> BTreeMap<Colour, Vec<Component>> {
    let n = colouring
        .edges()
        .map(|e| e.v + 1)
        .max()
        .unwrap_or(0)
        .max(g.vertex_count());
    colouring
        .classes()
        .into_iter()
        .map(|(c, edges)| (c, components_of(&Graph::from_edges_unchecked(n, edges))))
        .collect()
}

/// Number of vertices on a longest simple path, with the default cap.
pub fn longest_path_exact(component: &Graph) -> Result<usize, VerifyError> {
    longest_path_exact_with_cap(component, DEFAULT_EXACT_CAP)
}

/// Trees are solved at any size by two BFS sweeps; anything else needs
/// at most `cap` non-isolated vertices for the subset DP.
pub fn longest_path_exact_with_cap(g: &Graph, cap: usize) -> Result<usize, VerifyError> {
    if g.edge_count() == 0 {
        return Ok(usize::from(g.vertex_count() > 0));
    }
    let mut best = 0;
    for comp in components_of(g) {
        let local = comp.local_graph();
        let len = if local.edge_count() + 1 == local.vertex_count() {
            tree_diameter_path(&local).len()
        } else {
            if local.vertex_count() > cap {
                return Err(VerifyError::CapExceeded {
                    order: local.vertex_count(),
                    cap,
                });
            }
            match subset_dp(&local, usize::MAX) {
                DpOutcome::Longest(l) => l,
                DpOutcome::Witness(_) => unreachable!("target is unreachable"),
            }
        };
        best = best.max(len);
    }
    Ok(best)
}

fn bfs_far(g: &Graph, s: Vertex) -> (Vertex, Vec<usize>) {
    let mut parent = vec![usize::MAX; g.vertex_count()];
    parent[s] = s;
    let mut queue = VecDeque::from([s]);
    let mut last = s;
    while let Some(x) = queue.pop_front() {
        last = x;
        for &y in g.neighbours(x) {
            if parent[y] == usize::MAX {
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }
    (last, parent)
}

// Longest path of a connected tree, as a vertex sequence.
fn tree_diameter_path(t: &Graph) -> Vec<Vertex> {
    let (a, _) = bfs_far(t, 0);
    let (b, parent) = bfs_far(t, a);
    let mut path = vec![b];
    let mut x = b;
    while x != a {
        x = parent[x];
        path.push(x);
    }
    path
}

enum DpOutcome {
    Longest(usize),
    Witness(Vec<Vertex>),
}

// Layered DP over (vertex subset, endpoint). Layer j holds every subset that
// is the vertex set of some path on j vertices, with the set of possible
// endpoints as a bitmask. Stops as soon as a path on `target` vertices
// exists and reconstructs it.
fn subset_dp(g: &Graph, target: usize) -> DpOutcome {
    let n = g.vertex_count();
    debug_assert!(n <= 32);
    let nbr: Vec<u32> = (0..n)
        .map(|v| g.neighbours(v).iter().fold(0u32, |m, &w| m | (1 << w)))
        .collect();
    let mut layers: Vec<HashMap<u32, u32>> = vec![HashMap::new()];
    layers[0] = (0..n).map(|v| (1u32 << v, 1u32 << v)).collect();
    if target <= 1 {
        return DpOutcome::Witness(vec![0]);
    }
    loop {
        let cur = layers.last().unwrap();
        let mut next: HashMap<u32, u32> = HashMap::new();
        for (&mask, &ends) in cur {
            let mut e = ends;
            while e != 0 {
                let v = e.trailing_zeros() as usize;
                e &= e - 1;
                let mut ext = nbr[v] & !mask;
                while ext != 0 {
                    let w = ext.trailing_zeros();
                    ext &= ext - 1;
                    *next.entry(mask | (1 << w)).or_insert(0) |= 1 << w;
                }
            }
        }
        if next.is_empty() {
            return DpOutcome::Longest(layers.len());
        }
        layers.push(next);
        if layers.len() == target {
            return DpOutcome::Witness(reconstruct(&layers, &nbr));
        }
    }
}

fn reconstruct(layers: &[HashMap<u32, u32>], nbr: &[u32]) -> Vec<Vertex> {
    let top = layers.last().unwrap();
    let (&start_mask, &ends) = top.iter().min().expect("nonempty layer");
    let mut mask = start_mask;
    let mut v = ends.trailing_zeros() as usize;
    let mut path = vec![v];
    for j in (0..layers.len() - 1).rev() {
        mask &= !(1 << v);
        let ends = layers[j][&mask] & nbr[v];
        v = ends.trailing_zeros() as usize;
        path.push(v);
    }
    path.reverse();
    path
}

// Maximum matching size in a bipartite graph (Kuhn); equals the minimum
// vertex cover size.
fn bipartite_cover_size(g: &Graph, side: &[bool]) -> usize {
    let n = g.vertex_count();
    let mut mate = vec![usize::MAX; n];
    let mut size = 0;
    for s in (0..n).filter(|&v| !side[v]) {
        let mut seen = vec![false; n];
        if augment(g, s, &mut mate, &mut seen) {
            size += 1;
        }
    }
    size
}

fn augment(g: &Graph, x: Vertex, mate: &mut [usize], seen: &mut [bool]) -> bool {
    for &y in g.neighbours(x) {
        if seen[y] {
            continue;
        }
        seen[y] = true;
        if mate[y] == usize::MAX || augment(g, mate[y], mate, seen) {
            mate[y] = x;
            return true;
        }
    }
    false
}

fn two_colouring(g: &Graph) -> Option<Vec<bool>> {
    let n = g.vertex_count();
    let mut side: Vec<Option<bool>> = vec![None; n];
    for s in 0..n {
        if side[s].is_some() {
            continue;
        }
        side[s] = Some(false);
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            let sx = side[x].unwrap();
            for &y in g.neighbours(x) {
                match side[y] {
                    None => {
                        side[y] = Some(!sx);
                        queue.push_back(y);
                    }
                    Some(sy) if sy == sx => return None,
                    _ => {}
                }
            }
        }
    }
    Some(side.into_iter().map(Option::unwrap).collect())
}

fn greedy_cover_size(g: &Graph) -> usize {
    let mut deg: Vec<usize> = (0..g.vertex_count()).map(|v| g.degree(v)).collect();
    let mut removed = vec![false; g.vertex_count()];
    let mut left = g.edge_count();
    let mut size = 0;
    while left > 0 {
        let v = (0..deg.len()).max_by_key(|&v| (deg[v], std::cmp::Reverse(v))).unwrap();
        removed[v] = true;
        size += 1;
        left -= deg[v];
        deg[v] = 0;
        for &w in g.neighbours(v) {
            if !removed[w] {
                deg[w] -= 1;
            }
        }
    }
    size
}

// Depth-first search for a path on `target` vertices with a node budget.
fn bounded_search(g: &Graph, target: usize, budget: u64) -> Option<Vec<Vertex>> {
    let n = g.vertex_count();
    let mut used = vec![false; n];
    let mut path = Vec::with_capacity(target);
    let mut nodes = 0u64;

    fn go(
        g: &Graph,
        target: usize,
        budget: u64,
        used: &mut [bool],
        path: &mut Vec<Vertex>,
        nodes: &mut u64,
    ) -> bool {
        if path.len() == target {
            return true;
        }
        if *nodes >= budget {
            return false;
        }
        *nodes += 1;
        let last = *path.last().unwrap();
        let mut next: Vec<Vertex> = g.neighbours(last).iter().copied().filter(|&w| !used[w]).collect();
        // Warnsdorff-style: fewer onward options first
        next.sort_by_key(|&w| g.neighbours(w).iter().filter(|&&x| !used[x]).count());
        for w in next {
            used[w] = true;
            path.push(w);
            if go(g, target, budget, used, path, nodes) {
                return true;
            }
            path.pop();
            used[w] = false;
        }
        false
    }

    let mut starts: Vec<Vertex> = (0..n).collect();
    starts.sort_by_key(|&v| g.degree(v));
    for s in starts {
        if nodes >= budget {
            break;
        }
        used[s] = true;
        path.push(s);
        if go(g, target, budget, &mut used, &mut path, &mut nodes) {
            return Some(path);
        }
        path.pop();
        used[s] = false;
    }
    None
}

/// How a component was settled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    /// Fewer than `k` vertices.
    Order,
    /// Tree whose longest path is below `k`.
    Tree,
    /// Vertex cover `C` with `2|C| + 1 < k`.
    VertexCover,
    /// Exhaustive subset DP.
    Exact,
    /// A path on `k` vertices was found.
    Witness,
    /// Nothing settled the component.
    Unresolved,
}

impl Certificate {
    pub fn name(self) -> &'static str {
        match self {
            Certificate::Order => "order",
            Certificate::Tree => "tree",
            Certificate::VertexCover => "vertex_cover",
            Certificate::Exact => "exact",
            Certificate::Witness => "witness",
            Certificate::Unresolved => "unresolved",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColourStats {
    pub colour: Colour,
    pub components: usize,
    pub max_order: usize,
    /// Longest path determined exactly or exhibited, over all components
    /// where one was computed.
    pub max_path_found: Option<usize>,
    pub certificates: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub colour: Colour,
    pub path: Vec<Vertex>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub verdict: Verdict,
    pub r: usize,
    pub k: usize,
    pub colours_used: usize,
    pub within_budget: bool,
    /// Coloured pairs that are not edges of the input graph.
    pub foreign_edges: Vec<Edge>,
    /// Input edges left without a colour.
    pub uncoloured_edges: usize,
    pub worst_component: Option<(Colour, Vec<Vertex>)>,
    pub per_colour_stats: Vec<ColourStats>,
    pub failures: Vec<Witness>,
    pub unresolved: Vec<(Colour, Vec<Vertex>)>,
}

impl VerificationReport {
    /// A complete `r`-colouring of the input with no monochromatic `P_k`.
    pub fn accepted(&self) -> bool {
        self.verdict == Verdict::Pass
            && self.within_budget
            && self.foreign_edges.is_empty()
            && self.uncoloured_edges == 0
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub exact_cap: usize,
    pub search_budget: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            exact_cap: DEFAULT_EXACT_CAP,
            search_budget: DEFAULT_SEARCH_BUDGET,
        }
    }
}

struct Settled {
    certificate: Certificate,
    longest: Option<usize>,
    witness: Option<Vec<Vertex>>,
}

fn settle(comp: &Component, k: usize, opts: &VerifyOptions) -> Settled {
    let plain = |certificate, longest| Settled {
        certificate,
        longest,
        witness: None,
    };
    if comp.order() < k {
        return plain(Certificate::Order, None);
    }
    let local = comp.local_graph();
    let global = |path: Vec<Vertex>| path.into_iter().map(|i| comp.vertices[i]).collect::<Vec<_>>();
    if local.edge_count() + 1 == local.vertex_count() {
        let path = tree_diameter_path(&local);
        let len = path.len();
        if len < k {
            return plain(Certificate::Tree, Some(len));
        }
        return Settled {
            certificate: Certificate::Witness,
            longest: Some(len),
            witness: Some(global(path[..k].to_vec())),
        };
    }
    let cover = match two_colouring(&local) {
        Some(side) => bipartite_cover_size(&local, &side),
        None => greedy_cover_size(&local),
    };
    if 2 * cover + 1 < k {
        return plain(Certificate::VertexCover, None);
    }
    if local.vertex_count() <= opts.exact_cap {
        return match subset_dp(&local, k) {
            DpOutcome::Longest(l) => plain(Certificate::Exact, Some(l)),
            DpOutcome::Witness(p) => Settled {
                certificate: Certificate::Witness,
                longest: None,
                witness: Some(global(p)),
            },
        };
    }
    match bounded_search(&local, k, opts.search_budget) {
        Some(p) => Settled {
            certificate: Certificate::Witness,
            longest: None,
            witness: Some(global(p)),
        },
        None => plain(Certificate::Unresolved, None),
    }
}

pub fn verify(g: &Graph, colouring: &EdgeColouring, r: usize, k: usize) -> VerificationReport {
    verify_with(g, colouring, r, k, &VerifyOptions::default())
}

pub fn verify_with(
    g: &Graph,
    colouring: &EdgeColouring,
    r: usize,
    k: usize,
    opts: &VerifyOptions,
) -> VerificationReport {
    let by_colour: Vec<(Colour, Vec<Component>)> =
        monochromatic_components(g, colouring).into_iter().collect();

    let per_colour: Vec<(ColourStats, Vec<Witness>, Vec<(Colour, Vec<Vertex>)>)> = by_colour
        .par_iter()
        .map(|(c, comps)| {
            let mut stats = ColourStats {
                colour: *c,
                components: comps.len(),
                max_order: comps.iter().map(Component::order).max().unwrap_or(0),
                max_path_found: None,
                certificates: BTreeMap::new(),
            };
            let mut witnesses = Vec::new();
            let mut unresolved = Vec::new();
            for comp in comps {
                let s = settle(comp, k, opts);
                *stats.certificates.entry(s.certificate.name().to_owned()).or_insert(0) += 1;
                let found = s.longest.or(s.witness.as_ref().map(Vec::len));
                if let Some(l) = found {
                    stats.max_path_found = Some(stats.max_path_found.unwrap_or(0).max(l));
                }
                if let Some(path) = s.witness {
                    witnesses.push(Witness { colour: *c, path });
                }
                if s.certificate == Certificate::Unresolved {
                    unresolved.push((*c, comp.vertices.clone()));
                }
            }
            (stats, witnesses, unresolved)
        })
        .collect();

    let worst_component = by_colour
        .iter()
        .flat_map(|(c, comps)| comps.iter().map(move |comp| (*c, comp)))
        .max_by(|(c1, a), (c2, b)| a.order().cmp(&b.order()).then(c2.cmp(c1)))
        .map(|(c, comp)| (c, comp.vertices.clone()));

    let mut per_colour_stats = Vec::new();
    let mut failures = Vec::new();
    let mut unresolved = Vec::new();
    for (s, w, u) in per_colour {
        per_colour_stats.push(s);
        failures.extend(w);
        unresolved.extend(u);
    }
    let verdict = if !failures.is_empty() {
        Verdict::Fail
    } else if !unresolved.is_empty() {
        Verdict::Indeterminate
    } else {
        Verdict::Pass
    };
    let foreign_edges: Vec<Edge> = colouring
        .edges()
        .filter(|e| e.v >= g.vertex_count() || !g.contains_edge(e.u, e.v))
        .collect();
    let uncoloured_edges = g
        .edges()
        .iter()
        .filter(|e| colouring.colour_of(e).is_none())
        .count();
    let colours_used = colouring.colours_used();
    VerificationReport {
        verdict,
        r,
        k,
        colours_used,
        within_budget: colours_used <= r,
        foreign_edges,
        uncoloured_edges,
        worst_component,
        per_colour_stats,
        failures,
        unresolved,
    }
}
