//! Simple undirected graphs on dense integer vertex ids.
//!
//! A [`Graph`] is an immutable value: every subgraph operation returns a new
//! graph over the same vertex universe, so chains of residual graphs can be
//! kept around as snapshots.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Vertex = usize;

/// An unordered vertex pair, stored with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub u: Vertex,
    pub v: Vertex,
}

impl Edge {
    /// Normalises the endpoint order. Panics on a self-loop.
    pub fn new(a: Vertex, b: Vertex) -> Self {
        assert_ne!(a, b, "self-loop {a}-{a}");
        if a < b {
            Edge { u: a, v: b }
        } else {
            Edge { u: b, v: a }
        }
    }

    pub fn other(&self, x: Vertex) -> Vertex {
        if x == self.u {
            self.v
        } else {
            debug_assert_eq!(x, self.v);
            self.u
        }
    }

    pub fn touches(&self, x: Vertex) -> bool {
        self.u == x || self.v == x
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.u, self.v)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("edge {u}-{v} has an endpoint outside 0..{n}")]
    OutOfRange { u: Vertex, v: Vertex, n: usize },
    #[error("edge {0} is not present in the graph")]
    MissingEdge(Edge),
    #[error("vertex sets overlap at vertex {0}")]
    Overlap(Vertex),
    #[error("vertex {0} is outside the vertex universe")]
    UnknownVertex(Vertex),
    #[error("graphs have different vertex counts ({0} vs {1})")]
    UniverseMismatch(usize, usize),
    #[error("parts do not partition the universe: {0}")]
    NotAPartition(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

/// Simple undirected graph: sorted, deduplicated edge list plus sorted
/// adjacency lists.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<Vertex>>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges)
            .finish()
    }
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Graph", 2)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("edges", &self.edges)?;
        st.end()
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from vertex pairs; duplicates collapse to one edge.
    pub fn from_pairs<I>(n: usize, pairs: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut edges = Vec::new();
        for (a, b) in pairs {
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            if a >= n || b >= n {
                return Err(GraphError::OutOfRange { u: a, v: b, n });
            }
            edges.push(Edge::new(a, b));
        }
        Ok(Self::from_edges_unchecked(n, edges))
    }

    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = Edge>,
    {
        Self::from_pairs(n, edges.into_iter().map(|e| (e.u, e.v)))
    }

    /// Caller guarantees every edge is normalised and in range.
    pub(crate) fn from_edges_unchecked(n: usize, mut edges: Vec<Edge>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        let mut adj = vec![Vec::new(); n];
        for e in &edges {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph { n, edges, adj }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbours(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn contains_edge(&self, a: Vertex, b: Vertex) -> bool {
        a < self.n && b < self.n && self.adj[a].binary_search(&b).is_ok()
    }

    /// Vertices of positive degree.
    pub fn non_isolated(&self) -> Vec<Vertex> {
        (0..self.n).filter(|&v| !self.adj[v].is_empty()).collect()
    }

    /// Edge set difference `self \ h`; `h` must be a subgraph of `self`.
    pub fn subtract(&self, h: &Graph) -> Result<Graph, GraphError> {
        if h.n != self.n {
            return Err(GraphError::UniverseMismatch(self.n, h.n));
        }
        if let Some(e) = h.edges.iter().find(|e| !self.contains_edge(e.u, e.v)) {
            return Err(GraphError::MissingEdge(*e));
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| !h.contains_edge(e.u, e.v))
            .copied()
            .collect();
        Ok(Self::from_edges_unchecked(self.n, edges))
    }

    /// Removes the given edges, which must all be present.
    pub fn without_edges(&self, removed: &[Edge]) -> Result<Graph, GraphError> {
        let h = Graph::from_edges(self.n, removed.iter().copied())?;
        self.subtract(&h)
    }

    /// Edge union over the same universe.
    pub fn union(&self, other: &Graph) -> Result<Graph, GraphError> {
        if other.n != self.n {
            return Err(GraphError::UniverseMismatch(self.n, other.n));
        }
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        Ok(Self::from_edges_unchecked(self.n, edges))
    }

    /// Subgraph keeping exactly the edges with one endpoint in `a` and the
    /// other in `b`.
    pub fn induced_bipartite(&self, a: &[Vertex], b: &[Vertex]) -> Result<Graph, GraphError> {
        let in_a = self.mask(a)?;
        let in_b = self.mask(b)?;
        if let Some(v) = (0..self.n).find(|&v| in_a[v] && in_b[v]) {
            return Err(GraphError::Overlap(v));
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| (in_a[e.u] && in_b[e.v]) || (in_b[e.u] && in_a[e.v]))
            .copied()
            .collect();
        Ok(Self::from_edges_unchecked(self.n, edges))
    }

    /// Subgraph `G[S]` over the same universe.
    pub fn induced(&self, s: &[Vertex]) -> Result<Graph, GraphError> {
        let in_s = self.mask(s)?;
        Ok(self.filter_edges(|e| in_s[e.u] && in_s[e.v]))
    }

    pub fn filter_edges<F: FnMut(&Edge) -> bool>(&self, mut keep: F) -> Graph {
        let edges = self.edges.iter().filter(|e| keep(e)).copied().collect();
        Self::from_edges_unchecked(self.n, edges)
    }

    /// Number of edges with exactly one endpoint in `a`.
    pub fn crossing_count(&self, in_a: &[bool]) -> usize {
        self.edges.iter().filter(|e| in_a[e.u] != in_a[e.v]).count()
    }

    /// Membership mask for a vertex list.
    pub fn mask(&self, set: &[Vertex]) -> Result<Vec<bool>, GraphError> {
        let mut m = vec![false; self.n];
        for &v in set {
            if v >= self.n {
                return Err(GraphError::UnknownVertex(v));
            }
            m[v] = true;
        }
        Ok(m)
    }

    /// Writes the edge-list interchange format with an `# n=` header.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("# n={}\n", self.n);
        for e in &self.edges {
            out.push_str(&format!("{} {}\n", e.u, e.v));
        }
        out
    }
}

/// Disjoint vertex sets whose union is a given universe.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexPartition {
    parts: Vec<Vec<Vertex>>,
}

impl VertexPartition {
    /// Validates that `parts` are disjoint and cover exactly `universe`.
    pub fn new(parts: Vec<Vec<Vertex>>, universe: &[Vertex]) -> Result<Self, GraphError> {
        let universe: BTreeSet<Vertex> = universe.iter().copied().collect();
        let mut seen = BTreeSet::new();
        for part in &parts {
            for &v in part {
                if !universe.contains(&v) {
                    return Err(GraphError::NotAPartition(format!(
                        "vertex {v} not in universe"
                    )));
                }
                if !seen.insert(v) {
                    return Err(GraphError::NotAPartition(format!("vertex {v} repeated")));
                }
            }
        }
        if seen.len() != universe.len() {
            return Err(GraphError::NotAPartition(format!(
                "{} of {} universe vertices covered",
                seen.len(),
                universe.len()
            )));
        }
        Ok(VertexPartition { parts })
    }

    /// Builds the partition from per-vertex labels in `0..count`.
    pub(crate) fn from_labels(members: &[Vertex], label: &[usize], count: usize) -> Self {
        let mut parts = vec![Vec::new(); count];
        for &v in members {
            parts[label[v]].push(v);
        }
        VertexPartition { parts }
    }

    pub fn parts(&self) -> &[Vec<Vertex>] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn largest_part(&self) -> usize {
        self.parts.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Parses the edge-list format: an optional `# n=<count>` header, `#`
/// comments, and one `u v` pair per line.
pub fn parse_edge_list(text: &str) -> Result<Graph, ParseError> {
    let mut declared: Option<usize> = None;
    let mut pairs = Vec::new();
    let mut max_vertex: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(value) = header_value(comment, "n") {
                let n = value.parse::<usize>().map_err(|_| ParseError {
                    line: line_no,
                    message: format!("bad vertex count {value:?}"),
                })?;
                declared = Some(n);
            }
            continue;
        }
        let mut fields = line.split_whitespace();
        let (a, b) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(ParseError {
                    line: line_no,
                    message: format!("expected \"u v\", got {line:?}"),
                })
            }
        };
        let parse = |s: &str| {
            s.parse::<usize>().map_err(|_| ParseError {
                line: line_no,
                message: format!("{s:?} is not a vertex id"),
            })
        };
        let (u, v) = (parse(a)?, parse(b)?);
        if u == v {
            return Err(ParseError {
                line: line_no,
                message: format!("self-loop at vertex {u}"),
            });
        }
        max_vertex = Some(max_vertex.unwrap_or(0).max(u).max(v));
        pairs.push((u, v));
    }
    let needed = max_vertex.map_or(0, |m| m + 1);
    let n = match declared {
        Some(n) if n < needed => {
            return Err(ParseError {
                line: 0,
                message: format!("header declares n={n} but vertex {} appears", needed - 1),
            })
        }
        Some(n) => n,
        None => needed,
    };
    Graph::from_pairs(n, pairs).map_err(|e| ParseError {
        line: 0,
        message: e.to_string(),
    })
}

/// Reads `key=value` out of a `#` header line (the leading `#` stripped).
pub(crate) fn header_value<'a>(comment: &'a str, key: &str) -> Option<&'a str> {
    comment.split_whitespace().find_map(|tok| {
        let (k, v) = tok.split_once('=')?;
        (k == key).then_some(v)
    })
}

/// Result of [`random_balanced_bipartition`].
#[derive(Clone, Debug)]
pub struct Bipartition {
    /// The `⌈s/2⌉`-sized side.
    pub a: Vec<Vertex>,
    pub b: Vec<Vertex>,
    /// Edges of the graph with exactly one endpoint in `a`.
    pub crossing: usize,
    /// Set when no sampled split reached half the edges.
    pub below_half: bool,
    pub attempts: usize,
}

pub const BIPARTITION_TRIALS: usize = 64;

/// Uniform split of `restricted_to` with `|a| = ⌈|restricted_to|/2⌉`,
/// resampled until `2·e(a, V∖a) ≥ e(g)`. After
/// [`BIPARTITION_TRIALS`] samples the best split is returned with
/// `below_half` set.
pub fn random_balanced_bipartition<R: Rng + ?Sized>(
    g: &Graph,
    restricted_to: &[Vertex],
    rng: &mut R,
) -> Result<Bipartition, GraphError> {
    let mut pool = restricted_to.to_vec();
    g.mask(&pool)?;
    pool.sort_unstable();
    pool.dedup();
    let half = pool.len().div_ceil(2);
    let target = g.edge_count();
    let mut in_a = vec![false; g.vertex_count()];
    let mut best: Option<(usize, Vec<Vertex>)> = None;
    let mut attempts = 0;
    while attempts < BIPARTITION_TRIALS {
        attempts += 1;
        pool.shuffle(rng);
        let a = &pool[..half];
        for &v in a {
            in_a[v] = true;
        }
        let crossing = g.crossing_count(&in_a);
        for &v in a {
            in_a[v] = false;
        }
        if best.as_ref().map_or(true, |(c, _)| crossing > *c) {
            best = Some((crossing, a.to_vec()));
        }
        if 2 * crossing >= target {
            break;
        }
    }
    let (crossing, mut a) = best.expect("at least one attempt");
    a.sort_unstable();
    let a_mask = g.mask(&a)?;
    let b = pool.iter().copied().filter(|&v| !a_mask[v]).collect();
    Ok(Bipartition {
        a,
        b,
        crossing,
        below_half: 2 * crossing < target,
        attempts,
    })
}
