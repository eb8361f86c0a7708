//! Seeded graph generators for experiments.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Edge, Graph};
use crate::rng::substream;

/// Restarts allowed for the pairing model before giving up.
pub const PAIRING_RESTARTS: usize = 1_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenerateError {
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("no simple {d}-regular pairing on {n} vertices after {restarts} restarts")]
    PairingFailed { n: usize, d: usize, restarts: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum Model {
    /// `m` distinct edges chosen uniformly on `n` vertices.
    UniformM { n: usize, m: usize },
    /// Random `d`-regular graph by sequential pairing.
    DRegular { n: usize, d: usize },
    /// `stars` disjoint copies of `K_{1,leaves}`.
    StarForest { stars: usize, leaves: usize },
    /// `paths` disjoint paths on `length` vertices each.
    PathUnion { paths: usize, length: usize },
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Model::UniformM { n, m } => write!(f, "model=uniform-m n={n} m={m}"),
            Model::DRegular { n, d } => write!(f, "model=d-regular n={n} d={d}"),
            Model::StarForest { stars, leaves } => write!(f, "model=star-forest stars={stars} leaves={leaves}"),
            Model::PathUnion { paths, length } => write!(f, "model=path-union paths={paths} length={length}"),
        }
    }
}

pub fn generate(model: Model, seed: u64) -> Result<Graph, GenerateError> {
    let mut rng = substream(seed, &[]);
    let (n, edges) = match model {
        Model::UniformM { n, m } => (n, uniform_m(n, m, &mut rng)?),
        Model::DRegular { n, d } => (n, d_regular(n, d, &mut rng)?),
        Model::StarForest { stars, leaves } => {
            let edges = (0..stars)
                .flat_map(|s| {
                    let c = s * (leaves + 1);
                    (1..=leaves).map(move |l| Edge::new(c, c + l))
                })
                .collect();
            (stars * (leaves + 1), edges)
        }
        Model::PathUnion { paths, length } => {
            let edges = (0..paths)
                .flat_map(|p| (1..length).map(move |i| Edge::new(p * length + i - 1, p * length + i)))
                .collect();
            (paths * length, edges)
        }
    };
    Ok(Graph::from_edges(n, edges).expect("valid by construction"))
}

fn uniform_m<R: Rng>(n: usize, m: usize, rng: &mut R) -> Result<Vec<Edge>, GenerateError> {
    let pairs = (n as u128) * (n.saturating_sub(1) as u128) / 2;
    if m as u128 > pairs {
        return Err(GenerateError::Infeasible(format!("m={m} exceeds the {pairs} pairs on {n} vertices")));
    }
    if (m as u128) * 2 > pairs {
        // dense: sample pair indices without replacement
        let all: Vec<Edge> = (0..n).flat_map(|u| (u + 1..n).map(move |v| Edge::new(u, v))).collect();
        return Ok(rand::seq::index::sample(rng, all.len(), m).into_iter().map(|i| all[i]).collect());
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(m);
    while out.len() < m {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v && seen.insert(Edge::new(u, v)) {
            out.push(Edge::new(u, v));
        }
    }
    Ok(out)
}

fn d_regular<R: Rng>(n: usize, d: usize, rng: &mut R) -> Result<Vec<Edge>, GenerateError> {
    if (n * d) % 2 == 1 {
        return Err(GenerateError::Infeasible(format!("d·n = {d}·{n} is odd")));
    }
    if d > 0 && d >= n {
        return Err(GenerateError::Infeasible(format!("d={d} needs more than {n} vertices")));
    }
    // pair random points one at a time, rejecting loops and repeats;
    // restart when the remaining points admit no valid pair
    'restart: for _ in 0..PAIRING_RESTARTS {
        let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(d)).collect();
        let mut seen = BTreeSet::new();
        while !points.is_empty() {
            let mut placed = false;
            for _ in 0..8 * points.len() {
                let i = rng.gen_range(0..points.len());
                let j = rng.gen_range(0..points.len());
                let (u, v) = (points[i], points[j]);
                if u != v && !seen.contains(&Edge::new(u, v)) {
                    seen.insert(Edge::new(u, v));
                    let (hi, lo) = (i.max(j), i.min(j));
                    points.swap_remove(hi);
                    points.swap_remove(lo);
                    placed = true;
                    break;
                }
            }
            if !placed {
                continue 'restart;
            }
        }
        return Ok(seen.into_iter().collect());
    }
    Err(GenerateError::PairingFailed {
        n,
        d,
        restarts: PAIRING_RESTARTS,
    })
}

/// Edge list with a header recording the model and seed.
pub fn render(g: &Graph, model: Model, seed: u64) -> String {
    let body = g.to_edge_list();
    format!("# {model} seed={seed}\n{body}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_edge_list;

    #[test]
    fn uniform_counts() {
        assert!(generate(Model::UniformM { n: 5, m: 0 }, 1).unwrap().is_empty());
        let g = generate(Model::UniformM { n: 50, m: 200 }, 1).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (50, 200));
        let g = generate(Model::UniformM { n: 6, m: 15 }, 1).unwrap();
        assert_eq!(g.edge_count(), 15);
        assert!(generate(Model::UniformM { n: 6, m: 16 }, 1).is_err());
    }

    #[test]
    fn regular_degrees() {
        let g = generate(Model::DRegular { n: 6, d: 2 }, 3).unwrap();
        assert!((0..6).all(|v| g.degree(v) == 2));
        let g = generate(Model::DRegular { n: 100, d: 5 }, 3).unwrap();
        assert!((0..100).all(|v| g.degree(v) == 5));
        assert!(matches!(generate(Model::DRegular { n: 5, d: 3 }, 3), Err(GenerateError::Infeasible(_))));
        assert!(generate(Model::DRegular { n: 3, d: 4 }, 3).is_err());
    }

    #[test]
    fn forests() {
        let g = generate(Model::StarForest { stars: 3, leaves: 4 }, 0).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count(), g.max_degree()), (15, 12, 4));
        let g = generate(Model::PathUnion { paths: 4, length: 5 }, 0).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count(), g.max_degree()), (20, 16, 2));
        let g = generate(Model::PathUnion { paths: 2, length: 1 }, 0).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (2, 0));
    }

    #[test]
    fn deterministic_and_parseable() {
        let model = Model::UniformM { n: 40, m: 60 };
        let a = render(&generate(model, 9).unwrap(), model, 9);
        let b = render(&generate(model, 9).unwrap(), model, 9);
        assert_eq!(a, b);
        assert!(a.starts_with("# model=uniform-m n=40 m=60 seed=9\n# n=40\n"));
        assert_eq!(parse_edge_list(&a).unwrap(), generate(model, 9).unwrap());
        assert_ne!(a, render(&generate(model, 10).unwrap(), model, 10));
    }
}
