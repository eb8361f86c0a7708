//! Edge colourings and the two auxiliary colouring techniques: the
//! low-degree refinement built on a proper edge colouring, and star-type
//! colouring of high-degree vertices.

mod misra_gries;
mod refine;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Edge, Graph};

pub use misra_gries::proper_edge_colouring;
pub use refine::{star_colouring, star_part_capacity, vizing_type_refinement, RefinementDetail, RefinementResult};

pub type Colour = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ColourError {
    #[error("colour budget exceeded: {needed} colours needed, budget {budget}")]
    BudgetExceeded { needed: usize, budget: String },
    #[error("edge {0} already has a colour")]
    AlreadyColoured(Edge),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Partial assignment of colour indices to edges.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeColouring {
    assignments: BTreeMap<Edge, Colour>,
}

impl EdgeColouring {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn assign(&mut self, e: Edge, c: Colour) -> Result<(), ColourError> {
        if self.assignments.contains_key(&e) {
            return Err(ColourError::AlreadyColoured(e));
        }
        self.assignments.insert(e, c);
        Ok(())
    }

    pub fn colour_of(&self, e: &Edge) -> Option<Colour> {
        self.assignments.get(e).copied()
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Edge, Colour)> + '_ {
        self.assignments.iter().map(|(e, c)| (*e, *c))
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.assignments.keys().copied()
    }

    /// Distinct colours appearing in the assignment.
    pub fn colours(&self) -> BTreeSet<Colour> {
        self.assignments.values().copied().collect()
    }

    pub fn colours_used(&self) -> usize {
        self.colours().len()
    }

    pub fn max_colour(&self) -> Option<Colour> {
        self.assignments.values().copied().max()
    }

    /// Edges grouped by colour.
    pub fn classes(&self) -> BTreeMap<Colour, Vec<Edge>> {
        let mut out: BTreeMap<Colour, Vec<Edge>> = BTreeMap::new();
        for (e, c) in &self.assignments {
            out.entry(*c).or_default().push(*e);
        }
        out
    }

    /// Merges an edge-disjoint colouring into this one.
    pub fn absorb(&mut self, other: EdgeColouring) -> Result<(), ColourError> {
        for (e, c) in other.assignments {
            self.assign(e, c)?;
        }
        Ok(())
    }

    /// The coloured edges as a graph over `n` vertices.
    pub fn as_graph(&self, n: usize) -> Graph {
        Graph::from_edges_unchecked(n, self.assignments.keys().copied().collect())
    }

    /// True when no two edges sharing an endpoint have the same colour.
    pub fn is_proper(&self) -> bool {
        let mut seen: BTreeSet<(usize, Colour)> = BTreeSet::new();
        self.assignments
            .iter()
            .all(|(e, c)| seen.insert((e.u, *c)) && seen.insert((e.v, *c)))
    }
}

impl FromIterator<(Edge, Colour)> for EdgeColouring {
    fn from_iter<I: IntoIterator<Item = (Edge, Colour)>>(iter: I) -> Self {
        EdgeColouring {
            assignments: iter.into_iter().collect(),
        }
    }
}
