//! Edge colourings of graphs that avoid long monochromatic paths, with
//! exact balls-and-bins analytics.
//!
//! Paths are counted by vertices: `P_k` has `k` vertices and `k − 1` edges.

pub mod bins;
pub mod colour;
pub mod extract;
pub mod generate;
pub mod graph;
pub mod pipeline;
pub mod rng;
pub mod verify;
