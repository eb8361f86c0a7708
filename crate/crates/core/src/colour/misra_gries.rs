use crate::graph::{Edge, Graph, Vertex};

use super::{Colour, EdgeColouring};

/// Proper edge colouring with at most `Δ + 1` colours, indices `0..=Δ`.
///
/// Fan rotation with alternating-path inversion (Misra–Gries). Every colour
/// class is a matching.
pub fn proper_edge_colouring(g: &Graph) -> EdgeColouring {
    let mut state = FanColouring::new(g);
    for (idx, e) in g.edges().iter().enumerate() {
        state.colour_edge(idx, *e);
    }
    g.edges()
        .iter()
        .zip(&state.colour)
        .map(|(e, c)| (*e, c.expect("every edge coloured")))
        .collect()
}

struct FanColouring<'g> {
    g: &'g Graph,
    palette: usize,
    // at[v][c] = neighbour joined to v by the edge of colour c
    at: Vec<Vec<Option<Vertex>>>,
    colour: Vec<Option<Colour>>,
}

impl<'g> FanColouring<'g> {
    fn new(g: &'g Graph) -> Self {
        let palette = g.max_degree() + 1;
        FanColouring {
            g,
            palette,
            at: vec![vec![None; palette]; g.vertex_count()],
            colour: vec![None; g.edge_count()],
        }
    }

    fn edge_index(&self, a: Vertex, b: Vertex) -> usize {
        let e = Edge::new(a, b);
        self.g.edges().binary_search(&e).expect("edge exists")
    }

    fn colour_between(&self, a: Vertex, b: Vertex) -> Option<Colour> {
        self.colour[self.edge_index(a, b)]
    }

    fn is_free(&self, v: Vertex, c: Colour) -> bool {
        self.at[v][c].is_none()
    }

    fn free_colour(&self, v: Vertex) -> Colour {
        (0..self.palette)
            .find(|&c| self.is_free(v, c))
            .expect("a vertex of degree ≤ Δ always has a free colour among Δ+1")
    }

    fn set(&mut self, a: Vertex, b: Vertex, c: Option<Colour>) {
        let idx = self.edge_index(a, b);
        if let Some(old) = self.colour[idx] {
            self.at[a][old] = None;
            self.at[b][old] = None;
        }
        self.colour[idx] = c;
        if let Some(c) = c {
            debug_assert!(self.is_free(a, c) && self.is_free(b, c));
            self.at[a][c] = Some(b);
            self.at[b][c] = Some(a);
        }
    }

    // Maximal fan at u starting with the uncoloured edge uv.
    fn maximal_fan(&self, u: Vertex, v: Vertex) -> Vec<Vertex> {
        let mut fan = vec![v];
        let mut in_fan = vec![false; self.g.vertex_count()];
        in_fan[v] = true;
        loop {
            let last = *fan.last().unwrap();
            let next = (0..self.palette)
                .filter(|&c| self.is_free(last, c))
                .find_map(|c| self.at[u][c].filter(|&x| !in_fan[x]));
            match next {
                Some(x) => {
                    in_fan[x] = true;
                    fan.push(x);
                }
                None => return fan,
            }
        }
    }

    fn colour_edge(&mut self, idx: usize, e: Edge) {
        debug_assert!(self.colour[idx].is_none());
        let u = e.u;
        let fan = self.maximal_fan(u, e.v);
        let c = self.free_colour(u);
        let d = self.free_colour(*fan.last().unwrap());

        // invert the cd-path starting at u with its d-coloured edge
        if c != d {
            let mut path = Vec::new();
            let (mut cur, mut want) = (u, d);
            while let Some(next) = self.at[cur][want] {
                path.push((cur, next, want));
                cur = next;
                want = if want == d { c } else { d };
            }
            for &(a, b, _) in &path {
                self.set(a, b, None);
            }
            for &(a, b, was) in &path {
                self.set(a, b, Some(if was == d { c } else { d }));
            }
        }

        // first fan vertex with d free whose prefix is still a fan
        let mut w = None;
        for i in 0..fan.len() {
            if i > 0 {
                match self.colour_between(u, fan[i]) {
                    Some(ci) if self.is_free(fan[i - 1], ci) => {}
                    _ => break,
                }
            }
            if self.is_free(fan[i], d) {
                w = Some(i);
                break;
            }
        }
        let w = w.expect("fan rotation point exists");
        debug_assert!(self.is_free(u, d));

        let shifted: Vec<Colour> = (0..w)
            .map(|i| self.colour_between(u, fan[i + 1]).unwrap())
            .collect();
        for &x in &fan[1..=w] {
            self.set(u, x, None);
        }
        for (i, col) in shifted.into_iter().enumerate() {
            self.set(u, fan[i], Some(col));
        }
        self.set(u, fan[w], Some(d));
    }
}
