//! Regular graphs, partial colorings and the combinatorial oracles used to
//! check the rounding pipeline.

mod generators;
mod io;
mod oracles;

pub use generators::{
    blow_up, complete, complete_multipartite, cycle, disjoint_union, perturb_almost_colorable,
    random_regular,
};
pub use io::{load_graph, parse_dimacs, parse_edge_list, write_edge_list};
pub use oracles::{
    enumerate_independent_sets, enumerate_proper_colorings, max_independent_set_bruteforce,
    verify_independent_set, verify_partial_coloring, ColoringVerdict, IndependenceVerdict,
    DEFAULT_COLORING_CAP, DEFAULT_INDEPENDENT_SET_CAP,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A simple undirected regular graph on vertices `0..n`.
///
/// Edges are stored canonically as `(min, max)` and sorted, so two graphs with
/// the same edge set compare equal and serialize identically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    degree: usize,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicate edges, out-of-range
    /// endpoints and irregular degree sequences.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "graph needs at least one vertex".into(),
            ));
        }
        let mut canon = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::VertexOutOfRange {
                    vertex: u.max(v),
                    n,
                });
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        if let Some(w) = canon.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0].0, w[0].1));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &canon {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        let degree = adjacency[0].len();
        if let Some((v, nbrs)) = adjacency
            .iter()
            .enumerate()
            .find(|(_, a)| a.len() != degree)
        {
            return Err(Error::Irregular {
                vertex_a: 0,
                degree_a: degree,
                vertex_b: v,
                degree_b: nbrs.len(),
            });
        }
        Ok(Graph {
            n,
            edges: canon,
            adjacency,
            degree,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Dense adjacency matrix, row-major.
    pub fn adjacency_matrix(&self) -> Vec<f64> {
        let n = self.n;
        let mut a = vec![0.0; n * n];
        for &(u, v) in &self.edges {
            a[u * n + v] = 1.0;
            a[v * n + u] = 1.0;
        }
        a
    }

    /// Connected components as sorted vertex lists, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut comp = Vec::new();
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &w in &self.adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

/// Per-vertex color in `1..=q`, or `None` when the vertex is left uncolored.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PartialColoring {
    assignment: Vec<Option<u8>>,
}

impl PartialColoring {
    pub fn uncolored(n: usize) -> Self {
        PartialColoring {
            assignment: vec![None; n],
        }
    }

    pub fn from_assignment(assignment: Vec<Option<u8>>) -> Self {
        PartialColoring { assignment }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn get(&self, v: usize) -> Option<u8> {
        self.assignment[v]
    }

    pub fn set(&mut self, v: usize, color: Option<u8>) {
        self.assignment[v] = color;
    }

    pub fn assignment(&self) -> &[Option<u8>] {
        &self.assignment
    }

    pub fn colored_count(&self) -> usize {
        self.assignment.iter().filter(|c| c.is_some()).count()
    }
}

fn membership(n: usize, set: &[usize]) -> Result<Vec<bool>> {
    let mut mark = vec![false; n];
    for &v in set {
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        mark[v] = true;
    }
    Ok(mark)
}

/// Number of edges with one endpoint in `s` and the other in `t`.
pub fn edges_between(g: &Graph, s: &[usize], t: &[usize]) -> Result<usize> {
    let in_s = membership(g.n(), s)?;
    let in_t = membership(g.n(), t)?;
    if let Some(v) = (0..g.n()).find(|&v| in_s[v] && in_t[v]) {
        return Err(Error::Overlap(v));
    }
    Ok(g.edges()
        .iter()
        .filter(|&&(u, v)| (in_s[u] && in_t[v]) || (in_s[v] && in_t[u]))
        .count())
}

/// Number of edges with both endpoints in `s`.
pub fn edges_within(g: &Graph, s: &[usize]) -> Result<usize> {
    let in_s = membership(g.n(), s)?;
    Ok(g.edges()
        .iter()
        .filter(|&&(u, v)| in_s[u] && in_s[v])
        .count())
}
