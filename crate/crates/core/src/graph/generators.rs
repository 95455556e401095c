use std::collections::BTreeSet;

use rand::seq::{index, SliceRandom};
use rand::Rng as _;

use super::Graph;
use crate::error::{Error, Result};
use crate::rng;

/// The complete graph `K_n`.
pub fn complete(n: usize) -> Graph {
    complete_multipartite(n, 1).expect("complete graph on n >= 2 vertices")
}

/// The cycle `C_n`.
pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "cycle needs n >= 3, got {n}"
        )));
    }
    Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
}

/// `K_{m,...,m}` with `parts` parts; part `p` holds vertices `p*m..(p+1)*m`.
pub fn complete_multipartite(parts: usize, part_size: usize) -> Result<Graph> {
    if parts < 2 || part_size < 1 {
        return Err(Error::InvalidParameter(format!(
            "complete multipartite graph needs k >= 2 and m >= 1, got k = {parts}, m = {part_size}"
        )));
    }
    let n = parts * part_size;
    let edges = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|&(u, v)| u / part_size != v / part_size);
    Graph::from_edges(n, edges)
}

/// Replaces every vertex `v` by copies `v*t..(v+1)*t` and every edge by a
/// complete bipartite graph between the copy sets.
pub fn blow_up(g: &Graph, t: usize) -> Result<Graph> {
    if t == 0 {
        return Err(Error::InvalidParameter(
            "blow-up factor must be >= 1".into(),
        ));
    }
    let edges = g
        .edges()
        .iter()
        .flat_map(|&(u, v)| (0..t).flat_map(move |i| (0..t).map(move |j| (u * t + i, v * t + j))));
    Graph::from_edges(g.n() * t, edges)
}

/// Disjoint union with vertices relabelled consecutively in input order.
pub fn disjoint_union(gs: &[Graph]) -> Result<Graph> {
    let first = gs
        .first()
        .ok_or_else(|| Error::InvalidParameter("disjoint union of no graphs".into()))?;
    let mut offset = 0;
    let mut edges = Vec::new();
    for g in gs {
        if g.degree() != first.degree() {
            return Err(Error::DegreeMismatch {
                expected: first.degree(),
                found: g.degree(),
            });
        }
        edges.extend(g.edges().iter().map(|&(u, v)| (u + offset, v + offset)));
        offset += g.n();
    }
    Graph::from_edges(offset, edges)
}

/// Uniform random `d`-regular simple graph via the configuration model with
/// rejection of non-simple pairings.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if d >= n || !(n * d).is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "no {d}-regular simple graph on {n} vertices"
        )));
    }
    const MAX_TRIES: usize = 100_000;
    let mut rng = rng::seeded(seed);
    let mut points: Vec<usize> = (0..n * d).map(|p| p / d).collect();
    'retry: for _ in 0..MAX_TRIES {
        points.shuffle(&mut rng);
        let mut seen = BTreeSet::new();
        for pair in points.chunks(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !seen.insert((u, v)) {
                continue 'retry;
            }
        }
        return Graph::from_edges(n, seen);
    }
    Err(Error::SwapExhausted {
        attempts: MAX_TRIES,
    })
}

/// Rewires the edges around a random `ceil(delta*n)`-subset `S` with
/// degree-preserving double-edge swaps. Every swap removes `(a,b),(c,d)` and
/// adds `(a,d),(c,b)` with `a, c` in `S`, so every edge that did not exist
/// before touches `S`, and any proper coloring of the input restricted to
/// `V \ S` stays proper.
pub fn perturb_almost_colorable(g: &Graph, delta: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidParameter(format!(
            "delta must lie in [0, 1], got {delta}"
        )));
    }
    let n = g.n();
    let k = ((delta * n as f64).ceil() as usize).min(n);
    if k == 0 {
        return Ok(g.clone());
    }
    const SUBSET_RETRIES: usize = 16;
    let target_swaps = k * g.degree().max(1);
    let max_attempts = 200 * target_swaps + 1_000;
    let mut rng = rng::seeded(seed);

    for _ in 0..SUBSET_RETRIES {
        let subset: Vec<usize> = {
            let mut s = index::sample(&mut rng, n, k).into_vec();
            s.sort_unstable();
            s
        };
        let mut adj: Vec<BTreeSet<usize>> = (0..n)
            .map(|v| g.neighbors(v).iter().copied().collect())
            .collect();
        let mut done = 0;
        for _ in 0..max_attempts {
            if done == target_swaps {
                break;
            }
            let a = subset[rng.gen_range(0..k)];
            let c = subset[rng.gen_range(0..k)];
            if a == c || adj[a].is_empty() || adj[c].is_empty() {
                continue;
            }
            let b = *adj[a].iter().nth(rng.gen_range(0..adj[a].len())).unwrap();
            let d = *adj[c].iter().nth(rng.gen_range(0..adj[c].len())).unwrap();
            if b == c || d == a || b == d || adj[a].contains(&d) || adj[c].contains(&b) {
                continue;
            }
            adj[a].remove(&b);
            adj[b].remove(&a);
            adj[c].remove(&d);
            adj[d].remove(&c);
            adj[a].insert(d);
            adj[d].insert(a);
            adj[c].insert(b);
            adj[b].insert(c);
            done += 1;
        }
        if done > 0 {
            let edges = adj
                .iter()
                .enumerate()
                .flat_map(|(u, nb)| nb.iter().filter(move |&&v| u < v).map(move |&v| (u, v)));
            return Graph::from_edges(n, edges);
        }
    }
    Err(Error::SwapExhausted {
        attempts: SUBSET_RETRIES * max_attempts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_edge_list;

    #[test]
    fn multipartite_shapes() {
        assert_eq!(complete_multipartite(3, 1).unwrap(), complete(3));
        let g = complete_multipartite(3, 2).unwrap();
        assert_eq!((g.n(), g.degree(), g.num_edges()), (6, 4, 12));
        let g = complete_multipartite(3, 5).unwrap();
        assert_eq!((g.n(), g.degree()), (15, 10));
        assert!(complete_multipartite(1, 3).is_err());
        assert!(complete_multipartite(3, 0).is_err());
    }

    #[test]
    fn blow_up_of_triangle_is_octahedron() {
        let k3 = complete(3);
        assert_eq!(blow_up(&k3, 1).unwrap(), k3);
        // copies of vertex v are {2v, 2v+1}, which are exactly the parts of K_{2,2,2}
        assert_eq!(
            blow_up(&k3, 2).unwrap(),
            complete_multipartite(3, 2).unwrap()
        );
    }

    #[test]
    fn union_checks_degree() {
        let k3 = complete(3);
        let u = disjoint_union(std::slice::from_ref(&k3)).unwrap();
        assert_eq!(u, k3);
        let c4 = parse_edge_list("4 4\n0 1\n1 2\n2 3\n3 0").unwrap();
        let k4 = complete(4);
        assert_eq!(
            disjoint_union(&[c4, k4]),
            Err(Error::DegreeMismatch {
                expected: 2,
                found: 3
            })
        );
    }

    #[test]
    fn random_regular_is_regular() {
        let g = random_regular(20, 3, 11).unwrap();
        assert_eq!((g.n(), g.degree(), g.num_edges()), (20, 3, 30));
        assert_eq!(random_regular(20, 3, 11).unwrap(), g);
        assert!(random_regular(5, 3, 0).is_err());
    }

    #[test]
    fn zero_delta_is_identity() {
        let g = complete_multipartite(3, 2).unwrap();
        assert_eq!(perturb_almost_colorable(&g, 0.0, 3).unwrap(), g);
    }

    #[test]
    fn perturbation_preserves_degrees() {
        let g = complete_multipartite(3, 5).unwrap();
        let p = perturb_almost_colorable(&g, 0.1, 7).unwrap();
        assert_eq!((p.n(), p.degree()), (15, 10));
        assert_ne!(p, g);
        // only edges touching the rewired subset may be new
        let new_edges: Vec<_> = p
            .edges()
            .iter()
            .filter(|&&(u, v)| !g.has_edge(u, v))
            .collect();
        assert!(!new_edges.is_empty());
    }

    #[test]
    fn single_vertex_subset_cannot_swap() {
        // ceil(0.01 * 15) = 1 vertex: every swap needs two distinct subset vertices
        let g = complete_multipartite(3, 5).unwrap();
        assert!(matches!(
            perturb_almost_colorable(&g, 0.01, 1),
            Err(Error::SwapExhausted { .. })
        ));
    }
}
