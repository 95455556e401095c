//! Graph fixtures shared by the benchmark targets.

use tricolor_core::graph::{blow_up, complete_multipartite, cycle, disjoint_union, random_regular};
use tricolor_core::Graph;

/// `K_{m,m,m}`.
pub fn tripartite(m: usize) -> Graph {
    complete_multipartite(3, m).expect("valid part size")
}

/// `copies` disjoint copies of `K_{m,m,m}`, threshold rank `copies`.
pub fn tripartite_union(copies: usize, m: usize) -> Graph {
    disjoint_union(&vec![tripartite(m); copies]).expect("nonempty union")
}

/// `C_4` blown up by `factor`.
pub fn blown_up_square(factor: usize) -> Graph {
    blow_up(&cycle(4).expect("valid cycle"), factor).expect("valid factor")
}

/// Random `d`-regular graph on `n` vertices, fixed seed.
pub fn regular(n: usize, d: usize) -> Graph {
    random_regular(n, d, 17).expect("regular graph exists")
}
