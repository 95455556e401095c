use serde::{Deserialize, Serialize};

use super::{Graph, PartialColoring};
use crate::error::{Error, Result};

pub const DEFAULT_COLORING_CAP: usize = 20;
pub const DEFAULT_INDEPENDENT_SET_CAP: usize = 30;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoringVerdict {
    pub valid: bool,
    pub colored_count: usize,
    pub violations: Vec<(usize, usize)>,
}

pub fn verify_partial_coloring(g: &Graph, c: &PartialColoring) -> Result<ColoringVerdict> {
    if c.len() != g.n() {
        return Err(Error::SizeMismatch {
            expected: g.n(),
            found: c.len(),
        });
    }
    let violations: Vec<_> = g
        .edges()
        .iter()
        .copied()
        .filter(|&(u, v)| matches!((c.get(u), c.get(v)), (Some(a), Some(b)) if a == b))
        .collect();
    Ok(ColoringVerdict {
        valid: violations.is_empty(),
        colored_count: c.colored_count(),
        violations,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependenceVerdict {
    pub independent: bool,
    pub size: usize,
    pub violations: Vec<(usize, usize)>,
}

pub fn verify_independent_set(g: &Graph, set: &[usize]) -> Result<IndependenceVerdict> {
    let mut mark = vec![false; g.n()];
    for &v in set {
        if v >= g.n() {
            return Err(Error::VertexOutOfRange {
                vertex: v,
                n: g.n(),
            });
        }
        mark[v] = true;
    }
    let violations: Vec<_> = g
        .edges()
        .iter()
        .copied()
        .filter(|&(u, v)| mark[u] && mark[v])
        .collect();
    Ok(IndependenceVerdict {
        independent: violations.is_empty(),
        size: mark.iter().filter(|&&m| m).count(),
        violations,
    })
}

struct ColoringSearch<'a> {
    g: &'a Graph,
    q: u8,
    domains: Vec<u8>,
    assignment: Vec<u8>,
    budget_left: usize,
    forced_blank: usize,
    out: Vec<Vec<u8>>,
}

impl ColoringSearch<'_> {
    fn run(&mut self, v: usize) {
        if v == self.g.n() {
            self.out.push(self.assignment.clone());
            return;
        }
        let blank_now = self.domains[v] == 0;
        if blank_now {
            self.forced_blank -= 1;
        }
        for color in 0..self.q {
            let bit = 1u8 << color;
            if self.domains[v] & bit == 0 {
                continue;
            }
            self.assignment[v] = color;
            let mut cleared = Vec::new();
            for &w in self.g.neighbors(v) {
                if w > v && self.domains[w] & bit != 0 {
                    self.domains[w] &= !bit;
                    cleared.push(w);
                    if self.domains[w] == 0 {
                        self.forced_blank += 1;
                    }
                }
            }
            if self.forced_blank <= self.budget_left {
                self.run(v + 1);
            }
            for w in cleared {
                if self.domains[w] == 0 {
                    self.forced_blank -= 1;
                }
                self.domains[w] |= bit;
            }
        }
        if self.budget_left > 0 {
            self.assignment[v] = self.q;
            self.budget_left -= 1;
            if self.forced_blank <= self.budget_left {
                self.run(v + 1);
            }
            self.budget_left += 1;
        }
        if blank_now {
            self.forced_blank += 1;
        }
    }
}

/// Every assignment of `q` colors or blank to the vertices such that no edge
/// has both endpoints the same color and at most `blank_budget` vertices are
/// blank. Colors are encoded `0..q` and blank as `q`; output is sorted
/// lexicographically.
pub fn enumerate_proper_colorings(
    g: &Graph,
    q: u8,
    blank_budget: usize,
    cap: usize,
) -> Result<Vec<Vec<u8>>> {
    if g.n() > cap {
        return Err(Error::CapExceeded { n: g.n(), cap });
    }
    if q == 0 || q > 8 {
        return Err(Error::InvalidParameter(format!(
            "color count must be in 1..=8, got {q}"
        )));
    }
    let full = ((1u16 << q) - 1) as u8;
    let mut search = ColoringSearch {
        g,
        q,
        domains: vec![full; g.n()],
        assignment: vec![0; g.n()],
        budget_left: blank_budget,
        forced_blank: 0,
        out: Vec::new(),
    };
    search.run(0);
    Ok(search.out)
}

/// Indicator vectors of every independent set with at least `min_size`
/// vertices, sorted lexicographically.
pub fn enumerate_independent_sets(g: &Graph, min_size: usize, cap: usize) -> Result<Vec<Vec<u8>>> {
    if g.n() > cap {
        return Err(Error::CapExceeded { n: g.n(), cap });
    }
    fn run(
        g: &Graph,
        v: usize,
        blocked: &mut Vec<usize>,
        chosen: &mut Vec<u8>,
        size: usize,
        min_size: usize,
        out: &mut Vec<Vec<u8>>,
    ) {
        let n = g.n();
        let available = (v..n).filter(|&w| blocked[w] == 0).count();
        if size + available < min_size {
            return;
        }
        if v == n {
            out.push(chosen.clone());
            return;
        }
        run(g, v + 1, blocked, chosen, size, min_size, out);
        if blocked[v] == 0 {
            chosen[v] = 1;
            for &w in g.neighbors(v) {
                blocked[w] += 1;
            }
            run(g, v + 1, blocked, chosen, size + 1, min_size, out);
            for &w in g.neighbors(v) {
                blocked[w] -= 1;
            }
            chosen[v] = 0;
        }
    }
    let mut out = Vec::new();
    run(
        g,
        0,
        &mut vec![0; g.n()],
        &mut vec![0; g.n()],
        0,
        min_size,
        &mut out,
    );
    Ok(out)
}

/// A maximum independent set, found by branch and bound that branches on the
/// highest-degree remaining vertex.
pub fn max_independent_set_bruteforce(g: &Graph, cap: usize) -> Result<Vec<usize>> {
    let cap = cap.min(64);
    if g.n() > cap {
        return Err(Error::CapExceeded { n: g.n(), cap });
    }
    let adj: Vec<u64> = (0..g.n())
        .map(|v| g.neighbors(v).iter().fold(0u64, |m, &w| m | (1 << w)))
        .collect();

    fn branch(cand: u64, cur: u64, best: &mut u64, adj: &[u64]) {
        if (cur.count_ones() + cand.count_ones()) <= best.count_ones() {
            return;
        }
        if cand == 0 {
            *best = cur;
            return;
        }
        let mut pick = cand.trailing_zeros() as usize;
        let mut pick_deg = 0;
        let mut rest = cand;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let deg = (adj[v] & cand).count_ones();
            if deg > pick_deg {
                pick = v;
                pick_deg = deg;
            }
        }
        let bit = 1u64 << pick;
        if pick_deg == 0 {
            // no edges left among candidates: take them all
            branch(0, cur | cand, best, adj);
            return;
        }
        branch(cand & !adj[pick] & !bit, cur | bit, best, adj);
        branch(cand & !bit, cur, best, adj);
    }

    let all = if g.n() == 64 {
        u64::MAX
    } else {
        (1u64 << g.n()) - 1
    };
    let mut best = 0u64;
    branch(all, 0, &mut best, &adj);
    Ok((0..g.n()).filter(|&v| best >> v & 1 == 1).collect())
}
