//! Checkers shared by the integration targets. They read reports as plain
//! JSON and re-derive everything from the edge list, so they share no code
//! with the library oracles.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")
}

pub fn tricolor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tricolor"))
        .args(args)
        .output()
        .expect("tricolor binary runs")
}

/// Reads the plain `n m` edge list or DIMACS `p edge` format.
pub fn read_edges(path: &Path) -> (usize, Vec<(usize, usize)>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut n = 0;
    let mut edges = Vec::new();
    let dimacs = text.lines().any(|l| l.starts_with("p "));
    for (i, line) in text.lines().filter(|l| !l.trim().is_empty()).enumerate() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if dimacs {
            match toks[0] {
                "p" => n = toks[2].parse().unwrap(),
                "e" => edges.push((
                    toks[1].parse::<usize>().unwrap() - 1,
                    toks[2].parse::<usize>().unwrap() - 1,
                )),
                _ => {}
            }
        } else if i == 0 {
            n = toks[0].parse().unwrap();
        } else {
            edges.push((toks[0].parse().unwrap(), toks[1].parse().unwrap()));
        }
    }
    (n, edges)
}

/// Colors in `1..=3`, `None` for blank.
pub fn coloring_of(report: &Value) -> Option<Vec<Option<u64>>> {
    let c = report.get("coloring")?.as_array()?;
    Some(c.iter().map(Value::as_u64).collect())
}

pub fn independent_set_of(report: &Value) -> Option<Vec<usize>> {
    let s = report.get("independent_set")?.as_array()?;
    Some(s.iter().map(|v| v.as_u64().unwrap() as usize).collect())
}

pub fn proper_partial(n: usize, edges: &[(usize, usize)], colors: &[Option<u64>]) -> bool {
    colors.len() == n
        && colors.iter().flatten().all(|c| (1..=3).contains(c))
        && edges
            .iter()
            .all(|&(u, v)| colors[u].is_none() || colors[u] != colors[v])
}

pub fn independent(n: usize, edges: &[(usize, usize)], set: &[usize]) -> bool {
    let mut inside = vec![false; n];
    for &v in set {
        if v >= n || inside[v] {
            return false;
        }
        inside[v] = true;
    }
    edges.iter().all(|&(u, v)| !(inside[u] && inside[v]))
}

/// Independence number by enumerating every subset.
pub fn alpha(n: usize, edges: &[(usize, usize)]) -> usize {
    assert!(n <= 20);
    let masks: Vec<u32> = (0..n)
        .map(|v| {
            edges.iter().fold(0, |m, &(a, b)| {
                if a == v {
                    m | 1 << b
                } else if b == v {
                    m | 1 << a
                } else {
                    m
                }
            })
        })
        .collect();
    (0u32..1 << n)
        .filter(|s| (0..n).all(|v| s >> v & 1 == 0 || s & masks[v] == 0))
        .map(u32::count_ones)
        .max()
        .unwrap() as usize
}

/// Fewest blank vertices in a proper partial 3-coloring.
pub fn min_blanks(n: usize, edges: &[(usize, usize)]) -> usize {
    fn go(
        v: usize,
        n: usize,
        nbrs: &[Vec<usize>],
        col: &mut Vec<u8>,
        blanks: usize,
        best: &mut usize,
    ) {
        if blanks >= *best {
            return;
        }
        if v == n {
            *best = blanks;
            return;
        }
        for c in 1..=3u8 {
            if nbrs[v].iter().all(|&u| u > v || col[u] != c) {
                col[v] = c;
                go(v + 1, n, nbrs, col, blanks, best);
            }
        }
        col[v] = 0;
        go(v + 1, n, nbrs, col, blanks + 1, best);
    }
    let mut nbrs = vec![Vec::new(); n];
    for &(u, v) in edges {
        nbrs[u].push(v);
        nbrs[v].push(u);
    }
    let mut best = n + 1;
    go(0, n, &nbrs, &mut vec![0; n], 0, &mut best);
    best
}
