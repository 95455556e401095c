use std::fmt::Write as _;

use super::Graph;
use crate::error::{Error, Result};

fn parse_usize(tok: Option<&str>, line: usize, what: &str) -> Result<usize> {
    let tok = tok.ok_or_else(|| Error::Parse {
        line,
        message: format!("missing {what}"),
    })?;
    tok.parse().map_err(|_| Error::Parse {
        line,
        message: format!("expected an integer {what}, found {tok:?}"),
    })
}

fn no_trailing<'a>(mut it: impl Iterator<Item = &'a str>, line: usize) -> Result<()> {
    match it.next() {
        Some(tok) => Err(Error::Parse {
            line,
            message: format!("unexpected trailing token {tok:?}"),
        }),
        None => Ok(()),
    }
}

/// Parses the plain edge-list format: a header `n m` followed by `m` lines
/// `u v` of 0-indexed endpoints. Blank lines are ignored.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty input".into(),
    })?;
    let mut toks = header.split_whitespace();
    let n = parse_usize(toks.next(), hline, "vertex count")?;
    let m = parse_usize(toks.next(), hline, "edge count")?;
    no_trailing(toks, hline)?;

    let mut edges = Vec::with_capacity(m);
    let mut last_line = hline;
    for (lineno, line) in lines {
        let mut toks = line.split_whitespace();
        let u = parse_usize(toks.next(), lineno, "endpoint")?;
        let v = parse_usize(toks.next(), lineno, "endpoint")?;
        no_trailing(toks, lineno)?;
        edges.push((u, v));
        last_line = lineno;
    }
    if edges.len() != m {
        return Err(Error::Parse {
            line: last_line,
            message: format!("header declares {m} edges but {} were listed", edges.len()),
        });
    }
    Graph::from_edges(n, edges)
}

/// Parses DIMACS `.col` text (`c` comments, `p edge n m`, `e u v` with
/// 1-indexed endpoints).
pub fn parse_dimacs(text: &str) -> Result<Graph> {
    let mut n = None;
    let mut declared = 0;
    let mut edges = Vec::new();
    let mut last_line = 1;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        last_line = lineno;
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("p") => {
                match toks.next() {
                    Some("edge") | Some("col") => {}
                    other => {
                        return Err(Error::Parse {
                            line: lineno,
                            message: format!("unsupported problem line format {other:?}"),
                        })
                    }
                }
                n = Some(parse_usize(toks.next(), lineno, "vertex count")?);
                declared = parse_usize(toks.next(), lineno, "edge count")?;
                no_trailing(toks, lineno)?;
            }
            Some("e") => {
                let count = n.ok_or(Error::Parse {
                    line: lineno,
                    message: "edge before problem line".into(),
                })?;
                let u = parse_usize(toks.next(), lineno, "endpoint")?;
                let v = parse_usize(toks.next(), lineno, "endpoint")?;
                no_trailing(toks, lineno)?;
                if u == 0 || v == 0 || u > count || v > count {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("endpoint out of range 1..={count}"),
                    });
                }
                edges.push((u - 1, v - 1));
            }
            Some(tok) => {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("unknown line type {tok:?}"),
                })
            }
            None => unreachable!(),
        }
    }
    let n = n.ok_or(Error::Parse {
        line: last_line,
        message: "missing problem line".into(),
    })?;
    if edges.len() != declared {
        return Err(Error::Parse {
            line: last_line,
            message: format!(
                "problem line declares {declared} edges but {} were listed",
                edges.len()
            ),
        });
    }
    Graph::from_edges(n, edges)
}

/// Reads either format, choosing DIMACS when the first meaningful line is a
/// `c` or `p` line.
pub fn load_graph(text: &str) -> Result<Graph> {
    let first = text.lines().map(str::trim).find(|l| !l.is_empty());
    match first {
        Some(l) if l.starts_with('c') || l.starts_with('p') => parse_dimacs(text),
        _ => parse_edge_list(text),
    }
}

/// Writes the edge-list format with sorted canonical edges and LF endings.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::with_capacity(8 * (g.num_edges() + 1));
    writeln!(out, "{} {}", g.n(), g.num_edges()).unwrap();
    for &(u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}
