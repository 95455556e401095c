use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use tricolor_core::rounding::{solve_3coloring, solve_max_is};
use tricolor_core::{Error, PipelineConfig, Result};

use crate::family::Family;
use crate::{ModeChoice, Task};

/// One expanded sweep row.
#[derive(Clone, Debug, PartialEq)]
pub struct RowSpec {
    pub family: Family,
    pub task: Task,
    pub mode: ModeChoice,
    pub eps: f64,
    pub delta: f64,
    pub seed: u64,
}

pub const DEFAULT_EPS: f64 = 0.1;

/// Column order of the CSV output.
pub const HEADER: [&str; 13] = [
    "family",
    "n",
    "r",
    "eps",
    "delta",
    "mode",
    "coverage_fraction",
    "valid",
    "wall_ms",
    "seed",
    "task",
    "target_met",
    "error",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub family: String,
    pub n: Option<usize>,
    pub r: Option<usize>,
    pub eps: f64,
    pub delta: f64,
    pub mode: String,
    pub coverage_fraction: Option<f64>,
    pub valid: Option<bool>,
    pub wall_ms: Option<u64>,
    pub seed: u64,
    pub task: Task,
    pub target_met: Option<bool>,
    pub error: Option<String>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

/// Parses a sweep: a JSON object or array of objects whose values may be
/// scalars or arrays. Every object expands to the cartesian product of its
/// array-valued keys, the alphabetically first key varying slowest.
pub fn parse_sweep(text: &str) -> Result<Vec<RowSpec>> {
    let v: Value =
        serde_json::from_str(text).map_err(|e| invalid(format!("sweep is not valid JSON: {e}")))?;
    let objects = match v {
        Value::Array(xs) => xs,
        obj @ Value::Object(_) => vec![obj],
        _ => return Err(invalid("sweep must be an object or an array of objects")),
    };
    let mut rows = Vec::new();
    for obj in objects {
        let Value::Object(map) = obj else {
            return Err(invalid("sweep entries must be objects"));
        };
        for point in expand(&map)? {
            rows.push(row_spec(point)?);
        }
    }
    Ok(rows)
}

fn expand(map: &Map<String, Value>) -> Result<Vec<Map<String, Value>>> {
    let mut points = vec![Map::new()];
    for (key, value) in map {
        let options = match value {
            Value::Array(xs) if xs.is_empty() => {
                return Err(invalid(format!("sweep key {key:?} has no values")))
            }
            Value::Array(xs) => xs.clone(),
            x => vec![x.clone()],
        };
        points = points
            .into_iter()
            .flat_map(|p| {
                options.iter().map(move |o| {
                    let mut q = p.clone();
                    q.insert(key.clone(), o.clone());
                    q
                })
            })
            .collect();
    }
    Ok(points)
}

fn take<T: for<'de> Deserialize<'de>>(
    map: &mut Map<String, Value>,
    key: &str,
    default: T,
) -> Result<T> {
    match map.remove(key) {
        None => Ok(default),
        Some(v) => {
            serde_json::from_value(v).map_err(|e| invalid(format!("sweep key {key:?}: {e}")))
        }
    }
}

fn row_spec(mut map: Map<String, Value>) -> Result<RowSpec> {
    let task = take(&mut map, "task", Task::Color)?;
    let mode = take(&mut map, "mode", ModeChoice::Auto)?;
    let eps = take(&mut map, "eps", DEFAULT_EPS)?;
    let delta = take(&mut map, "delta", 0.0)?;
    let seed = take(&mut map, "seed", 0)?;
    let family = serde_json::from_value(Value::Object(map))
        .map_err(|e| invalid(format!("sweep family: {e}")))?;
    Ok(RowSpec {
        family,
        task,
        mode,
        eps,
        delta,
        seed,
    })
}

/// Runs one row; failures are recorded in the row.
pub fn run_row(spec: &RowSpec, base: &PipelineConfig, timing: bool) -> BenchRow {
    let start = Instant::now();
    let mut row = BenchRow {
        family: spec.family.label(),
        n: None,
        r: None,
        eps: spec.eps,
        delta: spec.delta,
        mode: spec.mode.label().into(),
        coverage_fraction: None,
        valid: None,
        wall_ms: None,
        seed: spec.seed,
        task: spec.task,
        target_met: None,
        error: None,
    };
    let res = spec.family.build().and_then(|g| {
        row.n = Some(g.n());
        let mode = spec.mode.resolve(g.n());
        row.mode = mode.as_str().into();
        let cfg = PipelineConfig {
            seed: spec.seed,
            ..base.clone()
        };
        match spec.task {
            Task::Color => solve_3coloring(&g, spec.eps, spec.delta, mode, &cfg),
            Task::Mis => solve_max_is(&g, spec.eps, spec.delta, mode, &cfg),
        }
    });
    match res {
        Ok(rep) => {
            row.r = rep.r;
            row.coverage_fraction = Some(rep.achieved as f64 / rep.n as f64);
            row.valid = Some(rep.valid);
            row.target_met = rep.ledger.map(|l| l.met);
        }
        Err(e) => row.error = Some(format!("{}: {e}", e.kind())),
    }
    if timing {
        row.wall_ms = Some(start.elapsed().as_millis() as u64);
    }
    row
}

/// Runs all rows on up to `jobs` threads; the output keeps the sweep order.
pub fn run_sweep(
    specs: &[RowSpec],
    base: &PipelineConfig,
    jobs: usize,
    timing: bool,
) -> Result<Vec<BenchRow>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| invalid(format!("cannot start {jobs} workers: {e}")))?;
    Ok(pool.install(|| specs.par_iter().map(|s| run_row(s, base, timing)).collect()))
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(HEADER).expect("write to memory");
    for row in rows {
        w.serialize(row).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansion_order() {
        let rows =
            parse_sweep(r#"{"family":"multipartite","parts":3,"size":[2,3],"eps":[0.1,0.2]}"#)
                .unwrap();
        let got: Vec<(f64, String)> = rows.iter().map(|r| (r.eps, r.family.label())).collect();
        assert_eq!(
            got,
            vec![
                (0.1, "multipartite(3,2)".to_string()),
                (0.1, "multipartite(3,3)".to_string()),
                (0.2, "multipartite(3,2)".to_string()),
                (0.2, "multipartite(3,3)".to_string()),
            ]
        );
        assert_eq!(rows[0].task, Task::Color);
    }

    #[test]
    fn empty_sweep_has_header_only() {
        let rows = parse_sweep("[]").unwrap();
        assert!(rows.is_empty());
        assert_eq!(to_csv(&[]), format!("{}\n", HEADER.join(",")));
    }

    #[test]
    fn bad_sweeps() {
        assert!(parse_sweep("{").is_err());
        assert!(parse_sweep("3").is_err());
        assert!(parse_sweep(r#"{"family":"multipartite","parts":3,"size":[]}"#).is_err());
        assert!(parse_sweep(r#"{"family":"multipartite","parts":3,"size":2,"colour":1}"#).is_err());
        assert!(
            parse_sweep(r#"{"family":"multipartite","parts":3,"size":2,"mode":"fast"}"#).is_err()
        );
    }

    #[test]
    fn failing_rows_are_recorded() {
        let rows =
            parse_sweep(r#"{"family":"multipartite","parts":4,"size":1,"mode":"exact"}"#).unwrap();
        let out = run_sweep(&rows, &PipelineConfig::default(), 2, false).unwrap();
        assert_eq!(out[0].n, Some(4));
        assert!(out[0].error.as_deref().unwrap().starts_with("infeasible"));
        assert!(to_csv(&out)
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("\"multipartite(4,1)\",4,,"));
    }
}
