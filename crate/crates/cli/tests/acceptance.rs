//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Built with `harness = false`; run it with
//! `cargo test -p tricolor-cli --test acceptance`.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use serde_json::Value;
use tricolor_cli::exit_code;
use tricolor_cli::family::Family;
use tricolor_core::rounding::{
    correlation_lower_bound, four_color_counterexample, solve_3coloring, solve_max_is, Mode,
    PipelineConfig,
};
use tricolor_core::suites::{run_suite, Suite, SuiteReport};
use tricolor_core::RoundingReport;

use common::*;

const SEED: u64 = 1;

struct Verdict {
    pass: bool,
    lines: Vec<String>,
}

impl Verdict {
    fn new() -> Self {
        Verdict {
            pass: true,
            lines: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.pass &= ok;
        self.lines
            .push(format!("{} {line}", if ok { "  ok  " } else { "  FAIL" }));
    }

    fn note(&mut self, line: String) {
        self.lines.push(format!("       {line}"));
    }

    fn within(&mut self, elapsed: Duration, limit_s: u64) {
        self.check(
            elapsed.as_secs_f64() < limit_s as f64,
            format!("runtime {:.2}s (limit {limit_s}s)", elapsed.as_secs_f64()),
        );
    }
}

fn suite_lines(v: &mut Verdict, rep: &SuiteReport) {
    v.check(
        rep.failed == 0,
        format!(
            "{}/{} trials pass at tolerance {:e}, worst margin {:e}",
            rep.passed, rep.trials, rep.tolerance, rep.worst_margin
        ),
    );
    if let Some(f) = &rep.first_failure {
        v.note(format!("first violation: {f}"));
    }
}

fn correlation_lower_bound_suite() -> Verdict {
    let mut v = Verdict::new();
    let t = Instant::now();
    let rep = run_suite(Suite::CorrLb, Some(100_000), SEED).unwrap();
    v.within(t.elapsed(), 10);
    v.note("stated bound: sum_sigma px py >= 1/4 - eta/2 - gamma - 1e-12".into());
    suite_lines(&mut v, &rep);
    if let Some(sec) = &rep.secondary {
        v.note(format!(
            "weaker bound {}: {} violations, worst margin {:e}",
            sec.description, sec.failed, sec.worst_margin
        ));
    }
    let w = correlation_lower_bound(&[0.5, 0.5, 0.0, 0.0], &[0.0, 0.5, 0.5, 0.0], 1e-12, 1e-12)
        .unwrap();
    v.check(
        w.value == 0.25 && w.holds && w.bound < 0.25 && 0.25 - w.bound < 1e-11,
        format!(
            "witness (1/2,1/2,0)x(0,1/2,1/2): value {} against bound {}",
            w.value, w.bound
        ),
    );
    v
}

fn four_color() -> Verdict {
    let mut v = Verdict::new();
    let r = four_color_counterexample();
    v.check(
        r.correlation == 0.0 && r.correlation.to_bits() == 0,
        format!("overlap {:?} (bit-exact zero)", r.correlation),
    );
    v.check(
        r.marginals_bounded && r.max_marginal == 0.5,
        format!("largest marginal {}", r.max_marginal),
    );
    v
}

fn timed_suite(suite: Suite, trials: usize, limit_s: Option<u64>) -> Verdict {
    let mut v = Verdict::new();
    let t = Instant::now();
    let rep = run_suite(suite, Some(trials), SEED).unwrap();
    if let Some(l) = limit_s {
        v.within(t.elapsed(), l);
    }
    suite_lines(&mut v, &rep);
    for n in &rep.notes {
        v.note(n.clone());
    }
    v
}

fn tripartite(m: usize) -> (String, Family) {
    let f = Family::Multipartite { parts: 3, size: m };
    (f.label(), f)
}

fn union(copies: usize, m: usize) -> (String, Family) {
    let f = Family::Union {
        copies,
        parts: 3,
        size: m,
    };
    (f.label(), f)
}

/// Re-checks a coloring report against the graph it came from.
fn coloring_holds(g: &tricolor_core::Graph, rep: &RoundingReport) -> bool {
    let v: Value = serde_json::from_str(&rep.to_json()).unwrap();
    let colors = coloring_of(&v).unwrap();
    proper_partial(g.n(), g.edges(), &colors)
        && colors.iter().flatten().count() == rep.achieved
        && rep.valid
}

fn exact_coloring() -> Verdict {
    let mut v = Verdict::new();
    let t = Instant::now();
    for m in 2..=5 {
        let (name, f) = tripartite(m);
        let g = f.build().unwrap();
        let rep = solve_3coloring(&g, 0.1, 0.0, Mode::Exact, &PipelineConfig::default()).unwrap();
        let prefix = rep.conditioning.as_ref().unwrap().prefix_length;
        let floor = 0.4 * g.n() as f64;
        v.check(
            coloring_holds(&g, &rep)
                && rep.achieved as f64 >= floor
                && rep.achieved == g.n()
                && prefix <= 2,
            format!(
                "{name}: colored {}/{} (floor {floor:.1}), {prefix} conditionings",
                rep.achieved,
                g.n()
            ),
        );
    }
    v.within(t.elapsed(), 30);
    v
}

fn sdp_coloring() -> Verdict {
    let mut v = Verdict::new();
    let eps = 0.2;
    let t = Instant::now();
    let mut instances: Vec<_> = (2..=5).map(tripartite).collect();
    instances.extend([union(2, 4), union(3, 3), union(2, 5), union(3, 4)]);
    for (name, f) in instances {
        let g = f.build().unwrap();
        let rep = solve_3coloring(&g, eps, 0.0, Mode::Sdp, &PipelineConfig::default()).unwrap();
        let ledger = rep.ledger.as_ref().unwrap();
        let d = &rep.diagnostics;
        let floor = (0.5 - eps) * g.n() as f64;
        let met = rep.achieved as f64 >= floor;
        let markov = d.markov_b_bound.as_ref().unwrap();
        let chain = &d.local_correlation;
        let m = &d.per_edge_m_stats;
        let complete_ledger = markov.bound.is_some()
            && m.t_edge_threshold == Some(1.0 / 50.0)
            && chain.cap == Some(eps / 50.0)
            && ledger.empirical;
        let code = exit_code(&rep, false);
        v.check(
            coloring_holds(&g, &rep) && complete_ledger && (met || code == 2),
            format!(
                "{name}: r {}, colored {}/{} (floor {floor:.1}), exit {code}",
                rep.r.unwrap(),
                rep.achieved,
                g.n()
            ),
        );
        v.note(format!(
            "|B| {} vs Markov bound {:.3}; T-edges {} with {} below 1/50 (min M_uv {}); local correlation {:e} vs eps/50 = {}",
            markov.measured,
            markov.bound.unwrap(),
            m.t_edges,
            m.t_edges_below_threshold,
            m.t_edge_min.map_or("-".into(), |x| format!("{x:.4}")),
            chain.measured,
            eps / 50.0
        ));
    }
    v.within(t.elapsed(), 300);
    v
}

fn independent_sets() -> Verdict {
    let mut v = Verdict::new();
    let t = Instant::now();
    let families = [
        Family::Multipartite { parts: 2, size: 5 },
        Family::Blowup {
            cycle: 4,
            factor: 5,
        },
    ];
    for f in families {
        let g = f.build().unwrap();
        let rep = solve_max_is(&g, 0.2, 0.0, Mode::Exact, &PipelineConfig::default()).unwrap();
        let set = rep.independent_set.clone().unwrap();
        let floor = (0.5 - 0.2) * g.n() as f64;
        v.check(
            independent(g.n(), g.edges(), &set)
                && set.len() as f64 >= floor
                && set.len() * 2 == g.n(),
            format!(
                "{}: independent set of size {}/{} (floor {floor:.1})",
                f.label(),
                set.len(),
                g.n()
            ),
        );
    }
    v.within(t.elapsed(), 60);
    v
}

/// Runs the binary on every small corpus graph and re-checks each output
/// from disk, including infeasibility claims.
fn oracle_equivalence() -> Verdict {
    let mut v = Verdict::new();
    let dir = tempfile::tempdir().unwrap();
    let mut files: Vec<_> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    let configs: [(&str, &str, f64); 4] = [
        ("color", "0.1", 0.0),
        ("color", "0.1", 0.3),
        ("mis", "0.2", 0.0),
        ("mis", "0.2", 0.2),
    ];
    let (mut outputs, mut infeasible) = (0, 0);
    for path in &files {
        let (n, edges) = read_edges(path);
        if n > 12 {
            continue;
        }
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let (a, blanks) = (alpha(n, &edges), min_blanks(n, &edges));
        for (cmd, eps, delta) in configs {
            let out = dir.path().join(format!("{name}.{cmd}.{delta}.json"));
            let p = path.to_str().unwrap();
            let delta_s = delta.to_string();
            let res = tricolor(&[
                cmd,
                p,
                "--eps",
                eps,
                "--delta",
                &delta_s,
                "--mode",
                "exact",
                "--out",
                out.to_str().unwrap(),
            ]);
            let code = res.status.code().unwrap();
            let label = format!("{name} {cmd} delta={delta}");
            if code == 1 {
                let err: Value = serde_json::from_slice(&res.stdout).unwrap();
                let truly = if cmd == "color" {
                    blanks as f64 > (delta * n as f64 + 1e-9).floor()
                } else {
                    (a as f64) < ((0.5 - delta) * n as f64 - 1e-9).ceil()
                };
                infeasible += 1;
                if err["error"] != "infeasible" || !truly {
                    v.check(false, format!("{label}: unexpected error {err}"));
                }
                continue;
            }
            outputs += 1;
            let rep: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
            let ok = if cmd == "color" {
                let c = coloring_of(&rep).unwrap();
                proper_partial(n, &edges, &c)
                    && c.iter().flatten().count() == rep["achieved"].as_u64().unwrap() as usize
            } else {
                let s = independent_set_of(&rep).unwrap();
                independent(n, &edges, &s) && s.len() <= a
            };
            let verified = tricolor(&["verify", p, out.to_str().unwrap()]);
            if !ok || code > 2 || verified.status.code() != Some(0) {
                v.check(false, format!("{label}: output does not verify"));
            }
        }
    }
    v.check(
        outputs > 0,
        format!(
            "{} graphs: {outputs} outputs verified, {infeasible} infeasibility claims confirmed by brute force",
            files.len()
        ),
    );
    v
}

fn determinism() -> Verdict {
    let mut v = Verdict::new();
    let dir = tempfile::tempdir().unwrap();
    let k222 = corpus_dir().join("k222.txt");
    let k333 = corpus_dir().join("k333.txt");
    let k55 = corpus_dir().join("k55.txt");
    let sweep = dir.path().join("sweep.json");
    std::fs::write(
        &sweep,
        r#"{"family":"multipartite","parts":3,"size":[2,3],"mode":["exact","sdp"],"seed":[0,5]}"#,
    )
    .unwrap();
    let p = |x: &std::path::Path| x.to_str().unwrap().to_owned();
    let runs: Vec<Vec<String>> = vec![
        vec!["color".into(), p(&k333), "--seed".into(), "3".into()],
        vec![
            "color".into(),
            p(&k222),
            "--mode".into(),
            "sdp".into(),
            "--seed".into(),
            "3".into(),
        ],
        vec![
            "mis".into(),
            p(&k55),
            "--eps".into(),
            "0.2".into(),
            "--seed".into(),
            "3".into(),
        ],
        vec![
            "lemma-check".into(),
            "pinsker".into(),
            "--trials".into(),
            "500".into(),
            "--seed".into(),
            "3".into(),
        ],
        vec![
            "bench".into(),
            p(&sweep),
            "--no-timing".into(),
            "--jobs".into(),
            "4".into(),
        ],
    ];
    for args in runs {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (a, b) = (tricolor(&args), tricolor(&args));
        v.check(
            a.status.code() == Some(0) && !a.stdout.is_empty() && a.stdout == b.stdout,
            format!(
                "{}: {} identical bytes",
                args[..2].join(" "),
                a.stdout.len()
            ),
        );
    }
    v
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (
            "correlation lower bound, 1e5 marginal pairs",
            correlation_lower_bound_suite,
        ),
        ("four-color example has zero overlap", four_color),
        ("local-to-global bound, 1e3 PSD matrices", || {
            timed_suite(Suite::LocalGlobal, 1_000, Some(60))
        }),
        ("Pinsker bound, 1e4 joints", || {
            timed_suite(Suite::Pinsker, 10_000, None)
        }),
        ("global correlation decays under conditioning", || {
            timed_suite(Suite::Conditioning, 200, None)
        }),
        ("exact-mode coloring of K_{m,m,m}", exact_coloring),
        ("relaxation-mode coloring, eps = 0.2", sdp_coloring),
        ("independent sets, eps = 0.2", independent_sets),
        ("corpus outputs match brute force", oracle_equivalence),
        ("same seed, same bytes", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let v = run();
        println!(
            "criterion {:>2} {} {name} ({:.2}s)",
            i + 1,
            if v.pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
        for l in &v.lines {
            println!("{l}");
        }
        if !v.pass {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("\nall 10 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("\nfailing criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
