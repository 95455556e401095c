//! The `tricolor` command line: graph generation, spectral analysis, the
//! coloring and independent-set pipelines, report verification, lemma
//! suites and benchmark sweeps.
//!
//! Exit codes: `0` success, `1` error, `2` when the output is valid but
//! misses the ledger target. Errors are printed on stdout as
//! `{"error": kind, "message": ...}`.

pub mod family;
pub mod sweep;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tricolor_core::graph::{
    load_graph, max_independent_set_bruteforce, verify_independent_set, verify_partial_coloring,
    write_edge_list,
};
use tricolor_core::rounding::{solve_3coloring, solve_max_is};
use tricolor_core::spectral::{random_walk_spectrum, threshold_rank};
use tricolor_core::suites::{run_suite, Suite};
use tricolor_core::{Error, Graph, Mode, PipelineConfig, RoundingReport, SolverConfig};

use family::Family;

/// Graphs up to this size run in exact mode under `--mode auto`.
pub const AUTO_EXACT_MAX_N: usize = 15;

/// Largest graph the verifier compares against a brute-force maximum
/// independent set.
pub const VERIFY_BRUTE_FORCE_CAP: usize = 40;

#[derive(Debug, Parser)]
#[command(
    name = "tricolor",
    version,
    about = "Coloring and independent sets on low threshold-rank graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a graph from a named family plus a JSON sidecar.
    Generate(GenerateArgs),
    /// Spectrum summary and threshold ranks of a graph.
    Analyze(AnalyzeArgs),
    /// Partial 3-coloring pipeline.
    Color(SolveArgs),
    /// Independent-set pipeline.
    Mis(SolveArgs),
    /// Re-verify a report against its graph.
    Verify(VerifyArgs),
    /// Run a randomized lemma suite.
    LemmaCheck(LemmaArgs),
    /// Run a benchmark sweep and write CSV.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    Multipartite,
    Blowup,
    Union,
    Perturbed,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeChoice {
    /// Exact when `n <= 15`, otherwise the relaxation.
    #[default]
    Auto,
    Exact,
    Sdp,
}

impl ModeChoice {
    pub fn resolve(self, n: usize) -> Mode {
        match self {
            ModeChoice::Exact => Mode::Exact,
            ModeChoice::Sdp => Mode::Sdp,
            ModeChoice::Auto if n <= AUTO_EXACT_MAX_N => Mode::Exact,
            ModeChoice::Auto => Mode::Sdp,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ModeChoice::Auto => "auto",
            ModeChoice::Exact => "exact",
            ModeChoice::Sdp => "sdp",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    #[default]
    Color,
    Mis,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    pub family: FamilyKind,
    /// Number of parts of the multipartite base.
    #[arg(long, default_value_t = 3)]
    pub parts: usize,
    /// Part size of the multipartite base.
    #[arg(long, default_value_t = 4)]
    pub size: usize,
    /// Number of disjoint copies (union).
    #[arg(long, default_value_t = 2)]
    pub copies: usize,
    /// Cycle length of the blow-up base.
    #[arg(long, default_value_t = 4)]
    pub cycle: usize,
    /// Copies per vertex (blowup).
    #[arg(long, default_value_t = 5)]
    pub factor: usize,
    /// Fraction of vertices to rewire around (perturbed).
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Edge-list output; the sidecar goes to `<out>.json`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub graph: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub graph: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    #[arg(long, value_enum, default_value_t = ModeChoice::Auto)]
    pub mode: ModeChoice,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Conditioning rounds per sequence (default `min(12, max(4, ceil(r/λ²)))`).
    #[arg(long)]
    pub rounds: Option<usize>,
    /// Sampled conditioning sequences (default 200 exact, 16 relaxation).
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = SolverConfig::default().tolerance)]
    pub tol: f64,
    #[arg(long, default_value_t = SolverConfig::default().max_iterations)]
    pub max_iters: usize,
    /// Largest graph the exact backend enumerates.
    #[arg(long, default_value_t = PipelineConfig::default().enumeration_cap)]
    pub enumeration_cap: usize,
    /// Exit 0 when a relaxation-mode run misses the target.
    #[arg(long)]
    pub accept_empirical: bool,
    /// Include the full conditioning transcript in the report.
    #[arg(long)]
    pub transcript: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub graph: PathBuf,
    pub report: PathBuf,
}

#[derive(Debug, Args)]
pub struct LemmaArgs {
    #[arg(value_parser = ["corr-lb", "local-global", "pinsker", "conditioning", "four-color"])]
    pub which: String,
    /// Defaults: corr-lb 100000, local-global 1000, pinsker 10000,
    /// conditioning 200 sequences per case.
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// JSON sweep file.
    pub sweep: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Leave `wall_ms` empty so the output is reproducible byte for byte.
    #[arg(long)]
    pub no_timing: bool,
    #[arg(long, default_value_t = SolverConfig::default().tolerance)]
    pub tol: f64,
    #[arg(long, default_value_t = SolverConfig::default().max_iterations)]
    pub max_iters: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// What a command printed and how the process should exit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: 0, stdout }
    }
}

/// A failure that ends the command with exit code 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub kind: String,
    pub message: String,
    pub detail: Option<Value>,
}

impl Failure {
    fn new(kind: &str, message: impl Into<String>) -> Self {
        Failure {
            kind: kind.into(),
            message: message.into(),
            detail: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut v = json!({ "error": self.kind, "message": self.message });
        if let Some(d) = &self.detail {
            v["detail"] = d.clone();
        }
        serde_json::to_string(&v).expect("error serializes") + "\n"
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::new(e.kind(), e.to_string())
    }
}

type CmdResult = std::result::Result<Outcome, Failure>;

/// Parses `args` (program name first) and runs the command.
pub fn main_with_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => match e.kind() {
            clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                Outcome::ok(e.to_string())
            }
            _ => Outcome {
                code: 1,
                stdout: Failure::new("usage", e.to_string().trim_end()).to_json(),
            },
        },
    }
}

pub fn run(cli: Cli) -> Outcome {
    let res = match cli.command {
        Command::Generate(a) => generate(&a),
        Command::Analyze(a) => analyze(&a),
        Command::Color(a) => solve(&a, Task::Color),
        Command::Mis(a) => solve(&a, Task::Mis),
        Command::Verify(a) => verify(&a),
        Command::LemmaCheck(a) => lemma_check(&a),
        Command::Bench(a) => bench(&a),
    };
    res.unwrap_or_else(|f| Outcome {
        code: 1,
        stdout: f.to_json(),
    })
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::new("io", format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> std::result::Result<(), Failure> {
    fs::write(path, text)
        .map_err(|e| Failure::new("io", format!("cannot write {}: {e}", path.display())))
}

fn read_graph(path: &Path) -> std::result::Result<Graph, Failure> {
    Ok(load_graph(&read(path)?)?)
}

fn emit(text: String, out: Option<&Path>, code: u8) -> CmdResult {
    match out {
        Some(p) => {
            write(p, &text)?;
            Ok(Outcome {
                code,
                stdout: String::new(),
            })
        }
        None => Ok(Outcome { code, stdout: text }),
    }
}

fn pretty(v: &impl Serialize) -> String {
    serde_json::to_string_pretty(v).expect("value serializes") + "\n"
}

fn usage(message: impl Into<String>) -> Failure {
    Failure::new("usage", message)
}

fn reject_csv(format: Format) -> std::result::Result<(), Failure> {
    if format == Format::Csv {
        return Err(usage("--format csv is only available for bench"));
    }
    Ok(())
}

fn spectrum_summary(g: &Graph, thresholds: &[f64]) -> std::result::Result<Value, Failure> {
    let spec = random_walk_spectrum(g, false)?;
    let k = spec.len().min(5);
    let ranks: BTreeMap<String, usize> = thresholds
        .iter()
        .map(|&t| (format!("{t}"), threshold_rank(&spec, t)))
        .collect();
    Ok(json!({
        "head": spec.eigenvalues[..k],
        "tail": spec.eigenvalues[spec.len() - k..],
        "threshold_rank": ranks,
    }))
}

fn generate(a: &GenerateArgs) -> CmdResult {
    let family = match a.family {
        FamilyKind::Multipartite => Family::Multipartite {
            parts: a.parts,
            size: a.size,
        },
        FamilyKind::Blowup => Family::Blowup {
            cycle: a.cycle,
            factor: a.factor,
        },
        FamilyKind::Union => Family::Union {
            copies: a.copies,
            parts: a.parts,
            size: a.size,
        },
        FamilyKind::Perturbed => Family::Perturbed {
            parts: a.parts,
            size: a.size,
            delta: a.delta,
            seed: a.seed,
        },
    };
    let g = family.build().map_err(|e| Failure {
        kind: "invalid_params".into(),
        message: e.to_string(),
        detail: Some(json!({ "cause": e.kind() })),
    })?;
    let sidecar = json!({
        "family": family.label(),
        "params": family,
        "n": g.n(),
        "d": g.degree(),
        "edges": g.num_edges(),
        "spectrum": spectrum_summary(&g, &[0.1, 0.01, 0.001])?,
    });
    write(&a.out, &write_edge_list(&g))?;
    let mut side = a.out.clone().into_os_string();
    side.push(".json");
    write(Path::new(&side), &pretty(&sidecar))?;
    Ok(Outcome::ok(pretty(&sidecar)))
}

fn analyze(a: &AnalyzeArgs) -> CmdResult {
    reject_csv(a.format)?;
    if !(a.eps > 0.0 && a.eps < 1.0) {
        return Err(usage(format!("--eps must lie in (0, 1), got {}", a.eps)));
    }
    let g = read_graph(&a.graph)?;
    let spec = random_walk_spectrum(&g, false)?;
    let lambda = a.eps / 100.0;
    let k = spec.len().min(5);
    let v = json!({
        "n": g.n(),
        "d": g.degree(),
        "edges": g.num_edges(),
        "components": g.components().len(),
        "eps": a.eps,
        "r": threshold_rank(&spec, a.eps),
        "lambda": lambda,
        "r_lambda": threshold_rank(&spec, lambda),
        "spectrum_head": spec.eigenvalues[..k],
        "spectrum_tail": spec.eigenvalues[spec.len() - k..],
    });
    let text = match a.format {
        Format::Text => format!(
            "n {} d {} components {}\nthreshold rank at {}: {}\nthreshold rank at {}: {}\nhead {:?}\ntail {:?}\n",
            g.n(),
            g.degree(),
            v["components"],
            a.eps,
            v["r"],
            lambda,
            v["r_lambda"],
            &spec.eigenvalues[..k],
            &spec.eigenvalues[spec.len() - k..]
        ),
        _ => pretty(&v),
    };
    emit(text, a.out.as_deref(), 0)
}

fn pipeline_config(a: &SolveArgs) -> std::result::Result<PipelineConfig, Failure> {
    if !(a.eps > 0.0 && a.eps < 1.0) {
        return Err(usage(format!("--eps must lie in (0, 1), got {}", a.eps)));
    }
    if !(a.delta >= 0.0 && a.delta <= 1.0) {
        return Err(usage(format!(
            "--delta must lie in [0, 1], got {}",
            a.delta
        )));
    }
    if a.rounds.is_some_and(|r| r < 2) {
        return Err(usage("--rounds must be at least 2"));
    }
    if a.samples == Some(0) {
        return Err(usage("--samples must be at least 1"));
    }
    let solver = SolverConfig {
        tolerance: a.tol,
        max_iterations: a.max_iters,
        ..SolverConfig::default()
    };
    solver.validate().map_err(|e| usage(e.to_string()))?;
    Ok(PipelineConfig {
        seed: a.seed,
        rounds: a.rounds,
        samples: a.samples,
        solver,
        enumeration_cap: a.enumeration_cap,
        keep_transcript: a.transcript,
    })
}

/// Exit code for a verified report.
pub fn exit_code(rep: &RoundingReport, accept_empirical: bool) -> u8 {
    match &rep.ledger {
        Some(l) if !l.met && !(l.empirical && accept_empirical) => 2,
        _ => 0,
    }
}

fn solve(a: &SolveArgs, task: Task) -> CmdResult {
    reject_csv(a.format)?;
    let cfg = pipeline_config(a)?;
    let g = read_graph(&a.graph)?;
    let mode = a.mode.resolve(g.n());
    let rep = match task {
        Task::Color => solve_3coloring(&g, a.eps, a.delta, mode, &cfg)?,
        Task::Mis => solve_max_is(&g, a.eps, a.delta, mode, &cfg)?,
    };
    let code = exit_code(&rep, a.accept_empirical);
    let text = match a.format {
        Format::Text => report_text(&rep),
        _ => rep.to_json() + "\n",
    };
    emit(text, a.out.as_deref(), code)
}

fn report_text(rep: &RoundingReport) -> String {
    let mut s = format!(
        "mode {} n {} d {} r {} eps {} delta {}\n",
        rep.mode,
        rep.n,
        rep.d,
        rep.r.map_or("-".into(), |r| r.to_string()),
        rep.eps.unwrap_or(f64::NAN),
        rep.delta.unwrap_or(f64::NAN)
    );
    s += &format!(
        "global correlation {:e} local correlation {:e}\n",
        rep.global_correlation, rep.local_correlation
    );
    if let Some(l) = &rep.ledger {
        s += &format!(
            "achieved {} target {:.4} {}\n",
            l.achieved,
            l.target,
            if l.met { "met" } else { "missed" }
        );
        for note in &l.notes {
            s += &format!("note: {note}\n");
        }
    }
    s
}

#[derive(Debug, Serialize)]
struct Verdict {
    kind: &'static str,
    n: usize,
    valid: bool,
    size: usize,
    violations: Vec<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    brute_force_max: Option<usize>,
    problems: Vec<String>,
}

fn verify(a: &VerifyArgs) -> CmdResult {
    let g = read_graph(&a.graph)?;
    let rep: RoundingReport = serde_json::from_str(&read(&a.report)?)
        .map_err(|e| Failure::new("parse", format!("report is not a valid report: {e}")))?;
    let mut problems = Vec::new();
    if rep.n != g.n() {
        problems.push(format!("report has n = {}, graph has n = {}", rep.n, g.n()));
    }
    let verdict = match (&rep.coloring, &rep.independent_set) {
        (Some(c), None) => {
            let v = verify_partial_coloring(&g, c)?;
            if v.colored_count != rep.achieved {
                problems.push(format!(
                    "report claims {} colored vertices, found {}",
                    rep.achieved, v.colored_count
                ));
            }
            Verdict {
                kind: "coloring",
                n: g.n(),
                valid: v.valid,
                size: v.colored_count,
                violations: v.violations,
                brute_force_max: None,
                problems,
            }
        }
        (None, Some(s)) => {
            let v = verify_independent_set(&g, s)?;
            if v.size != rep.achieved {
                problems.push(format!(
                    "report claims a set of size {}, found {}",
                    rep.achieved, v.size
                ));
            }
            let max = (g.n() <= VERIFY_BRUTE_FORCE_CAP)
                .then(|| max_independent_set_bruteforce(&g, VERIFY_BRUTE_FORCE_CAP))
                .transpose()?
                .map(|m| m.len());
            if let Some(m) = max.filter(|&m| v.size > m) {
                problems.push(format!("set of size {} exceeds the maximum {m}", v.size));
            }
            Verdict {
                kind: "independent_set",
                n: g.n(),
                valid: v.independent,
                size: v.size,
                violations: v.violations,
                brute_force_max: max,
                problems,
            }
        }
        _ => {
            return Err(Failure::new(
                "parse",
                "report carries neither a coloring nor an independent set",
            ))
        }
    };
    let ok = verdict.valid && verdict.problems.is_empty();
    Ok(Outcome {
        code: if ok { 0 } else { 1 },
        stdout: pretty(&verdict),
    })
}

fn lemma_check(a: &LemmaArgs) -> CmdResult {
    reject_csv(a.format)?;
    let suite: Suite = a.which.parse()?;
    if a.trials == Some(0) {
        return Err(usage("--trials must be at least 1"));
    }
    let rep = run_suite(suite, a.trials, a.seed)?;
    let text = match a.format {
        Format::Text => {
            let mut s = format!(
                "{} {}: {}/{} passed, worst margin {:e}\n",
                rep.suite,
                if rep.all_passed() { "pass" } else { "FAIL" },
                rep.passed,
                rep.trials,
                rep.worst_margin
            );
            if let Some(sec) = &rep.secondary {
                s += &format!(
                    "secondary ({}): {} failed, worst margin {:e}\n",
                    sec.description, sec.failed, sec.worst_margin
                );
            }
            if let Some(f) = &rep.first_failure {
                s += &format!("first failure: {f}\n");
            }
            for n in &rep.notes {
                s += &format!("note: {n}\n");
            }
            s
        }
        _ => pretty(&rep),
    };
    Ok(Outcome {
        code: if rep.all_passed() { 0 } else { 1 },
        stdout: text,
    })
}

fn bench(a: &BenchArgs) -> CmdResult {
    if a.format == Format::Text {
        return Err(usage("bench writes csv or json"));
    }
    if a.jobs == 0 {
        return Err(usage("--jobs must be at least 1"));
    }
    let solver = SolverConfig {
        tolerance: a.tol,
        max_iterations: a.max_iters,
        ..SolverConfig::default()
    };
    solver.validate().map_err(|e| usage(e.to_string()))?;
    let specs = sweep::parse_sweep(&read(&a.sweep)?)?;
    let base = PipelineConfig {
        solver,
        ..PipelineConfig::default()
    };
    let rows = sweep::run_sweep(&specs, &base, a.jobs, !a.no_timing)?;
    let text = match a.format {
        Format::Json => pretty(&rows),
        _ => sweep::to_csv(&rows),
    };
    emit(text, a.out.as_deref(), 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn auto_mode_threshold() {
        assert_eq!(ModeChoice::Auto.resolve(15), Mode::Exact);
        assert_eq!(ModeChoice::Auto.resolve(16), Mode::Sdp);
        assert_eq!(ModeChoice::Sdp.resolve(3), Mode::Sdp);
    }

    #[test]
    fn usage_errors_are_json() {
        let out = main_with_args(["tricolor", "color", "g.txt", "--bogus"]);
        assert_eq!(out.code, 1);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["error"], "usage");
        let out = main_with_args(["tricolor", "--help"]);
        assert_eq!(out.code, 0);
    }

    #[test]
    fn flags_are_validated_before_reading() {
        let out = main_with_args(["tricolor", "color", "/nonexistent", "--eps", "1.5"]);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!((out.code, v["error"].as_str()), (1, Some("usage")));
        let out = main_with_args(["tricolor", "color", "/nonexistent"]);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["error"], "io");
    }
}
