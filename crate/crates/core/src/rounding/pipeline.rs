use serde::{Deserialize, Serialize};

use super::report::{ConditioningSummary, Ledger, MarkovBound, RoundingReport};
use super::round::{round_3coloring, round_independent_set, COLORING_GAMMA};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::pseudo::{
    conditioning_loop, exact_from_colorings, exact_from_independent_sets, ConditioningConfig,
    ConditioningOutcome, PseudoDistribution,
};
use crate::relaxation::{build_coloring_relaxation, build_is_relaxation, solve, SolverConfig};
use crate::spectral::{random_walk_spectrum, threshold_rank};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Uniform distribution over the enumerated solutions.
    Exact,
    /// Degree-2 moment relaxation.
    Sdp,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Sdp => "sdp",
        }
    }
}

/// Coefficient of `δ n` subtracted from the coloring target in the ledger.
pub const COLORING_DELTA_CONSTANT: f64 = 20.0;

/// Upper end of the default round budget.
pub const MAX_DEFAULT_ROUNDS: usize = 12;

pub const EXACT_SAMPLES: usize = 200;
pub const SDP_SAMPLES: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub seed: u64,
    /// Conditioning rounds; `None` picks `min(12, max(4, ceil(r/λ²)))`.
    pub rounds: Option<usize>,
    /// Sampled sequences; `None` picks 200 in exact mode and 16 in SDP mode.
    pub samples: Option<usize>,
    pub solver: SolverConfig,
    /// Largest `n` the exact backend will enumerate.
    pub enumeration_cap: usize,
    /// Attach the full conditioning transcript to the report.
    pub keep_transcript: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 0,
            rounds: None,
            samples: None,
            solver: SolverConfig::default(),
            enumeration_cap: 24,
            keep_transcript: false,
        }
    }
}

/// `min(12, max(4, ceil(r / λ²)))`
pub fn default_rounds(r: usize, lambda: f64) -> usize {
    let want = (r as f64 / (lambda * lambda)).ceil();
    if want >= MAX_DEFAULT_ROUNDS as f64 {
        MAX_DEFAULT_ROUNDS
    } else {
        (want as usize).max(4)
    }
}

struct Prepared {
    r: usize,
    rounds: usize,
    samples: usize,
    target: f64,
}

fn prepare(g: &Graph, lambda: f64, mode: Mode, cfg: &PipelineConfig) -> Result<Prepared> {
    if g.degree() == 0 {
        return Err(Error::InvalidParameter("graph has no edges".into()));
    }
    let r = threshold_rank(&random_walk_spectrum(g, false)?, lambda).max(1);
    let rounds = cfg.rounds.unwrap_or_else(|| default_rounds(r, lambda));
    let samples = cfg.samples.unwrap_or(match mode {
        Mode::Exact => EXACT_SAMPLES,
        Mode::Sdp => SDP_SAMPLES,
    });
    if mode == Mode::Exact && g.n() > cfg.enumeration_cap {
        return Err(Error::CapExceeded {
            n: g.n(),
            cap: cfg.enumeration_cap,
        });
    }
    Ok(Prepared {
        r,
        rounds,
        samples,
        target: lambda * lambda / (2.0 * r as f64),
    })
}

fn condition(
    pd: &dyn PseudoDistribution,
    prep: &Prepared,
    cfg: &PipelineConfig,
) -> Result<ConditioningOutcome> {
    let mut ccfg = ConditioningConfig::new(prep.rounds, prep.target, prep.samples, cfg.seed);
    ccfg.stop_at = Some(prep.target);
    conditioning_loop(pd, &ccfg)
}

fn summary(out: &ConditioningOutcome, prep: &Prepared, keep: bool) -> ConditioningSummary {
    ConditioningSummary {
        rounds: prep.rounds,
        samples: prep.samples,
        sequences_run: out.transcript.sequences.len(),
        prefix_length: out.prefix_length,
        pins: out.pins.clone(),
        initial_correlation: out.transcript.initial_correlation,
        final_correlation: out.correlation,
        target: out.target,
        reached: out.succeeded,
        transcript: keep.then(|| out.transcript.clone()),
    }
}

/// Colors `g` by conditioning a distribution over proper partial
/// 3-colorings (blank budget `δ n`) until its global correlation is small,
/// then rounding with `γ = 0.001`. The ledger compares `|S|` with
/// `(1/2 - ε) n - 20 δ n`.
pub fn solve_3coloring(
    g: &Graph,
    eps: f64,
    delta: f64,
    mode: Mode,
    cfg: &PipelineConfig,
) -> Result<RoundingReport> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must lie in (0, 1), got {eps}"
        )));
    }
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidParameter(format!(
            "delta must lie in [0, 1], got {delta}"
        )));
    }
    let lambda = eps / 100.0;
    let prep = prepare(g, lambda, mode, cfg)?;
    let pd: Box<dyn PseudoDistribution> = match mode {
        Mode::Exact => Box::new(exact_from_colorings(g, delta, cfg.enumeration_cap)?),
        Mode::Sdp => Box::new(solve(&build_coloring_relaxation(g, delta)?, &cfg.solver)?),
    };
    let out = condition(pd.as_ref(), &prep, cfg)?;
    let mut rep = round_3coloring(out.distribution.as_ref(), g, COLORING_GAMMA)?;
    let n = g.n() as f64;

    if let Some(m) = rep.diagnostics.markov_b_bound.as_mut() {
        let bound = delta * n / COLORING_GAMMA;
        *m = MarkovBound {
            bound: Some(bound),
            holds: Some(m.heavy_blank as f64 <= bound + 1e-9),
            ..m.clone()
        };
    }
    let chain = &mut rep.diagnostics.local_correlation;
    chain.cap = Some(eps / 50.0);
    chain.lemma_rhs = Some((2.0 * prep.r as f64 * out.correlation.max(0.0)).sqrt() + lambda);

    let target = (0.5 - eps) * n - COLORING_DELTA_CONSTANT * delta * n;
    let mut notes = Vec::new();
    if !out.succeeded {
        notes.push(format!(
            "conditioning reached global correlation {:e}, above the target {:e}",
            out.correlation, out.target
        ));
    }
    let t_bad = rep.diagnostics.per_edge_m_stats.t_edges_below_threshold;
    if t_bad > 0 {
        notes.push(format!("{t_bad} edges inside T have M_uv below 1/50"));
    }
    if rep.local_correlation > eps / 50.0 {
        notes.push("local correlation exceeds eps/50".into());
    }
    let ledger = finish_ledger(
        target,
        rep.achieved,
        Some(COLORING_DELTA_CONSTANT),
        mode,
        false,
        notes,
    );
    fill(
        &mut rep,
        mode,
        eps,
        delta,
        lambda,
        &prep,
        &out,
        ledger,
        cfg.keep_transcript,
    );
    Ok(rep)
}

/// Finds an independent set in a graph assumed to contain one of size
/// `(1/2 - δ) n`, with `λ = ε⁵/100` and rounding offset `γ = ε/100`. The
/// ledger compares `|S|` with `(1/2 - 2δ - ε) n`.
pub fn solve_max_is(
    g: &Graph,
    eps: f64,
    delta: f64,
    mode: Mode,
    cfg: &PipelineConfig,
) -> Result<RoundingReport> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must lie in (0, 1), got {eps}"
        )));
    }
    if !(0.0..0.5).contains(&delta) {
        return Err(Error::InvalidParameter(format!(
            "delta must lie in [0, 1/2), got {delta}"
        )));
    }
    let lambda = eps.powi(5) / 100.0;
    let prep = prepare(g, lambda, mode, cfg)?;
    let pd: Box<dyn PseudoDistribution> = match mode {
        Mode::Exact => Box::new(exact_from_independent_sets(g, delta, cfg.enumeration_cap)?),
        Mode::Sdp => Box::new(solve(&build_is_relaxation(g, delta)?, &cfg.solver)?),
    };
    let out = condition(pd.as_ref(), &prep, cfg)?;
    let mut rep = round_independent_set(out.distribution.as_ref(), g, eps)?;
    rep.diagnostics.local_correlation.lemma_rhs =
        Some((2.0 * prep.r as f64 * out.correlation.max(0.0)).sqrt() + lambda);

    let n = g.n() as f64;
    let target = (0.5 - 2.0 * delta - eps) * n;
    let outside = mode == Mode::Sdp && lambda < cfg.solver.tolerance;
    let mut notes = Vec::new();
    if !out.succeeded {
        notes.push(format!(
            "conditioning reached global correlation {:e}, above the target {:e}",
            out.correlation, out.target
        ));
    }
    if outside {
        notes.push(format!(
            "lambda {lambda:e} is below the solver tolerance {:e}",
            cfg.solver.tolerance
        ));
    }
    let ledger = finish_ledger(target, rep.achieved, None, mode, outside, notes);
    fill(
        &mut rep,
        mode,
        eps,
        delta,
        lambda,
        &prep,
        &out,
        ledger,
        cfg.keep_transcript,
    );
    Ok(rep)
}

fn finish_ledger(
    target: f64,
    achieved: usize,
    delta_constant: Option<f64>,
    mode: Mode,
    outside_numerical_reach: bool,
    mut notes: Vec<String>,
) -> Ledger {
    let degenerate = target <= 0.0;
    if degenerate {
        notes.push("target is not positive; the empty output meets it".into());
    }
    Ledger {
        target,
        achieved,
        met: achieved as f64 >= target - 1e-9,
        delta_constant,
        degenerate_target: degenerate,
        empirical: mode == Mode::Sdp,
        outside_numerical_reach,
        notes,
    }
}

#[allow(clippy::too_many_arguments)]
fn fill(
    rep: &mut RoundingReport,
    mode: Mode,
    eps: f64,
    delta: f64,
    lambda: f64,
    prep: &Prepared,
    out: &ConditioningOutcome,
    ledger: Ledger,
    keep: bool,
) {
    rep.mode = mode.as_str().to_string();
    rep.eps = Some(eps);
    rep.delta = Some(delta);
    rep.lambda = Some(lambda);
    rep.r = Some(prep.r);
    rep.target = Some(ledger.target);
    rep.conditioning = Some(summary(out, prep, keep));
    rep.ledger = Some(ledger);
}
