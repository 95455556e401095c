use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{global_correlation, PseudoDistribution};
use crate::error::{Error, Result};
use crate::rng;

/// Marginal mass below which an event counts as impossible.
pub const ZERO_PROBABILITY: f64 = 1e-9;

/// Conditions `pd` on `X_v = symbol`, refusing zero-probability events.
pub fn condition(
    pd: &dyn PseudoDistribution,
    v: usize,
    symbol: usize,
) -> Result<Box<dyn PseudoDistribution>> {
    if v >= pd.num_vars() {
        return Err(Error::VertexOutOfRange {
            vertex: v,
            n: pd.num_vars(),
        });
    }
    if symbol >= pd.alphabet().size() {
        return Err(Error::InvalidParameter(format!(
            "symbol {symbol} outside the alphabet"
        )));
    }
    if pd.marginal(v)[symbol] <= ZERO_PROBABILITY {
        return Err(Error::ZeroProbability { vertex: v, symbol });
    }
    pd.condition_on(v, symbol)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditioningConfig {
    /// Maximum number of conditioning steps per sequence.
    pub rounds: usize,
    /// Global correlation the caller wants to reach.
    pub target: f64,
    /// Number of random conditioning sequences.
    pub samples: usize,
    pub seed: u64,
    /// Stop searching once a prefix reaches this correlation. `None` searches
    /// every sequence and stops early only at exactly zero correlation.
    pub stop_at: Option<f64>,
}

impl ConditioningConfig {
    pub fn new(rounds: usize, target: f64, samples: usize, seed: u64) -> Self {
        ConditioningConfig {
            rounds,
            target,
            samples,
            seed,
            stop_at: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub vertex: usize,
    pub value: usize,
    /// Global correlation after this step.
    pub correlation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceRecord {
    pub sample: usize,
    pub steps: Vec<StepRecord>,
    pub best_prefix: usize,
    pub best_correlation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub initial_correlation: f64,
    pub sequences: Vec<SequenceRecord>,
}

#[derive(Debug)]
pub struct ConditioningOutcome {
    pub distribution: Box<dyn PseudoDistribution>,
    /// Number of conditioning steps applied to reach `distribution`.
    pub prefix_length: usize,
    /// Sequence index the best prefix came from, `None` for the input itself.
    pub sample: Option<usize>,
    /// `(vertex, symbol)` events conditioned on, in order.
    pub pins: Vec<(usize, usize)>,
    pub correlation: f64,
    pub target: f64,
    pub succeeded: bool,
    pub transcript: Transcript,
}

/// Conditioned distribution and the pins that produced it.
type Pinned = (Box<dyn PseudoDistribution>, Vec<(usize, usize)>);

struct SequenceResult {
    record: SequenceRecord,
    best: Option<Pinned>,
}

fn recoverable(e: &Error) -> bool {
    matches!(
        e,
        Error::ZeroProbability { .. }
            | Error::Infeasible(_)
            | Error::InfeasiblePin(_)
            | Error::IterationCap { .. }
    )
}

/// Conditions on a value of `X_v` drawn from its current marginal, redrawing
/// among the remaining values when the backend rejects one.
fn condition_on_sampled_value(
    pd: &dyn PseudoDistribution,
    v: usize,
    rng: &mut rng::Rng,
) -> Result<(usize, Box<dyn PseudoDistribution>)> {
    let mut weights: Vec<f64> = pd.marginal(v).iter().map(|&p| p.max(0.0)).collect();
    loop {
        let total: f64 = weights.iter().sum();
        if total <= ZERO_PROBABILITY {
            return Err(Error::ConditioningExhausted { vertex: v });
        }
        let mut draw = rng.gen::<f64>() * total;
        let mut value = weights.len() - 1;
        for (s, &w) in weights.iter().enumerate() {
            if w > 0.0 && draw < w {
                value = s;
                break;
            }
            draw -= w;
        }
        while weights[value] <= 0.0 {
            value -= 1;
        }
        match condition(pd, v, value) {
            Ok(next) => return Ok((value, next)),
            Err(e) if recoverable(&e) => weights[value] = 0.0,
            Err(e) => return Err(e),
        }
    }
}

fn run_sequence(
    pd: &dyn PseudoDistribution,
    cfg: &ConditioningConfig,
    sample: usize,
    initial: f64,
) -> Result<SequenceResult> {
    let mut rng = rng::stream(cfg.seed, sample as u64);
    let n = pd.num_vars();
    let stop = cfg.stop_at.unwrap_or(0.0);
    let mut current = pd.clone_box();
    let mut pins = Vec::new();
    let mut steps = Vec::new();
    let mut best_corr = initial;
    let mut best_prefix = 0;
    let mut best = None;
    for _ in 0..cfg.rounds {
        let v = rng.gen_range(0..n);
        let (value, next) = condition_on_sampled_value(current.as_ref(), v, &mut rng)?;
        let corr = global_correlation(next.as_ref())?;
        pins.push((v, value));
        steps.push(StepRecord {
            vertex: v,
            value,
            correlation: corr,
        });
        current = next;
        if corr < best_corr {
            best_corr = corr;
            best_prefix = steps.len();
            best = Some((current.clone_box(), pins.clone()));
        }
        // Once every marginal is a point mass further conditioning is a no-op.
        if corr <= stop || current.is_integral(current.tolerance()) {
            break;
        }
    }
    Ok(SequenceResult {
        record: SequenceRecord {
            sample,
            steps,
            best_prefix,
            best_correlation: best_corr,
        },
        best,
    })
}

const CHUNK: usize = 8;

/// Searches random conditioning sequences of length at most `cfg.rounds`
/// and returns the prefix with the smallest global correlation. Vertices are
/// drawn uniformly and values from the current marginals. Ties prefer the
/// shorter prefix, then the earlier sequence.
pub fn conditioning_loop(
    pd: &dyn PseudoDistribution,
    cfg: &ConditioningConfig,
) -> Result<ConditioningOutcome> {
    if cfg.rounds < 2 {
        return Err(Error::InvalidParameter(format!(
            "rounds must be >= 2, got {}",
            cfg.rounds
        )));
    }
    if cfg.samples < 1 {
        return Err(Error::InvalidParameter("samples must be >= 1".into()));
    }
    let initial = global_correlation(pd)?;
    let stop = cfg.stop_at.unwrap_or(0.0);
    let mut outcome = ConditioningOutcome {
        distribution: pd.clone_box(),
        prefix_length: 0,
        sample: None,
        pins: Vec::new(),
        correlation: initial,
        target: cfg.target,
        succeeded: initial <= cfg.target,
        transcript: Transcript {
            initial_correlation: initial,
            sequences: Vec::new(),
        },
    };
    if initial <= stop {
        return Ok(outcome);
    }

    let mut start = 0;
    while start < cfg.samples {
        let end = (start + CHUNK).min(cfg.samples);
        let results: Vec<Result<SequenceResult>> = (start..end)
            .into_par_iter()
            .map(|s| run_sequence(pd, cfg, s, initial))
            .collect();
        for res in results {
            let res = res?;
            let better = res.record.best_correlation < outcome.correlation
                || (res.record.best_correlation == outcome.correlation
                    && outcome.sample.is_some()
                    && res.record.best_prefix < outcome.prefix_length);
            if better {
                if let Some((dist, pins)) = res.best {
                    outcome.distribution = dist;
                    outcome.pins = pins;
                    outcome.correlation = res.record.best_correlation;
                    outcome.prefix_length = res.record.best_prefix;
                    outcome.sample = Some(res.record.sample);
                }
            }
            outcome.transcript.sequences.push(res.record);
        }
        if outcome.correlation <= stop {
            break;
        }
        start = end;
    }
    outcome.succeeded = outcome.correlation <= cfg.target;
    Ok(outcome)
}

/// Monte Carlo estimate of the expected global correlation after `k` random
/// conditioning steps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrefixEstimate {
    pub k: usize,
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Estimates `E_{i_1..i_k} E_{i,j} I(X_i; X_j | X_{i_1}, ..., X_{i_k})` for
/// every `k <= rounds` from `samples` sequences; values are drawn from the
/// current marginals, so each sequence samples the conditioning variables
/// from their joint law.
pub fn conditioning_profile(
    pd: &dyn PseudoDistribution,
    rounds: usize,
    samples: usize,
    seed: u64,
) -> Result<Vec<PrefixEstimate>> {
    if samples < 2 {
        return Err(Error::InvalidParameter(
            "profile needs at least two samples".into(),
        ));
    }
    let initial = global_correlation(pd)?;
    let n = pd.num_vars();
    let traces: Vec<Result<Vec<f64>>> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = rng::stream(seed, s as u64);
            let mut current = pd.clone_box();
            let mut trace = vec![initial];
            for _ in 0..rounds {
                let v = rng.gen_range(0..n);
                let (_, next) = condition_on_sampled_value(current.as_ref(), v, &mut rng)?;
                trace.push(global_correlation(next.as_ref())?);
                current = next;
            }
            Ok(trace)
        })
        .collect();
    let traces = traces.into_iter().collect::<Result<Vec<_>>>()?;
    Ok((0..=rounds)
        .map(|k| {
            let xs: Vec<f64> = traces.iter().map(|t| t[k]).collect();
            let m = xs.len() as f64;
            let mean = xs.iter().sum::<f64>() / m;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
            PrefixEstimate {
                k,
                mean,
                std_error: (var / m).sqrt(),
                samples: xs.len(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::complete_multipartite;
    use crate::pseudo::{exact_from_colorings, Alphabet, ExactDistribution};

    #[test]
    fn zero_correlation_input_is_returned() {
        let pm = ExactDistribution::point_mass(Alphabet::Coloring, vec![0, 1, 2, 0]);
        let out = conditioning_loop(&pm, &ConditioningConfig::new(4, 0.1, 10, 1)).unwrap();
        assert_eq!(out.prefix_length, 0);
        assert_eq!(out.correlation, 0.0);
        assert!(out.succeeded && out.pins.is_empty());
    }

    #[test]
    fn tripartite_reaches_target() {
        let pd = exact_from_colorings(&complete_multipartite(3, 3).unwrap(), 0.0, 20).unwrap();
        let target = 4f64.ln() / 3.0;
        let out = conditioning_loop(&pd, &ConditioningConfig::new(4, target, 50, 3)).unwrap();
        assert!(out.succeeded);
        assert!(out.prefix_length <= 4);
        assert_eq!(out.correlation, 0.0);
        assert!(out.distribution.is_integral(0.0));
        let replay = out
            .pins
            .iter()
            .try_fold(pd.clone_box(), |d, &(v, s)| condition(d.as_ref(), v, s))
            .unwrap();
        for u in 0..9 {
            assert_eq!(replay.marginal(u), out.distribution.marginal(u));
        }
    }

    #[test]
    fn loop_is_deterministic() {
        let pd = exact_from_colorings(&complete_multipartite(3, 2).unwrap(), 0.0, 20).unwrap();
        let cfg = ConditioningConfig {
            stop_at: Some(-1.0),
            ..ConditioningConfig::new(5, 0.0, 20, 99)
        };
        let a = conditioning_loop(&pd, &cfg).unwrap();
        let b = conditioning_loop(&pd, &cfg).unwrap();
        assert_eq!(a.transcript, b.transcript);
        assert_eq!(a.transcript.sequences.len(), 20);
        assert_eq!(a.pins, b.pins);
    }

    #[test]
    fn rejects_bad_parameters() {
        let pd = ExactDistribution::point_mass(Alphabet::Coloring, vec![0, 1]);
        assert!(conditioning_loop(&pd, &ConditioningConfig::new(1, 0.1, 5, 0)).is_err());
        assert!(conditioning_loop(&pd, &ConditioningConfig::new(3, 0.1, 0, 0)).is_err());
    }

    #[test]
    fn profile_starts_at_input_correlation() {
        let pd = exact_from_colorings(&complete_multipartite(3, 2).unwrap(), 0.0, 20).unwrap();
        let prof = conditioning_profile(&pd, 3, 40, 5).unwrap();
        assert_eq!(prof.len(), 4);
        let c0 = global_correlation(&pd).unwrap();
        assert!((prof[0].mean - c0).abs() < 1e-15 && prof[0].std_error == 0.0);
        assert!(prof[3].mean < prof[0].mean);
    }
}
