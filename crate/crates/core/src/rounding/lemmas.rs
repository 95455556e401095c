use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::pseudo::{global_correlation, Alphabet, PseudoDistribution};
use crate::spectral::{random_walk_spectrum, threshold_rank};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationBound {
    /// `Σ_{σ∈[3]} px(σ) py(σ)`
    pub value: f64,
    /// `1/4 - η/2 - γ`
    pub bound: f64,
    pub holds: bool,
    /// `1/4 - η - γ`. The blank mass of `Y` costs up to `η a₂ <= η/2` on top
    /// of `bound`, so only this weaker bound is guaranteed; for large `η`
    /// the first one fails.
    pub corrected_bound: f64,
    pub corrected_holds: bool,
}

fn check_simplex(name: &str, p: &[f64]) -> Result<()> {
    if p.len() != 4 {
        return Err(Error::SizeMismatch {
            expected: 4,
            found: p.len(),
        });
    }
    if p.iter().any(|&x| !(x >= 0.0)) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::Precondition(format!(
            "{name} is not a distribution on [3] ∪ {{⊥}}"
        )));
    }
    Ok(())
}

/// Evaluates the overlap of two marginals on `[3] ∪ {⊥}` (blank last)
/// against `1/4 - η/2 - γ`, after checking that no color exceeds `1/2 + γ`
/// and blank does not exceed `η`.
pub fn correlation_lower_bound(
    px: &[f64],
    py: &[f64],
    gamma: f64,
    eta: f64,
) -> Result<CorrelationBound> {
    for (name, x) in [("gamma", gamma), ("eta", eta)] {
        if !(x > 0.0 && x < 0.25) {
            return Err(Error::Precondition(format!(
                "{name} = {x} is outside (0, 1/4)"
            )));
        }
    }
    for (name, p) in [("px", px), ("py", py)] {
        check_simplex(name, p)?;
        if let Some(s) = (0..3).find(|&s| p[s] > 0.5 + gamma) {
            return Err(Error::Precondition(format!(
                "{name}({}) = {} exceeds 1/2 + gamma",
                s + 1,
                p[s]
            )));
        }
        if p[3] > eta {
            return Err(Error::Precondition(format!(
                "{name}(⊥) = {} exceeds eta",
                p[3]
            )));
        }
    }
    let value: f64 = (0..3).map(|s| px[s] * py[s]).sum();
    let bound = 0.25 - eta / 2.0 - gamma;
    let corrected_bound = 0.25 - eta - gamma;
    Ok(CorrelationBound {
        value,
        bound,
        holds: value >= bound - 1e-12,
        corrected_bound,
        corrected_holds: value >= corrected_bound - 1e-12,
    })
}

/// `Σ_σ px(σ) py(σ)` over a common color set.
pub fn color_overlap(px: &[f64], py: &[f64]) -> f64 {
    px.iter().zip(py).map(|(a, b)| a * b).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourColorReport {
    pub px: Vec<f64>,
    pub py: Vec<f64>,
    pub max_marginal: f64,
    pub marginals_bounded: bool,
    pub correlation: f64,
}

/// Two marginals over four colors, each at most 1/2 on every color, with
/// zero overlap: `X` uniform on `{1, 2}` and `Y` uniform on `{3, 4}`.
pub fn four_color_counterexample() -> FourColorReport {
    let px = vec![0.5, 0.5, 0.0, 0.0];
    let py = vec![0.0, 0.0, 0.5, 0.5];
    let max_marginal = px.iter().chain(&py).copied().fold(0.0, f64::max);
    let correlation = color_overlap(&px, &py);
    FourColorReport {
        px,
        py,
        max_marginal,
        marginals_bounded: max_marginal <= 0.5,
        correlation,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeCorrelation {
    pub u: usize,
    pub v: usize,
    /// `Σ_{σ≠⊥} (p_uv(σ,σ) - p_u(σ) p_v(σ))²`
    pub full: f64,
    /// `full` rewritten under the edge constraints `p_uv(σ,σ) = 0`.
    pub simplified: f64,
    /// `Σ_{σ∈[3]} p_u(σ)² p_v(σ)²` for coloring, `p_u(1)² p_v(1)²` for
    /// independent set.
    pub m_uv: f64,
    /// Sum over the whole alphabet, blank included.
    pub all_symbols: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalCorrelation {
    pub per_edge: Vec<EdgeCorrelation>,
    /// Edge average of `full`.
    pub average: f64,
    pub simplified_average: f64,
    pub m_average: f64,
    pub all_symbols_average: f64,
    pub max_discrepancy: f64,
}

/// Squared covariance of the `σ` indicators of both endpoints, summed over
/// the symbols, for every edge. For independent sets the `0` and `1` terms
/// coincide under the edge constraint, so `simplified = 2 m_uv`.
pub fn edge_local_correlation(pd: &dyn PseudoDistribution, g: &Graph) -> Result<LocalCorrelation> {
    if pd.num_vars() != g.n() {
        return Err(Error::SizeMismatch {
            expected: g.n(),
            found: pd.num_vars(),
        });
    }
    let alphabet = pd.alphabet();
    let k = alphabet.size();
    let marginals: Vec<Vec<f64>> = (0..g.n()).map(|u| pd.marginal(u)).collect();
    let mut per_edge = Vec::with_capacity(g.num_edges());
    for &(u, v) in g.edges() {
        let j = pd.pairwise(u, v);
        let (pu, pv) = (&marginals[u], &marginals[v]);
        let cov = |s: usize| (j.get(s, s) - pu[s] * pv[s]).powi(2);
        let all_symbols: f64 = (0..k).map(cov).sum();
        let (full, m_uv, simplified) = match alphabet {
            Alphabet::Coloring => {
                let m: f64 = (0..3).map(|s| (pu[s] * pv[s]).powi(2)).sum();
                ((0..3).map(cov).sum(), m, m)
            }
            Alphabet::IndependentSet => {
                let m = (pu[1] * pv[1]).powi(2);
                (all_symbols, m, 2.0 * m)
            }
        };
        per_edge.push(EdgeCorrelation {
            u,
            v,
            full,
            simplified,
            m_uv,
            all_symbols,
        });
    }
    let mean = |f: fn(&EdgeCorrelation) -> f64| {
        if per_edge.is_empty() {
            0.0
        } else {
            per_edge.iter().map(f).sum::<f64>() / per_edge.len() as f64
        }
    };
    Ok(LocalCorrelation {
        average: mean(|e| e.full),
        simplified_average: mean(|e| e.simplified),
        m_average: mean(|e| e.m_uv),
        all_symbols_average: mean(|e| e.all_symbols),
        max_discrepancy: per_edge
            .iter()
            .map(|e| (e.full - e.simplified).abs())
            .fold(0.0, f64::max),
        per_edge,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalCorrelationCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub global_correlation: f64,
    pub holds: bool,
}

/// Compares the edge-averaged squared covariance (summed over the whole
/// alphabet) with `sqrt(2 r I) + λ`, where `I` is the global correlation.
pub fn verify_local_correlation_lemma(
    pd: &dyn PseudoDistribution,
    g: &Graph,
    r: usize,
    lambda: f64,
) -> Result<LocalCorrelationCheck> {
    let rank = threshold_rank(&random_walk_spectrum(g, false)?, lambda);
    if rank > r {
        return Err(Error::Precondition(format!(
            "graph has {rank} random-walk eigenvalues above {lambda}, more than r = {r}"
        )));
    }
    let lhs = edge_local_correlation(pd, g)?.all_symbols_average;
    let gc = global_correlation(pd)?;
    let rhs = (2.0 * r as f64 * gc).sqrt() + lambda;
    Ok(LocalCorrelationCheck {
        lhs,
        rhs,
        global_correlation: gc,
        holds: lhs <= rhs + 1e-8,
    })
}
