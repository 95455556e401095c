use serde::{Deserialize, Serialize};

use crate::graph::PartialColoring;
use crate::pseudo::Transcript;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColoringSets {
    #[serde(rename = "B")]
    pub b: Vec<usize>,
    #[serde(rename = "S1")]
    pub s1: Vec<usize>,
    #[serde(rename = "S2")]
    pub s2: Vec<usize>,
    #[serde(rename = "S3")]
    pub s3: Vec<usize>,
    #[serde(rename = "S")]
    pub s: Vec<usize>,
    #[serde(rename = "T")]
    pub t: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndependentSets {
    #[serde(rename = "S")]
    pub s: Vec<usize>,
    #[serde(rename = "A")]
    pub a: Vec<usize>,
    #[serde(rename = "T")]
    pub t: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Sets {
    Coloring(ColoringSets),
    IndependentSet(IndependentSets),
}

/// Statistics of `M_uv` over all edges and over the edges inside `T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeStats {
    pub edges: usize,
    pub min: f64,
    pub mean: f64,
    pub max: f64,
    pub t_edges: usize,
    pub t_edge_min: Option<f64>,
    /// `1/50` for coloring, `(ε/2)⁴` for independent set.
    pub t_edge_threshold: Option<f64>,
    /// Inside-`T` edges with `M_uv` below the threshold (minus `1e-6`).
    pub t_edges_below_threshold: usize,
    /// Lower bound on `M_uv` for inside-`T` coloring edges:
    /// `(1/3)(1/4 - γ/2 - γ)²`.
    pub lemma_bound: Option<f64>,
    /// The same bound with the blank cost counted in full:
    /// `(1/3)(1/4 - η - γ)²` with `η = γ`. Still above `1/50`.
    pub corrected_lemma_bound: Option<f64>,
    /// Largest `|full - simplified|` over all edges.
    pub max_discrepancy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkovBound {
    /// `|B|` as reported (heavy-blank vertices outside `S`).
    pub measured: usize,
    /// All vertices with blank mass at least `γ`.
    pub heavy_blank: usize,
    pub blank_mass: f64,
    /// `δ n / γ`, when `δ` is known.
    pub bound: Option<f64>,
    pub holds: Option<bool>,
}

/// Counts edges between a set `X` and its complement `T` two ways:
/// `e(X, T) = d|T| - 2e(T) = d|X| - 2e(X)`, and checks
/// `2e(T) >= (|T| - |X|) d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeCountIdentity {
    pub cut: i64,
    pub via_t: i64,
    pub via_complement: i64,
    pub two_e_t: i64,
    pub lower_bound: i64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalCorrelationChain {
    pub measured: f64,
    /// `ε/50` for coloring, `ε⁵/50` for independent set.
    pub cap: Option<f64>,
    /// `sqrt(2 r I) + λ` for the final distribution.
    pub lemma_rhs: Option<f64>,
    /// `threshold · 2e(T) / (nd)`: what the inside-`T` edges alone force.
    pub forced_by_t: Option<f64>,
    /// `ε⁵/24`, the independent-set lower bound when `|A| < (1/2 - ε/3) n`.
    pub contradiction_bound: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    #[serde(rename = "per_edge_M_stats")]
    pub per_edge_m_stats: EdgeStats,
    #[serde(rename = "markov_B_bound")]
    pub markov_b_bound: Option<MarkovBound>,
    pub edge_count_identity: EdgeCountIdentity,
    pub local_correlation: LocalCorrelationChain,
    /// Independent set only: `(ε/2)|A| + |S| + (1/2 + γ)(n - |S| - |A|)`
    /// against the mass `Σ_u p_u(1)`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mass_upper_bound: Option<MassBound>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassBound {
    pub mass: f64,
    pub upper_bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditioningSummary {
    pub rounds: usize,
    pub samples: usize,
    pub sequences_run: usize,
    pub prefix_length: usize,
    pub pins: Vec<(usize, usize)>,
    pub initial_correlation: f64,
    pub final_correlation: f64,
    pub target: f64,
    pub reached: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub transcript: Option<Transcript>,
}

/// Target bound versus achieved size, with the flags that qualify it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ledger {
    pub target: f64,
    pub achieved: usize,
    pub met: bool,
    /// Constant multiplying `δ n` in the coloring target.
    pub delta_constant: Option<f64>,
    /// The target is not positive, so the empty output meets it.
    pub degenerate_target: bool,
    /// Produced by the relaxation backend, whose guarantee is empirical.
    pub empirical: bool,
    /// `λ` is below the solver tolerance.
    pub outside_numerical_reach: bool,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundingReport {
    pub mode: String,
    pub n: usize,
    pub d: usize,
    pub eps: Option<f64>,
    pub delta: Option<f64>,
    pub lambda: Option<f64>,
    pub r: Option<usize>,
    pub gamma: f64,
    pub global_correlation: f64,
    pub local_correlation: f64,
    pub sets: Sets,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub coloring: Option<PartialColoring>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub independent_set: Option<Vec<usize>>,
    pub valid: bool,
    pub target: Option<f64>,
    pub achieved: usize,
    pub diagnostics: Diagnostics,
    pub conditioning: Option<ConditioningSummary>,
    pub ledger: Option<Ledger>,
}

impl RoundingReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn coloring_sets(&self) -> Option<&ColoringSets> {
        match &self.sets {
            Sets::Coloring(s) => Some(s),
            Sets::IndependentSet(_) => None,
        }
    }

    pub fn independent_sets(&self) -> Option<&IndependentSets> {
        match &self.sets {
            Sets::IndependentSet(s) => Some(s),
            Sets::Coloring(_) => None,
        }
    }
}
