//! Degree-2 moment relaxations of the coloring and independent-set programs
//! and an operator-splitting solver for them.
//!
//! The relaxation keeps pairwise local distributions `p_uv` for every pair
//! of vertices and asks that the moment matrix of the indicators `Y_{u,σ}`
//! be PSD. Conditioning is realized by pinning a vertex and re-solving.

mod admm;
mod backend;

pub use backend::{pin_and_resolve, solve, SdpDistribution, SolutionSummary};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::pseudo::{Alphabet, PseudoDistribution};
use crate::spectral::symmetric_eigen;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    AtMost,
    AtLeast,
}

/// One row of the constraint list. Non-negativity of every `p_u` and `p_uv`
/// entry is implicit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Constraint {
    /// `Σ_σ p_u(σ) = 1`
    Simplex { vertex: usize },
    /// Row and column sums of `p_uv` equal `p_u` and `p_v`.
    Consistency { u: usize, v: usize },
    /// `p_uv(σ, σ) = 0` on an edge.
    Edge { u: usize, v: usize, symbol: usize },
    /// `p_u(σ) = 0`; used for blanks when no blank budget is allowed.
    FixedZero { vertex: usize, symbol: usize },
    /// `Σ_u p_u(symbol)` compared against `rhs`.
    Budget {
        symbol: usize,
        sense: Sense,
        rhs: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Objective {
    Feasibility,
    /// Minimize `Σ_u p_u(symbol)`.
    MinimizeMass {
        symbol: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelaxationProblem {
    pub alphabet: Alphabet,
    pub n: usize,
    pub delta: f64,
    pub edges: Vec<(usize, usize)>,
    pub constraints: Vec<Constraint>,
    /// Order `1 + n|Σ|` of the PSD block.
    pub psd_order: usize,
    pub objective: Objective,
}

fn base_constraints(g: &Graph, alphabet: Alphabet) -> Vec<Constraint> {
    let n = g.n();
    let mut cs: Vec<Constraint> = (0..n)
        .map(|vertex| Constraint::Simplex { vertex })
        .collect();
    for u in 0..n {
        for v in u + 1..n {
            cs.push(Constraint::Consistency { u, v });
        }
    }
    for &(u, v) in g.edges() {
        for &symbol in alphabet.conflicting_symbols() {
            cs.push(Constraint::Edge { u, v, symbol });
        }
    }
    cs
}

/// Relaxation of the program over `[3] ∪ {⊥}` asking for a proper partial
/// 3-coloring with at most `delta * n` blanks. With `delta = 0` blanks are
/// fixed to zero instead of carrying a budget row.
pub fn build_coloring_relaxation(g: &Graph, delta: f64) -> Result<RelaxationProblem> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidParameter(format!(
            "delta must lie in [0, 1], got {delta}"
        )));
    }
    let alphabet = Alphabet::Coloring;
    let n = g.n();
    let mut constraints = base_constraints(g, alphabet);
    if delta > 0.0 {
        constraints.push(Constraint::Budget {
            symbol: Alphabet::BLANK,
            sense: Sense::AtMost,
            rhs: delta * n as f64,
        });
    } else {
        constraints.extend((0..n).map(|vertex| Constraint::FixedZero {
            vertex,
            symbol: Alphabet::BLANK,
        }));
    }
    Ok(RelaxationProblem {
        alphabet,
        n,
        delta,
        edges: g.edges().to_vec(),
        constraints,
        psd_order: 1 + n * alphabet.size(),
        objective: Objective::MinimizeMass {
            symbol: Alphabet::BLANK,
        },
    })
}

/// Relaxation of the program over `{0, 1}` asking for an independent set
/// of size at least `(1/2 - delta) * n`.
pub fn build_is_relaxation(g: &Graph, delta: f64) -> Result<RelaxationProblem> {
    if !(0.0..0.5).contains(&delta) {
        return Err(Error::InvalidParameter(format!(
            "delta must lie in [0, 1/2), got {delta}"
        )));
    }
    let alphabet = Alphabet::IndependentSet;
    let n = g.n();
    let mut constraints = base_constraints(g, alphabet);
    constraints.push(Constraint::Budget {
        symbol: 1,
        sense: Sense::AtLeast,
        rhs: (0.5 - delta) * n as f64,
    });
    Ok(RelaxationProblem {
        alphabet,
        n,
        delta,
        edges: g.edges().to_vec(),
        constraints,
        psd_order: 1 + n * alphabet.size(),
        objective: Objective::Feasibility,
    })
}

/// Largest violation of each constraint family.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConstraintResiduals {
    pub simplex: f64,
    pub consistency: f64,
    pub nonnegativity: f64,
    pub edge: f64,
    pub fixed: f64,
    pub budget: f64,
}

impl ConstraintResiduals {
    pub fn max(&self) -> f64 {
        [
            self.simplex,
            self.consistency,
            self.nonnegativity,
            self.edge,
            self.fixed,
            self.budget,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

impl RelaxationProblem {
    pub fn alphabet_size(&self) -> usize {
        self.alphabet.size()
    }

    /// Evaluates every constraint on the locals of `pd`.
    pub fn residuals(&self, pd: &dyn PseudoDistribution) -> Result<ConstraintResiduals> {
        if pd.alphabet() != self.alphabet || pd.num_vars() != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                found: pd.num_vars(),
            });
        }
        let marginals: Vec<Vec<f64>> = (0..self.n).map(|u| pd.marginal(u)).collect();
        let mut r = ConstraintResiduals::default();
        let neg = |x: f64| (-x).max(0.0);
        for c in &self.constraints {
            match *c {
                Constraint::Simplex { vertex } => {
                    let m = &marginals[vertex];
                    r.simplex = r.simplex.max((m.iter().sum::<f64>() - 1.0).abs());
                    r.nonnegativity = m.iter().fold(r.nonnegativity, |acc, &x| acc.max(neg(x)));
                }
                Constraint::Consistency { u, v } => {
                    let j = pd.pairwise(u, v);
                    for (a, b) in j.row_sums().iter().zip(&marginals[u]) {
                        r.consistency = r.consistency.max((a - b).abs());
                    }
                    for (a, b) in j.col_sums().iter().zip(&marginals[v]) {
                        r.consistency = r.consistency.max((a - b).abs());
                    }
                    r.nonnegativity = j.p.iter().fold(r.nonnegativity, |acc, &x| acc.max(neg(x)));
                }
                Constraint::Edge { u, v, symbol } => {
                    r.edge = r.edge.max(pd.pairwise(u, v).get(symbol, symbol).abs());
                }
                Constraint::FixedZero { vertex, symbol } => {
                    r.fixed = r.fixed.max(marginals[vertex][symbol].abs());
                }
                Constraint::Budget { symbol, sense, rhs } => {
                    let total: f64 = marginals.iter().map(|m| m[symbol]).sum();
                    let miss = match sense {
                        Sense::AtMost => total - rhs,
                        Sense::AtLeast => rhs - total,
                    };
                    r.budget = r.budget.max(miss.max(0.0));
                }
            }
        }
        Ok(r)
    }

    pub(crate) fn budget(&self) -> Option<(usize, Sense, f64)> {
        self.constraints.iter().find_map(|c| match *c {
            Constraint::Budget { symbol, sense, rhs } => Some((symbol, sense, rhs)),
            _ => None,
        })
    }

    pub(crate) fn is_fixed_zero(&self, vertex: usize, symbol: usize) -> bool {
        self.constraints
            .contains(&Constraint::FixedZero { vertex, symbol })
    }
}

/// Symmetric moment matrix indexed by `{1} ∪ {(u, σ)}`, with `(u, σ)` at
/// position `1 + u|Σ| + σ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentMatrix {
    pub n: usize,
    pub alphabet_size: usize,
    pub order: usize,
    /// Dense row-major entries.
    pub entries: Vec<f64>,
}

impl MomentMatrix {
    #[inline]
    pub fn index(&self, u: usize, symbol: usize) -> usize {
        1 + u * self.alphabet_size + symbol
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.order + j]
    }

    /// Moment matrix induced by the locals of `pd`.
    pub fn from_pseudo(pd: &dyn PseudoDistribution) -> MomentMatrix {
        let n = pd.num_vars();
        let k = pd.alphabet().size();
        let order = 1 + n * k;
        let mut entries = vec![0.0; order * order];
        entries[0] = 1.0;
        for u in 0..n {
            let mu = pd.marginal(u);
            for (s, &p) in mu.iter().enumerate() {
                let i = 1 + u * k + s;
                entries[i] = p;
                entries[i * order] = p;
                entries[i * order + i] = p;
            }
            for v in u + 1..n {
                let j = pd.pairwise(u, v);
                for a in 0..k {
                    for b in 0..k {
                        let (i, l) = (1 + u * k + a, 1 + v * k + b);
                        entries[i * order + l] = j.get(a, b);
                        entries[l * order + i] = j.get(a, b);
                    }
                }
            }
        }
        MomentMatrix {
            n,
            alphabet_size: k,
            order,
            entries,
        }
    }

    /// Smallest and largest eigenvalue.
    pub fn eigen_extremes(&self) -> Result<(f64, f64)> {
        let eig = symmetric_eigen(&self.entries, self.order, false)?;
        Ok((*eig.values.last().unwrap(), eig.values[0]))
    }
}

/// Warm-start payload: the splitting iterate and penalty.
#[derive(Clone, Debug, PartialEq)]
pub struct WarmStart {
    pub t: Vec<f64>,
    pub rho: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Bound on both the primal and dual residual (max-norm).
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Over-relaxation parameter in `(0, 2)`.
    pub over_relaxation: f64,
    /// Initial ADMM penalty.
    pub penalty: f64,
    #[serde(skip)]
    pub warm_start: Option<WarmStart>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tolerance: 1e-7,
            max_iterations: 200_000,
            over_relaxation: 1.0,
            penalty: 0.1,
            warm_start: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidParameter(
                "solver tolerance must be positive".into(),
            ));
        }
        if self.max_iterations < 1 {
            return Err(Error::InvalidParameter(
                "solver needs at least one iteration".into(),
            ));
        }
        if !(self.over_relaxation > 0.0 && self.over_relaxation < 2.0) {
            return Err(Error::InvalidParameter(
                "over-relaxation must lie in (0, 2)".into(),
            ));
        }
        if !(self.penalty > 0.0) {
            return Err(Error::InvalidParameter("penalty must be positive".into()));
        }
        Ok(())
    }
}
