use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{admm, ConstraintResiduals, MomentMatrix, RelaxationProblem, Sense, SolverConfig};
use crate::error::{Error, Result};
use crate::pseudo::{Alphabet, Joint, PseudoDistribution};

/// Diagnostics of one solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionSummary {
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub objective: f64,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub residuals: ConstraintResiduals,
}

#[derive(Debug)]
struct Solution {
    moments: MomentMatrix,
    summary: SolutionSummary,
    warm: super::WarmStart,
}

/// Pseudo-distribution read off a solved moment relaxation. Conditioning
/// pins a vertex and re-solves from the current iterate.
#[derive(Clone, Debug)]
pub struct SdpDistribution {
    problem: Arc<RelaxationProblem>,
    pins: Vec<(usize, usize)>,
    config: SolverConfig,
    solution: Arc<Solution>,
}

impl SdpDistribution {
    pub fn problem(&self) -> &RelaxationProblem {
        &self.problem
    }

    pub fn pins(&self) -> &[(usize, usize)] {
        &self.pins
    }

    pub fn moment_matrix(&self) -> &MomentMatrix {
        &self.solution.moments
    }

    pub fn summary(&self) -> &SolutionSummary {
        &self.solution.summary
    }

    /// JSON dump of the solution: marginals, pairwise blocks, residuals and
    /// eigenvalue extremes.
    pub fn dump(&self) -> serde_json::Value {
        let n = self.problem.n;
        let marginals: Vec<Vec<f64>> = (0..n).map(|u| self.marginal(u)).collect();
        let mut pairs = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                pairs.push(serde_json::json!({ "u": u, "v": v, "p": self.pairwise(u, v).p }));
            }
        }
        serde_json::json!({
            "backend": self.backend_name(),
            "alphabet": self.problem.alphabet,
            "n": n,
            "pins": self.pins,
            "summary": self.solution.summary,
            "marginals": marginals,
            "pairs": pairs,
        })
    }
}

impl PseudoDistribution for SdpDistribution {
    fn alphabet(&self) -> Alphabet {
        self.problem.alphabet
    }

    fn num_vars(&self) -> usize {
        self.problem.n
    }

    fn marginal(&self, u: usize) -> Vec<f64> {
        let m = &self.solution.moments;
        (0..m.alphabet_size)
            .map(|s| m.get(0, m.index(u, s)))
            .collect()
    }

    fn pairwise(&self, u: usize, v: usize) -> Joint {
        if u == v {
            return Joint::from_diagonal(&self.marginal(u));
        }
        let m = &self.solution.moments;
        let k = m.alphabet_size;
        let mut j = Joint::zeros(k);
        for a in 0..k {
            for b in 0..k {
                j.add(a, b, m.get(m.index(u, a), m.index(v, b)));
            }
        }
        j
    }

    fn condition_on(&self, v: usize, symbol: usize) -> Result<Box<dyn PseudoDistribution>> {
        let mut pins = self.pins.clone();
        pins.push((v, symbol));
        if self.marginal(v)[symbol] >= 1.0 - self.tolerance() {
            // Already determined; pinning would not move the solution.
            validate_pins(&self.problem, &pins)?;
            let mut same = self.clone();
            same.pins = pins;
            return Ok(Box::new(same));
        }
        let cfg = SolverConfig {
            warm_start: Some(self.solution.warm.clone()),
            ..self.config.clone()
        };
        Ok(Box::new(pin_and_resolve(&self.problem, &pins, &cfg)?))
    }

    fn tolerance(&self) -> f64 {
        10.0 * self.config.tolerance
    }

    fn backend_name(&self) -> &'static str {
        "sdp"
    }

    fn clone_box(&self) -> Box<dyn PseudoDistribution> {
        Box::new(self.clone())
    }
}

fn validate_pins(p: &RelaxationProblem, pins: &[(usize, usize)]) -> Result<()> {
    let k = p.alphabet_size();
    let mut value = vec![None; p.n];
    for &(v, s) in pins {
        if v >= p.n {
            return Err(Error::VertexOutOfRange { vertex: v, n: p.n });
        }
        if s >= k {
            return Err(Error::InvalidParameter(format!(
                "symbol {s} outside the alphabet"
            )));
        }
        match value[v] {
            Some(t) if t != s => {
                return Err(Error::InfeasiblePin(format!(
                    "vertex {v} pinned to both {} and {}",
                    p.alphabet.symbol_name(t),
                    p.alphabet.symbol_name(s)
                )))
            }
            _ => value[v] = Some(s),
        }
        if p.is_fixed_zero(v, s) {
            return Err(Error::InfeasiblePin(format!(
                "vertex {v} pinned to {}, which the program excludes",
                p.alphabet.symbol_name(s)
            )));
        }
    }
    let conflicting: HashSet<usize> = p.alphabet.conflicting_symbols().iter().copied().collect();
    for &(u, v) in &p.edges {
        if let (Some(a), Some(b)) = (value[u], value[v]) {
            if a == b && conflicting.contains(&a) {
                return Err(Error::InfeasiblePin(format!(
                    "edge {{{u}, {v}}} has both endpoints pinned to {}",
                    p.alphabet.symbol_name(a)
                )));
            }
        }
    }
    if let Some((s, sense, rhs)) = p.budget() {
        let hits = value.iter().filter(|&&x| x == Some(s)).count() as f64;
        let open = value.iter().filter(|x| x.is_none()).count() as f64;
        let violated = match sense {
            Sense::AtMost => hits > rhs + 1e-9,
            Sense::AtLeast => hits + open < rhs - 1e-9,
        };
        if violated {
            return Err(Error::InfeasiblePin(
                "pins alone violate the mass budget".into(),
            ));
        }
    }
    Ok(())
}

fn solve_pinned(
    p: &RelaxationProblem,
    pins: &[(usize, usize)],
    cfg: &SolverConfig,
) -> Result<SdpDistribution> {
    let raw = admm::run(p, pins, cfg)?;
    let (n, k) = (p.n, p.alphabet_size());
    let moments = MomentMatrix {
        n,
        alphabet_size: k,
        order: 1 + n * k,
        entries: raw.y,
    };
    let (min_eigenvalue, max_eigenvalue) = moments.eigen_extremes()?;
    let objective = match p.objective {
        super::Objective::Feasibility => 0.0,
        super::Objective::MinimizeMass { symbol } => (0..n)
            .map(|u| moments.get(0, moments.index(u, symbol)))
            .sum(),
    };
    let mut dist = SdpDistribution {
        problem: Arc::new(p.clone()),
        pins: pins.to_vec(),
        config: SolverConfig {
            warm_start: None,
            ..cfg.clone()
        },
        solution: Arc::new(Solution {
            moments,
            summary: SolutionSummary {
                iterations: raw.iterations,
                primal_residual: raw.primal,
                dual_residual: raw.dual,
                objective,
                min_eigenvalue,
                max_eigenvalue,
                residuals: ConstraintResiduals::default(),
            },
            warm: raw.warm,
        }),
    };
    let residuals = p.residuals(&dist)?;
    Arc::get_mut(&mut dist.solution).unwrap().summary.residuals = residuals;
    Ok(dist)
}

/// Solves the relaxation. Fails with [`Error::Infeasible`] when the
/// iterates show infeasibility evidence and with [`Error::IterationCap`] when
/// they neither converge nor stall.
pub fn solve(p: &RelaxationProblem, cfg: &SolverConfig) -> Result<SdpDistribution> {
    solve_pinned(p, &[], cfg)
}

/// Adds `p_v(σ) = 1` for each pin and re-solves, warm-started from
/// `cfg.warm_start` when present.
pub fn pin_and_resolve(
    p: &RelaxationProblem,
    pins: &[(usize, usize)],
    cfg: &SolverConfig,
) -> Result<SdpDistribution> {
    validate_pins(p, pins)?;
    solve_pinned(p, pins, cfg).map_err(|e| match e {
        Error::Infeasible(msg) if !pins.is_empty() => Error::InfeasiblePin(msg),
        other => other,
    })
}
