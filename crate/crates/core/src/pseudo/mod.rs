//! Pseudo-distributions over `Σ^n`: marginals, pairwise joints and
//! conditioning, with an exact backend and information-theoretic measures.

mod conditioning;
mod exact;
mod info;

pub use conditioning::{
    condition, conditioning_loop, conditioning_profile, ConditioningConfig, ConditioningOutcome,
    PrefixEstimate, SequenceRecord, StepRecord, Transcript,
};
pub use exact::{exact_from_colorings, exact_from_independent_sets, ExactDistribution};
pub use info::{
    entropy, global_correlation, mutual_information, mutual_information_of, pinsker_gap,
    pinsker_gap_of, PinskerGap, NEGATIVE_INFORMATION_TOLERANCE,
};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Value alphabet of the program.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alphabet {
    /// Colors `1, 2, 3` at indices `0, 1, 2` and blank at index `3`.
    Coloring,
    /// `0` (outside the set) at index `0` and `1` (inside) at index `1`.
    IndependentSet,
}

impl Alphabet {
    pub const BLANK: usize = 3;

    pub fn size(self) -> usize {
        match self {
            Alphabet::Coloring => 4,
            Alphabet::IndependentSet => 2,
        }
    }

    /// The symbol whose indicator is implied by the others (blank for
    /// coloring, `0` for independent set).
    pub fn implied_symbol(self) -> usize {
        match self {
            Alphabet::Coloring => Self::BLANK,
            Alphabet::IndependentSet => 0,
        }
    }

    /// Symbols that may not appear on both endpoints of an edge.
    pub fn conflicting_symbols(self) -> &'static [usize] {
        match self {
            Alphabet::Coloring => &[0, 1, 2],
            Alphabet::IndependentSet => &[1],
        }
    }

    pub fn symbol_name(self, s: usize) -> String {
        match (self, s) {
            (Alphabet::Coloring, Self::BLANK) => "blank".into(),
            (Alphabet::Coloring, c) => (c + 1).to_string(),
            (Alphabet::IndependentSet, b) => b.to_string(),
        }
    }
}

/// Joint distribution of a pair of variables, row-major over `Σ x Σ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Joint {
    pub size: usize,
    pub p: Vec<f64>,
}

impl Joint {
    pub fn zeros(size: usize) -> Self {
        Joint {
            size,
            p: vec![0.0; size * size],
        }
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.p[a * self.size + b]
    }

    #[inline]
    pub fn add(&mut self, a: usize, b: usize, w: f64) {
        self.p[a * self.size + b] += w;
    }

    pub fn transpose(&self) -> Joint {
        let k = self.size;
        let mut t = Joint::zeros(k);
        for a in 0..k {
            for b in 0..k {
                t.p[b * k + a] = self.p[a * k + b];
            }
        }
        t
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.p.chunks(self.size).map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        (0..self.size)
            .map(|b| (0..self.size).map(|a| self.get(a, b)).sum())
            .collect()
    }

    pub fn from_diagonal(marginal: &[f64]) -> Joint {
        let mut j = Joint::zeros(marginal.len());
        for (a, &p) in marginal.iter().enumerate() {
            j.add(a, a, p);
        }
        j
    }
}

/// Access to first and second moments of a distribution (or relaxation of
/// one) over `Σ^n`, and conditioning on single-variable events.
pub trait PseudoDistribution: fmt::Debug + Send + Sync {
    fn alphabet(&self) -> Alphabet;

    fn num_vars(&self) -> usize;

    /// `Pr[X_u = σ]` for each `σ`.
    fn marginal(&self, u: usize) -> Vec<f64>;

    /// `Pr[X_u = σ, X_v = σ']`; for `u == v` the diagonal joint.
    fn pairwise(&self, u: usize, v: usize) -> Joint;

    /// Conditions on `X_v = symbol`. Callers should go through
    /// [`condition`], which checks the event has positive probability.
    fn condition_on(&self, v: usize, symbol: usize) -> Result<Box<dyn PseudoDistribution>>;

    /// Numerical tolerance the backend guarantees for its invariants.
    fn tolerance(&self) -> f64;

    fn backend_name(&self) -> &'static str;

    fn clone_box(&self) -> Box<dyn PseudoDistribution>;

    /// Whether every marginal is within `tol` of a point mass.
    fn is_integral(&self, tol: f64) -> bool {
        (0..self.num_vars()).all(|u| self.marginal(u).iter().any(|&p| p >= 1.0 - tol))
    }
}

impl Clone for Box<dyn PseudoDistribution> {
    fn clone(&self) -> Self {
        self.clone_box()
    }
}

#[cfg(test)]
pub(crate) mod testing {
    use super::*;

    /// Checks marginal/pairwise consistency and symmetry for every pair.
    pub fn assert_consistent(pd: &dyn PseudoDistribution, tol: f64) {
        let n = pd.num_vars();
        for u in 0..n {
            let mu = pd.marginal(u);
            assert!((mu.iter().sum::<f64>() - 1.0).abs() <= tol);
            assert!(mu.iter().all(|&p| p >= -tol && p <= 1.0 + tol));
            for v in 0..n {
                let j = pd.pairwise(u, v);
                for (a, b) in j.row_sums().iter().zip(&mu) {
                    assert!((a - b).abs() <= tol, "row sums of ({u},{v})");
                }
                let mv = pd.marginal(v);
                for (a, b) in j.col_sums().iter().zip(&mv) {
                    assert!((a - b).abs() <= tol, "col sums of ({u},{v})");
                }
                let back = pd.pairwise(v, u).transpose();
                for (a, b) in j.p.iter().zip(&back.p) {
                    assert!((a - b).abs() <= tol);
                }
            }
        }
    }
}
