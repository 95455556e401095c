use std::sync::Arc;

use super::{Alphabet, Joint, PseudoDistribution};
use crate::error::{Error, Result};
use crate::graph::{enumerate_independent_sets, enumerate_proper_colorings, Graph};

/// Neumaier-compensated sum.
fn compensated_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

#[derive(Debug)]
struct Moments {
    marginals: Vec<Vec<f64>>,
    /// Upper-triangular pairs `u < v`, indexed by `pair_index`.
    pairs: Vec<Joint>,
}

/// An explicit probability distribution on a finite set of assignments.
#[derive(Clone, Debug)]
pub struct ExactDistribution {
    alphabet: Alphabet,
    n: usize,
    support: Arc<Vec<Vec<u8>>>,
    /// Indices into `support` carrying positive weight.
    active: Vec<usize>,
    weights: Vec<f64>,
    moments: Arc<Moments>,
}

impl ExactDistribution {
    /// Distribution with the given support and weights; weights are
    /// renormalized to sum to one.
    pub fn new(alphabet: Alphabet, support: Vec<Vec<u8>>, weights: Vec<f64>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::Infeasible("empty support".into()));
        }
        if support.len() != weights.len() {
            return Err(Error::SizeMismatch {
                expected: support.len(),
                found: weights.len(),
            });
        }
        let n = support[0].len();
        if let Some(bad) = support.iter().find(|a| a.len() != n) {
            return Err(Error::SizeMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        if support
            .iter()
            .any(|a| a.iter().any(|&s| s as usize >= alphabet.size()))
        {
            return Err(Error::InvalidParameter(
                "assignment symbol outside the alphabet".into(),
            ));
        }
        if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidParameter(
                "weights must be finite and non-negative".into(),
            ));
        }
        let active: Vec<usize> = (0..support.len()).filter(|&i| weights[i] > 0.0).collect();
        Self::from_parts(alphabet, n, Arc::new(support), active, &weights)
    }

    pub fn point_mass(alphabet: Alphabet, assignment: Vec<u8>) -> Self {
        Self::new(alphabet, vec![assignment], vec![1.0]).expect("valid point mass")
    }

    fn from_parts(
        alphabet: Alphabet,
        n: usize,
        support: Arc<Vec<Vec<u8>>>,
        active: Vec<usize>,
        all_weights: &[f64],
    ) -> Result<Self> {
        let total = compensated_sum(active.iter().map(|&i| all_weights[i]));
        if active.is_empty() || total <= 0.0 {
            return Err(Error::Infeasible("distribution has no mass".into()));
        }
        let weights: Vec<f64> = active.iter().map(|&i| all_weights[i] / total).collect();
        let moments = Arc::new(Self::moments(alphabet, n, &support, &active, &weights));
        Ok(ExactDistribution {
            alphabet,
            n,
            support,
            active,
            weights,
            moments,
        })
    }

    fn moments(
        alphabet: Alphabet,
        n: usize,
        support: &[Vec<u8>],
        active: &[usize],
        weights: &[f64],
    ) -> Moments {
        let k = alphabet.size();
        let mut marginals = vec![vec![0.0; k]; n];
        let mut pairs = vec![Joint::zeros(k); n * n.saturating_sub(1) / 2];
        for (&i, &w) in active.iter().zip(weights) {
            let a = &support[i];
            for u in 0..n {
                marginals[u][a[u] as usize] += w;
                for v in u + 1..n {
                    pairs[pair_index(n, u, v)].add(a[u] as usize, a[v] as usize, w);
                }
            }
        }
        Moments { marginals, pairs }
    }

    /// Assignments with positive weight and their (normalized) weights.
    pub fn support(&self) -> impl Iterator<Item = (&[u8], f64)> + '_ {
        self.active
            .iter()
            .zip(&self.weights)
            .map(|(&i, &w)| (self.support[i].as_slice(), w))
    }

    pub fn support_size(&self) -> usize {
        self.active.len()
    }

    /// Bayes conditioning on `X_v = symbol`: restricts the support and
    /// renormalizes.
    pub fn conditioned(&self, v: usize, symbol: usize) -> Result<ExactDistribution> {
        if v >= self.n {
            return Err(Error::VertexOutOfRange {
                vertex: v,
                n: self.n,
            });
        }
        let keep: Vec<usize> = self
            .active
            .iter()
            .copied()
            .filter(|&i| self.support[i][v] as usize == symbol)
            .collect();
        if keep.len() == self.active.len() {
            return Ok(self.clone());
        }
        if keep.is_empty() {
            return Err(Error::ZeroProbability { vertex: v, symbol });
        }
        let mut all = vec![0.0; self.support.len()];
        for (&i, &w) in self.active.iter().zip(&self.weights) {
            all[i] = w;
        }
        Self::from_parts(self.alphabet, self.n, Arc::clone(&self.support), keep, &all)
    }
}

#[inline]
fn pair_index(n: usize, u: usize, v: usize) -> usize {
    debug_assert!(u < v);
    u * n - u * (u + 1) / 2 + (v - u - 1)
}

impl PseudoDistribution for ExactDistribution {
    fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    fn num_vars(&self) -> usize {
        self.n
    }

    fn marginal(&self, u: usize) -> Vec<f64> {
        self.moments.marginals[u].clone()
    }

    fn pairwise(&self, u: usize, v: usize) -> Joint {
        use std::cmp::Ordering;
        match u.cmp(&v) {
            Ordering::Less => self.moments.pairs[pair_index(self.n, u, v)].clone(),
            Ordering::Greater => self.moments.pairs[pair_index(self.n, v, u)].transpose(),
            Ordering::Equal => Joint::from_diagonal(&self.moments.marginals[u]),
        }
    }

    fn condition_on(&self, v: usize, symbol: usize) -> Result<Box<dyn PseudoDistribution>> {
        Ok(Box::new(self.conditioned(v, symbol)?))
    }

    fn tolerance(&self) -> f64 {
        1e-12
    }

    fn backend_name(&self) -> &'static str {
        "exact"
    }

    fn clone_box(&self) -> Box<dyn PseudoDistribution> {
        Box::new(self.clone())
    }
}

/// Uniform distribution over proper partial 3-colorings with at most
/// `floor(delta * n)` blank vertices.
pub fn exact_from_colorings(g: &Graph, delta: f64, cap: usize) -> Result<ExactDistribution> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidParameter(format!(
            "delta must lie in [0, 1], got {delta}"
        )));
    }
    let budget = (delta * g.n() as f64 + 1e-9).floor() as usize;
    let support = enumerate_proper_colorings(g, 3, budget, cap)?;
    if support.is_empty() {
        return Err(Error::Infeasible(format!(
            "no proper 3-coloring with at most {budget} blank vertices"
        )));
    }
    let weights = vec![1.0; support.len()];
    ExactDistribution::new(Alphabet::Coloring, support, weights)
}

/// Uniform distribution over independent sets of size at least
/// `(1/2 - delta) * n`, as `{0,1}` indicator assignments.
pub fn exact_from_independent_sets(g: &Graph, delta: f64, cap: usize) -> Result<ExactDistribution> {
    if !(0.0..0.5).contains(&delta) {
        return Err(Error::InvalidParameter(format!(
            "delta must lie in [0, 1/2), got {delta}"
        )));
    }
    let min_size = ((0.5 - delta) * g.n() as f64 - 1e-9).ceil().max(0.0) as usize;
    let support = enumerate_independent_sets(g, min_size, cap)?;
    if support.is_empty() {
        return Err(Error::Infeasible(format!(
            "no independent set of size {min_size}"
        )));
    }
    let weights = vec![1.0; support.len()];
    ExactDistribution::new(Alphabet::IndependentSet, support, weights)
}
