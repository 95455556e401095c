//! Random-walk spectra, threshold rank and the local-to-global inequality.

mod eigen;

pub use eigen::{symmetric_eigen, SymmetricEigen, SymmetricMatrix};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Comparison slack for "strictly larger than the threshold": values within
/// this distance of the threshold count as not larger.
pub const THRESHOLD_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Sorted descending.
    pub eigenvalues: Vec<f64>,
    /// Row `k` is the unit eigenvector of `eigenvalues[k]`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub eigenvectors: Option<Vec<Vec<f64>>>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// Random walk matrix `A/d` as a dense row-major array.
pub fn random_walk_matrix(g: &Graph) -> Result<Vec<f64>> {
    if g.degree() == 0 {
        return Err(Error::InvalidParameter(
            "random walk needs degree >= 1".into(),
        ));
    }
    let d = g.degree() as f64;
    Ok(g.adjacency_matrix().into_iter().map(|x| x / d).collect())
}

/// Eigendecomposition of the uniform random walk matrix of a regular graph.
pub fn random_walk_spectrum(g: &Graph, keep_vectors: bool) -> Result<Spectrum> {
    let n = g.n();
    let walk = random_walk_matrix(g)?;
    let eig = symmetric_eigen(&walk, n, keep_vectors)?;
    let top = eig.values[0];
    if (top - 1.0).abs() > 1e-8 || eig.values.iter().any(|&x| x.abs() > 1.0 + 1e-8) {
        return Err(Error::NumericalBreakdown(format!(
            "random walk spectrum out of range: top eigenvalue {top}"
        )));
    }
    let eigenvectors = eig
        .vectors
        .map(|v| v.chunks(n).map(<[f64]>::to_vec).collect());
    Ok(Spectrum {
        eigenvalues: eig.values,
        eigenvectors,
    })
}

/// Number of eigenvalues strictly larger than `eps`.
pub fn threshold_rank(s: &Spectrum, eps: f64) -> usize {
    s.eigenvalues
        .iter()
        .filter(|&&x| x > eps + THRESHOLD_SLACK)
        .count()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalToGlobal {
    /// Average of `M` over directed edges.
    pub lhs: f64,
    /// `(1 - lambda) * sqrt(r * mean(M_ij^2)) + lambda`.
    pub rhs: f64,
    pub holds: bool,
    /// Set when `lambda <= 0`; the bound is only claimed for positive
    /// thresholds and can fail there when `tr(M) < n`.
    pub outside_stated_range: bool,
}

pub const PSD_TOLERANCE: f64 = 1e-8;

/// Evaluates both sides of the local-to-global inequality for a PSD matrix
/// `m` with `tr(m) <= n` on a graph with at most `r` random-walk eigenvalues
/// above `lambda`.
pub fn local_to_global_check(
    m: &SymmetricMatrix,
    g: &Graph,
    lambda: f64,
    r: usize,
) -> Result<LocalToGlobal> {
    let n = g.n();
    if m.order() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            found: m.order(),
        });
    }
    if !(lambda > -1.0 && lambda < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "lambda must lie in (-1, 1), got {lambda}"
        )));
    }
    let min_eig = *m.eigen(false)?.values.last().unwrap();
    if min_eig < -PSD_TOLERANCE {
        return Err(Error::NotPsd {
            min_eigenvalue: min_eig,
        });
    }
    let trace = m.trace();
    let bound = n as f64 * (1.0 + PSD_TOLERANCE);
    if trace > bound {
        return Err(Error::TraceViolation { trace, bound });
    }
    let rank = threshold_rank(&random_walk_spectrum(g, false)?, lambda);
    if rank > r {
        return Err(Error::Precondition(format!(
            "graph has {rank} random-walk eigenvalues above {lambda}, more than r = {r}"
        )));
    }

    let edge_sum: f64 = g.edges().iter().map(|&(u, v)| 2.0 * m.get(u, v)).sum();
    let lhs = edge_sum / (n * g.degree()) as f64;
    let mut sq = 0.0;
    for i in 0..n {
        for j in 0..n {
            sq += m.get(i, j).powi(2);
        }
    }
    let mean_sq = sq / (n * n) as f64;
    let rhs = (1.0 - lambda) * (r as f64 * mean_sq).sqrt() + lambda;
    Ok(LocalToGlobal {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-9,
        outside_stated_range: lambda <= 0.0,
    })
}
