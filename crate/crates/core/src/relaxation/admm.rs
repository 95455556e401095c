//! Two-set Douglas-Rachford splitting for the moment relaxation.
//!
//! `S1` is the PSD cone intersected with the consistency subspace
//! `{Y : Σ_σ Y[(u,σ), ·] = Y[0, ·]}`; projecting onto it is a PSD projection
//! in an orthonormal basis of that subspace. `S2` collects the entrywise
//! constraints (normalization, ties between `Y[0,j]` and `Y[j,j]`,
//! non-negativity, exclusivity, edges, pins and the mass budget), whose
//! Frobenius projection is closed form.

use super::{RelaxationProblem, Sense, SolverConfig, WarmStart};
use crate::error::{Error, Result};
use crate::spectral::symmetric_eigen;

/// Orthonormal basis of the consistency subspace of `R^{1 + nk}`: one Helmert
/// block per vertex plus a single vector joining coordinate 0 to all blocks.
pub(crate) struct Basis {
    n: usize,
    k: usize,
    full: usize,
    reduced: usize,
    helmert: Vec<Vec<f64>>,
    head: f64,
    tail: f64,
}

impl Basis {
    pub(crate) fn new(n: usize, k: usize) -> Self {
        let helmert = (0..k - 1)
            .map(|h| {
                let norm = (((h + 1) * (h + 2)) as f64).sqrt();
                let mut row = vec![0.0; k];
                row[..=h].fill(1.0 / norm);
                row[h + 1] = -((h + 1) as f64) / norm;
                row
            })
            .collect();
        let norm = (1.0 + n as f64 / k as f64).sqrt();
        Basis {
            n,
            k,
            full: 1 + n * k,
            reduced: 1 + n * (k - 1),
            helmert,
            head: 1.0 / norm,
            tail: 1.0 / (k as f64 * norm),
        }
    }

    /// `A V` for `A` with `rows` rows of length `full`.
    fn right_mul(&self, a: &[f64], rows: usize) -> Vec<f64> {
        let (f, m, k) = (self.full, self.reduced, self.k);
        let mut out = vec![0.0; rows * m];
        for (row, o) in a.chunks_exact(f).zip(out.chunks_exact_mut(m)).take(rows) {
            let total: f64 = row[1..].iter().sum();
            o[0] = self.head * row[0] + self.tail * total;
            for u in 0..self.n {
                let block = &row[1 + u * k..1 + (u + 1) * k];
                for (h, hv) in self.helmert.iter().enumerate() {
                    o[1 + u * (k - 1) + h] = hv.iter().zip(block).map(|(x, y)| x * y).sum();
                }
            }
        }
        out
    }

    /// `B Vᵀ` for `B` with `rows` rows of length `reduced`.
    fn right_mul_t(&self, b: &[f64], rows: usize) -> Vec<f64> {
        let (f, m, k) = (self.full, self.reduced, self.k);
        let mut out = vec![0.0; rows * f];
        for (row, o) in b.chunks_exact(m).zip(out.chunks_exact_mut(f)).take(rows) {
            o[0] = self.head * row[0];
            for u in 0..self.n {
                let coef = &row[1 + u * (k - 1)..1 + (u + 1) * (k - 1)];
                for s in 0..k {
                    let mut x = self.tail * row[0];
                    for (h, c) in coef.iter().enumerate() {
                        x += c * self.helmert[h][s];
                    }
                    o[1 + u * k + s] = x;
                }
            }
        }
        out
    }
}

fn transpose(a: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut t = vec![0.0; rows * cols];
    for i in 0..rows {
        for j in 0..cols {
            t[j * rows + i] = a[i * cols + j];
        }
    }
    t
}

/// Adds `c g gᵀ` to the symmetric `y`, writing both triangles.
fn rank_one_update(y: &mut [f64], f: usize, g: &[f64], c: f64) {
    for i in 0..f {
        let gi = c * g[i];
        if gi == 0.0 {
            continue;
        }
        let row = &mut y[i * f..(i + 1) * f];
        for (x, gj) in row.iter_mut().zip(g) {
            *x += gi * gj;
        }
    }
}

/// Frobenius projection onto `S1`.
pub(crate) fn project_psd_subspace(basis: &Basis, x: &[f64]) -> Result<Vec<f64>> {
    let (f, m) = (basis.full, basis.reduced);
    let xv = basis.right_mul(x, f);
    let w = basis.right_mul(&transpose(&xv, f, m), m);
    let eig = symmetric_eigen(&w, m, true)?;
    if eig.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalBreakdown(
            "non-finite eigenvalue in PSD projection".into(),
        ));
    }
    let positive = eig.values.iter().filter(|&&v| v > 0.0).count();
    let lift = |k: usize| basis.right_mul_t(eig.vector(k).unwrap(), 1);
    let mut y;
    if positive <= m - positive {
        y = vec![0.0; f * f];
        for k in 0..positive {
            rank_one_update(&mut y, f, &lift(k), eig.values[k]);
        }
    } else {
        // V W Vᵀ minus the negative part.
        let wt = basis.right_mul_t(&w, m);
        y = basis.right_mul_t(&transpose(&wt, m, f), f);
        for k in positive..m {
            rank_one_update(&mut y, f, &lift(k), -eig.values[k]);
        }
    }
    for i in 0..f {
        for j in i + 1..f {
            let s = 0.5 * (y[i * f + j] + y[j * f + i]);
            y[i * f + j] = s;
            y[j * f + i] = s;
        }
    }
    Ok(y)
}

/// The entrywise structure of `S2` for one problem and pin set.
pub(crate) struct Layout {
    n: usize,
    k: usize,
    f: usize,
    /// Rows forced to zero (fixed-zero symbols and the other symbols of a
    /// pinned vertex).
    zero: Vec<bool>,
    /// Tie groups fixed to one.
    one: Vec<bool>,
    conflict: Vec<(usize, usize)>,
    budget: Option<(usize, f64, f64)>,
    cost: Vec<usize>,
}

impl Layout {
    pub(crate) fn new(p: &RelaxationProblem, pins: &[(usize, usize)]) -> Layout {
        let (n, k) = (p.n, p.alphabet_size());
        let f = 1 + n * k;
        let idx = |u: usize, s: usize| 1 + u * k + s;
        let mut zero = vec![false; f];
        let mut one = vec![false; f];
        for u in 0..n {
            for s in 0..k {
                zero[idx(u, s)] = p.is_fixed_zero(u, s);
            }
        }
        for &(v, s) in pins {
            for t in 0..k {
                if t == s {
                    one[idx(v, t)] = true;
                } else {
                    zero[idx(v, t)] = true;
                }
            }
        }
        let mut conflict = Vec::new();
        for &(u, v) in &p.edges {
            for &s in p.alphabet.conflicting_symbols() {
                conflict.push((idx(u, s), idx(v, s)));
            }
        }
        let budget = p.budget().map(|(s, sense, rhs)| match sense {
            Sense::AtMost => (s, f64::NEG_INFINITY, rhs),
            Sense::AtLeast => (s, rhs, f64::INFINITY),
        });
        let cost = match p.objective {
            super::Objective::Feasibility => Vec::new(),
            super::Objective::MinimizeMass { symbol } => (0..n)
                .map(|u| idx(u, symbol))
                .filter(|&j| !zero[j] && !one[j])
                .collect(),
        };
        Layout {
            n,
            k,
            f,
            zero,
            one,
            conflict,
            budget,
            cost,
        }
    }

    /// Frobenius projection onto `S2`.
    fn project(&self, a: &[f64]) -> Vec<f64> {
        let f = self.f;
        let mut z: Vec<f64> = a.iter().map(|&x| x.max(0.0)).collect();
        z[0] = 1.0;
        let mut ties: Vec<f64> = (0..f)
            .map(|j| (a[j] + a[j * f] + a[j * f + j]) / 3.0)
            .collect();
        if let Some((s, lo, hi)) = self.budget {
            let mut fixed = 0.0;
            let mut free = Vec::new();
            for u in 0..self.n {
                let j = 1 + u * self.k + s;
                if self.one[j] {
                    fixed += 1.0;
                } else if !self.zero[j] {
                    free.push(j);
                }
            }
            let vals: Vec<f64> = free.iter().map(|&j| ties[j]).collect();
            let theta = budget_shift(&vals, lo - fixed, hi - fixed);
            for &j in &free {
                ties[j] -= theta;
            }
        }
        for j in 1..f {
            let t = if self.zero[j] {
                0.0
            } else if self.one[j] {
                1.0
            } else {
                ties[j].max(0.0)
            };
            z[j] = t;
            z[j * f] = t;
            z[j * f + j] = t;
        }
        for u in 0..self.n {
            let base = 1 + u * self.k;
            for s in 0..self.k {
                for t in 0..self.k {
                    if s != t {
                        z[(base + s) * f + base + t] = 0.0;
                    }
                }
            }
        }
        for &(i, j) in &self.conflict {
            z[i * f + j] = 0.0;
            z[j * f + i] = 0.0;
        }
        for j in 1..f {
            if self.zero[j] {
                for i in 0..f {
                    z[i * f + j] = 0.0;
                    z[j * f + i] = 0.0;
                }
            }
        }
        z
    }

    /// Moment matrix of the product distribution whose marginals are
    /// uniform over the symbols each vertex may take.
    fn product_start(&self) -> Vec<f64> {
        let (f, k) = (self.f, self.k);
        let mut x = vec![0.0; f];
        x[0] = 1.0;
        for u in 0..self.n {
            let allowed: Vec<usize> = (0..k)
                .map(|s| 1 + u * k + s)
                .filter(|&j| !self.zero[j])
                .collect();
            for &j in &allowed {
                x[j] = 1.0 / allowed.len() as f64;
            }
        }
        let mut y = vec![0.0; f * f];
        for i in 0..f {
            for j in 0..f {
                y[i * f + j] = x[i] * x[j];
            }
        }
        for u in 0..self.n {
            let base = 1 + u * k;
            for s in 0..k {
                for t in 0..k {
                    let (i, j) = (base + s, base + t);
                    y[i * f + j] = if s == t { x[i] } else { 0.0 };
                }
            }
        }
        self.project(&y)
    }
}

/// `θ` such that `Σ_i max(0, a_i - θ)` lies in `[lo, hi]` with `θ` of least
/// magnitude.
fn budget_shift(a: &[f64], lo: f64, hi: f64) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let mass: f64 = a.iter().map(|&x| x.max(0.0)).sum();
    let target = if mass > hi {
        hi
    } else if mass < lo {
        lo
    } else {
        return 0.0;
    };
    let mut s = a.to_vec();
    s.sort_by(|x, y| y.total_cmp(x));
    if target <= 0.0 {
        return s[0];
    }
    let mut prefix = 0.0;
    for j in 0..s.len() {
        prefix += s[j];
        let theta = (prefix - target) / (j + 1) as f64;
        if j + 1 == s.len() || s[j + 1] <= theta {
            return theta;
        }
    }
    unreachable!()
}

pub(crate) struct RawSolution {
    pub y: Vec<f64>,
    pub warm: WarmStart,
    pub iterations: usize,
    pub primal: f64,
    pub dual: f64,
}

const ANDERSON_MEMORY: usize = 8;
const PLATEAU_EVERY: usize = 500;
const PLATEAU_CHECKS: usize = 3;
const PLATEAU_MIN_ITERATIONS: usize = 3000;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves the small dense system `a x = b` by Gaussian elimination with
/// partial pivoting; `None` when it is numerically singular.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let m = b.len();
    for c in 0..m {
        let piv = (c..m).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[piv][c].abs() < 1e-300 {
            return None;
        }
        a.swap(c, piv);
        b.swap(c, piv);
        for r in c + 1..m {
            let factor = a[r][c] / a[c][c];
            for k in c..m {
                a[r][k] -= factor * a[c][k];
            }
            b[r] -= factor * b[c];
        }
    }
    let mut x = vec![0.0; m];
    for c in (0..m).rev() {
        let s: f64 = (c + 1..m).map(|k| a[c][k] * x[k]).sum();
        x[c] = (b[c] - s) / a[c][c];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Type-II Anderson acceleration of a fixed-point map `t ↦ f(t)` with
/// residual `g = f(t) - t`, keeping differences of the last few iterates.
struct Anderson {
    dg: Vec<Vec<f64>>,
    df: Vec<Vec<f64>>,
    gram: Vec<Vec<f64>>,
    last: Option<(Vec<f64>, Vec<f64>)>,
}

impl Anderson {
    fn new() -> Self {
        Anderson {
            dg: Vec::new(),
            df: Vec::new(),
            gram: Vec::new(),
            last: None,
        }
    }

    fn reset(&mut self) {
        *self = Anderson::new();
    }

    /// Records `(g, f)` and returns the extrapolated next iterate.
    fn step(&mut self, g: Vec<f64>, f: Vec<f64>) -> Vec<f64> {
        if let Some((pg, pf)) = self.last.take() {
            let dg: Vec<f64> = g.iter().zip(&pg).map(|(a, b)| a - b).collect();
            let df: Vec<f64> = f.iter().zip(&pf).map(|(a, b)| a - b).collect();
            if self.dg.len() == ANDERSON_MEMORY {
                self.dg.remove(0);
                self.df.remove(0);
                self.gram.remove(0);
                self.gram.iter_mut().for_each(|row| {
                    row.remove(0);
                });
            }
            let row: Vec<f64> = self.dg.iter().map(|d| dot(d, &dg)).collect();
            for (r, &x) in self.gram.iter_mut().zip(&row) {
                r.push(x);
            }
            let mut row = row;
            row.push(dot(&dg, &dg));
            self.gram.push(row);
            self.dg.push(dg);
            self.df.push(df);
        }
        let m = self.dg.len();
        let mut next = f.clone();
        if m > 0 {
            let scale = (0..m).map(|i| self.gram[i][i]).fold(0.0, f64::max);
            let mut a = self.gram.clone();
            for (i, row) in a.iter_mut().enumerate() {
                row[i] += 1e-10 * scale + 1e-300;
            }
            let b: Vec<f64> = self.dg.iter().map(|d| dot(d, &g)).collect();
            if let Some(theta) = solve_dense(a, b) {
                for (th, df) in theta.iter().zip(&self.df) {
                    for (x, d) in next.iter_mut().zip(df) {
                        *x -= th * d;
                    }
                }
            }
        }
        self.last = Some((g, f));
        next
    }
}

/// Runs Douglas-Rachford splitting on `t`, with `Z = Π₂(t)`,
/// `Y = Π₁(2Z − t − C/ρ)` and `t ← t + α(Y − Z)`, accelerated by a
/// safeguarded Anderson step. Stops when `max|Y − Z|` and
/// `ρ max|Z − Z_prev|` are both below the tolerance; `Y` is returned.
///
/// Infeasibility is reported when the gap `Y − Z` stops moving while staying
/// well above the tolerance for several consecutive windows, so that `t`
/// drifts linearly. This is evidence, not a certificate.
pub(crate) fn run(
    p: &RelaxationProblem,
    pins: &[(usize, usize)],
    cfg: &SolverConfig,
) -> Result<RawSolution> {
    cfg.validate()?;
    let layout = Layout::new(p, pins);
    let basis = Basis::new(p.n, p.alphabet_size());
    let f = layout.f;
    let (mut t, rho) = match &cfg.warm_start {
        Some(w) if w.t.len() == f * f => (w.t.clone(), w.rho),
        Some(_) => {
            return Err(Error::InvalidParameter(
                "warm start does not match the problem size".into(),
            ))
        }
        None => (layout.product_start(), cfg.penalty),
    };
    let alpha = cfg.over_relaxation;
    let floor = (1e3 * cfg.tolerance).max(1e-4);
    let mut accel = Anderson::new();
    // Plain fixed-point image of the previous iterate and its residual norm,
    // kept so a rejected extrapolation can fall back to it.
    let mut fallback: Option<(Vec<f64>, f64)> = None;
    let mut z_prev: Option<Vec<f64>> = None;
    let mut last_gap: Option<Vec<f64>> = None;
    let mut stalled = 0;
    let (mut primal, mut dual) = (f64::INFINITY, f64::INFINITY);

    for it in 1..=cfg.max_iterations {
        let z = layout.project(&t);
        let mut x: Vec<f64> = z.iter().zip(&t).map(|(a, b)| 2.0 * a - b).collect();
        for &j in &layout.cost {
            x[j * f + j] -= 1.0 / rho;
        }
        let y = project_psd_subspace(&basis, &x)?;
        let g: Vec<f64> = y.iter().zip(&z).map(|(a, b)| alpha * (a - b)).collect();
        let g_norm = dot(&g, &g).sqrt();
        if !g_norm.is_finite() {
            return Err(Error::NumericalBreakdown(format!(
                "non-finite residual at iteration {it}"
            )));
        }
        if let Some((plain, plain_norm)) = fallback.take() {
            if g_norm > plain_norm {
                // The extrapolated point is worse than plain iteration.
                accel.reset();
                t = plain;
                continue;
            }
        }
        primal = y
            .iter()
            .zip(&z)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        dual = match &z_prev {
            Some(zp) => {
                rho * z
                    .iter()
                    .zip(zp)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            }
            None => f64::INFINITY,
        };
        if primal <= cfg.tolerance && dual <= cfg.tolerance {
            return Ok(RawSolution {
                y,
                warm: WarmStart { t, rho },
                iterations: it,
                primal,
                dual,
            });
        }

        if it % PLATEAU_EVERY == 0 {
            let gap: Vec<f64> = y.iter().zip(&z).map(|(a, b)| a - b).collect();
            let norm = dot(&gap, &gap).sqrt();
            if let Some(prev) = &last_gap {
                let moved = gap
                    .iter()
                    .zip(prev)
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                if norm > floor && moved <= 1e-3 * norm {
                    stalled += 1;
                } else {
                    stalled = 0;
                }
            }
            last_gap = Some(gap);
            if stalled >= PLATEAU_CHECKS && it >= PLATEAU_MIN_ITERATIONS {
                return Err(Error::Infeasible(format!(
                    "relaxation appears infeasible: gap ‖Y − Z‖ = {norm:.3e} stationary over {} iterations while the iterate drifts, after {it} iterations",
                    PLATEAU_CHECKS * PLATEAU_EVERY
                )));
            }
        }

        let plain: Vec<f64> = t.iter().zip(&g).map(|(a, b)| a + b).collect();
        let next = accel.step(g, plain.clone());
        fallback = Some((plain, g_norm));
        t = next;
        z_prev = Some(z);
    }
    Err(Error::IterationCap {
        iterations: cfg.max_iterations,
        primal,
        dual,
    })
}
