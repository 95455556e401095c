//! Dense symmetric eigendecomposition: Householder reduction to tridiagonal
//! form followed by the implicit-shift QL iteration (the EISPACK `tred2` /
//! `tql2` pair).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetric matrix storing only the upper triangle, packed row by row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetricMatrix {
    order: usize,
    upper: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(order: usize) -> Self {
        SymmetricMatrix {
            order,
            upper: vec![0.0; order * (order + 1) / 2],
        }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            for j in i..order {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Reads the upper triangle of a dense row-major matrix.
    pub fn from_dense_upper(order: usize, dense: &[f64]) -> Self {
        Self::from_fn(order, |i, j| dense[i * order + j])
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * self.order - i * (i + 1) / 2 + j
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[self.index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let k = self.index(i, j);
        self.upper[k] = value;
    }

    pub fn trace(&self) -> f64 {
        (0..self.order).map(|i| self.get(i, i)).sum()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.order;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = self.get(i, j);
                out[i * n + j] = v;
                out[j * n + i] = v;
            }
        }
        out
    }

    pub fn scale(&mut self, factor: f64) {
        self.upper.iter_mut().for_each(|x| *x *= factor);
    }

    pub fn eigen(&self, vectors: bool) -> Result<SymmetricEigen> {
        symmetric_eigen(&self.to_dense(), self.order, vectors)
    }
}

/// Eigenvalues sorted descending; `vectors` holds the matching unit
/// eigenvectors as the rows of a row-major `n x n` array.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Option<Vec<f64>>,
}

impl SymmetricEigen {
    pub fn vector(&self, k: usize) -> Option<&[f64]> {
        let n = self.values.len();
        self.vectors.as_ref().map(|v| &v[k * n..(k + 1) * n])
    }
}

const MAX_QL_SWEEPS: usize = 64;

/// Eigendecomposition of the dense row-major symmetric matrix `a`; only the
/// lower triangle is read.
pub fn symmetric_eigen(a: &[f64], n: usize, vectors: bool) -> Result<SymmetricEigen> {
    assert_eq!(a.len(), n * n, "matrix storage does not match order");
    if n == 0 {
        return Ok(SymmetricEigen {
            values: vec![],
            vectors: vectors.then(Vec::new),
        });
    }
    let mut v = a.to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, &mut d, &mut e, n);
    // tql2 rotates columns of V; work on the transpose so the rotated
    // vectors are contiguous rows.
    let mut w = if vectors {
        transpose(&v, n)
    } else {
        Vec::new()
    };
    tql2(&mut w, &mut d, &mut e, n, vectors)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].total_cmp(&d[i]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = vectors.then(|| {
        let mut out = Vec::with_capacity(n * n);
        for &i in &order {
            out.extend_from_slice(&w[i * n..(i + 1) * n]);
        }
        out
    });
    Ok(SymmetricEigen { values, vectors })
}

fn transpose(a: &[f64], n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            t[j * n + i] = a[i * n + j];
        }
    }
    t
}

fn tred2(v: &mut [f64], d: &mut [f64], e: &mut [f64], n: usize) {
    let at = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
                v[at(j, i)] = 0.0;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[at(j, i)] = f;
                g = e[j] + v[at(j, j)] * f;
                for k in j + 1..i {
                    let vkj = v[at(k, j)];
                    g += vkj * d[k];
                    e[k] += vkj * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[at(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    // Accumulate the transformations.
    for i in 0..n - 1 {
        v[at(n - 1, i)] = v[at(i, i)];
        v[at(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[at(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[at(k, i + 1)] * v[at(k, j)];
                }
                for k in 0..=i {
                    v[at(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[at(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
        v[at(n - 1, j)] = 0.0;
    }
    v[at(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// QL with implicit shifts on the tridiagonal `(d, e)`. `w` holds the
/// transposed accumulated transform: row `i` is the current vector `i`.
fn tql2(w: &mut [f64], d: &mut [f64], e: &mut [f64], n: usize, vectors: bool) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > MAX_QL_SWEEPS {
                    return Err(Error::EigenNonConvergence {
                        iterations: MAX_QL_SWEEPS,
                    });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if vectors {
                        let (lo, hi) = w.split_at_mut((i + 1) * n);
                        let row_i = &mut lo[i * n..];
                        let row_next = &mut hi[..n];
                        for k in 0..n {
                            let hk = row_next[k];
                            row_next[k] = s * row_i[k] + c * hk;
                            row_i[k] = c * row_i[k] - s * hk;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    if d.iter().any(|x| !x.is_finite()) {
        return Err(Error::NumericalBreakdown("non-finite eigenvalue".into()));
    }
    Ok(())
}
