//! Symmetric tridiagonal eigensolver (implicit-shift QL).

use crate::error::{Error, Result};

/// Sweeps allowed per eigenvalue before giving up.
pub const MAX_QL_ITERATIONS: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct TridiagEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column-major `n × n`; column `j` is the eigenvector of `values[j]`.
    /// Empty when only eigenvalues were requested.
    pub vectors: Vec<f64>,
}

impl TridiagEigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, j: usize) -> &[f64] {
        let n = self.dim();
        &self.vectors[j * n..(j + 1) * n]
    }
}

/// Diagonalizes the symmetric tridiagonal matrix with main diagonal `diag`
/// and sub/super-diagonal `offdiag` (`offdiag[k]` couples `k` and `k + 1`).
pub fn eigh_tridiagonal(diag: &[f64], offdiag: &[f64], want_vectors: bool) -> Result<TridiagEigen> {
    let n = diag.len();
    if n == 0 {
        return Ok(TridiagEigen { values: Vec::new(), vectors: Vec::new() });
    }
    if offdiag.len() + 1 != n {
        return Err(Error::domain(format!("off-diagonal length {} does not match dimension {n}", offdiag.len())));
    }
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);
    let mut z = if want_vectors {
        let mut z = vec![0.0; n * n];
        for i in 0..n {
            z[i * n + i] = 1.0;
        }
        z
    } else {
        Vec::new()
    };

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERATIONS {
                return Err(Error::EigenNoConvergence { index: l });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if want_vectors {
                    let (lo, hi) = z.split_at_mut((i + 1) * n);
                    let zi = &mut lo[i * n..];
                    let zi1 = &mut hi[..n];
                    for k in 0..n {
                        let f = zi1[k];
                        zi1[k] = s * zi[k] + c * f;
                        zi[k] = c * zi[k] - s * f;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = if want_vectors {
        let mut out = Vec::with_capacity(n * n);
        for &i in &order {
            out.extend_from_slice(&z[i * n..(i + 1) * n]);
        }
        out
    } else {
        Vec::new()
    };
    Ok(TridiagEigen { values, vectors })
}
