//! Real symmetric eigensolvers: Householder tridiagonalization with
//! implicit-shift QL for dense matrices, and Lanczos with full
//! reorthogonalization for the sparse Hamiltonian.

use crate::error::{Error, Result};

/// Eigen-decomposition of a dense symmetric matrix.
///
/// Values come back ascending; `vectors` is row-major with eigenvector `k`
/// stored in column `k`.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
    pub dim: usize,
}

impl SymmetricEigen {
    pub fn vector(&self, k: usize) -> Vec<f64> {
        (0..self.dim).map(|i| self.vectors[i * self.dim + k]).collect()
    }
}

/// Full spectrum of the row-major symmetric matrix `a` (only the lower
/// triangle is read).
pub fn symmetric_eigen(a: &[f64], dim: usize) -> Result<SymmetricEigen> {
    assert_eq!(a.len(), dim * dim, "matrix storage does not match dimension");
    if dim == 0 {
        return Ok(SymmetricEigen {
            values: Vec::new(),
            vectors: Vec::new(),
            dim,
        });
    }
    let mut v = a.to_vec();
    let mut d = vec![0.0; dim];
    let mut e = vec![0.0; dim];
    householder_tridiagonalize(&mut v, &mut d, &mut e, dim);
    // tridiagonalization leaves e[i] coupling rows i-1 and i; QL wants it shifted
    for i in 1..dim {
        e[i - 1] = e[i];
    }
    e[dim - 1] = 0.0;
    implicit_ql(&mut d, &mut e, &mut v, dim)?;
    Ok(sorted(d, v, dim))
}

/// Full spectrum of the symmetric tridiagonal matrix with diagonal `diag`
/// and sub/super-diagonal `off` (`off.len() == diag.len() - 1`).
pub fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<SymmetricEigen> {
    let dim = diag.len();
    assert!(dim == 0 || off.len() + 1 == dim);
    let mut d = diag.to_vec();
    let mut e = vec![0.0; dim];
    e[..off.len()].copy_from_slice(off);
    let mut v = vec![0.0; dim * dim];
    for i in 0..dim {
        v[i * dim + i] = 1.0;
    }
    if dim > 0 {
        implicit_ql(&mut d, &mut e, &mut v, dim)?;
    }
    Ok(sorted(d, v, dim))
}

fn sorted(d: Vec<f64>, v: Vec<f64>, dim: usize) -> SymmetricEigen {
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&k| d[k]).collect();
    let mut vectors = vec![0.0; dim * dim];
    for (new, &old) in order.iter().enumerate() {
        for i in 0..dim {
            vectors[i * dim + new] = v[i * dim + old];
        }
    }
    SymmetricEigen { values, vectors, dim }
}

/// Householder reduction to tridiagonal form. On exit `v` holds the
/// accumulated orthogonal transform, `d` the diagonal and `e[1..]` the
/// subdiagonal.
fn householder_tridiagonalize(v: &mut [f64], d: &mut [f64], e: &mut [f64], n: usize) {
    let at = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
    }

    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
                v[at(j, i)] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
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
                for k in (j + 1)..i {
                    g += v[at(k, j)] * d[k];
                    e[k] += v[at(k, j)] * f;
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

/// Implicit-shift QL on a tridiagonal matrix (`d` diagonal, `e[i]` couples
/// `i` and `i + 1`), rotating the columns of `v` along.
fn implicit_ql(d: &mut [f64], e: &mut [f64], v: &mut [f64], n: usize) -> Result<()> {
    const MAX_SWEEPS: usize = 60;
    let at = |i: usize, j: usize| i * n + j;
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0_f64;

    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }

        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > MAX_SWEEPS {
                    return Err(Error::EigenNotConverged {
                        iterations: sweeps,
                        residual: e[l].abs(),
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
                for di in d.iter_mut().take(n).skip(l + 2) {
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
                    for k in 0..n {
                        h = v[at(k, i + 1)];
                        v[at(k, i + 1)] = s * v[at(k, i)] + c * h;
                        v[at(k, i)] = c * v[at(k, i)] - s * h;
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
    Ok(())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Result of [`lanczos_lowest`].
#[derive(Clone, Debug)]
pub struct LanczosResult {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Settings for [`lanczos_lowest`].
#[derive(Clone, Copy, Debug)]
pub struct LanczosOptions {
    /// Target for `||A x - θ x||`.
    pub tolerance: f64,
    /// Krylov dimension before an explicit restart.
    pub max_krylov: usize,
    pub max_restarts: usize,
}

/// Lowest eigenpair of the symmetric operator `apply` (`out = A x`) of
/// dimension `dim`, started from `start`. Every new Lanczos vector is
/// reorthogonalized against all previous ones (two Gram-Schmidt passes).
pub fn lanczos_lowest<F>(apply: F, dim: usize, start: &[f64], opts: LanczosOptions) -> Result<LanczosResult>
where
    F: Fn(&[f64], &mut [f64]),
{
    assert_eq!(start.len(), dim);
    let mut x = start.to_vec();
    let nx = norm(&x);
    if nx == 0.0 || !nx.is_finite() {
        return Err(Error::Validation("Lanczos start vector must be nonzero".into()));
    }
    x.iter_mut().for_each(|v| *v /= nx);

    let krylov = opts.max_krylov.clamp(1, dim);
    let mut w = vec![0.0; dim];
    let mut total_iterations = 0;
    let mut best: Option<LanczosResult> = None;

    for _restart in 0..=opts.max_restarts {
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(krylov);
        let mut alphas: Vec<f64> = Vec::with_capacity(krylov);
        let mut betas: Vec<f64> = Vec::with_capacity(krylov);
        basis.push(x.clone());

        let mut ritz: Option<(f64, Vec<f64>)> = None;
        for k in 0..krylov {
            total_iterations += 1;
            apply(&basis[k], &mut w);
            let alpha = dot(&basis[k], &w);
            alphas.push(alpha);
            for _ in 0..2 {
                for b in &basis {
                    let proj = dot(b, &w);
                    w.iter_mut().zip(b).for_each(|(wi, bi)| *wi -= proj * bi);
                }
            }
            let beta = norm(&w);
            let scale = alphas.iter().fold(0.0_f64, |a, v| a.max(v.abs())).max(beta).max(1e-300);
            let exhausted = beta <= 1e-13 * scale || k + 1 == krylov;
            if exhausted || (k + 1) % 8 == 0 {
                let t = tridiagonal_eigen(&alphas, &betas)?;
                let s = t.vector(0);
                let estimate = beta * s[k].abs();
                if exhausted || estimate <= 0.1 * opts.tolerance {
                    ritz = Some((t.values[0], s));
                    break;
                }
            }
            betas.push(beta);
            let next: Vec<f64> = w.iter().map(|v| v / beta).collect();
            basis.push(next);
        }

        let (_, s) = ritz.expect("Lanczos loop always produces a Ritz pair");
        let mut y = vec![0.0; dim];
        for (coef, b) in s.iter().zip(&basis) {
            y.iter_mut().zip(b).for_each(|(yi, bi)| *yi += coef * bi);
        }
        let ny = norm(&y);
        y.iter_mut().for_each(|v| *v /= ny);
        apply(&y, &mut w);
        let value = dot(&y, &w);
        let residual = w
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - value * b).powi(2))
            .sum::<f64>()
            .sqrt();
        let candidate = LanczosResult {
            value,
            vector: y.clone(),
            residual,
            iterations: total_iterations,
        };
        if residual <= opts.tolerance {
            return Ok(candidate);
        }
        if best.as_ref().is_none_or(|b| residual < b.residual) {
            best = Some(candidate);
        }
        x = y;
    }
    let best = best.expect("at least one restart ran");
    Err(Error::EigenNotConverged {
        iterations: best.iterations,
        residual: best.residual,
    })
}
