//! Complex Jacobi kernels: one-sided (Hestenes) SVD and cyclic two-sided
//! Hermitian eigendecomposition.
//!
//! Both reduce every pivot to a real symmetric 2x2 problem by first removing
//! the phase of the off-diagonal entry: for `g = |g| e^{i phi}` the unitary
//! `J = diag(1, e^{-i phi}) [[c, s], [-s, c]]` diagonalizes
//! `[[a, g], [conj(g), b]]`.
//!
//! Storage is column-major `Vec<Complex64>`; the sizes handled here are small
//! (dilations of at most a few dozen rows), so there is no blocking.

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// Rotation parameters for the symmetric pivot `[[alpha, |g|], [|g|, beta]]`.
#[inline]
fn sym_schur(alpha: f64, beta: f64, g_abs: f64) -> (f64, f64) {
    let zeta = (beta - alpha) / (2.0 * g_abs);
    let t = if zeta >= 0.0 {
        1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
    } else {
        -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, c * t)
}

/// Applies `J` on the right to columns `p`, `q` of a column-major `rows x _`
/// array.
#[inline]
fn rotate_columns(
    a: &mut [Complex64],
    rows: usize,
    p: usize,
    q: usize,
    c: f64,
    s: f64,
    phase: Complex64,
) {
    // phase = e^{-i phi}
    for k in 0..rows {
        let ap = a[p * rows + k];
        let aq = a[q * rows + k] * phase;
        a[p * rows + k] = ap * c - aq * s;
        a[q * rows + k] = ap * s + aq * c;
    }
}

pub(crate) struct RawSvd {
    /// `m x k` column-major, `k = min(m, n)`; columns with zero singular
    /// value are zero.
    pub u: Vec<Complex64>,
    pub sigma: Vec<f64>,
    /// `n x n` column-major unitary.
    pub v: Vec<Complex64>,
}

/// One-sided Jacobi SVD of a column-major `m x n` array with `m >= n`.
/// Singular values come back sorted in descending order.
pub(crate) fn svd_tall(mut a: Vec<Complex64>, m: usize, n: usize) -> Result<RawSvd> {
    debug_assert!(m >= n);
    let mut v = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = Complex64::new(1.0, 0.0);
    }
    let eps = f64::EPSILON;
    // Columns below this squared norm are rounding noise; rotating them
    // against each other never settles.
    let floor = {
        let total: f64 = a.iter().map(|z| z.norm_sqr()).sum();
        eps * eps * total * (n as f64)
    };
    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, Complex64::new(0.0, 0.0));
                for k in 0..m {
                    let ap = a[p * m + k];
                    let aq = a[q * m + k];
                    alpha += ap.norm_sqr();
                    beta += aq.norm_sqr();
                    gamma += ap.conj() * aq;
                }
                let g = gamma.norm();
                if g == 0.0 || g <= eps * (alpha * beta).sqrt() || alpha.min(beta) <= floor {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let (c, s) = sym_schur(alpha, beta, g);
                rotate_columns(&mut a, m, p, q, c, s, phase);
                rotate_columns(&mut v, n, p, q, c, s, phase);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::NoConvergence {
            kernel: "jacobi svd",
            rows: m,
            cols: n,
        });
    }
    let norms: Vec<f64> = (0..n)
        .map(|j| {
            a[j * m..(j + 1) * m]
                .iter()
                .map(|z| z.norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let mut u = vec![Complex64::new(0.0, 0.0); m * n];
    let mut v_sorted = vec![Complex64::new(0.0, 0.0); n * n];
    let mut sigma = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        let s = norms[src];
        sigma.push(s);
        if s > 0.0 {
            for k in 0..m {
                u[dst * m + k] = a[src * m + k] / s;
            }
        }
        v_sorted[dst * n..(dst + 1) * n].copy_from_slice(&v[src * n..(src + 1) * n]);
    }
    Ok(RawSvd {
        u,
        sigma,
        v: v_sorted,
    })
}

/// Cyclic Jacobi eigendecomposition of a Hermitian column-major `n x n`
/// array. Returns unsorted eigenvalues and the column-major eigenvectors.
pub(crate) fn hermitian_jacobi(
    mut a: Vec<Complex64>,
    n: usize,
) -> Result<(Vec<f64>, Vec<Complex64>)> {
    let mut v = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = Complex64::new(1.0, 0.0);
        a[i * n + i] = Complex64::new(a[i * n + i].re, 0.0);
    }
    let total: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let threshold = f64::EPSILON * total;
    let off = |a: &[Complex64]| -> f64 {
        let mut s = 0.0;
        for j in 0..n {
            for i in 0..n {
                if i != j {
                    s += a[j * n + i].norm_sqr();
                }
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    while n > 1 && off(&a) > threshold {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                kernel: "hermitian jacobi",
                rows: n,
                cols: n,
            });
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let gamma = a[q * n + p];
                let g = gamma.norm();
                if g == 0.0 {
                    continue;
                }
                let alpha = a[p * n + p].re;
                let beta = a[q * n + q].re;
                let phase = (gamma / g).conj();
                let (c, s) = sym_schur(alpha, beta, g);
                rotate_columns(&mut a, n, p, q, c, s, phase);
                // Rows: J* B, with (J*)_pq = -s e^{i phi}, (J*)_qq = c e^{i phi}.
                let phase_c = phase.conj();
                for k in 0..n {
                    let bp = a[k * n + p];
                    let bq = a[k * n + q] * phase_c;
                    a[k * n + p] = bp * c - bq * s;
                    a[k * n + q] = bp * s + bq * c;
                }
                a[q * n + p] = Complex64::new(0.0, 0.0);
                a[p * n + q] = Complex64::new(0.0, 0.0);
                a[p * n + p] = Complex64::new(a[p * n + p].re, 0.0);
                a[q * n + q] = Complex64::new(a[q * n + q].re, 0.0);
                rotate_columns(&mut v, n, p, q, c, s, phase);
            }
        }
    }
    let values = (0..n).map(|i| a[i * n + i].re).collect();
    Ok((values, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn two_by_two_pivot_diagonalizes() {
        // Hermitian [[2, 1+i], [1-i, 3]]: eigenvalues (5 +- sqrt(9))/2 = 4, 1.
        let a = vec![c(2.0, 0.0), c(1.0, -1.0), c(1.0, 1.0), c(3.0, 0.0)];
        let (mut values, _) = hermitian_jacobi(a, 2).unwrap();
        values.sort_by(f64::total_cmp);
        assert!((values[0] - 1.0).abs() < 1e-14 && (values[1] - 4.0).abs() < 1e-14);
    }

    #[test]
    fn svd_of_rank_one_complex() {
        // x y* with x = (1, i, 0), y = (1, 1): single singular value |x||y| = 2.
        let x = [c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)];
        let y = [c(1.0, 0.0), c(1.0, 0.0)];
        let mut a = vec![c(0.0, 0.0); 6];
        for j in 0..2 {
            for i in 0..3 {
                a[j * 3 + i] = x[i] * y[j].conj();
            }
        }
        let r = svd_tall(a, 3, 2).unwrap();
        assert!((r.sigma[0] - 2.0).abs() < 1e-15);
        assert!(r.sigma[1].abs() < 1e-15);
    }
}
