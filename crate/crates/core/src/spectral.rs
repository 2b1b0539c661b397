//! SVD, Hermitian eigendecomposition and the derived operations: fractional
//! powers of PSD matrices, the Moore-Penrose inverse and range projections.
//!
//! All numerical-rank decisions go through [`Tolerance::rank_cutoff`], so two
//! computations on the same matrix always agree on its rank.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jacobi;
use crate::matrix::ComplexMatrix;
use crate::tolerance::Tolerance;

/// Full singular value decomposition `M = U diag(s) V*`.
///
/// `u` and `v` are square unitaries; only the first `min(m, n)` columns carry
/// singular values, the rest complete the bases.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
    pub numerical_rank: usize,
}

impl SvdFactors {
    /// Left singular vectors belonging to retained singular values (`m x r`).
    pub fn retained_u(&self) -> ComplexMatrix {
        self.u.block(0, 0, self.u.rows(), self.numerical_rank)
    }

    /// Right singular vectors belonging to retained singular values (`n x r`).
    pub fn retained_v(&self) -> ComplexMatrix {
        self.v.block(0, 0, self.v.rows(), self.numerical_rank)
    }

    pub fn largest(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// `U diag(s) V*` using every singular value, retained or not.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let (m, n) = (self.u.rows(), self.v.rows());
        let k = self.singular_values.len();
        let us = ComplexMatrix::from_fn(m, k, |i, j| self.u.get(i, j) * self.singular_values[j]);
        &us * &self.v.block(0, 0, n, k).adjoint()
    }
}

/// Number of singular values strictly above the relative cutoff.
pub fn numerical_rank(singular_values: &[f64], tol: &Tolerance) -> usize {
    let largest = match singular_values.first() {
        Some(&s) if s > 0.0 => s,
        _ => return 0,
    };
    let cutoff = tol.rank_cutoff(largest);
    singular_values.iter().take_while(|&&s| s > cutoff).count()
}

/// Like [`numerical_rank`], but the cutoff is taken against
/// `max(s_1, reference)`.
///
/// A matrix computed as a product can vanish exactly in theory while its
/// computed singular values sit at rounding level; measured against its own
/// `s_1` that noise looks like full rank. Passing the product of the factor
/// norms as `reference` judges it against the size it could have had.
pub fn numerical_rank_relative(singular_values: &[f64], reference: f64, tol: &Tolerance) -> usize {
    let largest = singular_values
        .first()
        .copied()
        .unwrap_or(0.0)
        .max(reference);
    if largest <= 0.0 {
        return 0;
    }
    let cutoff = tol.rank_cutoff(largest);
    singular_values.iter().take_while(|&&s| s > cutoff).count()
}

pub fn svd(m: &ComplexMatrix, tol: &Tolerance) -> Result<SvdFactors> {
    svd_relative(m, 0.0, tol)
}

/// [`svd`] with the rank decided by [`numerical_rank_relative`].
pub fn svd_relative(m: &ComplexMatrix, reference: f64, tol: &Tolerance) -> Result<SvdFactors> {
    check_finite(m)?;
    let (rows, cols) = m.shape();
    if rows.min(cols) == 0 {
        return Ok(SvdFactors {
            u: ComplexMatrix::identity(rows),
            singular_values: Vec::new(),
            v: ComplexMatrix::identity(cols),
            numerical_rank: 0,
        });
    }
    // The kernel wants a tall input; a wide matrix is handled through its
    // adjoint, which swaps the roles of U and V.
    let tall = rows >= cols;
    let source = if tall { m.clone() } else { m.adjoint() };
    let (tm, tn) = source.shape();
    let raw = jacobi::svd_tall(source.as_nalgebra().as_slice().to_vec(), tm, tn)?;
    let numerical_rank = numerical_rank_relative(&raw.sigma, reference, tol);
    let thin = ComplexMatrix::from_nalgebra(DMatrix::from_column_slice(tm, tn, &raw.u));
    let full = ComplexMatrix::from_nalgebra(DMatrix::from_column_slice(tn, tn, &raw.v));
    let completed = complete_basis(&thin, numerical_rank);
    let (u, v) = if tall {
        (completed, full)
    } else {
        (full, completed)
    };
    Ok(SvdFactors {
        u,
        singular_values: raw.sigma,
        v,
        numerical_rank,
    })
}

/// Square unitary whose first `keep` columns are those of `q` (assumed
/// orthonormal). The remaining columns of `q` are reused when they survive
/// twice-iterated Gram-Schmidt; the rest of the basis comes from the
/// standard basis vector with the largest residual at each step, whose
/// squared norm is at least `1/m`.
fn complete_basis(q: &ComplexMatrix, keep: usize) -> ComplexMatrix {
    let m = q.rows();
    let column = |j: usize| (0..m).map(|i| q.get(i, j)).collect::<Vec<_>>();
    let mut basis: Vec<Vec<Complex64>> = (0..keep).map(column).collect();
    for j in keep..q.cols() {
        if basis.len() == m {
            break;
        }
        let mut cand = column(j);
        let before = norm(&cand);
        if before == 0.0 {
            continue;
        }
        orthogonalize(&mut cand, &basis);
        let after = norm(&cand);
        if after > 0.5 * before {
            basis.push(cand.iter().map(|z| z / after).collect());
        }
    }
    while basis.len() < m {
        let best = (0..m)
            .map(|k| {
                let mut e = vec![Complex64::new(0.0, 0.0); m];
                e[k] = Complex64::new(1.0, 0.0);
                orthogonalize(&mut e, &basis);
                e
            })
            .max_by(|x, y| norm(x).total_cmp(&norm(y)))
            .expect("m > 0");
        let n = norm(&best);
        basis.push(best.iter().map(|z| z / n).collect());
    }
    ComplexMatrix::from_fn(m, m, |i, j| basis[j][i])
}

fn orthogonalize(v: &mut [Complex64], basis: &[Vec<Complex64>]) {
    for _ in 0..2 {
        for b in basis {
            let proj: Complex64 = b.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum();
            for (c, x) in v.iter_mut().zip(b) {
                *c -= proj * x;
            }
        }
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigendecomposition of the Hermitian part of a square matrix. Eigenvalues
/// come back in ascending order with matching eigenvector columns.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    check_square(m, "hermitian_eigen")?;
    check_finite(m)?;
    let n = m.rows();
    if n == 0 {
        return Ok((Vec::new(), ComplexMatrix::zeros(0, 0)));
    }
    let h = m.hermitian_part();
    let (values, vectors) = jacobi::hermitian_jacobi(h.as_nalgebra().as_slice().to_vec(), n)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted = order.iter().map(|&i| values[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| vectors[order[j] * n + i]);
    Ok((sorted, vectors))
}

/// `M^alpha` for a Hermitian positive semidefinite `M`.
///
/// The input is symmetrized first. Eigenvalues at or below the rank cutoff
/// (including slightly negative rounding noise down to
/// `-eq_abs * (1 + ||M||_F)`) become exact zeros, so the result has the same
/// range as `M`. Anything more negative is rejected.
pub fn psd_power(m: &ComplexMatrix, alpha: f64, tol: &Tolerance) -> Result<ComplexMatrix> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidExponent(alpha));
    }
    check_square(m, "psd_power")?;
    check_finite(m)?;
    let n = m.rows();
    if n == 0 {
        return Ok(m.clone());
    }
    let scale = m.frobenius_norm();
    let skew = m.distance(&m.adjoint()) / 2.0;
    if skew > tol.scaled(scale) {
        return Err(Error::NotPositive {
            reason: "not Hermitian",
            value: skew,
        });
    }
    let (values, vectors) = hermitian_eigen(m)?;
    let largest = values.last().copied().unwrap_or(0.0).max(0.0);
    let cutoff = tol.rank_cutoff(largest);
    let floor = -tol.scaled(scale);
    let mut powered = Vec::with_capacity(n);
    for &lambda in &values {
        if lambda < floor {
            return Err(Error::NotPositive {
                reason: "negative eigenvalue",
                value: lambda,
            });
        }
        powered.push(if lambda <= cutoff {
            0.0
        } else {
            lambda.powf(alpha)
        });
    }
    Ok(spectral_synthesis(&vectors, &powered))
}

/// `V diag(d) V*`, returned exactly Hermitian.
fn spectral_synthesis(vectors: &ComplexMatrix, diag: &[f64]) -> ComplexMatrix {
    let n = vectors.rows();
    let k = diag.len();
    let vd = ComplexMatrix::from_fn(n, k, |i, j| vectors.get(i, j) * diag[j]);
    (&vd * &vectors.block(0, 0, n, k).adjoint()).hermitian_part()
}

/// Moore-Penrose inverse over the retained singular triplets.
pub fn pinv(m: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    let f = svd(m, tol)?;
    Ok(pinv_from_svd(&f))
}

pub fn pinv_from_svd(f: &SvdFactors) -> ComplexMatrix {
    let r = f.numerical_rank;
    let v = f.retained_v();
    let scaled = ComplexMatrix::from_fn(v.rows(), r, |i, j| v.get(i, j) / f.singular_values[j]);
    &scaled * &f.retained_u().adjoint()
}

/// Orthogonal projection onto the numerical column space of `m`.
pub fn range_projection(m: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    let f = svd(m, tol)?;
    Ok(range_projection_from_svd(&f))
}

/// [`range_projection`] with the rank decided against `reference`.
pub fn range_projection_relative(
    m: &ComplexMatrix,
    reference: f64,
    tol: &Tolerance,
) -> Result<ComplexMatrix> {
    Ok(range_projection_from_svd(&svd_relative(m, reference, tol)?))
}

pub fn range_projection_from_svd(f: &SvdFactors) -> ComplexMatrix {
    let u = f.retained_u();
    (&u * &u.adjoint()).hermitian_part()
}

/// Spectral norm (largest singular value).
pub fn operator_norm(m: &ComplexMatrix, tol: &Tolerance) -> Result<f64> {
    Ok(svd(m, tol)?.largest())
}

/// `||P_R(m1) - P_R(m2)||_F`, the gap between the two column spaces.
pub fn subspace_gap(m1: &ComplexMatrix, m2: &ComplexMatrix, tol: &Tolerance) -> Result<f64> {
    if m1.rows() != m2.rows() {
        return Err(Error::DimensionMismatch {
            op: "subspaces_equal",
            left: format!("{} rows", m1.rows()),
            right: format!("{} rows", m2.rows()),
        });
    }
    Ok(range_projection(m1, tol)?.distance(&range_projection(m2, tol)?))
}

/// True iff the two matrices have the same numerical column space.
pub fn subspaces_equal(m1: &ComplexMatrix, m2: &ComplexMatrix, tol: &Tolerance) -> Result<bool> {
    Ok(subspace_gap(m1, m2, tol)? <= tol.eq_abs)
}

fn check_square(m: &ComplexMatrix, op: &'static str) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::NotSquare {
            op,
            rows: m.rows(),
            cols: m.cols(),
        })
    }
}

fn check_finite(m: &ComplexMatrix) -> Result<()> {
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let z = m.get(i, j);
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn final_example_t() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[1.0, 0.0, 1.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 1.0]])
    }

    #[test]
    fn svd_of_identity() {
        let f = svd(&ComplexMatrix::identity(3), &tol()).unwrap();
        assert_eq!(f.numerical_rank, 3);
        for s in &f.singular_values {
            assert!((s - 1.0).abs() < 1e-15);
        }
        assert!(f.reconstruct().distance(&ComplexMatrix::identity(3)) < 1e-14);
    }

    #[test]
    fn svd_of_zero_is_rank_zero() {
        let f = svd(&ComplexMatrix::zeros(2, 3), &tol()).unwrap();
        assert_eq!(f.singular_values, vec![0.0, 0.0]);
        assert_eq!(f.numerical_rank, 0);
        assert_eq!(f.u.shape(), (2, 2));
        assert_eq!(f.v.shape(), (3, 3));
    }

    #[test]
    fn svd_of_empty() {
        let f = svd(&ComplexMatrix::zeros(0, 3), &tol()).unwrap();
        assert_eq!(f.numerical_rank, 0);
        assert_eq!(f.v.shape(), (3, 3));
    }

    #[test]
    fn svd_matches_characteristic_polynomial() {
        // T*T = [[1,0,1],[0,0,0],[1,0,2]] has characteristic polynomial
        // -x (x^2 - 3x + 1), so s^2 = (3 +- sqrt5)/2 and 0.
        let f = svd(&final_example_t(), &tol()).unwrap();
        let expect = [
            ((3.0 + 5f64.sqrt()) / 2.0).sqrt(),
            ((3.0 - 5f64.sqrt()) / 2.0).sqrt(),
            0.0,
        ];
        for (s, e) in f.singular_values.iter().zip(expect) {
            assert!((s - e).abs() < 1e-14, "{s} vs {e}");
        }
        assert_eq!(f.numerical_rank, 2);
    }

    #[test]
    fn full_bases_are_unitary() {
        let m = ComplexMatrix::from_fn(5, 2, |i, j| {
            Complex64::new((i + j) as f64, (i * j) as f64 - 1.0)
        });
        let f = svd(&m, &tol()).unwrap();
        assert!((&f.u * &f.u.adjoint()).distance(&ComplexMatrix::identity(5)) < 1e-13);
        assert!((&f.v.adjoint() * &f.v).distance(&ComplexMatrix::identity(2)) < 1e-13);
        assert!(f.reconstruct().distance(&m) < 1e-12);
    }

    #[test]
    fn psd_power_diagonal() {
        let m = ComplexMatrix::from_real_diagonal(&[4.0, 0.0]);
        let r = psd_power(&m, 0.5, &tol()).unwrap();
        assert!(r.distance(&ComplexMatrix::from_real_diagonal(&[2.0, 0.0])) < 1e-14);
    }

    #[test]
    fn psd_power_fixes_projections() {
        let p = ComplexMatrix::from_real_diagonal(&[1.0, 1.0, 0.0]);
        for alpha in [0.3, 0.5, 1.0, 2.0, 7.5] {
            assert!(psd_power(&p, alpha, &tol()).unwrap().distance(&p) < 1e-14);
        }
    }

    #[test]
    fn psd_power_square_root_of_gram() {
        let t = final_example_t();
        let root = psd_power(&(&t.adjoint() * &t), 0.5, &tol()).unwrap();
        let s = 1.0 / 5f64.sqrt();
        let expect = ComplexMatrix::from_real_rows(&[
            &[2.0 * s, 0.0, s],
            &[0.0, 0.0, 0.0],
            &[s, 0.0, 3.0 * s],
        ]);
        assert!(root.distance(&expect) < 1e-14);
    }

    #[test]
    fn psd_power_rejects_indefinite_and_non_hermitian() {
        let m = ComplexMatrix::from_real_diagonal(&[1.0, -0.5]);
        match psd_power(&m, 0.5, &tol()) {
            Err(Error::NotPositive { value, .. }) => assert_eq!(value, -0.5),
            other => panic!("unexpected {other:?}"),
        }
        let n = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(psd_power(&n, 0.5, &tol()).is_err());
        assert!(psd_power(&ComplexMatrix::identity(2), 0.0, &tol()).is_err());
    }

    #[test]
    fn psd_power_clamps_rounding_noise() {
        let m = ComplexMatrix::from_real_diagonal(&[1.0, -1e-13]);
        let r = psd_power(&m, 0.5, &tol()).unwrap();
        assert_eq!(r.get(1, 1).re, 0.0);
    }

    #[test]
    fn pinv_simple() {
        assert!(
            pinv(&ComplexMatrix::identity(3), &tol())
                .unwrap()
                .distance(&ComplexMatrix::identity(3))
                < 1e-14
        );
        let p = pinv(&ComplexMatrix::from_real_diagonal(&[2.0, 0.0]), &tol()).unwrap();
        assert!(p.distance(&ComplexMatrix::from_real_diagonal(&[0.5, 0.0])) < 1e-15);
        let w = pinv(&ComplexMatrix::zeros(2, 3), &tol()).unwrap();
        assert_eq!(w.shape(), (3, 2));
        assert_eq!(w.frobenius_norm(), 0.0);
    }

    #[test]
    fn range_projection_simple() {
        assert_eq!(
            range_projection(&ComplexMatrix::zeros(3, 2), &tol())
                .unwrap()
                .frobenius_norm(),
            0.0
        );
        let t = ComplexMatrix::from_real_diagonal(&[1.0, 1.0, 0.0]);
        assert!(range_projection(&t, &tol()).unwrap().distance(&t) < 1e-15);
    }

    #[test]
    fn subspace_checks() {
        let m = final_example_t();
        assert!(subspaces_equal(&m, &(&m * &m.adjoint()), &tol()).unwrap());
        assert!(!subspaces_equal(&m, &ComplexMatrix::identity(3), &tol()).unwrap());
        assert!(subspace_gap(&m, &ComplexMatrix::identity(2), &tol()).is_err());
    }
}
