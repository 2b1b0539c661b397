//! Polar decomposition `T = U|T|` with a partial-isometry factor.
//!
//! `U` is assembled only from the retained singular triplets of `T`, so
//! `U*U` is the projection onto the range of `T*` rather than the identity.
//! With that range condition the partial isometry is unique, which is what
//! lets every other module compare partial isometries by plain matrix
//! difference.

use serde::Serialize;

use crate::error::Result;
use crate::matrix::ComplexMatrix;
use crate::predicates::is_partial_isometry;
use crate::spectral::{range_projection_relative, svd, svd_relative, SvdFactors};
use crate::tolerance::Tolerance;

#[derive(Debug, Clone)]
pub struct PolarDecomposition {
    pub source: ComplexMatrix,
    pub partial_isometry: ComplexMatrix,
    pub positive_factor: ComplexMatrix,
    pub numerical_rank: usize,
    /// Scale the rank cutoff was measured against (0 for the matrix's own
    /// largest singular value).
    pub rank_reference: f64,
    pub tol: Tolerance,
}

/// Residuals of the four defining properties of a polar decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolarResiduals {
    /// `||T - U|T|||_F / (1 + ||T||_F)`
    pub reconstruction: f64,
    /// `||U U* U - U||_F`
    pub partial_isometry: f64,
    /// `||U*U - P_R(T*)||_F`, projection from an independent SVD of `T*`
    pub initial_projection: f64,
    /// `||(|T|)^2 - T*T||_F / (1 + ||T||_F^2)`
    pub square: f64,
}

impl PolarResiduals {
    pub fn max(&self) -> f64 {
        self.reconstruction
            .max(self.partial_isometry)
            .max(self.initial_projection)
            .max(self.square)
    }
}

impl PolarDecomposition {
    pub fn residuals(&self) -> Result<PolarResiduals> {
        let t = &self.source;
        let u = &self.partial_isometry;
        let abs = &self.positive_factor;
        let norm = t.frobenius_norm();
        let p = range_projection_relative(&t.adjoint(), self.rank_reference, &self.tol)?;
        Ok(PolarResiduals {
            reconstruction: (u * abs).distance(t) / (1.0 + norm),
            partial_isometry: is_partial_isometry(u, &self.tol).residual,
            initial_projection: (&u.adjoint() * u).distance(&p),
            square: (abs * abs).distance(&(&t.adjoint() * t)) / (1.0 + norm * norm),
        })
    }

    /// Whether every residual is within `eq_abs`.
    pub fn is_valid(&self) -> Result<bool> {
        Ok(self.residuals()?.max() <= self.tol.eq_abs)
    }
}

/// `|T| = (T*T)^(1/2)`.
///
/// Computed from the SVD of `T` as `V diag(s) V*` over the retained singular
/// values. This equals the PSD square root of `T*T` but does not square the
/// condition number, so its rank matches the rank of `T` under the same
/// cutoff.
pub fn abs_op(t: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    Ok(abs_from_svd(&svd(t, tol)?))
}

/// [`abs_op`] with the rank decided against `reference`; see
/// [`crate::spectral::numerical_rank_relative`].
pub fn abs_op_relative(
    t: &ComplexMatrix,
    reference: f64,
    tol: &Tolerance,
) -> Result<ComplexMatrix> {
    Ok(abs_from_svd(&svd_relative(t, reference, tol)?))
}

fn abs_from_svd(f: &SvdFactors) -> ComplexMatrix {
    let v = f.retained_v();
    let scaled = ComplexMatrix::from_fn(v.rows(), v.cols(), |i, j| {
        v.get(i, j) * f.singular_values[j]
    });
    (&scaled * &v.adjoint()).hermitian_part()
}

pub fn polar_decompose(t: &ComplexMatrix, tol: &Tolerance) -> Result<PolarDecomposition> {
    polar_decompose_relative(t, 0.0, tol)
}

/// [`polar_decompose`] for a matrix computed from factors whose norms
/// multiply to `reference`.
pub fn polar_decompose_relative(
    t: &ComplexMatrix,
    reference: f64,
    tol: &Tolerance,
) -> Result<PolarDecomposition> {
    let f = svd_relative(t, reference, tol)?;
    let mut pd = polar_from_svd(t, &f, tol);
    pd.rank_reference = reference;
    Ok(pd)
}

pub(crate) fn polar_from_svd(
    t: &ComplexMatrix,
    f: &SvdFactors,
    tol: &Tolerance,
) -> PolarDecomposition {
    PolarDecomposition {
        source: t.clone(),
        partial_isometry: &f.retained_u() * &f.retained_v().adjoint(),
        positive_factor: abs_from_svd(f),
        numerical_rank: f.numerical_rank,
        rank_reference: 0.0,
        tol: *tol,
    }
}

/// Polar decomposition of `T*` from that of `T`: the partial isometry is `U*`
/// and `|T*| = U|T|U*`. No new SVD is computed.
pub fn adjoint_polar(pd: &PolarDecomposition) -> PolarDecomposition {
    let u = &pd.partial_isometry;
    PolarDecomposition {
        source: pd.source.adjoint(),
        partial_isometry: u.adjoint(),
        positive_factor: (&(u * &pd.positive_factor) * &u.adjoint()).hermitian_part(),
        numerical_rank: pd.numerical_rank,
        rank_reference: pd.rank_reference,
        tol: pd.tol,
    }
}

/// `rho(A) = [[0, A], [A*, 0]]`, Hermitian of size `(m + n)`.
pub fn dilation_rho(a: &ComplexMatrix) -> ComplexMatrix {
    let (m, n) = a.shape();
    ComplexMatrix::from_blocks(
        &ComplexMatrix::zeros(m, m),
        a,
        &a.adjoint(),
        &ComplexMatrix::zeros(n, n),
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct DilationReport {
    /// `||U_rho(A) - rho(U_A)||_F`
    pub partial_isometry_residual: f64,
    /// `||(|rho(A)|) - diag(|A*|, |A|)||_F / (1 + ||A||_F)`
    pub positive_factor_residual: f64,
    /// Defining residuals of the direct decomposition of `rho(A)`.
    pub dilation_polar: PolarResiduals,
    pub holds: bool,
}

/// Checks that the polar decomposition of `rho(A)` is `rho(U_A) |rho(A)|`
/// with `|rho(A)| = diag(|A*|, |A|)`, comparing against a direct
/// decomposition of the dilation.
pub fn verify_dilation_polar(a: &ComplexMatrix, tol: &Tolerance) -> Result<DilationReport> {
    let pd_a = polar_decompose(a, tol)?;
    let pd_a_star = adjoint_polar(&pd_a);
    let rho = dilation_rho(a);
    let pd_rho = polar_decompose(&rho, tol)?;
    let expected_abs = ComplexMatrix::block_diag(&pd_a_star.positive_factor, &pd_a.positive_factor);
    let partial_isometry_residual = pd_rho
        .partial_isometry
        .distance(&dilation_rho(&pd_a.partial_isometry));
    let positive_factor_residual =
        pd_rho.positive_factor.distance(&expected_abs) / (1.0 + a.frobenius_norm());
    let dilation_polar = pd_rho.residuals()?;
    let holds = partial_isometry_residual <= tol.eq_abs
        && positive_factor_residual <= tol.eq_abs
        && dilation_polar.max() <= tol.eq_abs;
    Ok(DilationReport {
        partial_isometry_residual,
        positive_factor_residual,
        dilation_polar,
        holds,
    })
}
