//! Structural predicates. Each returns a [`Check`] carrying the residual that
//! decided it, never a bare boolean.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::matrix::ComplexMatrix;
use crate::spectral::{hermitian_eigen, operator_norm};
use crate::tolerance::Tolerance;

/// Outcome of a tolerance test: whether it held and the measured residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub holds: bool,
    pub residual: f64,
}

impl Check {
    pub fn within(residual: f64, bound: f64) -> Self {
        Self {
            holds: residual <= bound,
            residual,
        }
    }

    fn failed() -> Self {
        Self {
            holds: false,
            residual: f64::INFINITY,
        }
    }
}

/// `||M - M*||_F / (1 + ||M||_F) <= eq_abs`.
pub fn is_hermitian(m: &ComplexMatrix, tol: &Tolerance) -> Check {
    if !m.is_square() {
        return Check::failed();
    }
    Check::within(hermitian_residual(m), tol.eq_abs)
}

fn hermitian_residual(m: &ComplexMatrix) -> f64 {
    m.distance(&m.adjoint()) / (1.0 + m.frobenius_norm())
}

/// Hermitian within tolerance and smallest eigenvalue of the Hermitian part
/// at least `-eq_abs * (1 + ||M||_F)`. The residual is the larger of the
/// scaled Hermitian defect and the scaled negative part of the spectrum.
pub fn is_positive(m: &ComplexMatrix, tol: &Tolerance) -> Result<Check> {
    if !m.is_square() {
        return Ok(Check::failed());
    }
    let herm = hermitian_residual(m);
    let (values, _) = hermitian_eigen(m)?;
    let lowest = values.first().copied().unwrap_or(0.0);
    let negative = (-lowest).max(0.0) / (1.0 + m.frobenius_norm());
    Ok(Check::within(herm.max(negative), tol.eq_abs))
}

/// Hermitian and idempotent: `max(||P - P*||_F, ||P^2 - P||_F) <= eq_abs`.
pub fn is_projection(p: &ComplexMatrix, tol: &Tolerance) -> Check {
    if !p.is_square() {
        return Check::failed();
    }
    let herm = p.distance(&p.adjoint());
    let idem = (p * p).distance(p);
    Check::within(herm.max(idem), tol.eq_abs)
}

/// `||U U* U - U||_F <= eq_abs`.
pub fn is_partial_isometry(u: &ComplexMatrix, tol: &Tolerance) -> Check {
    let residual = (&(u * &u.adjoint()) * u).distance(u);
    Check::within(residual, tol.eq_abs)
}

/// `||W||_2 <= 1 + eq_abs`; the residual is the excess over one.
pub fn is_contraction(w: &ComplexMatrix, tol: &Tolerance) -> Result<Check> {
    let excess = (operator_norm(w, tol)? - 1.0).max(0.0);
    Ok(Check::within(excess, tol.eq_abs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn proposition_partial_isometry() {
        let s = 1.0 / 5f64.sqrt();
        let ua = ComplexMatrix::from_real_rows(&[
            &[2.0 * s, 0.0, -s],
            &[0.0, 0.0, 0.0],
            &[s, 0.0, 2.0 * s],
        ]);
        assert!(is_partial_isometry(&ua, &tol()).holds);
        assert!(is_contraction(&ua, &tol()).unwrap().holds);
        assert!(!is_partial_isometry(&ua.scale(0.5), &tol()).holds);
    }

    #[test]
    fn projections() {
        assert!(is_projection(&ComplexMatrix::from_real_diagonal(&[1.0, 1.0, 0.0]), &tol()).holds);
        assert!(!is_projection(&ComplexMatrix::from_real_diagonal(&[1.0, 0.5]), &tol()).holds);
        // Idempotent but not Hermitian.
        let oblique = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
        assert!(!is_projection(&oblique, &tol()).holds);
    }

    #[test]
    fn positivity() {
        let nilpotent = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(!is_positive(&nilpotent, &tol()).unwrap().holds);
        assert!(
            is_positive(&ComplexMatrix::from_real_diagonal(&[2.0, 0.0]), &tol())
                .unwrap()
                .holds
        );
        let c = is_positive(&ComplexMatrix::from_real_diagonal(&[2.0, -1.0]), &tol()).unwrap();
        assert!(!c.holds && c.residual > 0.1);
        assert!(
            !is_positive(&ComplexMatrix::zeros(2, 3), &tol())
                .unwrap()
                .holds
        );
    }

    #[test]
    fn contraction_excess() {
        let c = is_contraction(&ComplexMatrix::from_real_diagonal(&[1.5, 0.2]), &tol()).unwrap();
        assert!(!c.holds);
        assert!((c.residual - 0.5).abs() < 1e-14);
    }
}
