//! Polar decompositions of `X = TAS` and `Y = |T| A |S*|`.
//!
//! Given `T = U_T|T|` and `S = U_S|S|`, the partial isometries of `X` and
//! `Y` determine each other:
//!
//! * `U_X = U_T U_Y U_S`
//! * `U_Y = U_T* U_X U_S*`
//!
//! and the positive factors are unitarily linked through `U_S`:
//! `|X| = U_S* |Y| U_S`, `|Y| = U_S |X| U_S*`.
//!
//! [`verify_product_theorem`] computes both sides independently and records
//! the residuals. It also re-runs the check on the block-diagonal dilation
//! `T~ = diag(T, S*)`, `A~ = rho(A)`, `S~ = T~*`, for which `X~ = rho(X)` and
//! `Y~ = rho(Y)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::polar::{
    abs_op, abs_op_relative, adjoint_polar, dilation_rho, polar_decompose,
    polar_decompose_relative, PolarDecomposition,
};
use crate::spectral::range_projection_relative;
use crate::tolerance::Tolerance;

/// Partial-isometry comparisons are held to this multiple of `eq_abs`.
pub const FACTOR_SLACK: f64 = 10.0;

/// `T` (k x k), `A` (k x h), `S` (h x h).
#[derive(Debug, Clone)]
pub struct ProductProblem {
    pub t: ComplexMatrix,
    pub a: ComplexMatrix,
    pub s: ComplexMatrix,
    pub tol: Tolerance,
}

impl ProductProblem {
    pub fn new(
        t: ComplexMatrix,
        a: ComplexMatrix,
        s: ComplexMatrix,
        tol: Tolerance,
    ) -> Result<Self> {
        for (name, m) in [("T", &t), ("S", &s)] {
            if !m.is_square() {
                return Err(Error::NotSquare {
                    op: if name == "T" {
                        "product problem (T)"
                    } else {
                        "product problem (S)"
                    },
                    rows: m.rows(),
                    cols: m.cols(),
                });
            }
        }
        if t.cols() != a.rows() || a.cols() != s.rows() {
            return Err(Error::DimensionMismatch {
                op: "product problem",
                left: format!("T {}x{}, S {}x{}", t.rows(), t.cols(), s.rows(), s.cols()),
                right: format!("A {}x{}", a.rows(), a.cols()),
            });
        }
        Ok(Self { t, a, s, tol })
    }
}

/// `X = TAS` and `Y = |T| A |S*|`.
pub fn build_xy(p: &ProductProblem) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let x = p.t.checked_mul(&p.a)?.checked_mul(&p.s)?;
    let abs_t = abs_op(&p.t, &p.tol)?;
    let abs_s_star = abs_op(&p.s.adjoint(), &p.tol)?;
    let y = abs_t.checked_mul(&p.a)?.checked_mul(&abs_s_star)?;
    Ok((x, y))
}

/// `||T||_F ||A||_F ||S||_F`, the scale against which the numerical ranks
/// of `X` and `Y` are judged (both are bounded by it).
pub fn product_scale(p: &ProductProblem) -> f64 {
    p.t.frobenius_norm() * p.a.frobenius_norm() * p.s.frobenius_norm()
}

/// Scaled residuals of `|X| = U_S*|Y|U_S` and `|Y| = U_S|X|U_S*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConjugationResiduals {
    pub abs_x: f64,
    pub abs_y: f64,
}

pub fn conjugation_identities(p: &ProductProblem) -> Result<ConjugationResiduals> {
    let (x, y) = build_xy(p)?;
    let us = polar_decompose(&p.s, &p.tol)?.partial_isometry;
    conjugation_from(&x, &y, &us, product_scale(p), &p.tol)
}

fn conjugation_from(
    x: &ComplexMatrix,
    y: &ComplexMatrix,
    us: &ComplexMatrix,
    scale: f64,
    tol: &Tolerance,
) -> Result<ConjugationResiduals> {
    let abs_x = abs_op_relative(x, scale, tol)?;
    let abs_y = abs_op_relative(y, scale, tol)?;
    let x_from_y = &(&us.adjoint() * &abs_y) * us;
    let y_from_x = &(us * &abs_x) * &us.adjoint();
    Ok(ConjugationResiduals {
        abs_x: abs_x.distance(&x_from_y) / (1.0 + abs_x.frobenius_norm()),
        abs_y: abs_y.distance(&y_from_x) / (1.0 + abs_y.frobenius_norm()),
    })
}

/// `U_X = U_T U_Y U_S`.
pub fn ux_from_uy(
    ut: &ComplexMatrix,
    uy: &ComplexMatrix,
    us: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    ut.checked_mul(uy)?.checked_mul(us)
}

/// `U_Y = U_T* U_X U_S*`.
pub fn uy_from_ux(
    ut: &ComplexMatrix,
    ux: &ComplexMatrix,
    us: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    ut.adjoint().checked_mul(ux)?.checked_mul(&us.adjoint())
}

#[derive(Debug, Clone, Serialize)]
pub struct ProductResiduals {
    /// `||U_T U_Y U_S - U_X||_F` with both factors computed directly.
    pub ux_transport: f64,
    /// `||U_T* U_X U_S* - U_Y||_F`.
    pub uy_transport: f64,
    /// `||(U_T U_Y U_S)*(U_T U_Y U_S) - P_R(X*)||_F`.
    pub ux_initial_projection: f64,
    /// `||Y - U_T* X U_S*||_F / (1 + ||Y||_F)`.
    pub y_identity: f64,
    pub conjugation: ConjugationResiduals,
}

impl ProductResiduals {
    fn factor_max(&self) -> f64 {
        self.ux_transport
            .max(self.uy_transport)
            .max(self.ux_initial_projection)
    }

    fn equation_max(&self) -> f64 {
        self.y_identity
            .max(self.conjugation.abs_x)
            .max(self.conjugation.abs_y)
    }

    fn holds(&self, tol: &Tolerance) -> bool {
        self.factor_max() <= FACTOR_SLACK * tol.eq_abs && self.equation_max() <= tol.eq_abs
    }
}

/// The same theorem checked on the block dilation of the problem.
#[derive(Debug, Clone, Serialize)]
pub struct DilationCheck {
    /// `||T~ A~ S~ - rho(X)||_F / (1 + ||X||_F)`
    pub x_is_rho: f64,
    /// `||(|T~| A~ |S~*|) - rho(Y)||_F / (1 + ||Y||_F)`
    pub y_is_rho: f64,
    /// `||U_X~ - rho(U_X)||_F`, direct decompositions on both sides.
    pub ux_is_rho: f64,
    pub residuals: ProductResiduals,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProductReport {
    pub x: ComplexMatrix,
    pub y: ComplexMatrix,
    pub u_x_direct: ComplexMatrix,
    pub u_y_direct: ComplexMatrix,
    pub u_x_formula: ComplexMatrix,
    pub u_y_formula: ComplexMatrix,
    pub residuals: ProductResiduals,
    pub dilation: DilationCheck,
    pub holds: bool,
}

impl ProductReport {
    /// Largest recorded residual, direct and dilated paths together.
    pub fn max_residual(&self) -> f64 {
        let d = &self.dilation;
        self.residuals
            .factor_max()
            .max(self.residuals.equation_max())
            .max(d.residuals.factor_max())
            .max(d.residuals.equation_max())
            .max(d.x_is_rho)
            .max(d.y_is_rho)
            .max(d.ux_is_rho)
    }

    /// Named residuals in a fixed order, for reports.
    pub fn named_residuals(&self) -> Vec<(&'static str, f64)> {
        let r = &self.residuals;
        let d = &self.dilation;
        vec![
            ("ux_transport", r.ux_transport),
            ("uy_transport", r.uy_transport),
            ("ux_initial_projection", r.ux_initial_projection),
            ("y_identity", r.y_identity),
            ("conjugation_abs_x", r.conjugation.abs_x),
            ("conjugation_abs_y", r.conjugation.abs_y),
            ("dilation_x_is_rho", d.x_is_rho),
            ("dilation_y_is_rho", d.y_is_rho),
            ("dilation_ux_is_rho", d.ux_is_rho),
            ("dilation_ux_transport", d.residuals.ux_transport),
            ("dilation_uy_transport", d.residuals.uy_transport),
            ("dilation_conjugation_abs_x", d.residuals.conjugation.abs_x),
        ]
    }
}

struct Transport {
    x: ComplexMatrix,
    y: ComplexMatrix,
    pd_x: PolarDecomposition,
    pd_y: PolarDecomposition,
    u_x_formula: ComplexMatrix,
    u_y_formula: ComplexMatrix,
    residuals: ProductResiduals,
}

/// Both directions of the transport from the given factors of `T` and `S`.
fn transport(
    p: &ProductProblem,
    pd_t: &PolarDecomposition,
    pd_s: &PolarDecomposition,
) -> Result<Transport> {
    let tol = &p.tol;
    let (x, y) = build_xy(p)?;
    let scale = product_scale(p);
    let pd_x = polar_decompose_relative(&x, scale, tol)?;
    let pd_y = polar_decompose_relative(&y, scale, tol)?;
    let ut = &pd_t.partial_isometry;
    let us = &pd_s.partial_isometry;
    let u_x_formula = ux_from_uy(ut, &pd_y.partial_isometry, us)?;
    let u_y_formula = uy_from_ux(ut, &pd_x.partial_isometry, us)?;
    let p_x_star = range_projection_relative(&x.adjoint(), scale, tol)?;
    let y_from_x = &(&ut.adjoint() * &x) * &us.adjoint();
    let residuals = ProductResiduals {
        ux_transport: u_x_formula.distance(&pd_x.partial_isometry),
        uy_transport: u_y_formula.distance(&pd_y.partial_isometry),
        ux_initial_projection: (&u_x_formula.adjoint() * &u_x_formula).distance(&p_x_star),
        y_identity: y.distance(&y_from_x) / (1.0 + y.frobenius_norm()),
        conjugation: conjugation_from(&x, &y, us, scale, tol)?,
    };
    Ok(Transport {
        x,
        y,
        pd_x,
        pd_y,
        u_x_formula,
        u_y_formula,
        residuals,
    })
}

pub fn verify_product_theorem(p: &ProductProblem) -> Result<ProductReport> {
    let tol = &p.tol;
    let pd_t = polar_decompose(&p.t, tol)?;
    let pd_s = polar_decompose(&p.s, tol)?;
    let direct = transport(p, &pd_t, &pd_s)?;

    // Dilated problem. Its factors come from the block structure:
    // T~ = diag(U_T, U_S*) diag(|T|, |S*|) and S~ = T~*.
    let t_tilde = ComplexMatrix::block_diag(&p.t, &p.s.adjoint());
    let pd_s_star = adjoint_polar(&pd_s);
    let pd_t_tilde = PolarDecomposition {
        source: t_tilde.clone(),
        partial_isometry: ComplexMatrix::block_diag(
            &pd_t.partial_isometry,
            &pd_s_star.partial_isometry,
        ),
        positive_factor: ComplexMatrix::block_diag(
            &pd_t.positive_factor,
            &pd_s_star.positive_factor,
        ),
        numerical_rank: pd_t.numerical_rank + pd_s.numerical_rank,
        rank_reference: 0.0,
        tol: *tol,
    };
    let pd_s_tilde = adjoint_polar(&pd_t_tilde);
    let dilated =
        ProductProblem::new(t_tilde, dilation_rho(&p.a), pd_s_tilde.source.clone(), *tol)?;
    let lifted = transport(&dilated, &pd_t_tilde, &pd_s_tilde)?;
    let dilation = DilationCheck {
        x_is_rho: lifted.x.distance(&dilation_rho(&direct.x)) / (1.0 + direct.x.frobenius_norm()),
        y_is_rho: lifted.y.distance(&dilation_rho(&direct.y)) / (1.0 + direct.y.frobenius_norm()),
        ux_is_rho: lifted
            .pd_x
            .partial_isometry
            .distance(&dilation_rho(&direct.pd_x.partial_isometry)),
        holds: false,
        residuals: lifted.residuals,
    };
    let dilation = DilationCheck {
        holds: dilation.residuals.holds(tol)
            && dilation.x_is_rho.max(dilation.y_is_rho) <= tol.eq_abs
            && dilation.ux_is_rho <= FACTOR_SLACK * tol.eq_abs,
        ..dilation
    };
    let holds = direct.residuals.holds(tol) && dilation.holds;
    Ok(ProductReport {
        x: direct.x,
        y: direct.y,
        u_x_direct: direct.pd_x.partial_isometry,
        u_y_direct: direct.pd_y.partial_isometry,
        u_x_formula: direct.u_x_formula,
        u_y_formula: direct.u_y_formula,
        residuals: direct.residuals,
        dilation,
        holds,
    })
}
