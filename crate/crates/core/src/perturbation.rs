//! Polar decomposition of a multiplicative perturbation `M = E T F*`.
//!
//! With `Q`, `P` the range projections of `T` and `T*`, and coordinate
//! unitaries `U_Q`, `U_P` splitting off those ranges,
//!
//! ```text
//! U_Q M U_P* = [[B, 0], [C, 0]] [[A, 0], [0, 0]] [[D, 0], [G, 0]]*
//! ```
//!
//! The outer factors have positive parts `diag(theta_BC, 0)` and
//! `diag(theta_DG, 0)` with `theta_BC = (B*B + C*C)^(1/2)`, so by the product
//! theorem the partial isometry of `M` is assembled from that of the small
//! core `Y = theta_BC A theta_DG` and the reduced solutions `Z_i`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::gen::{random_unitary, TrialRng};
use crate::matrix::ComplexMatrix;
use crate::polar::{abs_op, abs_op_relative, polar_decompose, polar_decompose_relative};
use crate::predicates::{is_partial_isometry, is_projection};
use crate::spectral::{operator_norm, pinv, range_projection, svd};
use crate::tolerance::Tolerance;

/// `T` (m x n), `E` (m x m), `F` (n x n).
#[derive(Debug, Clone)]
pub struct PerturbationProblem {
    pub t: ComplexMatrix,
    pub e: ComplexMatrix,
    pub f: ComplexMatrix,
    pub tol: Tolerance,
}

impl PerturbationProblem {
    pub fn new(
        t: ComplexMatrix,
        e: ComplexMatrix,
        f: ComplexMatrix,
        tol: Tolerance,
    ) -> Result<Self> {
        let (m, n) = t.shape();
        if e.shape() != (m, m) || f.shape() != (n, n) {
            return Err(Error::DimensionMismatch {
                op: "perturbation problem",
                left: format!("T {m}x{n}"),
                right: format!("E {}x{}, F {}x{}", e.rows(), e.cols(), f.rows(), f.cols()),
            });
        }
        Ok(Self { t, e, f, tol })
    }

    /// `M = E T F*`.
    pub fn m(&self) -> ComplexMatrix {
        &(&self.e * &self.t) * &self.f.adjoint()
    }
}

/// Coordinates splitting off `R(T*)` (first `r_p` rows of `U_P`) and `R(T)`
/// (first `r_q` rows of `U_Q`).
#[derive(Debug, Clone, Serialize)]
pub struct SplitBases {
    pub p: ComplexMatrix,
    pub q: ComplexMatrix,
    pub u_p: ComplexMatrix,
    pub u_q: ComplexMatrix,
    pub r_p: usize,
    pub r_q: usize,
}

/// Bases from the singular vectors of `T = U S V*`: `U_Q = U*`, `U_P = V*`.
pub fn split_bases(t: &ComplexMatrix, tol: &Tolerance) -> Result<SplitBases> {
    let f = svd(t, tol)?;
    let (ur, vr) = (f.retained_u(), f.retained_v());
    Ok(SplitBases {
        p: &vr * &vr.adjoint(),
        q: &ur * &ur.adjoint(),
        u_p: f.v.adjoint(),
        u_q: f.u.adjoint(),
        r_p: f.numerical_rank,
        r_q: f.numerical_rank,
    })
}

impl SplitBases {
    /// The same split with each of the four coordinate blocks rotated by an
    /// independent random unitary. The pipeline result must not change.
    pub fn remixed(&self, rng: &mut TrialRng) -> SplitBases {
        let mix = |u: &ComplexMatrix, r: usize, rng: &mut TrialRng| {
            let k = u.rows();
            let w = ComplexMatrix::block_diag(&random_unitary(r, rng), &random_unitary(k - r, rng));
            &w * u
        };
        SplitBases {
            p: self.p.clone(),
            q: self.q.clone(),
            u_p: mix(&self.u_p, self.r_p, rng),
            u_q: mix(&self.u_q, self.r_q, rng),
            r_p: self.r_p,
            r_q: self.r_q,
        }
    }

    /// Largest of the unitarity and block-diagonalization defects.
    pub fn residual(&self) -> f64 {
        let split = |u: &ComplexMatrix, proj: &ComplexMatrix, r: usize| {
            let k = u.rows();
            let id = ComplexMatrix::identity(k);
            let target = ComplexMatrix::block_diag(
                &ComplexMatrix::identity(r),
                &ComplexMatrix::zeros(k - r, k - r),
            );
            (u * &u.adjoint())
                .distance(&id)
                .max((&(u * proj) * &u.adjoint()).distance(&target))
        };
        split(&self.u_p, &self.p, self.r_p).max(split(&self.u_q, &self.q, self.r_q))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Blocks {
    /// `r_q x r_q`
    pub b: ComplexMatrix,
    /// `(m - r_q) x r_q`
    pub c: ComplexMatrix,
    /// `r_p x r_p`
    pub d: ComplexMatrix,
    /// `(n - r_p) x r_p`
    pub g: ComplexMatrix,
    /// `r_q x r_p`
    pub a: ComplexMatrix,
}

/// Reads the blocks off `U_Q E Q U_Q*`, `U_P F P U_P*` and `U_Q T U_P*`.
/// Fails if `U_Q T U_P*` carries weight outside its leading block.
pub fn extract_blocks(p: &PerturbationProblem, s: &SplitBases) -> Result<Blocks> {
    let (m, n) = p.t.shape();
    let (rq, rp) = (s.r_q, s.r_p);
    let eq = &(&(&s.u_q * &p.e) * &s.q) * &s.u_q.adjoint();
    let fp = &(&(&s.u_p * &p.f) * &s.p) * &s.u_p.adjoint();
    let tt = &(&s.u_q * &p.t) * &s.u_p.adjoint();
    let a = tt.block(0, 0, rq, rp);
    let embedded = ComplexMatrix::from_blocks(
        &a,
        &ComplexMatrix::zeros(rq, n - rp),
        &ComplexMatrix::zeros(m - rq, rp),
        &ComplexMatrix::zeros(m - rq, n - rp),
    );
    let residual = tt.distance(&embedded) / (1.0 + p.t.frobenius_norm());
    if residual > p.tol.eq_abs {
        return Err(Error::InconsistentBlocks {
            block: "U_Q T U_P*",
            residual,
        });
    }
    Ok(Blocks {
        b: eq.block(0, 0, rq, rq),
        c: eq.block(rq, 0, m - rq, rq),
        d: fp.block(0, 0, rp, rp),
        g: fp.block(rp, 0, n - rp, rp),
        a,
    })
}

/// The unique `D` with `A D = C` and `R(D)` inside `R(A*)`, computed as
/// `pinv(A) C`. Requires `R(C)` inside `R(A)`.
pub fn reduced_solution(
    a: &ComplexMatrix,
    c: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<ComplexMatrix> {
    if a.rows() != c.rows() {
        return Err(Error::DimensionMismatch {
            op: "reduced_solution",
            left: format!("A {}x{}", a.rows(), a.cols()),
            right: format!("C {}x{}", c.rows(), c.cols()),
        });
    }
    let residual = range_excess(a, c, tol)?;
    let bound = tol.scaled(c.frobenius_norm());
    if residual > bound {
        return Err(Error::Unsolvable { residual, bound });
    }
    Ok(&pinv(a, tol)? * c)
}

/// `||(I - P_R(A)) C||_F`: how far `R(C)` sticks out of `R(A)`.
fn range_excess(a: &ComplexMatrix, c: &ComplexMatrix, tol: &Tolerance) -> Result<f64> {
    let p = range_projection(a, tol)?;
    Ok((c - &(&p * c)).frobenius_norm())
}

/// The two defining properties of a reduced solution `D` of `A X = C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedResiduals {
    /// `||A D - C||_F / (1 + ||C||_F)`
    pub equation: f64,
    /// `||P_R(A*) D - D||_F / (1 + ||D||_F)`
    pub range: f64,
}

impl ReducedResiduals {
    pub fn of(
        a: &ComplexMatrix,
        c: &ComplexMatrix,
        d: &ComplexMatrix,
        tol: &Tolerance,
    ) -> Result<Self> {
        let p = range_projection(&a.adjoint(), tol)?;
        Ok(Self {
            equation: (a * d).distance(c) / (1.0 + c.frobenius_norm()),
            range: (&p * d).distance(d) / (1.0 + d.frobenius_norm()),
        })
    }

    pub fn max(&self) -> f64 {
        self.equation.max(self.range)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TractablePairReport {
    pub s: ComplexMatrix,
    pub c: ComplexMatrix,
    pub d: ComplexMatrix,
    /// `[[0, 0], [C, D]]`
    pub u: ComplexMatrix,
    /// `||U* - U_direct(T*)||_F`
    pub factor: f64,
    /// `||diag(0, S) - |T*|_direct||_F / (1 + ||S||_F)`
    pub positive_factor: f64,
    /// `||T* - U* diag(0, S)||_F / (1 + ||T||_F)`
    pub reconstruction: f64,
    pub reduced_c: ReducedResiduals,
    pub reduced_d: ReducedResiduals,
    pub holds: bool,
}

/// Builds `T = [[0, 0], [A, B]]` (`A`: k x h, `B`: k x k) and
/// `S = (AA* + BB*)^(1/2)`, and checks that `T* = U* diag(0, S)` with
/// `U = [[0, 0], [C, D]]`, `C`, `D` the reduced solutions of `S X = A` and
/// `S X = B`, is the polar decomposition of `T*`.
pub fn tractable_pair_polar(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<TractablePairReport> {
    let (k, h) = a.shape();
    if b.shape() != (k, k) {
        return Err(Error::DimensionMismatch {
            op: "tractable_pair_polar",
            left: format!("A {k}x{h}"),
            right: format!("B {}x{}", b.rows(), b.cols()),
        });
    }
    let t = ComplexMatrix::from_blocks(
        &ComplexMatrix::zeros(h, h),
        &ComplexMatrix::zeros(h, k),
        a,
        b,
    );
    // S^2 = AA* + BB* is the Gram matrix of the stacked column [A*; B*].
    let s = abs_op(&ComplexMatrix::vstack(&a.adjoint(), &b.adjoint()), tol)?;
    let c = reduced_solution(&s, a, tol)?;
    let d = reduced_solution(&s, b, tol)?;
    let u = ComplexMatrix::from_blocks(
        &ComplexMatrix::zeros(h, h),
        &ComplexMatrix::zeros(h, k),
        &c,
        &d,
    );
    let abs_t_star = ComplexMatrix::block_diag(&ComplexMatrix::zeros(h, h), &s);
    let t_star = t.adjoint();
    let direct = polar_decompose(&t_star, tol)?;
    let factor = u.adjoint().distance(&direct.partial_isometry);
    let positive_factor = abs_t_star.distance(&direct.positive_factor) / (1.0 + s.frobenius_norm());
    let reconstruction =
        (&u.adjoint() * &abs_t_star).distance(&t_star) / (1.0 + t.frobenius_norm());
    let reduced_c = ReducedResiduals::of(&s, a, &c, tol)?;
    let reduced_d = ReducedResiduals::of(&s, b, &d, tol)?;
    let holds = factor <= tol.eq_abs
        && positive_factor <= tol.eq_abs
        && reconstruction <= tol.eq_abs
        && reduced_c.max() <= tol.eq_abs
        && reduced_d.max() <= tol.eq_abs;
    Ok(TractablePairReport {
        s,
        c,
        d,
        u,
        factor,
        positive_factor,
        reconstruction,
        reduced_c,
        reduced_d,
        holds,
    })
}

/// `U_M = U_Q* [[Z1 U_Y Z3*, Z1 U_Y Z4*], [Z2 U_Y Z3*, Z2 U_Y Z4*]] U_P`.
pub fn assemble_um(
    z: [&ComplexMatrix; 4],
    u_y: &ComplexMatrix,
    s: &SplitBases,
) -> Result<ComplexMatrix> {
    let [z1, z2, z3, z4] = z;
    let left = ComplexMatrix::vstack(z1, z2);
    let right = ComplexMatrix::vstack(z3, z4);
    let u_x_tilde = left.checked_mul(u_y)?.checked_mul(&right.adjoint())?;
    s.u_q.adjoint().checked_mul(&u_x_tilde)?.checked_mul(&s.u_p)
}

/// Residual evidence for the hypotheses of the assembly formula. In finite
/// dimensions every one of them holds; they are measured anyway.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionResiduals {
    /// Range projections of `theta_BC`, `theta_DG` are genuine projections.
    pub theta_ranges: f64,
    /// `R(B*), R(C*)` inside `R(theta_BC)`, `R(D*), R(G*)` inside `R(theta_DG)`.
    pub inclusions: f64,
    /// Range projections of `Y`, `Y*` are genuine projections.
    pub y_ranges: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerturbationResiduals {
    /// `||M - U_M |M|||_F / (1 + ||M||_F)`
    pub reconstruction: f64,
    /// `||U_M U_M* U_M - U_M||_F`
    pub partial_isometry: f64,
    /// `||U_M - U_direct(M)||_F`
    pub factor_match: f64,
    /// `||U_Q M U_P* - [B; C] A [D; G]*||_F / (1 + ||M||_F)`
    pub block_consistency: f64,
    /// `||theta^2 - (B*B + C*C)||_F / (1 + ||B*B + C*C||_F)`, worst of both.
    pub theta_square: f64,
    pub split: f64,
    /// Z1..Z4, in order.
    pub reduced: [ReducedResiduals; 4],
    pub conditions: ConditionResiduals,
}

impl PerturbationResiduals {
    pub fn reduced_max(&self) -> f64 {
        self.reduced
            .iter()
            .map(ReducedResiduals::max)
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PerturbationDecomposition {
    pub split: SplitBases,
    pub blocks: Blocks,
    pub theta_bc: ComplexMatrix,
    pub theta_dg: ComplexMatrix,
    pub z: [ComplexMatrix; 4],
    pub y: ComplexMatrix,
    pub u_y: ComplexMatrix,
    pub m: ComplexMatrix,
    pub u_m: ComplexMatrix,
    pub u_m_direct: ComplexMatrix,
    /// `sigma_max / sigma_min` over the retained spectrum of each theta.
    /// Diagnostic only.
    pub theta_condition: (f64, f64),
    pub residuals: PerturbationResiduals,
}

impl PerturbationDecomposition {
    /// Pipeline agrees with the direct decomposition and every recorded
    /// identity is within tolerance.
    pub fn holds(&self, tol: &Tolerance) -> bool {
        let r = &self.residuals;
        let factor_bound = crate::product::FACTOR_SLACK * tol.eq_abs;
        r.factor_match <= factor_bound
            && r.partial_isometry <= factor_bound
            && r.reconstruction <= tol.eq_abs
            && r.block_consistency <= tol.eq_abs
            && r.theta_square <= tol.eq_abs
            && r.split <= tol.eq_abs
            && r.reduced_max() <= tol.eq_abs
            && r.conditions.inclusions <= tol.eq_abs
    }
}

pub fn perturb_polar(p: &PerturbationProblem) -> Result<PerturbationDecomposition> {
    let split = split_bases(&p.t, &p.tol)?;
    perturb_polar_with(p, split)
}

/// Runs the pipeline on a caller-supplied split, e.g. a remixed one.
pub fn perturb_polar_with(
    p: &PerturbationProblem,
    split: SplitBases,
) -> Result<PerturbationDecomposition> {
    let tol = &p.tol;
    let blocks = extract_blocks(p, &split)?;
    let Blocks { b, c, d, g, a } = &blocks;
    // Every derived quantity is a product of E, T, F and unitaries; its rank
    // is judged against the norms of those factors.
    let (e_norm, f_norm) = (p.e.frobenius_norm(), p.f.frobenius_norm());
    let theta_bc = abs_op_relative(&ComplexMatrix::vstack(b, c), e_norm, tol)?;
    let theta_dg = abs_op_relative(&ComplexMatrix::vstack(d, g), f_norm, tol)?;
    let y = &(&theta_bc * a) * &theta_dg;
    let scale = e_norm * p.t.frobenius_norm() * f_norm;
    let u_y = polar_decompose_relative(&y, scale, tol)?.partial_isometry;
    let rhs = [b.adjoint(), c.adjoint(), d.adjoint(), g.adjoint()];
    let thetas = [&theta_bc, &theta_bc, &theta_dg, &theta_dg];
    let mut z_star = Vec::with_capacity(4);
    let mut reduced = Vec::with_capacity(4);
    for (theta, r) in thetas.iter().zip(&rhs) {
        let sol = reduced_solution(theta, r, tol)?;
        reduced.push(ReducedResiduals::of(theta, r, &sol, tol)?);
        z_star.push(sol);
    }
    let z: [ComplexMatrix; 4] = std::array::from_fn(|i| z_star[i].adjoint());
    let u_m = assemble_um([&z[0], &z[1], &z[2], &z[3]], &u_y, &split)?;

    let m = p.m();
    let direct = polar_decompose_relative(&m, scale, tol)?;
    let m_norm = m.frobenius_norm();
    let core = &(&ComplexMatrix::vstack(b, c) * a) * &ComplexMatrix::vstack(d, g).adjoint();
    let block_consistency =
        (&(&split.u_q * &m) * &split.u_p.adjoint()).distance(&core) / (1.0 + m_norm);
    let theta_square = |theta: &ComplexMatrix, top: &ComplexMatrix, bottom: &ComplexMatrix| {
        let gram = &(&top.adjoint() * top) + &(&bottom.adjoint() * bottom);
        (theta * theta).distance(&gram) / (1.0 + gram.frobenius_norm())
    };
    let projection_defect = |x: &ComplexMatrix| -> Result<f64> {
        Ok(is_projection(&range_projection(x, tol)?, tol).residual)
    };
    let mut inclusions: f64 = 0.0;
    for (theta, r) in thetas.iter().zip(&rhs) {
        inclusions = inclusions.max(range_excess(theta, r, tol)? / (1.0 + r.frobenius_norm()));
    }
    let conditions = ConditionResiduals {
        theta_ranges: projection_defect(&theta_bc)?.max(projection_defect(&theta_dg)?),
        inclusions,
        y_ranges: projection_defect(&y)?.max(projection_defect(&y.adjoint())?),
    };
    let residuals = PerturbationResiduals {
        reconstruction: (&u_m * &direct.positive_factor).distance(&m) / (1.0 + m_norm),
        partial_isometry: is_partial_isometry(&u_m, tol).residual,
        factor_match: u_m.distance(&direct.partial_isometry),
        block_consistency,
        theta_square: theta_square(&theta_bc, b, c).max(theta_square(&theta_dg, d, g)),
        split: split.residual(),
        reduced: [reduced[0], reduced[1], reduced[2], reduced[3]],
        conditions,
    };
    let theta_condition = (
        condition_number(&theta_bc, tol)?,
        condition_number(&theta_dg, tol)?,
    );
    Ok(PerturbationDecomposition {
        split,
        blocks,
        theta_bc,
        theta_dg,
        z,
        y,
        u_y,
        m,
        u_m,
        u_m_direct: direct.partial_isometry,
        theta_condition,
        residuals,
    })
}

/// Ratio of the largest to the smallest retained singular value; 1 for a
/// matrix of numerical rank zero.
fn condition_number(m: &ComplexMatrix, tol: &Tolerance) -> Result<f64> {
    let f = svd(m, tol)?;
    Ok(match f.numerical_rank {
        0 => 1.0,
        r => f.singular_values[0] / f.singular_values[r - 1],
    })
}

/// Operator 2-norm of `U1 - U2`.
pub fn unitary_distance(u1: &ComplexMatrix, u2: &ComplexMatrix, tol: &Tolerance) -> Result<f64> {
    operator_norm(&u1.checked_sub(u2)?, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::gen::{gen_matrix_with, trial_rng, Spectrum};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn random_problem(seed: u64, m: usize, n: usize, rank: usize) -> PerturbationProblem {
        let mut rng = trial_rng(seed, 0);
        let t = gen_matrix_with(m, n, rank, Spectrum::MODERATE, &mut rng).unwrap();
        let e = gen_matrix_with(m, m, m.saturating_sub(1), Spectrum::MODERATE, &mut rng).unwrap();
        let f = gen_matrix_with(n, n, n.saturating_sub(1), Spectrum::MODERATE, &mut rng).unwrap();
        PerturbationProblem::new(t, e, f, tol()).unwrap()
    }

    #[test]
    fn split_of_diagonal_projection_is_trivial() {
        let t = ComplexMatrix::from_real_diagonal(&[1.0, 1.0, 0.0]);
        let s = split_bases(&t, &tol()).unwrap();
        assert_eq!((s.r_p, s.r_q), (2, 2));
        assert!(s.u_p.distance(&ComplexMatrix::identity(3)) < 1e-14);
        assert!(s.residual() < 1e-14);
    }

    #[test]
    fn split_of_zero_is_empty() {
        let s = split_bases(&ComplexMatrix::zeros(3, 2), &tol()).unwrap();
        assert_eq!((s.r_p, s.r_q), (0, 0));
        assert_eq!(s.p.frobenius_norm(), 0.0);
        assert!(s.residual() < 1e-14);
    }

    #[test]
    fn identity_perturbation_blocks() {
        let p = random_problem(3, 4, 3, 2);
        let p = PerturbationProblem::new(
            p.t,
            ComplexMatrix::identity(4),
            ComplexMatrix::identity(3),
            tol(),
        )
        .unwrap();
        let s = split_bases(&p.t, &tol()).unwrap();
        let bl = extract_blocks(&p, &s).unwrap();
        assert!(bl.b.distance(&ComplexMatrix::identity(2)) < 1e-12);
        assert!(bl.c.frobenius_norm() < 1e-12 && bl.g.frobenius_norm() < 1e-12);
        let dec = perturb_polar(&p).unwrap();
        let ut = polar_decompose(&p.t, &tol()).unwrap().partial_isometry;
        assert!(dec.u_m.distance(&ut) < 1e-10);
        assert!(dec.holds(&tol()), "{:?}", dec.residuals);
    }

    #[test]
    fn blocks_reassemble_eq() {
        let p = random_problem(11, 5, 4, 2);
        let s = split_bases(&p.t, &tol()).unwrap();
        let bl = extract_blocks(&p, &s).unwrap();
        let cols = ComplexMatrix::vstack(&bl.b, &bl.c);
        let padded = ComplexMatrix::from_blocks(
            &bl.b,
            &ComplexMatrix::zeros(2, 3),
            &bl.c,
            &ComplexMatrix::zeros(3, 3),
        );
        assert_eq!(cols.cols(), 2);
        let eq = &p.e * &s.q;
        assert!((&(&s.u_q.adjoint() * &padded) * &s.u_q).distance(&eq) < 1e-10);
    }

    #[test]
    fn reduced_solution_examples() {
        let c = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert!(
            reduced_solution(&ComplexMatrix::identity(2), &c, &tol())
                .unwrap()
                .distance(&c)
                < 1e-14
        );
        let d = reduced_solution(
            &ComplexMatrix::from_real_diagonal(&[2.0, 0.0]),
            &ComplexMatrix::from_real_diagonal(&[4.0, 0.0]),
            &tol(),
        )
        .unwrap();
        assert!(d.distance(&ComplexMatrix::from_real_diagonal(&[2.0, 0.0])) < 1e-14);
        let err = reduced_solution(
            &ComplexMatrix::from_real_diagonal(&[1.0, 0.0]),
            &ComplexMatrix::identity(2),
            &tol(),
        );
        assert!(matches!(err, Err(Error::Unsolvable { .. })));
    }

    #[test]
    fn tractable_pair_examples() {
        let i = ComplexMatrix::identity(2);
        let z = ComplexMatrix::zeros(2, 2);
        let rep = tractable_pair_polar(&z, &i, &tol()).unwrap();
        assert!(rep.holds);
        assert!(rep.d.distance(&i) < 1e-14 && rep.c.frobenius_norm() < 1e-14);
        let rep = tractable_pair_polar(&i, &z, &tol()).unwrap();
        assert!(rep.holds);
        assert!(rep.c.distance(&i) < 1e-14);
        let mut rng = trial_rng(9, 1);
        let a = gen_matrix_with(3, 2, 1, Spectrum::WIDE, &mut rng).unwrap();
        let b = gen_matrix_with(3, 3, 1, Spectrum::WIDE, &mut rng).unwrap();
        let rep = tractable_pair_polar(&a, &b, &tol()).unwrap();
        assert!(rep.holds, "{rep:?}");
    }

    #[test]
    fn hermitian_congruence() {
        let t = ComplexMatrix::from_real_diagonal(&[1.0, 1.0, 0.0]);
        let e =
            ComplexMatrix::from_real_rows(&[&[1.0, 2.0, 0.0], &[0.0, 1.0, 3.0], &[1.0, 0.0, 1.0]]);
        let p = PerturbationProblem::new(t, e.clone(), e, tol()).unwrap();
        let dec = perturb_polar(&p).unwrap();
        assert!(dec.residuals.factor_match < 1e-9, "{:?}", dec.residuals);
    }

    #[test]
    fn zero_t_gives_zero_factor() {
        let p = random_problem(5, 3, 4, 0);
        let dec = perturb_polar(&p).unwrap();
        assert_eq!(dec.u_m.frobenius_norm(), 0.0);
        assert!(dec.holds(&tol()));
    }

    #[test]
    fn remixed_split_gives_same_factor() {
        let p = random_problem(21, 5, 4, 3);
        let base = perturb_polar(&p).unwrap();
        let split = split_bases(&p.t, &tol())
            .unwrap()
            .remixed(&mut trial_rng(21, 7));
        assert!(split.residual() < 1e-12);
        let again = perturb_polar_with(&p, split).unwrap();
        assert!(again.u_m.distance(&base.u_m) < 1e-10);
    }

    #[test]
    fn unitary_distance_bounds() {
        let u = ComplexMatrix::identity(3);
        assert_eq!(unitary_distance(&u, &u, &tol()).unwrap(), 0.0);
        assert!((unitary_distance(&u, &u.scale(-1.0), &tol()).unwrap() - 2.0).abs() < 1e-14);
        assert!(unitary_distance(&u, &ComplexMatrix::identity(2), &tol()).is_err());
    }
}
