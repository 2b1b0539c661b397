//! Characterizations of `X = U_T U_A U_S |X|` and `Y = W|Y|` for square
//! `T`, `A`, `S`, where `X = TAS`, `Y = |T| A |S*|` and
//! `W = U_T*U_T U_A U_S U_S*`.
//!
//! Every condition is evaluated as a residual and turned into a three-way
//! [`Verdict`]: residuals at most `eq_abs` are true, residuals at least
//! `VERDICT_MARGIN * eq_abs` are false, and anything between is reported as
//! inconclusive rather than forced either way.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{commutator, ComplexMatrix};
use crate::polar::{abs_op, abs_op_relative, adjoint_polar, polar_decompose, PolarDecomposition};
use crate::predicates::{is_contraction, is_partial_isometry, is_positive, is_projection, Check};
use crate::product::{build_xy, product_scale, ProductProblem};
use crate::spectral::{psd_power, range_projection, range_projection_relative};
use crate::tolerance::Tolerance;

/// Ratio between the "false" and "true" thresholds.
pub const VERDICT_MARGIN: f64 = 100.0;

/// `{0.5, 1, 2}^2`.
pub const DEFAULT_GRID: [(f64, f64); 9] = [
    (0.5, 0.5),
    (0.5, 1.0),
    (0.5, 2.0),
    (1.0, 0.5),
    (1.0, 1.0),
    (1.0, 2.0),
    (2.0, 0.5),
    (2.0, 1.0),
    (2.0, 2.0),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    True,
    False,
    Inconclusive,
}

impl Verdict {
    pub fn from_residual(residual: f64, tol: &Tolerance) -> Self {
        if residual <= tol.eq_abs {
            Verdict::True
        } else if residual >= VERDICT_MARGIN * tol.eq_abs {
            Verdict::False
        } else {
            Verdict::Inconclusive
        }
    }

    pub fn is_conclusive(self) -> bool {
        self != Verdict::Inconclusive
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::True => "true",
            Verdict::False => "false",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Condition {
    pub verdict: Verdict,
    pub residual: f64,
}

impl Condition {
    fn new(residual: f64, tol: &Tolerance) -> Self {
        Self {
            verdict: Verdict::from_residual(residual, tol),
            residual,
        }
    }
}

/// `Some(agreement)` when every verdict is conclusive, `None` otherwise.
pub fn agreement(conditions: &[Condition]) -> Option<bool> {
    if conditions.iter().any(|c| !c.verdict.is_conclusive()) {
        return None;
    }
    Some(conditions.windows(2).all(|w| w[0].verdict == w[1].verdict))
}

fn equation_residual(lhs: &ComplexMatrix, rhs: &ComplexMatrix) -> f64 {
    lhs.distance(rhs) / (1.0 + lhs.frobenius_norm())
}

/// `M = V|M|` as an equation only.
fn factor_equation(m: &ComplexMatrix, v: &ComplexMatrix, abs_m: &ComplexMatrix) -> f64 {
    equation_residual(m, &(v * abs_m))
}

/// `M = V|M|` as a polar decomposition: the equation, `V` a partial
/// isometry, and `V*V = P_R(M*)`.
/// `reference` bounds the size of `m` (see
/// [`crate::spectral::numerical_rank_relative`]).
fn polar_residual(
    m: &ComplexMatrix,
    v: &ComplexMatrix,
    abs_m: &ComplexMatrix,
    reference: f64,
    tol: &Tolerance,
) -> Result<f64> {
    let initial =
        (&v.adjoint() * v).distance(&range_projection_relative(&m.adjoint(), reference, tol)?);
    Ok(factor_equation(m, v, abs_m)
        .max(is_partial_isometry(v, tol).residual)
        .max(initial))
}

/// Outcome of the two contraction-lemma implications for a pair `(T, W)`.
#[derive(Debug, Clone, Serialize)]
pub struct ContractionLemmaReport {
    /// `||W|| <= 1`; nothing else is asserted when this fails.
    pub contraction: Check,
    pub w_is_projection: bool,
    /// Hypothesis `T = W|T|` and its conclusions `|T| = W*W|T|`,
    /// `|T| = W*T`, and `T >= 0` when `W` is a projection.
    pub first: Option<LemmaBranch>,
    /// Hypothesis `|T| = WT` and its conclusions `T = W*WT`, `T = W*|T|`,
    /// and `T >= 0` when `W` is a projection.
    pub second: Option<LemmaBranch>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaBranch {
    pub hypothesis: f64,
    pub intermediate: Check,
    pub conclusion: Check,
    pub positivity: Option<Check>,
}

impl ContractionLemmaReport {
    /// Every asserted conclusion held.
    pub fn holds(&self) -> bool {
        [&self.first, &self.second].into_iter().flatten().all(|b| {
            b.intermediate.holds && b.conclusion.holds && b.positivity.is_none_or(|p| p.holds)
        })
    }
}

pub fn contraction_lemma_check(
    t: &ComplexMatrix,
    w: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<ContractionLemmaReport> {
    square_pair("contraction_lemma_check", t, w)?;
    let contraction = is_contraction(w, tol)?;
    let w_is_projection = is_projection(w, tol).holds;
    let mut report = ContractionLemmaReport {
        contraction,
        w_is_projection,
        first: None,
        second: None,
    };
    if !contraction.holds {
        return Ok(report);
    }
    let abs_t = abs_op(t, tol)?;
    let ws = w.adjoint();
    let scale = 1.0 + t.frobenius_norm();
    // The conclusions inherit the hypothesis error amplified by ||W|| <= 1,
    // so they are held to the same scaled tolerance.
    let positivity = |m: &ComplexMatrix| -> Result<Option<Check>> {
        Ok(if w_is_projection {
            Some(is_positive(m, tol)?)
        } else {
            None
        })
    };
    let h1 = t.distance(&(w * &abs_t)) / scale;
    if h1 <= tol.eq_abs {
        report.first = Some(LemmaBranch {
            hypothesis: h1,
            intermediate: Check::within(abs_t.distance(&(&(&ws * w) * &abs_t)) / scale, tol.eq_abs),
            conclusion: Check::within(abs_t.distance(&(&ws * t)) / scale, tol.eq_abs),
            positivity: positivity(t)?,
        });
    }
    let h2 = abs_t.distance(&(w * t)) / scale;
    if h2 <= tol.eq_abs {
        report.second = Some(LemmaBranch {
            hypothesis: h2,
            intermediate: Check::within(t.distance(&(&(&ws * w) * t)) / scale, tol.eq_abs),
            conclusion: Check::within(t.distance(&(&ws * &abs_t)) / scale, tol.eq_abs),
            positivity: positivity(t)?,
        });
    }
    Ok(report)
}

fn square_pair(op: &'static str, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    for m in [a, b] {
        if !m.is_square() {
            return Err(Error::NotSquare {
                op,
                rows: m.rows(),
                cols: m.cols(),
            });
        }
    }
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch {
            op,
            left: format!("{}x{}", a.rows(), a.cols()),
            right: format!("{}x{}", b.rows(), b.cols()),
        });
    }
    Ok(())
}

/// Three square matrices of one size.
#[derive(Debug, Clone)]
pub struct CharacterizationInput {
    pub t: ComplexMatrix,
    pub a: ComplexMatrix,
    pub s: ComplexMatrix,
    pub tol: Tolerance,
}

impl CharacterizationInput {
    pub fn new(
        t: ComplexMatrix,
        a: ComplexMatrix,
        s: ComplexMatrix,
        tol: Tolerance,
    ) -> Result<Self> {
        square_pair("characterization input", &t, &a)?;
        square_pair("characterization input", &a, &s)?;
        Ok(Self { t, a, s, tol })
    }
}

/// `W = P_R(T*) U_A P_R(S)` and `W1 = P_R(T*) U_A`.
pub fn build_w(
    t: &ComplexMatrix,
    a: &ComplexMatrix,
    s: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    square_pair("build_w", t, a)?;
    square_pair("build_w", a, s)?;
    let ua = polar_decompose(a, tol)?.partial_isometry;
    let w1 = &range_projection(&t.adjoint(), tol)? * &ua;
    let w = &w1 * &range_projection(s, tol)?;
    Ok((w, w1))
}

/// Decompositions shared by the three- and five-condition checks.
struct Triple {
    pd_a: PolarDecomposition,
    x: ComplexMatrix,
    y: ComplexMatrix,
    abs_x: ComplexMatrix,
    abs_y: ComplexMatrix,
    w: ComplexMatrix,
    w1: ComplexMatrix,
    /// `U_T U_A U_S`
    v: ComplexMatrix,
    /// `||T||_F ||A||_F ||S||_F`, which bounds both `X` and `Y`.
    scale: f64,
}

impl Triple {
    fn new(inp: &CharacterizationInput) -> Result<Self> {
        let tol = &inp.tol;
        let pd_t = polar_decompose(&inp.t, tol)?;
        let pd_a = polar_decompose(&inp.a, tol)?;
        let pd_s = polar_decompose(&inp.s, tol)?;
        let problem = ProductProblem::new(inp.t.clone(), inp.a.clone(), inp.s.clone(), *tol)?;
        let (x, y) = build_xy(&problem)?;
        let (w, w1) = build_w(&inp.t, &inp.a, &inp.s, tol)?;
        let v = &(&pd_t.partial_isometry * &pd_a.partial_isometry) * &pd_s.partial_isometry;
        let scale = product_scale(&problem);
        Ok(Self {
            abs_x: abs_op_relative(&x, scale, tol)?,
            abs_y: abs_op_relative(&y, scale, tol)?,
            scale,
            pd_a,
            x,
            y,
            w,
            w1,
            v,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CharacterizationReport {
    pub w: ComplexMatrix,
    pub w1: ComplexMatrix,
    pub x: ComplexMatrix,
    pub y: ComplexMatrix,
    /// `X = U_T U_A U_S |X|`
    pub cond_i: Condition,
    /// `Y = W|Y|`
    pub cond_ii: Condition,
    /// `U_A* Y >= 0` and `U_A U_A* Y = Y`
    pub cond_iii: Condition,
    pub range_w_eq_y: bool,
    pub range_wstar_eq_ystar: bool,
    /// Evaluated only when a range hypothesis holds and some condition is
    /// true: both factorizations must then be polar decompositions.
    pub polar_verdicts: Option<(Condition, Condition)>,
}

impl CharacterizationReport {
    pub fn conditions(&self) -> [Condition; 3] {
        [self.cond_i, self.cond_ii, self.cond_iii]
    }

    pub fn agreement(&self) -> Option<bool> {
        agreement(&self.conditions())
    }

    /// The equivalence held (or was inconclusive) and any asserted polar
    /// conclusion held.
    pub fn holds(&self) -> bool {
        self.agreement() != Some(false)
            && self
                .polar_verdicts
                .is_none_or(|(x, y)| x.verdict != Verdict::False && y.verdict != Verdict::False)
    }
}

pub fn check_three_conditions(inp: &CharacterizationInput) -> Result<CharacterizationReport> {
    let tol = &inp.tol;
    let tr = Triple::new(inp)?;
    let ua = &tr.pd_a.partial_isometry;
    let cond_i = Condition::new(factor_equation(&tr.x, &tr.v, &tr.abs_x), tol);
    let cond_ii = Condition::new(factor_equation(&tr.y, &tr.w, &tr.abs_y), tol);
    let ua_star_y = &ua.adjoint() * &tr.y;
    let cond_iii = Condition::new(
        is_positive(&ua_star_y, tol)?
            .residual
            .max(equation_residual(&tr.y, &(&(ua * &ua.adjoint()) * &tr.y))),
        tol,
    );
    // W is a product of contractions, so 1 bounds it.
    let same_range = |w: &ComplexMatrix, y: &ComplexMatrix| -> Result<bool> {
        let pw = range_projection_relative(w, 1.0, tol)?;
        let py = range_projection_relative(y, tr.scale, tol)?;
        Ok(pw.distance(&py) <= tol.eq_abs)
    };
    let range_w_eq_y = same_range(&tr.w, &tr.y)?;
    let range_wstar_eq_ystar = same_range(&tr.w.adjoint(), &tr.y.adjoint())?;
    let any_true = [cond_i, cond_ii, cond_iii]
        .iter()
        .any(|c| c.verdict == Verdict::True);
    let polar_verdicts = if any_true && (range_w_eq_y || range_wstar_eq_ystar) {
        Some((
            Condition::new(polar_residual(&tr.x, &tr.v, &tr.abs_x, tr.scale, tol)?, tol),
            Condition::new(polar_residual(&tr.y, &tr.w, &tr.abs_y, tr.scale, tol)?, tol),
        ))
    } else {
        None
    };
    Ok(CharacterizationReport {
        w: tr.w,
        w1: tr.w1,
        x: tr.x,
        y: tr.y,
        cond_i,
        cond_ii,
        cond_iii,
        range_w_eq_y,
        range_wstar_eq_ystar,
        polar_verdicts,
    })
}

/// The five conditions under the hypothesis `[|T|, A] = 0`.
#[derive(Debug, Clone, Serialize)]
pub struct FiveConditionReport {
    /// `||[|T|, A]||_F / (1 + ||T||_F ||A||_F)`
    pub gate: f64,
    pub gate_holds: bool,
    /// `|T| |A| |S*|`
    pub z: ComplexMatrix,
    /// (i) X polar, (ii) Y polar, (iii) X equation, (iv) Y equation,
    /// (v) Z positive. Empty when the gate fails.
    pub conditions: Vec<Condition>,
}

impl FiveConditionReport {
    pub fn agreement(&self) -> Option<bool> {
        if !self.gate_holds {
            return None;
        }
        agreement(&self.conditions)
    }

    pub fn inconclusive(&self) -> bool {
        self.gate_holds && self.agreement().is_none()
    }
}

fn commutator_gap(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    Ok(commutator(a, b)?.frobenius_norm() / (1.0 + a.frobenius_norm() * b.frobenius_norm()))
}

pub fn check_five_conditions(inp: &CharacterizationInput) -> Result<FiveConditionReport> {
    let tol = &inp.tol;
    let abs_t = abs_op(&inp.t, tol)?;
    let gate = commutator_gap(&abs_t, &inp.a)?;
    let gate_holds = gate <= tol.eq_abs;
    let abs_s_star = abs_op(&inp.s.adjoint(), tol)?;
    let abs_a = abs_op(&inp.a, tol)?;
    let z = &(&abs_t * &abs_a) * &abs_s_star;
    if !gate_holds {
        return Ok(FiveConditionReport {
            gate,
            gate_holds,
            z,
            conditions: Vec::new(),
        });
    }
    let tr = Triple::new(inp)?;
    let conditions = five(
        &tr.x, &tr.abs_x, &tr.v, &tr.y, &tr.abs_y, &tr.w, &z, tr.scale, tol,
    )?;
    Ok(FiveConditionReport {
        gate,
        gate_holds,
        z,
        conditions: conditions.to_vec(),
    })
}

#[allow(clippy::too_many_arguments)]
fn five(
    x: &ComplexMatrix,
    abs_x: &ComplexMatrix,
    vx: &ComplexMatrix,
    y: &ComplexMatrix,
    abs_y: &ComplexMatrix,
    wy: &ComplexMatrix,
    z: &ComplexMatrix,
    scale: f64,
    tol: &Tolerance,
) -> Result<[Condition; 5]> {
    Ok([
        Condition::new(polar_residual(x, vx, abs_x, scale, tol)?, tol),
        Condition::new(polar_residual(y, wy, abs_y, scale, tol)?, tol),
        Condition::new(factor_equation(x, vx, abs_x), tol),
        Condition::new(factor_equation(y, wy, abs_y), tol),
        Condition::new(is_positive(z, tol)?.residual, tol),
    ])
}

/// `X^{a,b} = |T|^a A U_T |T|^b`, `Y^{a,b} = |T|^a A |T*|^b`,
/// `W_{T,A} = U_T*U_T U_A U_T`.
#[derive(Debug, Clone, Serialize)]
pub struct AluthgeObjects {
    pub alpha: f64,
    pub beta: f64,
    pub x_ab: ComplexMatrix,
    pub y_ab: ComplexMatrix,
    pub w_ta: ComplexMatrix,
    /// `U_T`, needed for the `Y` factor `W_{T,A} U_T*`.
    pub u_t: ComplexMatrix,
    pub abs_t_alpha: ComplexMatrix,
    pub abs_t_star_beta: ComplexMatrix,
    /// `||U(|T|^a) - U_T*U_T||_F`: the polar factor of `|T|^a`.
    pub power_factor_residual: f64,
    /// `|| |(U_T |T|^b)*| - |T*|^b ||_F / (1 + ||T||_F^b)`.
    pub adjoint_power_residual: f64,
}

pub fn aluthge_objects(
    t: &ComplexMatrix,
    a: &ComplexMatrix,
    alpha: f64,
    beta: f64,
    tol: &Tolerance,
) -> Result<AluthgeObjects> {
    square_pair("aluthge_objects", t, a)?;
    for e in [alpha, beta] {
        if !(e > 0.0 && e.is_finite()) {
            return Err(Error::InvalidExponent(e));
        }
    }
    let pd_t = polar_decompose(t, tol)?;
    let pd_a = polar_decompose(a, tol)?;
    let pd_t_star = adjoint_polar(&pd_t);
    let u_t = pd_t.partial_isometry.clone();
    let abs_t_alpha = psd_power(&pd_t.positive_factor, alpha, tol)?;
    let abs_t_beta = psd_power(&pd_t.positive_factor, beta, tol)?;
    let abs_t_star_beta = psd_power(&pd_t_star.positive_factor, beta, tol)?;
    let x_ab = &(&(&abs_t_alpha * a) * &u_t) * &abs_t_beta;
    let y_ab = &(&abs_t_alpha * a) * &abs_t_star_beta;
    let initial = &u_t.adjoint() * &u_t;
    let w_ta = &(&initial * &pd_a.partial_isometry) * &u_t;
    let power_factor_residual = polar_decompose(&abs_t_alpha, tol)?
        .partial_isometry
        .distance(&initial);
    let s = &u_t * &abs_t_beta;
    let adjoint_power_residual = abs_op(&s.adjoint(), tol)?.distance(&abs_t_star_beta)
        / (1.0 + t.frobenius_norm().powf(beta));
    Ok(AluthgeObjects {
        alpha,
        beta,
        x_ab,
        y_ab,
        w_ta,
        u_t,
        abs_t_alpha,
        abs_t_star_beta,
        power_factor_residual,
        adjoint_power_residual,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CorollaryPoint {
    pub alpha: f64,
    pub beta: f64,
    /// (i) X^{a,b} polar, (ii) Y^{a,b} polar, (iii), (iv) the equations,
    /// (v) `|T|^a |A| |T*|^b` positive.
    pub conditions: [Condition; 5],
    pub power_factor_residual: f64,
    pub adjoint_power_residual: f64,
}

impl CorollaryPoint {
    pub fn agreement(&self) -> Option<bool> {
        agreement(&self.conditions)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CorollaryReport {
    /// `[|T|, A]`, scaled as in [`FiveConditionReport::gate`].
    pub gate: f64,
    pub gate_holds: bool,
    /// `[|T*|, |A|]`, same scaling.
    pub addendum_gap: f64,
    pub addendum_holds: bool,
    /// Empty when the gate fails.
    pub points: Vec<CorollaryPoint>,
}

impl CorollaryReport {
    /// Under the addendum hypothesis: whether the conclusive (v) verdicts
    /// are all equal. `None` without the hypothesis or without any
    /// conclusive point.
    pub fn v_constant(&self) -> Option<bool> {
        if !self.addendum_holds {
            return None;
        }
        let mut verdicts = self
            .points
            .iter()
            .map(|p| p.conditions[4].verdict)
            .filter(|v| v.is_conclusive());
        let first = verdicts.next()?;
        Some(verdicts.all(|v| v == first))
    }

    pub fn inconclusive_points(&self) -> usize {
        self.points
            .iter()
            .filter(|p| p.agreement().is_none())
            .count()
    }

    /// No conclusive disagreement at any point, and a constant (v) verdict
    /// where the addendum applies.
    pub fn holds(&self) -> bool {
        self.points.iter().all(|p| p.agreement() != Some(false)) && self.v_constant() != Some(false)
    }
}

pub fn check_corollary(
    t: &ComplexMatrix,
    a: &ComplexMatrix,
    grid: &[(f64, f64)],
    tol: &Tolerance,
) -> Result<CorollaryReport> {
    square_pair("check_corollary", t, a)?;
    let pd_t = polar_decompose(t, tol)?;
    let abs_t_star = adjoint_polar(&pd_t).positive_factor;
    let abs_a = abs_op(a, tol)?;
    let gate = commutator_gap(&pd_t.positive_factor, a)?;
    let addendum_gap = commutator_gap(&abs_t_star, &abs_a)?;
    let gate_holds = gate <= tol.eq_abs;
    let mut report = CorollaryReport {
        gate,
        gate_holds,
        addendum_gap,
        addendum_holds: gate_holds && addendum_gap <= tol.eq_abs,
        points: Vec::new(),
    };
    if !gate_holds {
        return Ok(report);
    }
    for &(alpha, beta) in grid {
        let obj = aluthge_objects(t, a, alpha, beta, tol)?;
        // |T|^b and |T*|^b have equal norms, so one scale bounds X and Y.
        let scale = obj.abs_t_alpha.frobenius_norm()
            * a.frobenius_norm()
            * obj.abs_t_star_beta.frobenius_norm();
        let abs_x = abs_op_relative(&obj.x_ab, scale, tol)?;
        let abs_y = abs_op_relative(&obj.y_ab, scale, tol)?;
        let wy = &obj.w_ta * &obj.u_t.adjoint();
        let z = &(&obj.abs_t_alpha * &abs_a) * &obj.abs_t_star_beta;
        let conditions = five(
            &obj.x_ab, &abs_x, &obj.w_ta, &obj.y_ab, &abs_y, &wy, &z, scale, tol,
        )?;
        report.points.push(CorollaryPoint {
            alpha,
            beta,
            conditions,
            power_factor_residual: obj.power_factor_residual,
            adjoint_power_residual: obj.adjoint_power_residual,
        });
    }
    Ok(report)
}

/// Inputs of the two worked 3x3 examples, with the matrices printed for
/// them.
#[derive(Debug, Clone)]
pub struct Fixtures {
    pub proposition: PropositionExample,
    pub final_example: FinalExample,
}

#[derive(Debug, Clone)]
pub struct PropositionExample {
    pub t: ComplexMatrix,
    pub a: ComplexMatrix,
    pub s: ComplexMatrix,
    pub u_a: ComplexMatrix,
    pub abs_a: ComplexMatrix,
    pub y: ComplexMatrix,
    pub w: ComplexMatrix,
}

#[derive(Debug, Clone)]
pub struct FinalExample {
    pub t: ComplexMatrix,
    pub a: ComplexMatrix,
    pub abs_t: ComplexMatrix,
    pub abs_t_star: ComplexMatrix,
}

pub fn fixtures() -> Fixtures {
    let r = 1.0 / 5f64.sqrt();
    let m = ComplexMatrix::from_real_rows;
    Fixtures {
        proposition: PropositionExample {
            t: ComplexMatrix::from_real_diagonal(&[1.0, 1.0, 0.0]),
            a: m(&[&[1.0, 0.0, 0.0], &[0.0, 0.0, 0.0], &[1.0, 0.0, 1.0]]),
            s: ComplexMatrix::from_real_diagonal(&[0.0, 1.0, 1.0]),
            u_a: m(&[&[2.0 * r, 0.0, -r], &[0.0, 0.0, 0.0], &[r, 0.0, 2.0 * r]]),
            abs_a: m(&[&[3.0 * r, 0.0, r], &[0.0, 0.0, 0.0], &[r, 0.0, 2.0 * r]]),
            y: ComplexMatrix::zeros(3, 3),
            w: m(&[&[0.0, 0.0, -r], &[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0]]),
        },
        final_example: FinalExample {
            t: m(&[&[1.0, 0.0, 1.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 1.0]]),
            a: ComplexMatrix::from_real_diagonal(&[1.0, 2.0, 1.0]),
            abs_t: m(&[&[2.0 * r, 0.0, r], &[0.0, 0.0, 0.0], &[r, 0.0, 3.0 * r]]),
            abs_t_star: m(&[&[3.0 * r, 0.0, r], &[0.0, 0.0, 0.0], &[r, 0.0, 2.0 * r]]),
        },
    }
}

/// Entrywise tolerance for reproducing the printed example matrices.
pub const FIXTURE_TOLERANCE: f64 = 1e-12;

/// One reproduced quantity: computed value, the expected value, and the
/// largest entrywise deviation.
#[derive(Debug, Clone, Serialize)]
pub struct FixtureMatrix {
    pub name: &'static str,
    pub computed: ComplexMatrix,
    pub expected: ComplexMatrix,
    pub max_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FixtureScalar {
    pub name: &'static str,
    pub computed: f64,
    pub expected: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FixtureReport {
    pub matrices: Vec<FixtureMatrix>,
    pub scalars: Vec<FixtureScalar>,
    /// Named boolean outcomes and whether each matches the expected value.
    pub verdicts: Vec<(&'static str, bool, bool)>,
}

impl FixtureReport {
    pub fn holds(&self) -> bool {
        self.matrices
            .iter()
            .all(|m| m.max_error <= FIXTURE_TOLERANCE)
            && self
                .scalars
                .iter()
                .all(|s| (s.computed - s.expected).abs() <= FIXTURE_TOLERANCE)
            && self.verdicts.iter().all(|&(_, got, want)| got == want)
    }

    pub fn matrix(&self, name: &str) -> Option<&FixtureMatrix> {
        self.matrices.iter().find(|m| m.name == name)
    }

    pub fn scalar(&self, name: &str) -> Option<&FixtureScalar> {
        self.scalars.iter().find(|s| s.name == name)
    }

    pub fn verdict(&self, name: &str) -> Option<bool> {
        self.verdicts.iter().find(|v| v.0 == name).map(|v| v.1)
    }
}

/// Recomputes every printed matrix of both examples and the derived checks.
pub fn run_fixtures(tol: &Tolerance) -> Result<FixtureReport> {
    let fx = fixtures();
    let mut matrices = Vec::new();
    let mut push = |name, computed: ComplexMatrix, expected: &ComplexMatrix| {
        let max_error = (&computed - expected).max_abs();
        matrices.push(FixtureMatrix {
            name,
            computed,
            expected: expected.clone(),
            max_error,
        });
    };

    let p = &fx.proposition;
    let pd_a = polar_decompose(&p.a, tol)?;
    push("proposition.U_A", pd_a.partial_isometry.clone(), &p.u_a);
    push("proposition.|A|", pd_a.positive_factor.clone(), &p.abs_a);
    let three = check_three_conditions(&CharacterizationInput::new(
        p.t.clone(),
        p.a.clone(),
        p.s.clone(),
        *tol,
    )?)?;
    push("proposition.Y", three.y.clone(), &p.y);
    push("proposition.W", three.w.clone(), &p.w);
    let range_t = range_projection(&p.t, tol)?;
    push("proposition.P_R(T)", range_t, &p.t);

    let f = &fx.final_example;
    let pd_t = polar_decompose(&f.t, tol)?;
    let abs_t_star = adjoint_polar(&pd_t).positive_factor;
    push("final.|T|", pd_t.positive_factor.clone(), &f.abs_t);
    push("final.|T*|", abs_t_star.clone(), &f.abs_t_star);
    let comm = commutator(&pd_t.positive_factor, &abs_t_star)?;
    let expected_comm =
        ComplexMatrix::from_real_rows(&[&[0.0, 0.0, -0.4], &[0.0, 0.0, 0.0], &[0.4, 0.0, 0.0]]);
    push("final.[|T|,|T*|]", comm.clone(), &expected_comm);
    let zero = ComplexMatrix::zeros(3, 3);
    push(
        "final.[|T|,A]",
        commutator(&pd_t.positive_factor, &f.a)?,
        &zero,
    );
    push("final.[A,T]", commutator(&f.a, &f.t)?, &zero);

    let scalars = vec![FixtureScalar {
        name: "final.||[|T|,|T*|]||_F",
        computed: comm.frobenius_norm(),
        expected: 2.0 * 2f64.sqrt() / 5.0,
    }];
    let verdicts = vec![
        (
            "proposition.cond_i",
            three.cond_i.verdict == Verdict::True,
            true,
        ),
        (
            "proposition.cond_ii",
            three.cond_ii.verdict == Verdict::True,
            true,
        ),
        (
            "proposition.cond_iii",
            three.cond_iii.verdict == Verdict::True,
            true,
        ),
        ("proposition.R(W)=R(Y)", three.range_w_eq_y, false),
        ("proposition.R(W*)=R(Y*)", three.range_wstar_eq_ystar, false),
        (
            "proposition.U_A partial isometry",
            is_partial_isometry(&pd_a.partial_isometry, tol).holds,
            true,
        ),
        (
            "final.[|T|,|T*|]=0",
            comm.frobenius_norm() <= tol.eq_abs,
            false,
        ),
    ];
    Ok(FixtureReport {
        matrices,
        scalars,
        verdicts,
    })
}
