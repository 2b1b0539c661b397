//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! fails.
//!
//! Reference values come from an oracle that shares no code with the
//! library's spectral kernels: complex matrices are embedded as real
//! `[[Re, -Im], [Im, Re]]` blocks, ranges come from a column-pivoted QR and
//! polar factors from the Newton iteration on the range. The embedding is a
//! *-homomorphism, so it carries polar factors and range projections to
//! polar factors and range projections.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use polar_triple::characterization::{
    check_corollary, check_five_conditions, check_three_conditions, CharacterizationInput, Verdict,
    DEFAULT_GRID,
};
use polar_triple::harness::gen::{
    addendum_pair, commuting_triple, gen_matrix_with, trial_rng, RankPolicy, SMode, Spectrum,
    TrialRng,
};
use polar_triple::matrix::{commutator, ComplexMatrix};
use polar_triple::perturbation::{
    perturb_polar, perturb_polar_with, split_bases, tractable_pair_polar, PerturbationProblem,
};
use polar_triple::polar::{adjoint_polar, dilation_rho, polar_decompose, polar_decompose_relative};
use polar_triple::product::{ux_from_uy, uy_from_ux};
use polar_triple::tolerance::Tolerance;

const SEED: u64 = 42;

mod oracle {
    use super::*;

    /// Rank cutoff on the pivoted-QR diagonal. Test inputs have gaps of at
    /// least four decades above the noise, so the exact value is immaterial.
    const RANK_REL: f64 = 1e-8;

    fn realify(m: &ComplexMatrix) -> DMatrix<f64> {
        let (r, c) = m.shape();
        DMatrix::from_fn(2 * r, 2 * c, |i, j| {
            let z = m.get(i % r, j % c);
            match (i < r, j < c) {
                (true, true) | (false, false) => z.re,
                (true, false) => -z.im,
                (false, true) => z.im,
            }
        })
    }

    fn complexify(x: &DMatrix<f64>) -> ComplexMatrix {
        let (r, c) = (x.nrows() / 2, x.ncols() / 2);
        ComplexMatrix::from_fn(r, c, |i, j| Complex64::new(x[(i, j)], x[(i + r, j)]))
    }

    /// Orthonormal basis of the row space of `x`, from a column-pivoted QR
    /// of `x^T`.
    fn row_space(x: &DMatrix<f64>, reference: f64) -> DMatrix<f64> {
        let xt = x.transpose();
        let qr = xt.clone().col_piv_qr();
        let (q, r) = (qr.q(), qr.r());
        let mut permuted = xt.clone();
        qr.p().permute_columns(&mut permuted);
        let err = (&q * &r - &permuted).norm();
        assert!(
            err <= 1e-13 * (1.0 + xt.norm()),
            "oracle QR failed: {err:e}"
        );
        let diag: Vec<f64> = (0..r.nrows().min(r.ncols()))
            .map(|i| r[(i, i)].abs())
            .collect();
        let cut = RANK_REL * diag.first().copied().unwrap_or(0.0).max(reference);
        let k = diag.iter().take_while(|&&d| d > cut).count();
        q.columns(0, k).into_owned()
    }

    /// Newton iteration `Z <- (Z + Z (Z^T Z)^-1) / 2` for the isometric
    /// factor of a full-column-rank `z`.
    fn isometric_factor(z: &DMatrix<f64>) -> DMatrix<f64> {
        let mut w = z.clone();
        for _ in 0..100 {
            let inv = (w.transpose() * &w)
                .try_inverse()
                .expect("full column rank");
            let next = (&w + &w * inv) * 0.5;
            let step = (&next - &w).norm();
            w = next;
            if step <= 1e-15 * (w.ncols() as f64).sqrt() {
                break;
            }
        }
        let k = w.ncols();
        let defect = (w.transpose() * &w - DMatrix::<f64>::identity(k, k)).norm();
        assert!(
            defect <= 1e-13,
            "oracle Newton iteration did not converge: {defect:e}"
        );
        w
    }

    /// `(U, |M|)`. `reference` raises the rank cutoff for matrices that are
    /// products of factors with that combined norm.
    pub fn polar(m: &ComplexMatrix, reference: f64) -> (ComplexMatrix, ComplexMatrix) {
        let (r, c) = m.shape();
        let x = realify(m);
        let q = row_space(&x, reference);
        if q.ncols() == 0 {
            return (ComplexMatrix::zeros(r, c), ComplexMatrix::zeros(c, c));
        }
        let z = &x * &q;
        let w = isometric_factor(&z);
        let h = w.transpose() * &z;
        let abs = &q * ((&h + h.transpose()) * 0.5) * q.transpose();
        (complexify(&(&w * q.transpose())), complexify(&abs))
    }

    /// Orthogonal projection onto the range of `m`.
    pub fn range(m: &ComplexMatrix, reference: f64) -> ComplexMatrix {
        let q = row_space(&realify(&m.adjoint()), reference);
        complexify(&(&q * q.transpose()))
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(id: u32, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let mut out = f();
    let elapsed = start.elapsed();
    if let Some(limit) = limit {
        if elapsed >= limit {
            out.pass = false;
            out.detail += &format!("; runtime over {limit:?}");
        }
    }
    println!(
        "{} criterion {id} ({name}): {} [{:.2} s]",
        if out.pass { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64()
    );
    out.pass
}

fn dims(max: usize, rng: &mut TrialRng) -> (usize, usize) {
    (rng.random_range(1..=max), rng.random_range(1..=max))
}

fn random(m: usize, n: usize, spectrum: Spectrum, rng: &mut TrialRng) -> ComplexMatrix {
    let rank = RankPolicy::Mixed.draw(m, n, rng);
    gen_matrix_with(m, n, rank, spectrum, rng).unwrap()
}

fn deficient(m: usize, n: usize, rng: &mut TrialRng) -> ComplexMatrix {
    let rank = RankPolicy::Mixed.draw_deficient(m, n, rng);
    gen_matrix_with(m, n, rank, Spectrum::FACTOR, rng).unwrap()
}

/// Running maxima of named residuals against their bounds.
#[derive(Default)]
struct Maxima(Vec<(&'static str, f64, f64)>);

impl Maxima {
    fn see(&mut self, name: &'static str, value: f64, bound: f64) {
        match self.0.iter_mut().find(|(n, ..)| *n == name) {
            Some(slot) => {
                slot.1 = if value.is_nan() {
                    f64::NAN
                } else {
                    slot.1.max(value)
                }
            }
            None => self.0.push((name, value, bound)),
        }
    }

    fn pass(&self) -> bool {
        self.0.iter().all(|&(_, v, b)| v <= b)
    }

    fn summary(&self) -> String {
        self.0
            .iter()
            .map(|(n, v, b)| format!("{n} {v:.1e}/{b:.0e}"))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

fn polar_axioms() -> Outcome {
    let tol = Tolerance::default();
    let mut max = Maxima::default();
    let (mut rectangular, mut zero, mut full) = (0, 0, 0);
    for i in 0..1000 {
        let mut rng = trial_rng(SEED, i);
        let (m, n) = dims(8, &mut rng);
        let t = random(m, n, Spectrum::WIDE, &mut rng);
        let pd = polar_decompose(&t, &tol).unwrap();
        let (u, abs) = (&pd.partial_isometry, &pd.positive_factor);
        let norm = t.frobenius_norm();
        let p = oracle::range(&t.adjoint(), 0.0);
        rectangular += usize::from(m != n);
        zero += usize::from(pd.numerical_rank == 0);
        full += usize::from(pd.numerical_rank == m.min(n));
        max.see(
            "reconstruction",
            (u * abs).distance(&t) / (1.0 + norm),
            1e-9,
        );
        max.see(
            "partial_isometry",
            (&(u * &u.adjoint()) * u).distance(u),
            1e-10,
        );
        max.see("initial_projection", (&u.adjoint() * u).distance(&p), 1e-9);
        max.see(
            "square",
            (abs * abs).distance(&(&t.adjoint() * &t)) / (1.0 + norm * norm),
            1e-9,
        );
    }
    Outcome {
        pass: max.pass() && rectangular > 0 && zero > 0 && full > 0,
        detail: format!(
            "1000 cases ({rectangular} rectangular, {zero} rank 0, {full} full rank); {}",
            max.summary()
        ),
    }
}

fn product_theorem() -> Outcome {
    let tol = Tolerance::default();
    let mut max = Maxima::default();
    for i in 0..500 {
        let mut rng = trial_rng(SEED, 10_000 + i);
        let (k, h) = dims(6, &mut rng);
        let t = random(k, k, Spectrum::FACTOR, &mut rng);
        let a = random(k, h, Spectrum::FACTOR, &mut rng);
        let s = random(h, h, Spectrum::FACTOR, &mut rng);
        let scale = t.frobenius_norm() * a.frobenius_norm() * s.frobenius_norm();
        let pd_t = polar_decompose(&t, &tol).unwrap();
        let pd_s = polar_decompose(&s, &tol).unwrap();
        let (ut, us) = (&pd_t.partial_isometry, &pd_s.partial_isometry);
        let abs_s_star = adjoint_polar(&pd_s).positive_factor;
        let x = &(&t * &a) * &s;
        let y = &(&pd_t.positive_factor * &a) * &abs_s_star;
        // Library factors on the left, oracle factors on the right.
        let lib_ux = polar_decompose_relative(&x, scale, &tol)
            .unwrap()
            .partial_isometry;
        let lib_uy = polar_decompose_relative(&y, scale, &tol)
            .unwrap()
            .partial_isometry;
        let (ux, abs_x) = oracle::polar(&x, scale);
        let (uy, abs_y) = oracle::polar(&y, scale);
        max.see(
            "U_T U_Y U_S vs U_X",
            ux_from_uy(ut, &lib_uy, us).unwrap().distance(&ux),
            1e-8,
        );
        max.see(
            "U_T* U_X U_S* vs U_Y",
            uy_from_ux(ut, &lib_ux, us).unwrap().distance(&uy),
            1e-8,
        );
        max.see(
            "|X| = U_S*|Y|U_S",
            abs_x.distance(&(&(&us.adjoint() * &abs_y) * us)) / (1.0 + abs_x.frobenius_norm()),
            1e-9,
        );
        max.see(
            "|Y| = U_S|X|U_S*",
            abs_y.distance(&(&(us * &abs_x) * &us.adjoint())) / (1.0 + abs_y.frobenius_norm()),
            1e-9,
        );
    }
    Outcome {
        pass: max.pass(),
        detail: format!("500 triples; {}", max.summary()),
    }
}

fn dilation() -> Outcome {
    let tol = Tolerance::default();
    let mut max = Maxima::default();
    for i in 0..200 {
        let mut rng = trial_rng(SEED, 20_000 + i);
        let (m, n) = dims(8, &mut rng);
        let a = random(m, n, Spectrum::WIDE, &mut rng);
        let pd_rho = polar_decompose(&dilation_rho(&a), &tol).unwrap();
        let (ua, abs_a) = oracle::polar(&a, 0.0);
        let (_, abs_a_star) = oracle::polar(&a.adjoint(), 0.0);
        max.see(
            "U_rho(A) vs rho(U_A)",
            pd_rho.partial_isometry.distance(&dilation_rho(&ua)),
            1e-9,
        );
        max.see(
            "|rho(A)| vs diag(|A*|, |A|)",
            pd_rho
                .positive_factor
                .distance(&ComplexMatrix::block_diag(&abs_a_star, &abs_a)),
            1e-9,
        );
    }
    Outcome {
        pass: max.pass(),
        detail: format!("200 cases; {}", max.summary()),
    }
}

fn perturbation() -> Outcome {
    let tol = Tolerance::default();
    let mut max = Maxima::default();
    for i in 0..300 {
        let mut rng = trial_rng(SEED, 30_000 + i);
        let (m, n) = dims(6, &mut rng);
        let t = deficient(m, n, &mut rng);
        let e = deficient(m, m, &mut rng);
        let f = deficient(n, n, &mut rng);
        let (e_norm, f_norm) = (e.frobenius_norm(), f.frobenius_norm());
        let scale = e_norm * t.frobenius_norm() * f_norm;
        let p = PerturbationProblem::new(t, e, f, tol).unwrap();
        let d = perturb_polar(&p).unwrap();
        let (um, _) = oracle::polar(&p.m(), scale);
        max.see("U_M vs polar(ETF*)", d.u_m.distance(&um), 1e-8);
        let remixed =
            perturb_polar_with(&p, split_bases(&p.t, &tol).unwrap().remixed(&mut rng)).unwrap();
        max.see("basis invariance", remixed.u_m.distance(&d.u_m), 1e-8);
        let b = &d.blocks;
        let rhs = [b.b.adjoint(), b.c.adjoint(), b.d.adjoint(), b.g.adjoint()];
        let thetas = [
            (&d.theta_bc, e_norm),
            (&d.theta_bc, e_norm),
            (&d.theta_dg, f_norm),
            (&d.theta_dg, f_norm),
        ];
        for ((theta, reference), (r, z)) in thetas.iter().zip(rhs.iter().zip(&d.z)) {
            let sol = z.adjoint();
            let p_range = oracle::range(theta, *reference);
            max.see(
                "reduced equation",
                (*theta * &sol).distance(r) / (1.0 + r.frobenius_norm()),
                1e-9,
            );
            max.see(
                "reduced range",
                (&p_range * &sol).distance(&sol) / (1.0 + sol.frobenius_norm()),
                1e-9,
            );
        }
    }
    Outcome {
        pass: max.pass(),
        detail: format!("300 cases; {}", max.summary()),
    }
}

fn real(rows: &[[f64; 3]; 3]) -> ComplexMatrix {
    ComplexMatrix::from_fn(3, 3, |i, j| Complex64::new(rows[i][j], 0.0))
}

fn proposition_fixture() -> Outcome {
    let tol = Tolerance::default();
    let r = 5f64.sqrt() / 5.0;
    let t = real(&[[1., 0., 0.], [0., 1., 0.], [0., 0., 0.]]);
    let a = real(&[[1., 0., 0.], [0., 0., 0.], [1., 0., 1.]]);
    let s = real(&[[0., 0., 0.], [0., 1., 0.], [0., 0., 1.]]);
    let u_a = real(&[[2. * r, 0., -r], [0., 0., 0.], [r, 0., 2. * r]]);
    let abs_a = real(&[[3. * r, 0., r], [0., 0., 0.], [r, 0., 2. * r]]);
    let w = real(&[[0., 0., -r], [0., 0., 0.], [0., 0., 0.]]);

    let pd_a = polar_decompose(&a, &tol).unwrap();
    let rep = check_three_conditions(&CharacterizationInput::new(t, a, s, tol).unwrap()).unwrap();
    let err_ua = (&pd_a.partial_isometry - &u_a).max_abs();
    let err_abs = (&pd_a.positive_factor - &abs_a).max_abs();
    let y_max = rep.y.max_abs();
    let err_w = (&rep.w - &w).max_abs();
    let w02 = rep.w.get(0, 2).re;
    let ranges_differ = oracle::range(&rep.w, 0.0).distance(&oracle::range(&rep.y, 0.0)) > 0.5;
    let adj_ranges_differ =
        oracle::range(&rep.w.adjoint(), 0.0).distance(&oracle::range(&rep.y.adjoint(), 0.0)) > 0.5;
    let pass = err_ua <= 1e-12
        && err_abs <= 1e-12
        && y_max <= 1e-12
        && err_w <= 1e-12
        && (w02 + r).abs() <= 1e-12
        && !rep.range_w_eq_y
        && !rep.range_wstar_eq_ystar
        && ranges_differ
        && adj_ranges_differ
        && rep.cond_ii.verdict == Verdict::True;
    Outcome {
        pass,
        detail: format!(
            "U_A err {err_ua:.1e}, |A| err {err_abs:.1e}, max|Y| {y_max:.1e}, W err {err_w:.1e}, W[0][2] = {w02:.16}, \
             R(W)=R(Y) {}, R(W*)=R(Y*) {}, condition (ii) {}",
            rep.range_w_eq_y, rep.range_wstar_eq_ystar, rep.cond_ii.verdict
        ),
    }
}

fn final_fixture() -> Outcome {
    let tol = Tolerance::default();
    let r = 5f64.sqrt() / 5.0;
    let t = real(&[[1., 0., 1.], [0., 0., 0.], [0., 0., 1.]]);
    let a = real(&[[1., 0., 0.], [0., 2., 0.], [0., 0., 1.]]);
    let abs_t = real(&[[2. * r, 0., r], [0., 0., 0.], [r, 0., 3. * r]]);
    let abs_t_star = real(&[[3. * r, 0., r], [0., 0., 0.], [r, 0., 2. * r]]);

    let pd = polar_decompose(&t, &tol).unwrap();
    let got_abs_t_star = adjoint_polar(&pd).positive_factor;
    let err_abs = (&pd.positive_factor - &abs_t).max_abs();
    let err_abs_star = (&got_abs_t_star - &abs_t_star).max_abs();
    // Expected norm from the printed matrices alone.
    let printed_norm = commutator(&abs_t, &abs_t_star).unwrap().frobenius_norm();
    let norm = commutator(&pd.positive_factor, &got_abs_t_star)
        .unwrap()
        .frobenius_norm();
    let expected = 2.0 * 2f64.sqrt() / 5.0;
    let comm_a = commutator(&pd.positive_factor, &a).unwrap().max_abs();
    let pass = err_abs <= 1e-12
        && err_abs_star <= 1e-12
        && (norm - expected).abs() <= 1e-12
        && (printed_norm - expected).abs() <= 1e-12
        && comm_a <= 1e-12;
    Outcome {
        pass,
        detail: format!(
            "|T| err {err_abs:.1e}, |T*| err {err_abs_star:.1e}, ||[|T|,|T*|]||_F = {norm:.16} (2*sqrt(2)/5 = {expected:.16}), \
             max|[|T|,A]| {comm_a:.1e}"
        ),
    }
}

fn equivalences() -> Outcome {
    let tol = Tolerance::default();
    let (mut agree, mut disagree, mut inconclusive) = (0, 0, 0);
    let mut gate_worst: f64 = 0.0;
    for i in 0..200 {
        let mut rng = trial_rng(SEED, 40_000 + i);
        let h = rng.random_range(1..=6);
        let mode = if rng.random_bool(0.5) {
            SMode::Generic
        } else {
            SMode::Commuting
        };
        let (t, a, s) = commuting_triple(h, mode, &mut rng);
        let rep =
            check_five_conditions(&CharacterizationInput::new(t, a, s, tol).unwrap()).unwrap();
        gate_worst = gate_worst.max(rep.gate);
        match rep.agreement() {
            Some(true) => agree += 1,
            Some(false) => disagree += 1,
            None => inconclusive += 1,
        }
    }
    let (mut constant, mut varying, mut undecided) = (0, 0, 0);
    for i in 0..200 {
        let mut rng = trial_rng(SEED, 50_000 + i);
        let h = rng.random_range(1..=6);
        let normal = rng.random_bool(0.5);
        let (t, a) = addendum_pair(h, normal, &mut rng);
        match check_corollary(&t, &a, &DEFAULT_GRID, &tol)
            .unwrap()
            .v_constant()
        {
            Some(true) => constant += 1,
            Some(false) => varying += 1,
            None => undecided += 1,
        }
    }
    let fraction = inconclusive as f64 / 200.0;
    Outcome {
        pass: disagree == 0 && fraction < 0.02 && varying == 0 && undecided == 0,
        detail: format!(
            "200 triples: {agree} agree, {disagree} disagree, {inconclusive} inconclusive ({:.1}%), worst gate {gate_worst:.1e}; \
             200 grid pairs: {constant} constant, {varying} varying, {undecided} undecided",
            100.0 * fraction
        ),
    }
}

fn tractable_pairs() -> Outcome {
    let tol = Tolerance::default();
    let mut max = Maxima::default();
    for i in 0..200 {
        let mut rng = trial_rng(SEED, 60_000 + i);
        let (k, h) = dims(6, &mut rng);
        let a = random(k, h, Spectrum::WIDE, &mut rng);
        let b = random(k, k, Spectrum::WIDE, &mut rng);
        let rep = tractable_pair_polar(&a, &b, &tol).unwrap();
        let t = ComplexMatrix::from_blocks(
            &ComplexMatrix::zeros(h, h),
            &ComplexMatrix::zeros(h, k),
            &a,
            &b,
        );
        let (u_direct, _) = oracle::polar(&t.adjoint(), 0.0);
        max.see("U* vs polar(T*)", rep.u.adjoint().distance(&u_direct), 1e-9);
    }
    Outcome {
        pass: max.pass(),
        detail: format!("200 pairs; {}", max.summary()),
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let secs = Duration::from_secs;
    let results = [
        run(1, "polar axioms", Some(secs(10)), polar_axioms),
        run(
            2,
            "product theorem, both directions",
            Some(secs(15)),
            product_theorem,
        ),
        run(3, "dilation lemma", None, dilation),
        run(4, "perturbation pipeline", Some(secs(20)), perturbation),
        run(5, "first worked example", None, proposition_fixture),
        run(6, "second worked example", None, final_fixture),
        run(7, "equivalence suites", None, equivalences),
        run(8, "tractable pairs", None, tractable_pairs),
    ];
    let total = start.elapsed();
    let passed = results.iter().filter(|&&p| p).count();
    let in_time = total < secs(60);
    println!(
        "{} acceptance: {passed}/8 criteria, total {:.2} s (limit 60 s)",
        if passed == 8 && in_time {
            "PASS"
        } else {
            "FAIL"
        },
        total.as_secs_f64()
    );
    if passed == 8 && in_time {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
