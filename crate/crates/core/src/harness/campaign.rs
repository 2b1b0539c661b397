//! Seeded property campaigns.
//!
//! Trial `i` of campaign `c` draws from its own ChaCha stream
//! `(tag(c) << 32) | i`, so a trial's inputs depend only on the seed and its
//! index. Trials run in parallel; aggregation takes maxima and counts, and
//! the reported failure is always the one with the lowest index.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::gen::{
    addendum_pair, commuting_triple, gen_matrix_with, trial_rng, RankPolicy, SMode, Spectrum,
    TrialRng,
};
use super::io::MatrixFile;
use super::report::{Counterexample, Report};
use crate::characterization::{
    check_corollary, check_five_conditions, check_three_conditions, CharacterizationInput,
    DEFAULT_GRID,
};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::perturbation::{
    perturb_polar, perturb_polar_with, split_bases, tractable_pair_polar, unitary_distance,
    PerturbationDecomposition, PerturbationProblem, TractablePairReport,
};
use crate::polar::{polar_decompose, verify_dilation_polar};
use crate::product::{verify_product_theorem, ProductProblem, ProductReport};
use crate::tolerance::Tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Campaign {
    Polar,
    Product,
    Perturb,
    Characterize,
    All,
}

impl Campaign {
    pub const EACH: [Campaign; 4] = [
        Campaign::Polar,
        Campaign::Product,
        Campaign::Perturb,
        Campaign::Characterize,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Campaign::Polar => "polar",
            Campaign::Product => "product",
            Campaign::Perturb => "perturb",
            Campaign::Characterize => "characterize",
            Campaign::All => "all",
        }
    }

    fn tag(self) -> u64 {
        match self {
            Campaign::Polar => 1,
            Campaign::Product => 2,
            Campaign::Perturb => 3,
            Campaign::Characterize => 4,
            Campaign::All => 0,
        }
    }

    /// The single campaigns this one stands for.
    pub fn expand(self) -> Vec<Campaign> {
        match self {
            Campaign::All => Self::EACH.to_vec(),
            c => vec![c],
        }
    }
}

impl fmt::Display for Campaign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Campaign {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "polar" => Ok(Campaign::Polar),
            "product" => Ok(Campaign::Product),
            "perturb" => Ok(Campaign::Perturb),
            "characterize" => Ok(Campaign::Characterize),
            "all" => Ok(Campaign::All),
            other => Err(format!(
                "unknown campaign {other:?} (expected polar, product, perturb, characterize or all)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CampaignConfig {
    pub seed: u64,
    pub trials: u64,
    pub max_dim: usize,
    pub rank_policy: RankPolicy,
    pub tol: Tolerance,
}

impl CampaignConfig {
    pub const DEFAULT_MAX_DIM: usize = 6;

    pub fn new(seed: u64, trials: u64) -> Self {
        Self {
            seed,
            trials,
            max_dim: Self::DEFAULT_MAX_DIM,
            rank_policy: RankPolicy::Mixed,
            tol: Tolerance::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.max_dim == 0 {
            return Err(Error::InvalidConfig("max_dim must be at least 1".into()));
        }
        Ok(())
    }
}

/// A residual and the bound it must respect.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bounded {
    pub value: f64,
    pub bound: f64,
}

impl Bounded {
    // NaN fails.
    pub fn ok(&self) -> bool {
        self.value <= self.bound
    }
}

/// Everything one trial produced.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub index: u64,
    pub checks: Vec<(&'static str, Bounded)>,
    /// Verdict-level failures (conclusive disagreements and the like).
    pub violations: Vec<String>,
    pub inconclusive: bool,
    pub inputs: Vec<MatrixFile>,
}

impl TrialOutcome {
    fn new(index: u64) -> Self {
        Self {
            index,
            checks: Vec::new(),
            violations: Vec::new(),
            inconclusive: false,
            inputs: Vec::new(),
        }
    }

    fn check(&mut self, name: &'static str, value: f64, bound: f64) {
        self.checks.push((name, Bounded { value, bound }));
    }

    fn input(&mut self, name: &str, m: &ComplexMatrix) {
        self.inputs.push(MatrixFile::from_matrix(name, m));
    }

    /// First reason this trial failed, if any.
    pub fn failure(&self) -> Option<String> {
        self.checks
            .iter()
            .find(|(_, b)| !b.ok())
            .map(|(n, b)| format!("{n} = {:e} exceeds {:e}", b.value, b.bound))
            .or_else(|| self.violations.first().cloned())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CampaignResult {
    pub campaign: Campaign,
    pub seed: u64,
    pub trials: u64,
    pub failures: u64,
    pub inconclusive: u64,
    /// Largest value of each residual over all trials.
    pub max_residuals: BTreeMap<&'static str, Bounded>,
    pub first_failure: Option<Counterexample>,
}

impl CampaignResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn max_residual(&self) -> f64 {
        self.max_residuals
            .values()
            .map(|b| b.value)
            .fold(0.0, f64::max)
    }

    pub fn inconclusive_fraction(&self) -> f64 {
        self.inconclusive as f64 / self.trials as f64
    }
}

/// Replays trial `index` of a single campaign.
pub fn run_trial(campaign: Campaign, cfg: &CampaignConfig, index: u64) -> TrialOutcome {
    let mut rng = trial_rng(cfg.seed, (campaign.tag() << 32) | index);
    let mut out = TrialOutcome::new(index);
    let res = match campaign {
        Campaign::Polar => polar_trial(cfg, &mut rng, &mut out),
        Campaign::Product => product_trial(cfg, &mut rng, &mut out),
        Campaign::Perturb => perturb_trial(cfg, &mut rng, &mut out),
        Campaign::Characterize => characterize_trial(cfg, &mut rng, &mut out),
        Campaign::All => Err(Error::InvalidConfig(
            "`all` is not a single campaign".into(),
        )),
    };
    if let Err(e) = res {
        out.violations.insert(0, format!("error: {e}"));
    }
    out
}

pub fn run_campaign(campaign: Campaign, cfg: &CampaignConfig) -> Result<Vec<CampaignResult>> {
    cfg.validate()?;
    Ok(campaign
        .expand()
        .into_iter()
        .map(|c| run_single(c, cfg))
        .collect())
}

fn run_single(campaign: Campaign, cfg: &CampaignConfig) -> CampaignResult {
    let outcomes: Vec<TrialOutcome> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| run_trial(campaign, cfg, i))
        .collect();
    let mut result = CampaignResult {
        campaign,
        seed: cfg.seed,
        trials: cfg.trials,
        failures: 0,
        inconclusive: 0,
        max_residuals: BTreeMap::new(),
        first_failure: None,
    };
    // `outcomes` is in index order, so the first failure seen is the lowest.
    for o in outcomes {
        for &(name, b) in &o.checks {
            let slot = result.max_residuals.entry(name).or_insert(Bounded {
                value: 0.0,
                bound: b.bound,
            });
            if !(b.value <= slot.value) {
                slot.value = b.value;
            }
        }
        result.inconclusive += u64::from(o.inconclusive);
        if let Some(reason) = o.failure() {
            result.failures += 1;
            if result.first_failure.is_none() {
                result.first_failure = Some(Counterexample {
                    campaign: campaign.name().into(),
                    seed: cfg.seed,
                    index: o.index,
                    reason,
                    matrices: o.inputs,
                });
            }
        }
    }
    result
}

/// Folds campaign results into one report.
pub fn suite_report(results: &[CampaignResult], cfg: &CampaignConfig) -> Report {
    let mut report = Report::new(
        "suite",
        &[
            &cfg.seed.to_le_bytes(),
            &cfg.trials.to_le_bytes(),
            &(cfg.max_dim as u64).to_le_bytes(),
            &cfg.tol.rank_rel.to_le_bytes(),
            &cfg.tol.eq_abs.to_le_bytes(),
        ],
    );
    report.note("seed", cfg.seed);
    report.note("trials", cfg.trials);
    report.note("max_dim", cfg.max_dim);
    for r in results {
        let c = r.campaign.name();
        report.note(format!("{c}.failures"), r.failures);
        report.note(format!("{c}.inconclusive"), r.inconclusive);
        report.note(
            format!("{c}.max_residual"),
            format!("{:e}", r.max_residual()),
        );
        for (name, b) in &r.max_residuals {
            report.residuals.push(super::report::NamedResidual {
                name: format!("{c}.{name}"),
                value: b.value,
                bound: Some(b.bound),
            });
        }
        report.verdict(format!("{c} campaign"), r.passed());
        if report.counterexample.is_none() {
            report.counterexample = r.first_failure.clone();
        }
    }
    report
}

fn dim(cfg: &CampaignConfig, rng: &mut TrialRng) -> usize {
    rng.random_range(1..=cfg.max_dim)
}

fn random(
    m: usize,
    n: usize,
    spectrum: Spectrum,
    cfg: &CampaignConfig,
    rng: &mut TrialRng,
) -> Result<ComplexMatrix> {
    let rank = cfg.rank_policy.draw(m, n, rng);
    gen_matrix_with(m, n, rank, spectrum, rng)
}

fn deficient(
    m: usize,
    n: usize,
    cfg: &CampaignConfig,
    rng: &mut TrialRng,
) -> Result<ComplexMatrix> {
    let rank = cfg.rank_policy.draw_deficient(m, n, rng);
    gen_matrix_with(m, n, rank, Spectrum::FACTOR, rng)
}

/// Named residuals with their bounds.
pub type Checks = Vec<(&'static str, Bounded)>;

/// Acceptance threshold `base`, scaled by how far `eq_abs` was moved from
/// its default.
pub fn threshold(tol: &Tolerance, base: f64) -> f64 {
    base * tol.eq_abs / Tolerance::DEFAULT_EQ_ABS
}

fn bounded(tol: &Tolerance, items: &[(&'static str, f64, f64)]) -> Checks {
    items
        .iter()
        .map(|&(name, value, base)| {
            (
                name,
                Bounded {
                    value,
                    bound: threshold(tol, base),
                },
            )
        })
        .collect()
}

/// Polar axioms of `T` and the dilation lemma for it.
pub fn polar_checks(t: &ComplexMatrix, tol: &Tolerance) -> Result<Checks> {
    let r = polar_decompose(t, tol)?.residuals()?;
    let d = verify_dilation_polar(t, tol)?;
    Ok(bounded(
        tol,
        &[
            ("reconstruction", r.reconstruction, 1e-9),
            ("partial_isometry", r.partial_isometry, 1e-10),
            ("initial_projection", r.initial_projection, 1e-9),
            ("square", r.square, 1e-9),
            ("dilation_factor", d.partial_isometry_residual, 1e-9),
            ("dilation_positive", d.positive_factor_residual, 1e-9),
        ],
    ))
}

pub fn product_checks(rep: &ProductReport, tol: &Tolerance) -> Checks {
    let r = &rep.residuals;
    let d = &rep.dilation;
    bounded(
        tol,
        &[
            ("ux_transport", r.ux_transport, 1e-8),
            ("uy_transport", r.uy_transport, 1e-8),
            ("ux_initial_projection", r.ux_initial_projection, 1e-8),
            ("y_identity", r.y_identity, 1e-9),
            ("conjugation_abs_x", r.conjugation.abs_x, 1e-9),
            ("conjugation_abs_y", r.conjugation.abs_y, 1e-9),
            ("dilation_ux_is_rho", d.ux_is_rho, 1e-8),
            ("dilation_ux_transport", d.residuals.ux_transport, 1e-8),
            ("dilation_uy_transport", d.residuals.uy_transport, 1e-8),
        ],
    )
}

/// `remixed` is the same problem decomposed through rotated bases.
pub fn perturbation_checks(
    d: &PerturbationDecomposition,
    remixed: &PerturbationDecomposition,
    tol: &Tolerance,
) -> Result<Checks> {
    Ok(bounded(
        tol,
        &[
            ("factor_match", d.residuals.factor_match, 1e-8),
            (
                "unitary_distance",
                unitary_distance(&d.u_m, &d.u_m_direct, tol)?,
                1e-8,
            ),
            ("basis_invariance", remixed.u_m.distance(&d.u_m), 1e-8),
            ("reduced_solutions", d.residuals.reduced_max(), 1e-9),
        ],
    ))
}

pub fn tractable_checks(tp: &TractablePairReport, tol: &Tolerance) -> Checks {
    bounded(
        tol,
        &[
            ("tractable_factor", tp.factor, 1e-9),
            ("tractable_positive", tp.positive_factor, 1e-9),
            (
                "tractable_reduced",
                tp.reduced_c.max().max(tp.reduced_d.max()),
                1e-9,
            ),
        ],
    )
}

fn polar_trial(cfg: &CampaignConfig, rng: &mut TrialRng, out: &mut TrialOutcome) -> Result<()> {
    let (m, n) = (dim(cfg, rng), dim(cfg, rng));
    let t = random(m, n, Spectrum::WIDE, cfg, rng)?;
    out.input("T", &t);
    out.checks.extend(polar_checks(&t, &cfg.tol)?);
    Ok(())
}

fn product_trial(cfg: &CampaignConfig, rng: &mut TrialRng, out: &mut TrialOutcome) -> Result<()> {
    let (k, h) = (dim(cfg, rng), dim(cfg, rng));
    let t = random(k, k, Spectrum::FACTOR, cfg, rng)?;
    let a = random(k, h, Spectrum::FACTOR, cfg, rng)?;
    let s = random(h, h, Spectrum::FACTOR, cfg, rng)?;
    out.input("T", &t);
    out.input("A", &a);
    out.input("S", &s);
    let rep = verify_product_theorem(&ProductProblem::new(t, a, s, cfg.tol)?)?;
    out.checks.extend(product_checks(&rep, &cfg.tol));
    Ok(())
}

fn perturb_trial(cfg: &CampaignConfig, rng: &mut TrialRng, out: &mut TrialOutcome) -> Result<()> {
    let tol = &cfg.tol;
    let (m, n) = (dim(cfg, rng), dim(cfg, rng));
    let t = deficient(m, n, cfg, rng)?;
    let e = deficient(m, m, cfg, rng)?;
    let f = deficient(n, n, cfg, rng)?;
    out.input("T", &t);
    out.input("E", &e);
    out.input("F", &f);
    let p = PerturbationProblem::new(t, e, f, *tol)?;
    let d = perturb_polar(&p)?;
    let remixed = perturb_polar_with(&p, split_bases(&p.t, tol)?.remixed(rng))?;
    out.checks.extend(perturbation_checks(&d, &remixed, tol)?);

    let (k, h) = (dim(cfg, rng), dim(cfg, rng));
    let a = random(k, h, Spectrum::WIDE, cfg, rng)?;
    let b = random(k, k, Spectrum::WIDE, cfg, rng)?;
    out.input("A", &a);
    out.input("B", &b);
    out.checks
        .extend(tractable_checks(&tractable_pair_polar(&a, &b, tol)?, tol));
    Ok(())
}

fn characterize_trial(
    cfg: &CampaignConfig,
    rng: &mut TrialRng,
    out: &mut TrialOutcome,
) -> Result<()> {
    let tol = cfg.tol;
    let h = dim(cfg, rng);
    let mode = if rng.random_bool(0.5) {
        SMode::Generic
    } else {
        SMode::Commuting
    };
    let (t, a, s) = commuting_triple(h, mode, rng);
    out.input("T", &t);
    out.input("A", &a);
    out.input("S", &s);
    let inp = CharacterizationInput::new(t, a, s, tol)?;
    let five = check_five_conditions(&inp)?;
    out.check("commutator_gate", five.gate, tol.eq_abs);
    match five.agreement() {
        Some(false) => out.violations.push("five conditions disagree".into()),
        None => out.inconclusive = true,
        Some(true) => {}
    }
    let three = check_three_conditions(&inp)?;
    if !three.holds() {
        out.violations
            .push("three-condition equivalence or polar conclusion fails".into());
    }
    out.inconclusive |= three.agreement().is_none();

    let h = dim(cfg, rng);
    let normal = rng.random_bool(0.5);
    let (t2, a2) = addendum_pair(h, normal, rng);
    out.input("T2", &t2);
    out.input("A2", &a2);
    let cor = check_corollary(&t2, &a2, &DEFAULT_GRID, &tol)?;
    out.check("addendum_gate", cor.gate.max(cor.addendum_gap), tol.eq_abs);
    if cor.v_constant() == Some(false) {
        out.violations
            .push("condition (v) changes across the exponent grid".into());
    }
    if !cor.holds() {
        out.violations.push("corollary conditions disagree".into());
    }
    out.inconclusive |= cor.inconclusive_points() > 0;
    Ok(())
}
