use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use polar_triple::characterization::{
    check_corollary, check_five_conditions, check_three_conditions, run_fixtures,
    CharacterizationInput, Condition, CorollaryReport, DEFAULT_GRID, FIXTURE_TOLERANCE,
};
use polar_triple::error::Error;
use polar_triple::harness::campaign::{
    perturbation_checks, polar_checks, product_checks, run_campaign, suite_report,
    tractable_checks, Campaign, CampaignConfig, Checks,
};
use polar_triple::harness::gen::{trial_rng, RankPolicy};
use polar_triple::harness::io::MatrixFile;
use polar_triple::harness::report::Report;
use polar_triple::matrix::ComplexMatrix;
use polar_triple::perturbation::{
    perturb_polar, perturb_polar_with, split_bases, tractable_pair_polar, unitary_distance,
    PerturbationProblem,
};
use polar_triple::polar::polar_decompose;
use polar_triple::product::{verify_product_theorem, ProductProblem};
use polar_triple::tolerance::Tolerance;

/// Polar decompositions of matrix products, perturbations and their
/// characterizations, checked numerically.
///
/// Exit status: 0 when every check passes, 1 when a check fails, 2 on usage
/// or input errors.
#[derive(Parser)]
#[command(name = "polar-triple", version)]
struct Cli {
    /// Relative singular-value cutoff for numerical rank.
    #[arg(long, global = true, default_value_t = Tolerance::DEFAULT_RANK_REL)]
    tol_rank: f64,
    /// Absolute tolerance for matrix equations; check bounds scale with it.
    #[arg(long, global = true, default_value_t = Tolerance::DEFAULT_EQ_ABS)]
    tol_eq: f64,
    /// Also write the report as JSON to this path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Polar decomposition T = U|T| with its defining residuals.
    Polar { file: PathBuf },
    /// Both directions of the product theorem for X = TAS.
    Product { t: PathBuf, a: PathBuf, s: PathBuf },
    /// Polar factor of M = E T F* assembled from the block pipeline.
    Perturb {
        t: PathBuf,
        e: PathBuf,
        f: PathBuf,
        /// Seed for the rotated bases of the invariance re-run.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also check the tractable pair T = [[0, 0], [A, B]].
        #[arg(long, num_args = 2, value_names = ["A", "B"])]
        pair: Option<Vec<PathBuf>>,
    },
    /// Three- and five-condition characterizations, and the exponent corollary.
    Characterize {
        t: PathBuf,
        a: PathBuf,
        s: PathBuf,
        #[arg(long, requires = "beta")]
        alpha: Option<f64>,
        #[arg(long, requires = "alpha")]
        beta: Option<f64>,
        /// Evaluate the corollary on the {0.5, 1, 2}^2 exponent grid.
        #[arg(long, conflicts_with = "alpha")]
        grid: bool,
    },
    /// Seeded property campaigns.
    Suite(SuiteArgs),
    /// Reproduce the two worked 3x3 examples.
    Fixtures,
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = Campaign::All)]
    campaign: Campaign,
    #[arg(long, default_value_t = CampaignConfig::DEFAULT_MAX_DIM)]
    max_dim: usize,
    #[arg(long, default_value = "mixed")]
    rank_policy: RankPolicy,
    /// Directory for the first counterexample's matrix files.
    #[arg(long, default_value = "counterexample")]
    dump: PathBuf,
}

/// Input errors exit with 2, everything else with 1.
fn exit_for(e: &Error) -> ExitCode {
    match e {
        Error::NoConvergence { .. }
        | Error::NotPositive { .. }
        | Error::Unsolvable { .. }
        | Error::InconsistentBlocks { .. } => ExitCode::from(1),
        _ => ExitCode::from(2),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            print!("{}", report.to_text());
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, report.to_json() + "\n") {
                    eprintln!("error: writing {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err((context, e)) => {
            eprintln!("error: {context}{e}");
            exit_for(&e)
        }
    }
}

/// Error plus the file it concerns, when there is one.
type Failure = (String, Error);

fn plain(e: Error) -> Failure {
    (String::new(), e)
}

#[derive(Clone)]
struct Input {
    bytes: Vec<u8>,
    matrix: ComplexMatrix,
}

fn load(path: &Path) -> Result<Input, Failure> {
    let context = format!("{}: ", path.display());
    let bytes = std::fs::read(path).map_err(|e| (context.clone(), e.into()))?;
    let matrix = MatrixFile::parse(&bytes)
        .and_then(|f| f.to_matrix())
        .map_err(|e| (context, e))?;
    Ok(Input { bytes, matrix })
}

fn load_all<const N: usize>(paths: [&Path; N]) -> Result<[Input; N], Failure> {
    let inputs = paths.into_iter().map(load).collect::<Result<Vec<_>, _>>()?;
    Ok(inputs.try_into().unwrap_or_else(|_| unreachable!()))
}

fn digest_of(inputs: &[Input], tol: &Tolerance) -> Vec<Vec<u8>> {
    let mut parts: Vec<Vec<u8>> = inputs.iter().map(|i| i.bytes.clone()).collect();
    parts.push(tol.rank_rel.to_le_bytes().to_vec());
    parts.push(tol.eq_abs.to_le_bytes().to_vec());
    parts
}

fn new_report(command: &str, inputs: &[Input], tol: &Tolerance) -> Report {
    let parts = digest_of(inputs, tol);
    let refs: Vec<&[u8]> = parts.iter().map(Vec::as_slice).collect();
    Report::new(command, &refs)
}

fn add_checks(report: &mut Report, checks: Checks) {
    for (name, b) in checks {
        report.bounded(name, b.value, b.bound);
    }
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    let tol = Tolerance::new(cli.tol_rank, cli.tol_eq).map_err(plain)?;
    match &cli.command {
        Command::Polar { file } => polar(file, &tol),
        Command::Product { t, a, s } => product([t, a, s], &tol),
        Command::Perturb {
            t,
            e,
            f,
            seed,
            pair,
        } => perturb([t, e, f], *seed, pair.as_deref(), &tol),
        Command::Characterize {
            t,
            a,
            s,
            alpha,
            beta,
            grid,
        } => {
            let points: Vec<(f64, f64)> = match (alpha, beta) {
                (Some(a), Some(b)) => vec![(*a, *b)],
                _ if *grid => DEFAULT_GRID.to_vec(),
                _ => Vec::new(),
            };
            characterize([t, a, s], &points, &tol)
        }
        Command::Suite(args) => suite(args, &tol),
        Command::Fixtures => fixtures(&tol),
    }
}

fn polar(file: &Path, tol: &Tolerance) -> Result<Report, Failure> {
    let [t] = load_all([file])?;
    let mut report = new_report("polar", std::slice::from_ref(&t), tol);
    let pd = polar_decompose(&t.matrix, tol).map_err(plain)?;
    report.note("shape", format!("{}x{}", t.matrix.rows(), t.matrix.cols()));
    report.note("numerical_rank", pd.numerical_rank);
    report.matrix(MatrixFile::from_matrix("U", &pd.partial_isometry));
    report.matrix(MatrixFile::from_matrix("|T|", &pd.positive_factor));
    add_checks(&mut report, polar_checks(&t.matrix, tol).map_err(plain)?);
    Ok(report)
}

fn product(paths: [&PathBuf; 3], tol: &Tolerance) -> Result<Report, Failure> {
    let inputs = load_all(paths.map(PathBuf::as_path))?;
    let mut report = new_report("product", &inputs, tol);
    let [t, a, s] = inputs.map(|i| i.matrix);
    let rep = verify_product_theorem(&ProductProblem::new(t, a, s, *tol).map_err(plain)?)
        .map_err(plain)?;
    report.matrix(MatrixFile::from_matrix("U_X", &rep.u_x_direct));
    report.matrix(MatrixFile::from_matrix("U_T U_Y U_S", &rep.u_x_formula));
    report.matrix(MatrixFile::from_matrix("U_Y", &rep.u_y_direct));
    report.matrix(MatrixFile::from_matrix("U_T* U_X U_S*", &rep.u_y_formula));
    add_checks(&mut report, product_checks(&rep, tol));
    Ok(report)
}

fn perturb(
    paths: [&PathBuf; 3],
    seed: u64,
    pair: Option<&[PathBuf]>,
    tol: &Tolerance,
) -> Result<Report, Failure> {
    let mut inputs = load_all(paths.map(PathBuf::as_path))?.to_vec();
    let pair = match pair {
        Some([a, b]) => Some(load_all([a.as_path(), b.as_path()])?),
        _ => None,
    };
    if let Some(p) = &pair {
        inputs.extend(p.iter().cloned());
    }
    let mut report = new_report("perturb", &inputs, tol);
    let [t, e, f] = [0, 1, 2].map(|i| inputs[i].matrix.clone());
    let p = PerturbationProblem::new(t, e, f, *tol).map_err(plain)?;
    let d = perturb_polar(&p).map_err(plain)?;
    let rotated = split_bases(&p.t, tol)
        .map_err(plain)?
        .remixed(&mut trial_rng(seed, 0));
    let remixed = perturb_polar_with(&p, rotated).map_err(plain)?;
    let u_t = polar_decompose(&p.t, tol).map_err(plain)?.partial_isometry;
    report.note("seed", seed);
    report.note(
        "theta_condition",
        format!("{:e} {:e}", d.theta_condition.0, d.theta_condition.1),
    );
    report.matrix(MatrixFile::from_matrix("U_M", &d.u_m));
    report.matrix(MatrixFile::from_matrix("U_T", &u_t));
    if d.u_m.shape() == u_t.shape() {
        report.residual(
            "unitary_distance(U_M, U_T)",
            unitary_distance(&d.u_m, &u_t, tol).map_err(plain)?,
        );
    }
    let c = &d.residuals.conditions;
    report.residual("condition_theta_ranges", c.theta_ranges);
    report.residual("condition_inclusions", c.inclusions);
    report.residual("condition_y_ranges", c.y_ranges);
    add_checks(
        &mut report,
        perturbation_checks(&d, &remixed, tol).map_err(plain)?,
    );
    if let Some([a, b]) = &pair {
        let tp = tractable_pair_polar(&a.matrix, &b.matrix, tol).map_err(plain)?;
        add_checks(&mut report, tractable_checks(&tp, tol));
    }
    Ok(report)
}

fn describe(c: &Condition) -> String {
    format!("{} (residual {:.3e})", c.verdict, c.residual)
}

fn characterize(
    paths: [&PathBuf; 3],
    points: &[(f64, f64)],
    tol: &Tolerance,
) -> Result<Report, Failure> {
    let inputs = load_all(paths.map(PathBuf::as_path))?;
    let mut report = new_report("characterize", &inputs, tol);
    let [t, a, s] = inputs.map(|i| i.matrix);
    let inp = CharacterizationInput::new(t.clone(), a.clone(), s, *tol).map_err(plain)?;

    let three = check_three_conditions(&inp).map_err(plain)?;
    report.matrix(MatrixFile::from_matrix("W", &three.w));
    report.matrix(MatrixFile::from_matrix("Y", &three.y));
    for (name, c) in ["three.i", "three.ii", "three.iii"]
        .iter()
        .zip(three.conditions())
    {
        report.note(*name, describe(&c));
    }
    report.note("three.R(W)=R(Y)", three.range_w_eq_y);
    report.note("three.R(W*)=R(Y*)", three.range_wstar_eq_ystar);
    if let Some((x, y)) = &three.polar_verdicts {
        report.note("three.X polar", describe(x));
        report.note("three.Y polar", describe(y));
    }
    report.verdict("three conditions agree", three.agreement() != Some(false));
    report.verdict("three-condition polar conclusion", three.holds());

    let five = check_five_conditions(&inp).map_err(plain)?;
    report.residual("commutator [|T|,A]", five.gate);
    if five.gate_holds {
        for (i, c) in five.conditions.iter().enumerate() {
            report.note(
                format!("five.{}", ["i", "ii", "iii", "iv", "v"][i]),
                describe(c),
            );
        }
        report.note("five.inconclusive", five.inconclusive());
        report.verdict("five conditions agree", five.agreement() != Some(false));
    } else {
        report.note("five", "skipped: [|T|, A] != 0");
    }

    if !points.is_empty() {
        let cor = check_corollary(&t, &a, points, tol).map_err(plain)?;
        corollary_notes(&mut report, &cor);
    }
    Ok(report)
}

fn corollary_notes(report: &mut Report, cor: &CorollaryReport) {
    report.residual("commutator [|T*|,|A|]", cor.addendum_gap);
    if !cor.gate_holds {
        report.note("corollary", "skipped: [|T|, A] != 0");
        return;
    }
    for p in &cor.points {
        let v: Vec<String> = p.conditions.iter().map(|c| c.verdict.to_string()).collect();
        report.note(format!("corollary({}, {})", p.alpha, p.beta), v.join(" "));
    }
    report.verdict(
        "corollary conditions agree",
        cor.points.iter().all(|p| p.agreement() != Some(false)),
    );
    if cor.addendum_holds {
        report.verdict(
            "corollary (v) constant across exponents",
            cor.v_constant() != Some(false),
        );
    }
}

fn suite(args: &SuiteArgs, tol: &Tolerance) -> Result<Report, Failure> {
    let cfg = CampaignConfig {
        seed: args.seed,
        trials: args.trials,
        max_dim: args.max_dim,
        rank_policy: args.rank_policy,
        tol: *tol,
    };
    let results = run_campaign(args.campaign, &cfg).map_err(plain)?;
    let mut report = suite_report(&results, &cfg);
    if let Some(c) = &report.counterexample {
        let dir = args
            .dump
            .join(format!("{}-seed{}-trial{}", c.campaign, c.seed, c.index));
        std::fs::create_dir_all(&dir).map_err(|e| (format!("{}: ", dir.display()), e.into()))?;
        let mut files = Vec::new();
        for m in &c.matrices {
            let path = dir.join(format!("{}.json", m.name));
            m.write(&path)
                .map_err(|e| (format!("{}: ", path.display()), e))?;
            files.push(path.display().to_string());
        }
        report.note("counterexample_files", files.join(" "));
    }
    Ok(report)
}

fn fixtures(tol: &Tolerance) -> Result<Report, Failure> {
    let mut report = Report::new(
        "fixtures",
        &[&tol.rank_rel.to_le_bytes(), &tol.eq_abs.to_le_bytes()],
    );
    let fx = run_fixtures(tol).map_err(plain)?;
    for m in &fx.matrices {
        report.matrix(MatrixFile::from_matrix(m.name, &m.computed));
    }
    for m in &fx.matrices {
        report.bounded(
            format!("{} max entry error", m.name),
            m.max_error,
            FIXTURE_TOLERANCE,
        );
    }
    for s in &fx.scalars {
        report.note(s.name, format!("{:.16}", s.computed));
        report.bounded(
            format!("{} error", s.name),
            (s.computed - s.expected).abs(),
            FIXTURE_TOLERANCE,
        );
    }
    for &(name, got, want) in &fx.verdicts {
        report.note(name, got);
        report.verdict(format!("{name} is {want}"), got == want);
    }
    Ok(report)
}
