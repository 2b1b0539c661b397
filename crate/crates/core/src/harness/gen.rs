//! Seeded random matrices.
//!
//! Every generator draws from a [`TrialRng`]; [`trial_rng`] derives one
//! independent ChaCha stream per `(seed, trial index)` so that campaign
//! trials are reproducible in isolation and in any evaluation order.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

pub type TrialRng = ChaCha8Rng;

/// RNG for trial `index` of a campaign seeded with `seed`.
pub fn trial_rng(seed: u64, index: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Range for singular values, sampled log-uniformly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum {
    pub lo: f64,
    pub hi: f64,
}

impl Spectrum {
    /// `[1e-2, 1e2]`, the range used by [`gen_matrix`].
    pub const WIDE: Spectrum = Spectrum { lo: 1e-2, hi: 1e2 };
    /// `[0.5, 2]`, for constructions whose verdicts need well-separated
    /// spectra.
    pub const MODERATE: Spectrum = Spectrum { lo: 0.5, hi: 2.0 };
    /// `[1e-2, 1e2]^(1/3)`: a product of three such factors spans the same
    /// range as one [`Spectrum::WIDE`] matrix.
    pub const FACTOR: Spectrum = Spectrum {
        lo: 0.215_443_469_003_188_4,
        hi: 4.641_588_833_612_779,
    };

    pub fn sample(&self, rng: &mut TrialRng) -> f64 {
        let (a, b) = (self.lo.ln(), self.hi.ln());
        (a + (b - a) * rng.random::<f64>()).exp()
    }
}

pub fn complex_normal(rng: &mut TrialRng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix of i.i.d. standard complex Gaussian entries.
pub fn gaussian(rows: usize, cols: usize, rng: &mut TrialRng) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(rows, cols);
    if rows * cols > 0 {
        let entries: Vec<Complex64> = (0..rows * cols).map(|_| complex_normal(rng)).collect();
        out = ComplexMatrix::new(rows, cols, entries).expect("gaussian entries are finite");
    }
    out
}

/// Haar-distributed unitary: QR of a Gaussian matrix with the phases of
/// `diag(R)` folded back into `Q`.
pub fn random_unitary(n: usize, rng: &mut TrialRng) -> ComplexMatrix {
    if n == 0 {
        return ComplexMatrix::zeros(0, 0);
    }
    let g: DMatrix<Complex64> = gaussian(n, n, rng).into_nalgebra();
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    ComplexMatrix::from_fn(n, n, |i, j| {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        q[(i, j)] * phase
    })
}

/// `m x n` matrix `U diag(s_1..s_rank, 0..) V*` with Haar unitaries and
/// singular values drawn from `spectrum`.
pub fn gen_matrix_with(
    m: usize,
    n: usize,
    rank: usize,
    spectrum: Spectrum,
    rng: &mut TrialRng,
) -> Result<ComplexMatrix> {
    if rank > m.min(n) {
        return Err(Error::RankOutOfBounds {
            rows: m,
            cols: n,
            rank,
        });
    }
    let u = random_unitary(m, rng);
    let v = random_unitary(n, rng);
    let sigma: Vec<f64> = (0..rank).map(|_| spectrum.sample(rng)).collect();
    let left = ComplexMatrix::from_fn(m, rank, |i, j| u.get(i, j) * sigma[j]);
    Ok(&left * &v.block(0, 0, n, rank).adjoint())
}

/// Seeded `m x n` matrix of exact rank `rank`, singular values log-uniform
/// in `[1e-2, 1e2]`. Equal seeds give bit-identical matrices.
pub fn gen_matrix(m: usize, n: usize, rank: usize, seed: u64) -> Result<ComplexMatrix> {
    gen_matrix_with(m, n, rank, Spectrum::WIDE, &mut trial_rng(seed, 0))
}

/// Partial isometry `Omega P` whose initial projection is `p`.
pub fn partial_isometry_on(p: &ComplexMatrix, rng: &mut TrialRng) -> ComplexMatrix {
    &random_unitary(p.rows(), rng) * p
}

/// Rank policy for randomly drawn problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankPolicy {
    UniformRandom,
    Full,
    Zero,
    Mixed,
}

impl RankPolicy {
    pub fn draw(&self, m: usize, n: usize, rng: &mut TrialRng) -> usize {
        let k = m.min(n);
        match self {
            RankPolicy::Full => k,
            RankPolicy::Zero => 0,
            RankPolicy::UniformRandom => rng.random_range(0..=k),
            // Mostly rank-deficient, with full and zero ranks forced often.
            RankPolicy::Mixed => match rng.random_range(0..10) {
                0 => 0,
                1 | 2 => k,
                _ if k >= 2 => rng.random_range(1..k),
                _ => rng.random_range(0..=k),
            },
        }
    }

    /// A rank strictly below `min(m, n)` when that is possible.
    pub fn draw_deficient(&self, m: usize, n: usize, rng: &mut TrialRng) -> usize {
        let k = m.min(n);
        match self {
            RankPolicy::Zero => 0,
            _ if k == 0 => 0,
            _ => rng.random_range(0..k),
        }
    }
}

impl std::str::FromStr for RankPolicy {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "uniform-random" => Ok(Self::UniformRandom),
            "full" => Ok(Self::Full),
            "zero" => Ok(Self::Zero),
            "mixed" => Ok(Self::Mixed),
            other => Err(format!("unknown rank policy {other:?}")),
        }
    }
}

/// Random composition of `h` into positive block sizes.
fn block_sizes(h: usize, rng: &mut TrialRng) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut left = h;
    while left > 0 {
        let k = rng.random_range(1..=left.min(3));
        sizes.push(k);
        left -= k;
    }
    sizes
}

fn block_diagonal(blocks: &[ComplexMatrix]) -> ComplexMatrix {
    blocks.iter().fold(ComplexMatrix::zeros(0, 0), |acc, b| {
        ComplexMatrix::block_diag(&acc, b)
    })
}

fn conjugate(v: &ComplexMatrix, m: &ComplexMatrix) -> ComplexMatrix {
    &(v * m) * &v.adjoint()
}

/// Level for a block of `|T|` or `|S*|`: zero one time in five.
fn level(rng: &mut TrialRng) -> f64 {
    if rng.random_range(0..5) == 0 {
        0.0
    } else {
        Spectrum::MODERATE.sample(rng)
    }
}

/// How `S` relates to the commuting pair `(T, A)` in [`commuting_triple`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SMode {
    /// Unstructured `S`; `|T||A||S*|` is then generically not positive.
    Generic,
    /// `|S*|` is a scalar on each block of `|T|`, so `|T||A||S*| >= 0`.
    Commuting,
}

/// `h x h` triple `(T, A, S)` with `[|T|, A] = 0` by construction:
/// `|T| = V Dg V*` for a block-constant diagonal `Dg` (zero blocks allowed),
/// `A = V blockdiag(A_j) V*` over the same blocks, and `T = Omega |T|` for a
/// unitary `Omega`.
pub fn commuting_triple(
    h: usize,
    mode: SMode,
    rng: &mut TrialRng,
) -> (ComplexMatrix, ComplexMatrix, ComplexMatrix) {
    let v = random_unitary(h, rng);
    let sizes = block_sizes(h, rng);
    let mut dg = Vec::new();
    let mut a_blocks = Vec::new();
    let mut s_levels = Vec::new();
    for &k in &sizes {
        let d = level(rng);
        dg.extend(std::iter::repeat_n(d, k));
        let rank = RankPolicy::Mixed.draw(k, k, rng);
        a_blocks.push(
            gen_matrix_with(k, k, rank, Spectrum::MODERATE, rng).expect("rank within bounds"),
        );
        let c = level(rng);
        s_levels.extend(std::iter::repeat_n(c, k));
    }
    let abs_t = conjugate(&v, &ComplexMatrix::from_real_diagonal(&dg));
    let a = conjugate(&v, &block_diagonal(&a_blocks));
    let t = &random_unitary(h, rng) * &abs_t;
    let s = match mode {
        SMode::Generic => {
            let rank = RankPolicy::Mixed.draw(h, h, rng);
            gen_matrix_with(h, h, rank, Spectrum::MODERATE, rng).expect("rank within bounds")
        }
        SMode::Commuting => {
            let abs_s_star = conjugate(&v, &ComplexMatrix::from_real_diagonal(&s_levels));
            &abs_s_star * &random_unitary(h, rng)
        }
    };
    (t, a, s)
}

/// `h x h` pair `(T, A)` with `[|T|, A] = 0` and `[|T*|, |A|] = 0`:
/// `A = V diag(lambda_j I) V*` with complex `lambda_j`, and
/// `T = V blockdiag(T_j) V*`. With `normal` every `T_j` is normal and
/// `|T|^a |A| |T*|^b >= 0` for all exponents; otherwise the `T_j` are
/// unstructured.
pub fn addendum_pair(h: usize, normal: bool, rng: &mut TrialRng) -> (ComplexMatrix, ComplexMatrix) {
    let v = random_unitary(h, rng);
    let sizes = block_sizes(h, rng);
    let mut lambdas = Vec::new();
    let mut t_blocks = Vec::new();
    for &k in &sizes {
        let lambda =
            Complex64::from_polar(level(rng), rng.random_range(0.0..std::f64::consts::TAU));
        lambdas.extend(std::iter::repeat_n(lambda, k));
        let block = if normal {
            let mu: Vec<Complex64> = (0..k)
                .map(|_| {
                    Complex64::from_polar(level(rng), rng.random_range(0.0..std::f64::consts::TAU))
                })
                .collect();
            conjugate(&random_unitary(k, rng), &ComplexMatrix::from_diagonal(&mu))
        } else {
            let rank = RankPolicy::Mixed.draw(k, k, rng);
            gen_matrix_with(k, k, rank, Spectrum::MODERATE, rng).expect("rank within bounds")
        };
        t_blocks.push(block);
    }
    let a = conjugate(&v, &ComplexMatrix::from_diagonal(&lambdas));
    let t = conjugate(&v, &block_diagonal(&t_blocks));
    (t, a)
}
