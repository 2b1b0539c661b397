use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical thresholds shared by every operation.
///
/// `rank_rel` is the relative singular-value cutoff: a singular value
/// `s_i` counts toward the numerical rank iff `s_i > rank_rel * s_1`.
/// `eq_abs` bounds residuals of matrix equations; matrix-valued residuals are
/// compared against `eq_abs * (1 + ||reference||_F)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rank_rel: f64,
    pub eq_abs: f64,
}

impl Tolerance {
    pub const DEFAULT_RANK_REL: f64 = 1e-10;
    pub const DEFAULT_EQ_ABS: f64 = 1e-9;

    pub fn new(rank_rel: f64, eq_abs: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&rank_rel) || !rank_rel.is_finite() {
            return Err(Error::InvalidTolerance(format!(
                "rank_rel must lie in [0, 1), got {rank_rel}"
            )));
        }
        if !(eq_abs > 0.0) || !eq_abs.is_finite() {
            return Err(Error::InvalidTolerance(format!(
                "eq_abs must be positive, got {eq_abs}"
            )));
        }
        Ok(Self { rank_rel, eq_abs })
    }

    /// Residual bound for a matrix equation whose reference side has
    /// Frobenius norm `scale`.
    pub fn scaled(&self, scale: f64) -> f64 {
        self.eq_abs * (1.0 + scale)
    }

    /// Singular values at or below this value are treated as zero.
    pub fn rank_cutoff(&self, largest: f64) -> f64 {
        self.rank_rel * largest
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rank_rel: Self::DEFAULT_RANK_REL,
            eq_abs: Self::DEFAULT_EQ_ABS,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let t = Tolerance::default();
        assert_eq!(t.rank_rel, 1e-10);
        assert_eq!(t.eq_abs, 1e-9);
        assert!(Tolerance::new(t.rank_rel, t.eq_abs).is_ok());
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(Tolerance::new(1.0, 1e-9).is_err());
        assert!(Tolerance::new(-1e-3, 1e-9).is_err());
        assert!(Tolerance::new(1e-10, 0.0).is_err());
        assert!(Tolerance::new(1e-10, f64::NAN).is_err());
        assert!(Tolerance::new(0.0, 1e-12).is_ok());
    }
}
