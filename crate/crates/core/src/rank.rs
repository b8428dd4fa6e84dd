//! Numerical rank of the Jacobian of `F`, i.e. membership in the set `G`
//! of configurations where `DF` is onto.

use serde::Serialize;

use crate::distance::{jacobian_f, JacobianMatrix};
use crate::error::{Error, Result};
use crate::types::Configuration;

/// Singular values below `DEFAULT_RANK_TOLERANCE * σ_max` are treated as zero.
pub const DEFAULT_RANK_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankReport {
    /// Nonincreasing, `min(rows, cols)` of them.
    pub singular_values: Vec<f64>,
    pub numeric_rank: usize,
    /// Rank needed for full rank, `C(n, 2)`.
    pub required_rank: usize,
    pub full_rank: bool,
    pub tolerance_used: f64,
}

impl RankReport {
    /// `σ_{C(n,2)} / σ_max`: the smallest singular value that has to be
    /// nonzero for full rank, relative to the largest. Zero when the matrix
    /// is zero or has fewer singular values than needed.
    pub fn smallest_retained_ratio(&self) -> f64 {
        let max = self.singular_values.first().copied().unwrap_or(0.0);
        match self.singular_values.get(self.required_rank.wrapping_sub(1)) {
            Some(&s) if max > 0.0 => s / max,
            _ => 0.0,
        }
    }
}

fn check_tolerance(tolerance: f64) -> Result<()> {
    if tolerance > 0.0 && tolerance < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidOptions(format!("rank tolerance {tolerance} must lie in (0, 1)")))
    }
}

/// Singular value decomposition based rank test.
pub fn rank_test(jac: &JacobianMatrix, tolerance: f64) -> Result<RankReport> {
    check_tolerance(tolerance)?;
    let mut singular_values: Vec<f64> =
        jac.as_matrix().clone().svd(false, false).singular_values.iter().copied().collect();
    singular_values.sort_by(|a, b| b.total_cmp(a));
    let cutoff = tolerance * singular_values.first().copied().unwrap_or(0.0);
    let numeric_rank = if cutoff > 0.0 { singular_values.iter().filter(|&&s| s > cutoff).count() } else { 0 };
    let required_rank = jac.rows();
    Ok(RankReport {
        singular_values,
        numeric_rank,
        required_rank,
        full_rank: numeric_rank == required_rank,
        tolerance_used: tolerance,
    })
}

/// Rank test of `DF` at `config`.
pub fn in_g(config: &Configuration, tolerance: f64) -> Result<RankReport> {
    rank_test(&jacobian_f(config)?, tolerance)
}
