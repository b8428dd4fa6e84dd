//! Property K: some `n` coordinates of an `n`-point configuration already
//! carry a full-rank projection.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rank::in_g;
use crate::types::{Configuration, CoordinateSubset};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SearchStrategy {
    /// All `n`-subsets in lexicographic order.
    #[default]
    Exhaustive,
    /// High-variance coordinates first, then the exhaustive sweep.
    Greedy,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropertyK {
    pub holds: bool,
    pub witness: Option<CoordinateSubset>,
}

/// Searches for a size-`n` coordinate subset whose projection is in `G`.
pub fn has_property_k(config: &Configuration, strategy: SearchStrategy, tolerance: f64) -> Result<PropertyK> {
    config.p().require_smooth()?;
    let (n, dim) = (config.n(), config.dim());
    if dim < n {
        return Err(Error::Dimension(format!(
            "Property K needs at least n = {n} coordinates, configuration has {dim}"
        )));
    }
    let test = |subset: Vec<usize>| -> Result<Option<CoordinateSubset>> {
        let subset = CoordinateSubset::new(subset)?;
        Ok(in_g(&config.project(&subset)?, tolerance)?.full_rank.then_some(subset))
    };

    if strategy == SearchStrategy::Greedy {
        let pool = greedy_pool(config);
        for combo in pool.iter().copied().combinations(n) {
            let mut subset = combo;
            subset.sort_unstable();
            if let Some(w) = test(subset)? {
                return Ok(PropertyK { holds: true, witness: Some(w) });
            }
        }
    }
    for subset in (0..dim).combinations(n) {
        if let Some(w) = test(subset)? {
            return Ok(PropertyK { holds: true, witness: Some(w) });
        }
    }
    Ok(PropertyK { holds: false, witness: None })
}

/// The `n + 2` coordinates (or all of them) with the largest spread of
/// `{x_1^k, …, x_n^k}`, highest variance first, lower index on ties.
fn greedy_pool(config: &Configuration) -> Vec<usize> {
    let n = config.n() as f64;
    let variance = |k: usize| {
        let mean = (0..config.n()).map(|i| config.coord(i, k)).sum::<f64>() / n;
        (0..config.n()).map(|i| (config.coord(i, k) - mean).powi(2)).sum::<f64>() / n
    };
    let scored: Vec<(usize, f64)> = (0..config.dim()).map(|k| (k, variance(k))).collect();
    scored
        .into_iter()
        .sorted_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)))
        .map(|(k, _)| k)
        .take(config.n() + 2)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rank::DEFAULT_RANK_TOLERANCE;

    fn basis(n: usize, d: usize, p: f64) -> Configuration {
        let pts = (0..n).map(|i| (0..d).map(|k| if i == k { 1.0 } else { 0.0 }).collect()).collect();
        Configuration::new(p, pts).unwrap()
    }

    #[test]
    fn basis_vectors_have_leading_witness() {
        for d in 3..7 {
            let r = has_property_k(&basis(3, d, 2.0), SearchStrategy::Exhaustive, DEFAULT_RANK_TOLERANCE).unwrap();
            assert!(r.holds);
            assert_eq!(r.witness.unwrap().one_based(), vec![1, 2, 3]);
        }
    }

    #[test]
    fn coincident_points_fail() {
        let pts = vec![vec![0.0, 4.0, 4.0, 4.0], vec![1.0, 4.0, 4.0, 4.0], vec![1.0, 4.0, 4.0, 4.0]];
        let c = Configuration::new(2.0, pts).unwrap();
        for s in [SearchStrategy::Exhaustive, SearchStrategy::Greedy] {
            let r = has_property_k(&c, s, DEFAULT_RANK_TOLERANCE).unwrap();
            assert!(!r.holds);
            assert!(r.witness.is_none());
        }
    }

    #[test]
    fn too_few_coordinates_is_a_dimension_error() {
        assert!(matches!(
            has_property_k(
                &basis(3, 3, 2.0).project(&CoordinateSubset::leading(2)).unwrap(),
                SearchStrategy::Exhaustive,
                DEFAULT_RANK_TOLERANCE
            ),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn greedy_prefers_high_variance_coordinates() {
        // coordinates 0 and 1 are constant, 2..5 carry the simplex
        let pts = vec![vec![7.0, 7.0, 1.0, 0.0, 0.0], vec![7.0, 7.0, 0.0, 1.0, 0.0], vec![7.0, 7.0, 0.0, 0.0, 1.0]];
        let c = Configuration::new(2.5, pts).unwrap();
        let g = has_property_k(&c, SearchStrategy::Greedy, DEFAULT_RANK_TOLERANCE).unwrap();
        let e = has_property_k(&c, SearchStrategy::Exhaustive, DEFAULT_RANK_TOLERANCE).unwrap();
        assert_eq!(g.holds, e.holds);
        assert_eq!(g.witness.unwrap().one_based(), vec![3, 4, 5]);
    }

    #[test]
    fn witness_projection_is_full_rank() {
        let pts = vec![vec![0.2, -1.3, 0.5, 2.2], vec![1.1, 0.4, -0.7, 0.1], vec![-0.6, 0.9, 1.8, -1.4]];
        let c = Configuration::new(3.0, pts).unwrap();
        let r = has_property_k(&c, SearchStrategy::Exhaustive, DEFAULT_RANK_TOLERANCE).unwrap();
        let w = r.witness.unwrap();
        assert!(in_g(&c.project(&w).unwrap(), DEFAULT_RANK_TOLERANCE).unwrap().full_rank);
    }
}
