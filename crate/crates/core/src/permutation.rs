//! Reindexing points so that a tie-free configuration lands in the region
//! `R = { x : x_i^i > x_j^i for all i < j }`.

use crate::error::{Error, Result};
use crate::types::{pairs, Configuration, UpperTriangularMatrix};

/// A permutation `π` of the point labels. `pi[j]` is the original index of
/// the point that ends up in position `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationMap {
    pi: Vec<usize>,
}

impl PermutationMap {
    pub fn new(pi: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; pi.len()];
        for &v in &pi {
            if v >= pi.len() || std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidConfiguration(format!("{pi:?} is not a permutation")));
            }
        }
        Ok(PermutationMap { pi })
    }

    pub fn identity(n: usize) -> Self {
        PermutationMap { pi: (0..n).collect() }
    }

    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.pi
    }

    pub fn is_identity(&self) -> bool {
        self.pi.iter().enumerate().all(|(j, &i)| i == j)
    }

    pub fn inverse(&self) -> PermutationMap {
        let mut inv = vec![0; self.pi.len()];
        for (j, &i) in self.pi.iter().enumerate() {
            inv[i] = j;
        }
        PermutationMap { pi: inv }
    }

    /// `A_π(y) = (y_{π(1)}, …, y_{π(n)})`.
    pub fn apply_to_points(&self, config: &Configuration) -> Result<Configuration> {
        self.check_len(config.n())?;
        let coords = self.pi.iter().flat_map(|&i| config.point(i).iter().copied()).collect();
        Ok(config.with_flat(coords))
    }

    /// `B_π(X)_{ij} = X_{π(i)π(j)}` with the pair sorted.
    pub fn apply_to_pairs(&self, m: &UpperTriangularMatrix) -> Result<UpperTriangularMatrix> {
        self.check_len(m.n())?;
        let entries = pairs(m.n()).map(|(i, j)| m.get(self.pi[i], self.pi[j])).collect();
        UpperTriangularMatrix::new(m.n(), m.kind(), entries)
    }

    /// `B_π^{-1}`.
    pub fn unapply_to_pairs(&self, m: &UpperTriangularMatrix) -> Result<UpperTriangularMatrix> {
        self.inverse().apply_to_pairs(m)
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n == self.pi.len() {
            Ok(())
        } else {
            Err(Error::Dimension(format!("permutation of {} labels applied to {n} points", self.pi.len())))
        }
    }
}

/// Chooses `π` recursively: `π(j)` is the remaining point with the largest
/// `j`-th coordinate. Returns `π` and `A_π(x)`, which lies in `R`.
pub fn normalize_to_r(config: &Configuration) -> Result<(PermutationMap, Configuration)> {
    let n = config.n();
    if config.dim() != n {
        return Err(Error::Dimension(format!(
            "region R is defined for n points in R^n; got {n} points in R^{}",
            config.dim()
        )));
    }
    config.require_tie_free()?;
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut pi = Vec::with_capacity(n);
    for j in 0..n {
        let (pos, _) = remaining
            .iter()
            .enumerate()
            .max_by(|a, b| config.coord(*a.1, j).total_cmp(&config.coord(*b.1, j)))
            .expect("nonempty");
        pi.push(remaining.remove(pos));
    }
    let perm = PermutationMap { pi };
    let reordered = perm.apply_to_points(config)?;
    Ok((perm, reordered))
}

/// Whether `x_i^i > x_j^i` for all `i < j`.
pub fn in_region_r(config: &Configuration) -> bool {
    config.dim() >= config.n() && pairs(config.n()).all(|(i, j)| config.coord(i, i) > config.coord(j, i))
}
