//! Domain types shared by every module: exponents, point configurations,
//! coordinate subsets and pair-indexed (upper triangular) arrays.
//!
//! Index conventions are fixed here and used everywhere:
//!
//! * points and coordinates are zero-based internally;
//! * pairs `(i, j)` with `i < j` are enumerated lexicographically,
//!   `(0,1), (0,2), …, (n-2, n-1)`;
//! * directions `(l, k)` (point `l`, coordinate `k`) are enumerated
//!   point-major, column `l * dim + k`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of unordered pairs among `n` points.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Position of pair `(i, j)`, `i < j < n`, in lexicographic order.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// All pairs `(i, j)` with `i < j < n`, lexicographically.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> + Clone {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// Exponent of the ℓ_p norm, `1 <= p < ∞`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct PExponent(f64);

impl PExponent {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_finite() && p >= 1.0 {
            Ok(PExponent(p))
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// Most operations need the norm to be differentiable, i.e. `p > 1`.
    pub fn require_smooth(self) -> Result<()> {
        if self.0 > 1.0 {
            Ok(())
        } else {
            Err(Error::InvalidExponent(self.0))
        }
    }

    /// ℓ_p norm of a vector.
    pub fn norm(self, v: &[f64]) -> f64 {
        self.norm_pow(v).powf(1.0 / self.0)
    }

    /// p-th power of the ℓ_p norm.
    pub fn norm_pow(self, v: &[f64]) -> f64 {
        v.iter().map(|x| x.abs().powf(self.0)).sum()
    }
}

impl<'de> Deserialize<'de> for PExponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let p = f64::deserialize(d)?;
        PExponent::new(p).map_err(serde::de::Error::custom)
    }
}

/// An ordered `n`-tuple of points of `R^dim`, together with the exponent of
/// the ambient ℓ_p norm.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    p: PExponent,
    n: usize,
    dim: usize,
    coords: Vec<f64>,
}

impl Configuration {
    pub fn new(p: f64, points: Vec<Vec<f64>>) -> Result<Self> {
        let n = points.len();
        let dim = points.first().map_or(0, Vec::len);
        if let Some(i) = points.iter().position(|pt| pt.len() != dim) {
            return Err(Error::InvalidConfiguration(format!(
                "point {} has {} coordinates, expected {dim}",
                i + 1,
                points[i].len()
            )));
        }
        Self::from_flat(p, n, dim, points.into_iter().flatten().collect())
    }

    /// Builds a configuration from row-major coordinates (`n` rows of `dim`).
    pub fn from_flat(p: f64, n: usize, dim: usize, coords: Vec<f64>) -> Result<Self> {
        let p = PExponent::new(p)?;
        if n < 2 {
            return Err(Error::InvalidConfiguration(format!("need at least 2 points, got {n}")));
        }
        if dim < 1 {
            return Err(Error::InvalidConfiguration("ambient dimension must be at least 1".into()));
        }
        if coords.len() != n * dim {
            return Err(Error::InvalidConfiguration(format!("expected {} coordinates, got {}", n * dim, coords.len())));
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidConfiguration(format!(
                "coordinate {} of point {} is not finite",
                pos % dim + 1,
                pos / dim + 1
            )));
        }
        Ok(Configuration { p, n, dim, coords })
    }

    #[inline]
    pub fn p(&self) -> PExponent {
        self.p
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn coord(&self, i: usize, k: usize) -> f64 {
        self.coords[i * self.dim + k]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    /// Row-major coordinates.
    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    pub fn to_points(&self) -> Vec<Vec<f64>> {
        self.points().map(<[f64]>::to_vec).collect()
    }

    /// Same shape and exponent, new coordinates. Panics on a length mismatch.
    pub(crate) fn with_flat(&self, coords: Vec<f64>) -> Self {
        assert_eq!(coords.len(), self.coords.len());
        Configuration { coords, ..*self }
    }

    /// ℓ_p distance between points `i` and `j`.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.distance_pow(i, j).powf(1.0 / self.p.0)
    }

    /// p-th power of the ℓ_p distance between points `i` and `j`.
    pub fn distance_pow(&self, i: usize, j: usize) -> f64 {
        let p = self.p.0;
        self.point(i).iter().zip(self.point(j)).map(|(a, b)| (a - b).abs().powf(p)).sum()
    }

    /// Projection `P_M` onto the given coordinates, in subset order.
    pub fn project(&self, subset: &CoordinateSubset) -> Result<Configuration> {
        subset.check_range(self.dim)?;
        let coords = self.points().flat_map(|pt| subset.indices().iter().map(move |&k| pt[k])).collect();
        Ok(Configuration { p: self.p, n: self.n, dim: subset.len(), coords })
    }

    /// Reorders coordinates: output coordinate `m` is input coordinate `order[m]`.
    /// `order` may be shorter than `dim` (the rest are dropped).
    pub fn select_coordinates(&self, order: &[usize]) -> Result<Configuration> {
        if order.is_empty() || order.iter().any(|&k| k >= self.dim) {
            return Err(Error::Dimension(format!("coordinate selection out of range for dimension {}", self.dim)));
        }
        let coords = self.points().flat_map(|pt| order.iter().map(move |&k| pt[k])).collect();
        Ok(Configuration { p: self.p, n: self.n, dim: order.len(), coords })
    }

    /// Largest absolute coordinate value.
    pub fn max_abs(&self) -> f64 {
        self.coords.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Band inside which two coordinate values count as tied.
    pub fn tie_band(&self) -> f64 {
        TIE_RELATIVE_BAND * (1.0 + self.max_abs())
    }

    /// First `(i, j, k)` with `i < j` and `x_i^k`, `x_j^k` tied, scanning
    /// coordinates outermost.
    pub fn find_tie(&self) -> Option<(usize, usize, usize)> {
        let band = self.tie_band();
        (0..self.dim).find_map(|k| {
            pairs(self.n).find_map(|(i, j)| ((self.coord(i, k) - self.coord(j, k)).abs() <= band).then_some((i, j, k)))
        })
    }

    pub fn require_tie_free(&self) -> Result<()> {
        match self.find_tie() {
            Some((i, j, k)) => Err(Error::DegenerateTie { i, j, k }),
            None => Ok(()),
        }
    }

    /// `sgn(x_i^k - x_j^k)` for every pair and coordinate (pair-major),
    /// with differences inside the tie band mapped to 0.
    pub fn order_pattern(&self) -> Vec<i8> {
        let band = self.tie_band();
        pairs(self.n)
            .flat_map(|(i, j)| {
                (0..self.dim).map(move |k| {
                    let d = self.coord(i, k) - self.coord(j, k);
                    if d.abs() <= band {
                        0
                    } else if d > 0.0 {
                        1
                    } else {
                        -1
                    }
                })
            })
            .collect()
    }
}

/// Coordinates closer than `TIE_RELATIVE_BAND * (1 + max |x|)` are tied.
pub const TIE_RELATIVE_BAND: f64 = 1e-12;

/// Strictly increasing list of coordinate indices (zero-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoordinateSubset {
    indices: Vec<usize>,
}

impl CoordinateSubset {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfiguration("coordinate subset must be strictly increasing".into()));
        }
        Ok(CoordinateSubset { indices })
    }

    /// `{0, 1, …, n-1}`.
    pub fn leading(n: usize) -> Self {
        CoordinateSubset { indices: (0..n).collect() }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.indices.iter().map(|k| k + 1).collect()
    }

    pub(crate) fn check_range(&self, dim: usize) -> Result<()> {
        match self.indices.last() {
            Some(&k) if k >= dim => {
                Err(Error::Dimension(format!("coordinate {} out of range for dimension {dim}", k + 1)))
            }
            _ => Ok(()),
        }
    }
}

/// What an [`UpperTriangularMatrix`] holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixKind {
    /// p-th powers of distances, the values of `F`.
    PthPower,
    /// Plain distances, the values of `F̃`.
    Raw,
}

/// Values indexed by pairs `(i, j)`, `i < j`, stored lexicographically.
#[derive(Clone, Debug, PartialEq)]
pub struct UpperTriangularMatrix {
    n: usize,
    kind: MatrixKind,
    entries: Vec<f64>,
}

impl UpperTriangularMatrix {
    pub fn new(n: usize, kind: MatrixKind, entries: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidTarget(format!("need n >= 2, got {n}")));
        }
        if entries.len() != pair_count(n) {
            return Err(Error::InvalidTarget(format!(
                "expected {} entries for n = {n}, got {}",
                pair_count(n),
                entries.len()
            )));
        }
        for ((i, j), v) in pairs(n).zip(&entries) {
            if !v.is_finite() || *v < 0.0 {
                return Err(Error::InvalidTarget(format!(
                    "entry ({}, {}) = {v} must be finite and nonnegative",
                    i + 1,
                    j + 1
                )));
            }
        }
        Ok(UpperTriangularMatrix { n, kind, entries })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Entry for the unordered pair `{i, j}`, `i != j`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.entries[pair_index(self.n, a, b)]
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        pairs(self.n).zip(self.entries.iter().copied())
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &UpperTriangularMatrix) -> f64 {
        assert_eq!(self.n, other.n);
        self.entries.iter().zip(&other.entries).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}
