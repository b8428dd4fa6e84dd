//! The pairwise-distance maps `F` (p-th powers) and `F̃` (plain distances)
//! and the derivative of `F`.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::types::{pair_count, pairs, Configuration, MatrixKind, UpperTriangularMatrix};

/// `F(x)_{ij} = Σ_k |x_i^k - x_j^k|^p`.
pub fn eval_f(config: &Configuration) -> UpperTriangularMatrix {
    let entries = pairs(config.n()).map(|(i, j)| config.distance_pow(i, j)).collect();
    UpperTriangularMatrix::new(config.n(), MatrixKind::PthPower, entries)
        .expect("p-th power distances of a valid configuration are finite and nonnegative")
}

/// `F̃(x)_{ij} = ‖x_i - x_j‖_p`.
pub fn eval_f_tilde(config: &Configuration) -> UpperTriangularMatrix {
    let inv_p = 1.0 / config.p().get();
    let entries = pairs(config.n()).map(|(i, j)| config.distance_pow(i, j).powf(inv_p)).collect();
    UpperTriangularMatrix::new(config.n(), MatrixKind::Raw, entries)
        .expect("distances of a valid configuration are finite and nonnegative")
}

/// Derivative of `F`, one row per pair and one column per direction
/// `(l, k)` in point-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobianMatrix {
    n: usize,
    dim: usize,
    matrix: DMatrix<f64>,
}

impl JacobianMatrix {
    pub(crate) fn zeros(n: usize, dim: usize) -> Self {
        JacobianMatrix { n, dim, matrix: DMatrix::zeros(pair_count(n), n * dim) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    /// Column of direction `e_l^k`.
    pub fn column_index(&self, l: usize, k: usize) -> usize {
        l * self.dim + k
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    /// Entry at pair row `row` and direction `(l, k)`.
    pub fn get(&self, row: usize, l: usize, k: usize) -> f64 {
        self.matrix[(row, self.column_index(l, k))]
    }
}

/// Signed power `|t|^e · sgn(t)` with `sgn(0) = 0`.
#[inline]
fn signed_pow(t: f64, e: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t.signum() * t.abs().powf(e)
    }
}

/// Partial derivatives of `F`:
/// `∂F_{ij}/∂x_l^k = p |x_i^k - x_j^k|^{p-1} sgn(x_i^k - x_j^k) (δ_il - δ_jl)`.
///
/// Exact ties give a zero entry. Requires `p > 1`; for `p = 1` use
/// [`jacobian_signs_p1`].
pub fn jacobian_f(config: &Configuration) -> Result<JacobianMatrix> {
    config.p().require_smooth()?;
    let p = config.p().get();
    let (n, dim) = (config.n(), config.dim());
    let mut jac = JacobianMatrix::zeros(n, dim);
    for (row, (i, j)) in pairs(n).enumerate() {
        for k in 0..dim {
            let v = p * signed_pow(config.coord(i, k) - config.coord(j, k), p - 1.0);
            jac.matrix[(row, i * dim + k)] = v;
            jac.matrix[(row, j * dim + k)] = -v;
        }
    }
    Ok(jac)
}

/// Sign matrix that replaces the derivative at `p = 1`:
/// `sgn(x_i^k - x_j^k) (δ_il - δ_jl)`. Only meaningful off the tie set.
pub fn jacobian_signs_p1(config: &Configuration) -> Result<JacobianMatrix> {
    config.require_tie_free()?;
    let (n, dim) = (config.n(), config.dim());
    let mut jac = JacobianMatrix::zeros(n, dim);
    for (row, (i, j)) in pairs(n).enumerate() {
        for k in 0..dim {
            let v = (config.coord(i, k) - config.coord(j, k)).signum();
            jac.matrix[(row, i * dim + k)] = v;
            jac.matrix[(row, j * dim + k)] = -v;
        }
    }
    Ok(jac)
}
