//! Triangular configurations: the family `H` (`x_i = e_i + Σ_{j>i} x_i^j e_j`)
//! and the Gram-Schmidt rotation that brings any linearly independent
//! Euclidean configuration into triangular form.

use crate::error::{Error, Result};
use crate::types::{pair_count, pairs, Configuration};

/// Builds the member of `H` in `R^n` with the given strictly-upper
/// coefficients. `tails` lists `x_i^j` for `i < j` in lexicographic pair
/// order.
pub fn make_h_configuration(n: usize, tails: &[f64], p: f64) -> Result<Configuration> {
    if tails.len() != pair_count(n) {
        return Err(Error::InvalidConfiguration(format!(
            "expected {} tail coefficients for n = {n}, got {}",
            pair_count(n),
            tails.len()
        )));
    }
    let mut coords = vec![0.0; n * n];
    for i in 0..n {
        coords[i * n + i] = 1.0;
    }
    for ((i, j), &v) in pairs(n).zip(tails) {
        coords[i * n + j] = v;
    }
    Configuration::from_flat(p, n, n, coords)
}

/// Relative size below which a Gram-Schmidt residual counts as zero.
const DEPENDENCE_TOLERANCE: f64 = 1e-10;

/// Applies an orthogonal map `Θ` with `Θ x_i ∈ span{e_1, …, e_i}` and a
/// positive `i`-th coordinate. Euclidean only.
///
/// Classical Gram-Schmidt with one re-orthogonalization pass. The output has
/// the same ambient dimension as the input.
pub fn gram_schmidt_rotate(config: &Configuration) -> Result<Configuration> {
    if config.p().get() != 2.0 {
        return Err(Error::InvalidExponent(config.p().get()));
    }
    let (n, dim) = (config.n(), config.dim());
    if dim < n {
        return Err(Error::LinearDependence { index: dim });
    }
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut out = vec![0.0; n * dim];
    for (i, x) in config.points().enumerate() {
        let norm_x = dot(x, x).sqrt();
        let mut v = x.to_vec();
        let mut r = vec![0.0; i];
        for _pass in 0..2 {
            let proj: Vec<f64> = basis.iter().map(|q| dot(q, &v)).collect();
            for (q, c) in basis.iter().zip(&proj) {
                axpy(-c, q, &mut v);
            }
            for (acc, c) in r.iter_mut().zip(proj) {
                *acc += c;
            }
        }
        let diag = dot(&v, &v).sqrt();
        if norm_x == 0.0 || diag <= DEPENDENCE_TOLERANCE * norm_x {
            return Err(Error::LinearDependence { index: i });
        }
        v.iter_mut().for_each(|c| *c /= diag);
        basis.push(v);
        out[i * dim..i * dim + i].copy_from_slice(&r);
        out[i * dim + i] = diag;
    }
    Ok(config.with_flat(out))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
