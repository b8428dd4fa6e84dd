//! Finite subsets of ℓ_p and their isometric embeddings.
//!
//! The crate covers the whole pipeline from rank tests on the
//! pairwise-distance map to isometric embeddings into norms that are
//! `(1+δ)`-equivalent to ℓ_p^N:
//!
//! * [`distance`], [`rank`], [`property_k`], [`triangular`], [`permutation`]:
//!   the exact-formula layer (maps `F`, `F̃`, their derivative, membership in
//!   `G`, Property K, the family `H`, the region `R`);
//! * [`realization`]: Gauss-Newton inversion of `F`, the perturbation map
//!   `Ψ` and dimension folding;
//! * [`embedding`]: norm oracles and the fixed-point embedding;
//! * [`experiments`]: seeded Monte Carlo campaigns and line probes;
//! * [`cli`]: the `lpembed` command-line front end.

// negated comparisons are how NaN inputs fail validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod distance;
pub mod embedding;
pub mod error;
pub mod experiments;
pub mod io;
pub mod permutation;
pub mod property_k;
pub mod rank;
pub mod realization;
pub mod sampling;
pub mod triangular;
pub mod types;

pub use distance::{eval_f, eval_f_tilde, jacobian_f, jacobian_signs_p1, JacobianMatrix};
pub use error::{Error, Result};
pub use permutation::{in_region_r, normalize_to_r, PermutationMap};
pub use property_k::{has_property_k, PropertyK, SearchStrategy};
pub use rank::{in_g, rank_test, RankReport, DEFAULT_RANK_TOLERANCE};
pub use triangular::{gram_schmidt_rotate, make_h_configuration};
pub use types::{
    pair_count, pair_index, pairs, Configuration, CoordinateSubset, MatrixKind, PExponent, UpperTriangularMatrix,
};
