//! Constructive local inversion of the pairwise-distance map.
//!
//! [`realize_distance_matrix`] is a Gauss-Newton solver for `F(y) = target`
//! started at a configuration in `G`; the minimum-norm steps keep the
//! solution close to the base, which makes it a computable local right
//! inverse of `F`. [`realize_perturbation`] builds on it to realize
//! perturbed raw distance matrices in higher dimension without touching the
//! coordinates outside a Property K witness, and [`reduce_dimension`] folds
//! a long configuration into as few coordinates as it can.

use log::{debug, trace};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::distance::{eval_f, eval_f_tilde, jacobian_f};
use crate::error::{Error, Result};
use crate::property_k::{has_property_k, SearchStrategy};
use crate::rank::{in_g, DEFAULT_RANK_TOLERANCE};
use crate::sampling::substream;
use crate::types::{pairs, Configuration, CoordinateSubset, MatrixKind, UpperTriangularMatrix};

/// Relative agreement of raw distances required from a folded configuration.
pub const ISOMETRY_RELATIVE_TOLERANCE: f64 = 1e-9;

/// Halvings tried per Gauss-Newton step before giving up on it.
const MAX_STEP_HALVINGS: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolveOptions {
    pub max_iterations: usize,
    /// Absolute tolerance on the p-th power entries.
    pub residual_tolerance: f64,
    /// Initial step length in `(0, 1]`; halved while the residual grows.
    pub step_damping: f64,
    /// Tikhonov term added to `J Jᵀ`; zero means the exact pseudo-inverse.
    pub regularization: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { max_iterations: 100, residual_tolerance: 1e-9, step_damping: 1.0, regularization: 0.0 }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations < 1 {
            return Err(Error::InvalidOptions("max_iterations must be at least 1".into()));
        }
        if !(self.residual_tolerance > 0.0) {
            return Err(Error::InvalidOptions("residual_tolerance must be positive".into()));
        }
        if !(self.step_damping > 0.0 && self.step_damping <= 1.0) {
            return Err(Error::InvalidOptions("step_damping must lie in (0, 1]".into()));
        }
        if !(self.regularization >= 0.0) || !self.regularization.is_finite() {
            return Err(Error::InvalidOptions("regularization must be nonnegative".into()));
        }
        Ok(())
    }

    pub fn with_tolerance(self, residual_tolerance: f64) -> Self {
        SolveOptions { residual_tolerance, ..self }
    }
}

/// One row of the convergence trace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RealizationResult {
    pub configuration: Configuration,
    /// `|F(configuration) - target|_∞` on p-th powers.
    pub residual_inf_norm: f64,
    pub iterations_used: usize,
    pub converged: bool,
    /// Coordinate-order flips seen between accepted iterates.
    pub tie_crossings: usize,
    pub trace: Vec<TracePoint>,
}

impl RealizationResult {
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("iteration,residual\n");
        for t in &self.trace {
            out.push_str(&format!("{},{:e}\n", t.iteration, t.residual));
        }
        out
    }
}

fn residual_vector(config: &Configuration, target: &[f64]) -> DVector<f64> {
    DVector::from_iterator(target.len(), pairs(config.n()).zip(target).map(|((i, j), t)| t - config.distance_pow(i, j)))
}

/// Minimum-norm solution of `J Δ = r`.
fn min_norm_step(jac: DMatrix<f64>, r: &DVector<f64>, regularization: f64) -> Option<DVector<f64>> {
    if regularization > 0.0 {
        let jt = jac.transpose();
        let mut gram = &jac * &jt;
        for d in 0..gram.nrows() {
            gram[(d, d)] += regularization;
        }
        let y = gram.cholesky()?.solve(r);
        Some(jt * y)
    } else {
        let svd = jac.svd(true, true);
        let smax = svd.singular_values.max();
        svd.solve(r, smax * 1e-13).ok()
    }
}

fn count_crossings(before: &[i8], after: &[i8]) -> usize {
    before.iter().zip(after).filter(|(a, b)| **a != 0 && **b != 0 && a != b).count()
}

/// Damped Gauss-Newton from `base` towards p-th power distances `target`.
/// No preconditions are checked here.
pub(crate) fn gauss_newton(base: &Configuration, target: &[f64], opts: &SolveOptions) -> RealizationResult {
    let mut x = base.clone();
    let mut r = residual_vector(&x, target);
    let mut res = r.amax();
    let mut trace = vec![TracePoint { iteration: 0, residual: res }];
    let mut iterations = 0;
    let mut crossings = 0;
    let mut pattern = x.order_pattern();

    while res > opts.residual_tolerance && iterations < opts.max_iterations {
        let jac = jacobian_f(&x).expect("exponent checked by caller").into_matrix();
        let Some(step) = min_norm_step(jac, &r, opts.regularization) else {
            debug!("linearized system could not be solved at iteration {iterations}");
            break;
        };
        let mut alpha = opts.step_damping;
        let mut accepted = None;
        for _ in 0..=MAX_STEP_HALVINGS {
            let coords: Vec<f64> = x.as_flat().iter().zip(step.iter()).map(|(c, s)| c + alpha * s).collect();
            if coords.iter().all(|c| c.is_finite()) {
                let cand = x.with_flat(coords);
                let cand_r = residual_vector(&cand, target);
                let cand_res = cand_r.amax();
                if cand_res < res {
                    accepted = Some((cand, cand_r, cand_res));
                    break;
                }
            }
            alpha *= 0.5;
        }
        let Some((cand, cand_r, cand_res)) = accepted else {
            debug!("no descent step after {MAX_STEP_HALVINGS} halvings, residual {res:e}");
            break;
        };
        let new_pattern = cand.order_pattern();
        let crossed = count_crossings(&pattern, &new_pattern);
        if crossed > 0 {
            debug!("iteration {}: {crossed} coordinate-order crossings", iterations + 1);
            crossings += crossed;
        }
        pattern = new_pattern;
        x = cand;
        r = cand_r;
        res = cand_res;
        iterations += 1;
        trace!("gauss-newton iteration {iterations}: residual {res:e}, step {alpha}");
        trace.push(TracePoint { iteration: iterations, residual: res });
    }

    RealizationResult {
        configuration: x,
        residual_inf_norm: res,
        iterations_used: iterations,
        converged: res <= opts.residual_tolerance,
        tie_crossings: crossings,
        trace,
    }
}

/// Finds `y` near `base` with `F(y) = target`.
///
/// Non-convergence is not an error: the target may simply lie outside the
/// neighbourhood where a local inverse exists. The best iterate is returned
/// with `converged == false`.
pub fn realize_distance_matrix(
    base: &Configuration,
    target: &UpperTriangularMatrix,
    opts: &SolveOptions,
) -> Result<RealizationResult> {
    opts.validate()?;
    base.p().require_smooth()?;
    if target.kind() != MatrixKind::PthPower {
        return Err(Error::InvalidTarget("expected a p-th power distance matrix".into()));
    }
    if target.n() != base.n() {
        return Err(Error::Dimension(format!("target has n = {}, base has {} points", target.n(), base.n())));
    }
    let base_f = eval_f(base);
    for (((i, j), t), b) in target.iter().zip(base_f.entries()) {
        if t == 0.0 && *b != 0.0 {
            return Err(Error::InvalidTarget(format!(
                "zero target for pair ({}, {}) whose base distance is nonzero",
                i + 1,
                j + 1
            )));
        }
    }
    let rank = in_g(base, DEFAULT_RANK_TOLERANCE)?;
    if !rank.full_rank {
        return Err(Error::NotInG { rank: rank.numeric_rank, required: rank.required_rank });
    }
    Ok(gauss_newton(base, target.entries(), opts))
}

fn resolve_witness(base: &Configuration, witness: Option<&CoordinateSubset>) -> Result<CoordinateSubset> {
    match witness {
        Some(w) => {
            if w.len() != base.n() {
                return Err(Error::Dimension(format!("witness has {} coordinates, need {}", w.len(), base.n())));
            }
            if !in_g(&base.project(w)?, DEFAULT_RANK_TOLERANCE)?.full_rank {
                return Err(Error::PropertyKFailed);
            }
            Ok(w.clone())
        }
        None => has_property_k(base, SearchStrategy::Exhaustive, DEFAULT_RANK_TOLERANCE)?
            .witness
            .ok_or(Error::PropertyKFailed),
    }
}

/// The map `Ψ`: realizes raw distances `raw_target` near `base` by moving
/// only the witness coordinates.
///
/// With `d_ij` the base distances and `Y_ij` the targets, the witness block
/// is solved for `F = F(P_M x) + (Y_ij^p - d_ij^p)`; all other coordinates
/// are copied from `base`, so the full p-th power distances come out as
/// `Y_ij^p`. The reported residual is on p-th powers of the full
/// configuration.
pub fn realize_perturbation(
    base: &Configuration,
    raw_target: &UpperTriangularMatrix,
    witness: Option<&CoordinateSubset>,
    opts: &SolveOptions,
) -> Result<RealizationResult> {
    opts.validate()?;
    base.p().require_smooth()?;
    if raw_target.kind() != MatrixKind::Raw {
        return Err(Error::InvalidTarget("expected a raw distance matrix".into()));
    }
    if raw_target.n() != base.n() {
        return Err(Error::Dimension(format!("target has n = {}, base has {} points", raw_target.n(), base.n())));
    }
    if let Some(((i, j), _)) = raw_target.iter().find(|(_, v)| *v <= 0.0) {
        return Err(Error::InvalidTarget(format!("raw distance for pair ({}, {}) must be positive", i + 1, j + 1)));
    }
    let witness = resolve_witness(base, witness)?;
    let p = base.p().get();
    let head = base.project(&witness)?;
    let full_f = eval_f(base);
    let target_pow: Vec<f64> = raw_target.entries().iter().map(|y| y.powf(p)).collect();

    let mut head_target = Vec::with_capacity(target_pow.len());
    for (((i, j), b), t) in pairs(base.n()).zip(full_f.entries()).zip(&target_pow) {
        let v = head.distance_pow(i, j) + (t - b);
        if !(v > 0.0) {
            return Err(Error::InvalidTarget(format!(
                "pair ({}, {}) would need a negative p-th power distance on the witness block",
                i + 1,
                j + 1
            )));
        }
        head_target.push(v);
    }
    let head_target = UpperTriangularMatrix::new(base.n(), MatrixKind::PthPower, head_target)?;
    let solved = realize_distance_matrix(&head, &head_target, opts)?;

    let mut coords = base.as_flat().to_vec();
    let dim = base.dim();
    for i in 0..base.n() {
        for (m, &k) in witness.indices().iter().enumerate() {
            coords[i * dim + k] = solved.configuration.coord(i, m);
        }
    }
    let configuration = base.with_flat(coords);
    let residual = residual_vector(&configuration, &target_pow).amax();
    Ok(RealizationResult {
        converged: solved.converged && residual <= opts.residual_tolerance,
        residual_inf_norm: residual,
        configuration,
        iterations_used: solved.iterations_used,
        tie_crossings: solved.tie_crossings,
        trace: solved.trace,
    })
}

/// Output of [`reduce_dimension`].
#[derive(Clone, Debug, PartialEq)]
pub struct FoldedConfiguration {
    /// Points in `R^N`; the first `n` coordinates are the solved witness block.
    pub configuration: Configuration,
    /// Input coordinate carried by each output coordinate `n..N`, and by the
    /// witness block for `0..n` (whose values were re-solved).
    pub source_coordinates: Vec<usize>,
    /// Worst relative disagreement of raw distances with the input.
    pub isometry_defect: f64,
    pub head: RealizationResult,
}

impl FoldedConfiguration {
    pub fn dim(&self) -> usize {
        self.configuration.dim()
    }
}

fn relative_distance_defect(a: &Configuration, b: &Configuration) -> f64 {
    eval_f_tilde(a)
        .entries()
        .iter()
        .zip(eval_f_tilde(b).entries())
        .map(|(x, y)| {
            let scale = x.abs().max(y.abs());
            if scale == 0.0 {
                0.0
            } else {
                (x - y).abs() / scale
            }
        })
        .fold(0.0, f64::max)
}

/// Isometric copy of `x` in as few coordinates as the solver manages.
///
/// Witness coordinates are moved to the front. For `N = n, n+1, …, d` the
/// contribution of coordinates `N..d` to each p-th power distance is folded
/// into the witness block; the first `N` that converges, stays isometric and
/// keeps a full-rank witness block wins.
pub fn reduce_dimension(
    x: &Configuration,
    witness: Option<&CoordinateSubset>,
    opts: &SolveOptions,
) -> Result<FoldedConfiguration> {
    opts.validate()?;
    x.p().require_smooth()?;
    let witness = resolve_witness(x, witness)?;
    let (n, d) = (x.n(), x.dim());
    let p = x.p().get();
    let order: Vec<usize> =
        witness.indices().iter().copied().chain((0..d).filter(|k| !witness.indices().contains(k))).collect();
    let xp = x.select_coordinates(&order)?;
    let head = xp.project(&CoordinateSubset::leading(n))?;
    let head_f = eval_f(&head);

    let mut best_residual = f64::INFINITY;
    for big_n in n..=d {
        let target: Vec<f64> = pairs(n)
            .zip(head_f.entries())
            .map(|((i, j), h)| {
                let tail: f64 = (big_n..d).map(|k| (xp.coord(i, k) - xp.coord(j, k)).abs().powf(p)).sum();
                h + tail
            })
            .collect();
        let target = UpperTriangularMatrix::new(n, MatrixKind::PthPower, target)?;
        let solved = realize_distance_matrix(&head, &target, opts)?;
        if !solved.converged {
            debug!("fold to N = {big_n}: no convergence (residual {:e})", solved.residual_inf_norm);
            best_residual = best_residual.min(solved.residual_inf_norm);
            continue;
        }
        if !in_g(&solved.configuration, DEFAULT_RANK_TOLERANCE)?.full_rank {
            debug!("fold to N = {big_n}: solved block left G");
            best_residual = best_residual.min(solved.residual_inf_norm);
            continue;
        }
        let coords: Vec<f64> = (0..n)
            .flat_map(|i| {
                solved
                    .configuration
                    .point(i)
                    .iter()
                    .copied()
                    .chain((n..big_n).map(|k| xp.coord(i, k)))
                    .collect::<Vec<_>>()
            })
            .collect();
        let folded = Configuration::from_flat(p, n, big_n, coords)?;
        let defect = relative_distance_defect(x, &folded);
        if defect > ISOMETRY_RELATIVE_TOLERANCE {
            debug!("fold to N = {big_n}: isometry defect {defect:e}");
            best_residual = best_residual.min(solved.residual_inf_norm);
            continue;
        }
        return Ok(FoldedConfiguration {
            configuration: folded,
            source_coordinates: order[..big_n].to_vec(),
            isometry_defect: defect,
            head: solved,
        });
    }
    Err(Error::FoldingFailure { best_residual })
}

/// Initial radius of the halving search, relative to the shortest distance.
const RADIUS_START_FRACTION: f64 = 0.5;
const RADIUS_MAX_HALVINGS: usize = 40;

/// Largest `ε` on a halving ladder such that `trials` seeded random
/// `ε`-perturbations of the raw distance matrix are all realized by
/// [`realize_perturbation`]. A certified lower bound, not the supremum.
///
/// Perturbation `t` uses the same unit draws at every `ε` (stream `t` of
/// `seed`), so asking for more trials can only shrink the answer.
pub fn estimate_perturbation_radius(
    base: &Configuration,
    trials: usize,
    seed: u64,
    opts: &SolveOptions,
) -> Result<f64> {
    use rand::Rng;

    opts.validate()?;
    base.p().require_smooth()?;
    if trials < 1 {
        return Err(Error::InvalidOptions("trials must be at least 1".into()));
    }
    let witness = resolve_witness(base, None)?;
    let dist = eval_f_tilde(base);
    let min_d = dist.entries().iter().copied().fold(f64::INFINITY, f64::min);
    if !(min_d > 0.0) {
        return Err(Error::InvalidConfiguration("base has coincident points".into()));
    }
    let draws: Vec<Vec<f64>> = (0..trials)
        .map(|t| {
            let mut rng = substream(seed, t as u64);
            dist.entries().iter().map(|_| rng.random_range(-1.0..1.0)).collect()
        })
        .collect();

    let all_pass = |eps: f64| -> bool {
        draws.iter().all(|unit| {
            let entries: Vec<f64> =
                dist.entries().iter().zip(unit).map(|(d, u)| (d + eps * u).max(f64::MIN_POSITIVE)).collect();
            let Ok(target) = UpperTriangularMatrix::new(base.n(), MatrixKind::Raw, entries) else {
                return false;
            };
            matches!(realize_perturbation(base, &target, Some(&witness), opts), Ok(r) if r.converged)
        })
    };

    let mut eps = RADIUS_START_FRACTION * min_d;
    for _ in 0..RADIUS_MAX_HALVINGS {
        if all_pass(eps) {
            return Ok(eps);
        }
        eps *= 0.5;
    }
    Ok(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::simplex;

    fn pth(n: usize, v: Vec<f64>) -> UpperTriangularMatrix {
        UpperTriangularMatrix::new(n, MatrixKind::PthPower, v).unwrap()
    }

    #[test]
    fn identity_target_takes_zero_iterations() {
        let base = simplex(3, 3, 2.0).unwrap();
        let r = realize_distance_matrix(&base, &eval_f(&base), &SolveOptions::default()).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations_used, 0);
        assert_eq!(r.configuration, base);
    }

    #[test]
    fn simplex_small_stretch() {
        let base = simplex(3, 3, 2.0).unwrap();
        let target = pth(3, vec![2.01, 2.0, 2.0]);
        let r = realize_distance_matrix(&base, &target, &SolveOptions::default()).unwrap();
        assert!(r.converged);
        assert!(r.residual_inf_norm <= 1e-9);
        // independent check of the result
        let c = &r.configuration;
        let d01: f64 = (0..3).map(|k| (c.coord(0, k) - c.coord(1, k)).powi(2)).sum();
        assert!((d01 - 2.01).abs() <= 1e-9);
        assert_eq!(r.trace.len(), r.iterations_used + 1);
        assert!(r.trace_csv().starts_with("iteration,residual\n0,"));
    }

    #[test]
    fn negative_target_cannot_be_built() {
        assert!(UpperTriangularMatrix::new(3, MatrixKind::PthPower, vec![-1.0, 2.0, 2.0]).is_err());
    }

    #[test]
    fn zero_target_only_for_coincident_pairs() {
        let base = simplex(3, 3, 2.0).unwrap();
        let err = realize_distance_matrix(&base, &pth(3, vec![0.0, 2.0, 2.0]), &SolveOptions::default());
        assert!(matches!(err, Err(Error::InvalidTarget(_))));
    }

    #[test]
    fn base_outside_g_is_rejected() {
        let base = Configuration::new(2.0, vec![vec![0.0, 0.0]; 3]).unwrap();
        let target = pth(3, vec![0.0, 0.0, 0.0]);
        assert!(matches!(realize_distance_matrix(&base, &target, &SolveOptions::default()), Err(Error::NotInG { .. })));
    }

    #[test]
    fn unreachable_target_reports_non_convergence() {
        // violates the triangle inequality by a wide margin
        let base = simplex(3, 3, 2.0).unwrap();
        let target = pth(3, vec![100.0, 1.0, 1.0]);
        let r = realize_distance_matrix(&base, &target, &SolveOptions::default()).unwrap();
        assert!(!r.converged);
        assert!(r.residual_inf_norm > 1.0);
    }

    #[test]
    fn options_validation() {
        let bad = [
            SolveOptions { max_iterations: 0, ..Default::default() },
            SolveOptions { residual_tolerance: 0.0, ..Default::default() },
            SolveOptions { step_damping: 1.5, ..Default::default() },
            SolveOptions { regularization: -1.0, ..Default::default() },
        ];
        for o in bad {
            assert!(o.validate().is_err());
        }
    }

    #[test]
    fn regularized_steps_also_converge() {
        let base = simplex(3, 3, 2.5).unwrap();
        let opts = SolveOptions { regularization: 1e-8, ..Default::default() };
        let target = pth(3, vec![2.02, 1.99, 2.0]);
        assert!(realize_distance_matrix(&base, &target, &opts).unwrap().converged);
    }

    #[test]
    fn unperturbed_raw_target_returns_base() {
        let base = Configuration::new(
            2.5,
            vec![vec![1.0, 0.2, -0.3, 0.7], vec![0.0, 1.0, 0.4, -1.2], vec![0.0, 0.0, 1.0, 0.5]],
        )
        .unwrap();
        let r = realize_perturbation(&base, &eval_f_tilde(&base), None, &SolveOptions::default()).unwrap();
        assert!(r.converged);
        assert_eq!(r.configuration, base);
    }

    #[test]
    fn perturbation_leaves_complementary_coordinates() {
        let pts = vec![vec![1.0, 0.0, 0.0, 0.3, -0.7], vec![0.0, 1.0, 0.0, 0.3, 0.2], vec![0.0, 0.0, 1.0, -0.4, 0.2]];
        let base = Configuration::new(2.0, pts).unwrap();
        let mut raw = eval_f_tilde(&base).entries().to_vec();
        raw[1] += 0.005;
        let target = UpperTriangularMatrix::new(3, MatrixKind::Raw, raw).unwrap();
        let r = realize_perturbation(&base, &target, None, &SolveOptions::default()).unwrap();
        assert!(r.converged);
        for i in 0..3 {
            assert_eq!(&r.configuration.point(i)[3..], &base.point(i)[3..]);
        }
        let got = eval_f_tilde(&r.configuration);
        assert!(got.max_abs_diff(&target) < 1e-9);
    }

    #[test]
    fn perturbation_needs_property_k() {
        let base = Configuration::new(2.0, vec![vec![1.0, 1.0, 1.0]; 3]).unwrap();
        let target = UpperTriangularMatrix::new(3, MatrixKind::Raw, vec![1.0; 3]).unwrap();
        assert!(matches!(
            realize_perturbation(&base, &target, None, &SolveOptions::default()),
            Err(Error::PropertyKFailed)
        ));
        let base = simplex(3, 3, 2.0).unwrap();
        let bad = UpperTriangularMatrix::new(3, MatrixKind::Raw, vec![0.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            realize_perturbation(&base, &bad, None, &SolveOptions::default()),
            Err(Error::InvalidTarget(_))
        ));
    }

    #[test]
    fn folding_square_input_is_identity() {
        let x = simplex(3, 3, 2.0).unwrap();
        let f = reduce_dimension(&x, None, &SolveOptions::default()).unwrap();
        assert_eq!(f.configuration, x);
        assert_eq!(f.dim(), 3);
    }

    #[test]
    fn common_tail_folds_immediately() {
        let tail = [0.3, -1.2, 0.8, 2.0, -0.1, 0.55, 0.9];
        let pts = (0..3)
            .map(|i| {
                let mut v = vec![0.0; 3];
                v[i] = 1.0;
                v.extend_from_slice(&tail);
                v
            })
            .collect();
        let x = Configuration::new(2.5, pts).unwrap();
        let f = reduce_dimension(&x, None, &SolveOptions::default()).unwrap();
        assert_eq!(f.dim(), 3);
        assert_eq!(f.configuration, simplex(3, 3, 2.5).unwrap());
        assert_eq!(f.isometry_defect, 0.0);
    }

    #[test]
    fn folding_moves_witness_first() {
        let pts =
            vec![vec![0.01, 0.02, 1.0, 0.3, 0.1], vec![0.00, -0.01, 0.0, 1.0, -0.4], vec![0.02, 0.01, 0.0, 0.0, 1.0]];
        let x = Configuration::new(2.0, pts).unwrap();
        let w = CoordinateSubset::new(vec![2, 3, 4]).unwrap();
        let f = reduce_dimension(&x, Some(&w), &SolveOptions::default()).unwrap();
        assert!(f.isometry_defect <= ISOMETRY_RELATIVE_TOLERANCE);
        assert_eq!(&f.source_coordinates[..3], &[2, 3, 4]);
    }

    #[test]
    fn radius_search_on_simplex() {
        let base = simplex(3, 3, 2.0).unwrap();
        let eps = estimate_perturbation_radius(&base, 5, 11, &SolveOptions::default()).unwrap();
        assert!(eps >= 1e-3, "{eps}");
    }

    #[test]
    fn radius_is_monotone_in_trials() {
        let base =
            Configuration::new(1.5, vec![vec![1.0, 0.4, -0.2], vec![0.0, 1.0, 0.6], vec![0.0, 0.0, 1.0]]).unwrap();
        let opts = SolveOptions::default();
        let few = estimate_perturbation_radius(&base, 10, 3, &opts).unwrap();
        let many = estimate_perturbation_radius(&base, 100, 3, &opts).unwrap();
        assert!(many <= few, "{many} > {few}");
        assert!(estimate_perturbation_radius(&base, 0, 3, &opts).is_err());
    }
}
