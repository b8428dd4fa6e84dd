//! Isometric embeddings of a finite ℓ_p configuration into a norm that is
//! `(1+δ)`-equivalent to ℓ_p^N.
//!
//! A [`NormOracle`] is normalized so that `‖y‖_E ≤ ‖y‖_p ≤ (1+δ) ‖y‖_E`.
//! For a perturbation vector `ρ ∈ [0, ε]^{C(n,2)}` the configuration
//! `Ψ(d + ρ)` realizes the stretched ℓ_p distances `d_ij + ρ_ij`, and
//!
//! ```text
//! φ(ρ)_ij = d_ij + ρ_ij - ‖Ψ(d + ρ)_i - Ψ(d + ρ)_j‖_E
//! ```
//!
//! lies in `[0, δ/(1+δ) (d_ij + ρ_ij)]`. A fixed point `ρ* = φ(ρ*)` gives
//! points whose `E`-distances are exactly `d`. [`embed_into_norm`] looks for
//! one by damped iteration with a Broyden fallback.

use log::debug;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::distance::eval_f_tilde;
use crate::error::{Error, Result};
use crate::io::parse_json;
use crate::property_k::{has_property_k, SearchStrategy};
use crate::rank::DEFAULT_RANK_TOLERANCE;
use crate::realization::{estimate_perturbation_radius, realize_perturbation, SolveOptions};
use crate::sampling::substream;
use crate::types::{pairs, Configuration, CoordinateSubset, MatrixKind, PExponent, UpperTriangularMatrix};

/// Directions sampled when certifying or checking a norm comparison.
pub const SANDWICH_SAMPLES: usize = 10_000;

/// Largest tolerated isometry defect of an accepted embedding.
pub const DEFECT_TOLERANCE: f64 = 1e-8;

/// Relative slack allowed in sampled comparisons, for rounding only.
const COMPARISON_SLACK: f64 = 1e-12;

/// Safety factor applied to the sampled distortion of a linear map.
const DISTORTION_SAFETY: f64 = 2.0;

#[derive(Clone, Debug, PartialEq)]
pub enum NormKind {
    LpExact,
    /// `‖y‖_E = ‖T y‖_p`, with `T` already rescaled.
    LinearDistortion {
        matrix: DMatrix<f64>,
    },
    /// `‖y‖_E = (Σ w_k |y_k|^p)^{1/p}`, `w_k ∈ [(1+δ)^{-p}, 1]`.
    WeightedP {
        weights: Vec<f64>,
    },
}

impl NormKind {
    pub fn name(&self) -> &'static str {
        match self {
            NormKind::LpExact => "lp_exact",
            NormKind::LinearDistortion { .. } => "linear_distortion",
            NormKind::WeightedP { .. } => "weighted_p",
        }
    }
}

/// A norm on `R^N` with a certified comparison to the ℓ_p norm.
#[derive(Clone, Debug, PartialEq)]
pub struct NormOracle {
    dim: usize,
    p: PExponent,
    delta: f64,
    kind: NormKind,
}

impl NormOracle {
    pub fn lp_exact(dim: usize, p: f64) -> Result<Self> {
        Self::check_dim(dim)?;
        Ok(NormOracle { dim, p: PExponent::new(p)?, delta: 0.0, kind: NormKind::LpExact })
    }

    pub fn weighted(p: f64, delta: f64, weights: Vec<f64>) -> Result<Self> {
        let p = PExponent::new(p)?;
        Self::check_delta(delta)?;
        Self::check_dim(weights.len())?;
        let lower = (1.0 + delta).powf(-p.get());
        // allow the lower end to be hit after rounding of (1+δ)^{-p}
        if let Some(w) = weights.iter().find(|w| !(**w >= lower * (1.0 - 1e-15) && **w <= 1.0)) {
            return Err(Error::InvalidOracle(format!("weight {w} outside [{lower}, 1] for delta = {delta}")));
        }
        Ok(NormOracle { dim: weights.len(), p, delta, kind: NormKind::WeightedP { weights } })
    }

    /// Certifies `y ↦ ‖T y‖_p` by sampling and rescales it.
    ///
    /// With sampled ratios `‖Ty‖/‖y‖ ∈ [r_min, r_max]` and measured slack
    /// `s = r_max / r_min - 1`, the declared slack is `2 s` and the matrix
    /// is scaled by `1 / (r_max (1 + s/2))`, leaving a margin of about `s/2`
    /// on both sides of the comparison for unsampled directions.
    pub fn linear_distortion(p: f64, matrix: DMatrix<f64>, seed: u64) -> Result<Self> {
        let p = PExponent::new(p)?;
        let (r_min, r_max) = sampled_ratio_range(&matrix, p, SANDWICH_SAMPLES, seed)?;
        let measured = r_max / r_min - 1.0;
        let scale = 1.0 / (r_max * (1.0 + 0.5 * measured));
        Ok(NormOracle {
            dim: matrix.nrows(),
            p,
            delta: DISTORTION_SAFETY * measured,
            kind: NormKind::LinearDistortion { matrix: matrix * scale },
        })
    }

    /// `I + s G` for a seeded Gaussian `G`, with `s` chosen so the certified
    /// slack stays within `delta`; the oracle declares exactly `delta`.
    pub fn random_linear_distortion(dim: usize, p: f64, delta: f64, seed: u64) -> Result<Self> {
        Self::check_dim(dim)?;
        Self::check_delta(delta)?;
        if delta == 0.0 {
            return Self::lp_exact(dim, p)
                .map(|o| NormOracle { kind: NormKind::LinearDistortion { matrix: DMatrix::identity(dim, dim) }, ..o });
        }
        let mut rng = substream(seed, 0);
        let g = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        let build = |s: f64| Self::linear_distortion(p, DMatrix::identity(dim, dim) + &g * s, seed);
        let probe = 1e-3 * delta / g.norm().max(f64::MIN_POSITIVE);
        let probe_delta = build(probe)?.delta;
        let mut s = if probe_delta > 0.0 { probe * 0.9 * delta / probe_delta } else { probe };
        for _ in 0..60 {
            let o = build(s)?;
            if o.delta <= delta {
                return Ok(NormOracle { delta, ..o });
            }
            s *= 0.8;
        }
        Err(Error::InvalidOracle(format!("could not fit a linear distortion within delta = {delta}")))
    }

    pub fn random_weighted(dim: usize, p: f64, delta: f64, seed: u64) -> Result<Self> {
        Self::check_dim(dim)?;
        Self::check_delta(delta)?;
        let lower = (1.0 + delta).powf(-p);
        let mut rng = substream(seed, 0);
        let weights = (0..dim).map(|_| lower + (1.0 - lower) * rng.random::<f64>()).collect();
        Self::weighted(p, delta, weights)
    }

    fn check_dim(dim: usize) -> Result<()> {
        if dim == 0 {
            Err(Error::InvalidOracle("dimension must be at least 1".into()))
        } else {
            Ok(())
        }
    }

    fn check_delta(delta: f64) -> Result<()> {
        if delta.is_finite() && delta >= 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidOracle(format!("delta = {delta} must be finite and nonnegative")))
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn p(&self) -> PExponent {
        self.p
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn kind(&self) -> &NormKind {
        &self.kind
    }

    pub fn evaluate(&self, y: &[f64]) -> f64 {
        assert_eq!(y.len(), self.dim, "vector length does not match oracle dimension");
        match &self.kind {
            NormKind::LpExact => self.p.norm(y),
            NormKind::WeightedP { weights } => {
                let p = self.p.get();
                let s: f64 = weights.iter().zip(y).map(|(w, v)| w * v.abs().powf(p)).sum();
                s.powf(1.0 / p)
            }
            NormKind::LinearDistortion { matrix } => {
                let ty: Vec<f64> = (0..self.dim).map(|r| (0..self.dim).map(|c| matrix[(r, c)] * y[c]).sum()).collect();
                self.p.norm(&ty)
            }
        }
    }

    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        self.evaluate(&diff)
    }

    /// Pairwise `E`-distances of a configuration.
    pub fn distances(&self, config: &Configuration) -> UpperTriangularMatrix {
        let entries = pairs(config.n()).map(|(i, j)| self.distance(config.point(i), config.point(j))).collect();
        UpperTriangularMatrix::new(config.n(), MatrixKind::Raw, entries).expect("norms are nonnegative")
    }
}

fn random_direction<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        if v.iter().any(|c| *c != 0.0) {
            return v;
        }
    }
}

fn sampled_ratio_range(matrix: &DMatrix<f64>, p: PExponent, samples: usize, seed: u64) -> Result<(f64, f64)> {
    let dim = matrix.nrows();
    if dim == 0 || matrix.ncols() != dim {
        return Err(Error::InvalidOracle("distortion matrix must be square and nonempty".into()));
    }
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidOracle("distortion matrix has non-finite entries".into()));
    }
    let sv = matrix.clone().svd(false, false).singular_values;
    if sv.min() <= 1e-12 * sv.max() {
        return Err(Error::InvalidOracle("distortion matrix is singular".into()));
    }
    let mut rng = substream(seed, 1);
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for _ in 0..samples {
        let y = random_direction(&mut rng, dim);
        let ty = matrix * DVector::from_column_slice(&y);
        let r = p.norm(ty.as_slice()) / p.norm(&y);
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok((lo, hi))
}

/// Result of a sampled check of `‖y‖_E ≤ ‖y‖_p ≤ (1+δ)‖y‖_E`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SandwichReport {
    pub samples: usize,
    /// `max (‖y‖_E / ‖y‖_p - 1)`; should be `≤ 0`.
    pub upper_excess: f64,
    /// `max (‖y‖_p / ((1+δ)‖y‖_E) - 1)`; should be `≤ 0`.
    pub lower_excess: f64,
    pub holds: bool,
}

pub fn check_sandwich(oracle: &NormOracle, samples: usize, seed: u64) -> SandwichReport {
    let mut rng = substream(seed, 2);
    let mut upper = f64::NEG_INFINITY;
    let mut lower = f64::NEG_INFINITY;
    for _ in 0..samples {
        let y = random_direction(&mut rng, oracle.dim);
        let e = oracle.evaluate(&y);
        let l = oracle.p.norm(&y);
        upper = upper.max(e / l - 1.0);
        lower = lower.max(l / ((1.0 + oracle.delta) * e) - 1.0);
    }
    SandwichReport {
        samples,
        upper_excess: upper,
        lower_excess: lower,
        holds: upper <= COMPARISON_SLACK && lower <= COMPARISON_SLACK,
    }
}

/// Sampled spot check of absolute homogeneity and the triangle inequality.
pub fn spot_check_norm_axioms(oracle: &NormOracle, samples: usize, seed: u64) -> bool {
    let mut rng = substream(seed, 3);
    (0..samples).all(|_| {
        let y = random_direction(&mut rng, oracle.dim);
        let z = random_direction(&mut rng, oracle.dim);
        let a: f64 = rng.random_range(-5.0..5.0);
        let ay: Vec<f64> = y.iter().map(|v| a * v).collect();
        let yz: Vec<f64> = y.iter().zip(&z).map(|(u, v)| u + v).collect();
        let (ny, nz) = (oracle.evaluate(&y), oracle.evaluate(&z));
        let homogeneous = (oracle.evaluate(&ay) - a.abs() * ny).abs() <= 1e-12 * (1.0 + a.abs() * ny);
        let triangle = oracle.evaluate(&yz) <= (ny + nz) * (1.0 + COMPARISON_SLACK);
        homogeneous && triangle
    })
}

/// How to build a [`NormOracle`].
#[derive(Clone, Debug, PartialEq)]
pub enum OracleSpec {
    LpExact { dim: usize, p: f64 },
    WeightedP { p: f64, delta: f64, weights: Vec<f64> },
    RandomWeightedP { dim: usize, p: f64, delta: f64 },
    LinearDistortion { p: f64, matrix: DMatrix<f64> },
    RandomLinearDistortion { dim: usize, p: f64, delta: f64 },
}

pub fn make_norm_oracle(spec: OracleSpec, seed: u64) -> Result<NormOracle> {
    match spec {
        OracleSpec::LpExact { dim, p } => NormOracle::lp_exact(dim, p),
        OracleSpec::WeightedP { p, delta, weights } => NormOracle::weighted(p, delta, weights),
        OracleSpec::RandomWeightedP { dim, p, delta } => NormOracle::random_weighted(dim, p, delta, seed),
        OracleSpec::LinearDistortion { p, matrix } => NormOracle::linear_distortion(p, matrix, seed),
        OracleSpec::RandomLinearDistortion { dim, p, delta } => {
            NormOracle::random_linear_distortion(dim, p, delta, seed)
        }
    }
}

/// On-disk form of a norm oracle. Distortion matrices are stored already
/// rescaled.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleFile {
    pub kind: String,
    #[serde(rename = "N")]
    pub dim: usize,
    pub p: f64,
    pub delta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

/// Seed of the sampled comparison check run when loading a file.
const LOAD_CHECK_SEED: u64 = 0x5eed;

impl NormOracle {
    pub fn to_file(&self) -> OracleFile {
        let (matrix, weights) = match &self.kind {
            NormKind::LpExact => (None, None),
            NormKind::WeightedP { weights } => (None, Some(weights.clone())),
            NormKind::LinearDistortion { matrix } => {
                (Some(matrix.row_iter().map(|r| r.iter().copied().collect()).collect()), None)
            }
        };
        OracleFile { kind: self.kind.name().into(), dim: self.dim, p: self.p.get(), delta: self.delta, matrix, weights }
    }

    pub fn from_file(f: OracleFile) -> Result<Self> {
        let oracle = match f.kind.as_str() {
            "lp_exact" => {
                let o = NormOracle::lp_exact(f.dim, f.p)?;
                Self::check_delta(f.delta)?;
                NormOracle { delta: f.delta, ..o }
            }
            "weighted_p" => {
                let w = f.weights.ok_or_else(|| Error::InvalidOracle("weighted_p needs weights".into()))?;
                NormOracle::weighted(f.p, f.delta, w)?
            }
            "linear_distortion" => {
                let rows = f.matrix.ok_or_else(|| Error::InvalidOracle("linear_distortion needs matrix".into()))?;
                if rows.len() != f.dim || rows.iter().any(|r| r.len() != f.dim) {
                    return Err(Error::InvalidOracle(format!("matrix must be {0}x{0}", f.dim)));
                }
                Self::check_delta(f.delta)?;
                let matrix = DMatrix::from_row_iterator(f.dim, f.dim, rows.into_iter().flatten());
                sampled_ratio_range(&matrix, PExponent::new(f.p)?, 1, LOAD_CHECK_SEED)?;
                NormOracle {
                    dim: f.dim,
                    p: PExponent::new(f.p)?,
                    delta: f.delta,
                    kind: NormKind::LinearDistortion { matrix },
                }
            }
            other => return Err(Error::InvalidOracle(format!("unknown kind {other:?}"))),
        };
        if oracle.dim != f.dim {
            return Err(Error::InvalidOracle(format!("N = {} but payload has {} entries", f.dim, oracle.dim)));
        }
        let check = check_sandwich(&oracle, SANDWICH_SAMPLES, LOAD_CHECK_SEED);
        if !check.holds {
            return Err(Error::InvalidOracle(format!(
                "declared comparison fails on sampled directions (upper excess {:e}, lower excess {:e})",
                check.upper_excess, check.lower_excess
            )));
        }
        Ok(oracle)
    }

    pub fn to_json(&self) -> String {
        crate::io::to_json(&self.to_file())
    }

    pub fn from_json(text: &str, origin: &str) -> Result<Self> {
        let file: OracleFile = parse_json(text, origin)?;
        Self::from_file(file).map_err(|e| Error::Parse { path: origin.into(), message: e.to_string() })
    }
}

/// Current iterate of the fixed-point search.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixedPointState {
    pub rho: Vec<f64>,
    pub epsilon_cap: f64,
    /// `‖ρ - φ(ρ)‖_∞`.
    pub residual: f64,
    pub iterations: usize,
}

/// One evaluation of `φ`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiEvaluation {
    pub phi: Vec<f64>,
    /// `Ψ(d + ρ)`.
    pub realized: Configuration,
    /// Largest amount by which `φ` leaves `[0, δ/(1+δ)(d + ρ)]`; zero when
    /// both bounds hold.
    pub bound_violation: f64,
}

struct PhiContext<'a> {
    x: &'a Configuration,
    oracle: &'a NormOracle,
    witness: CoordinateSubset,
    dist: Vec<f64>,
    inner: SolveOptions,
}

impl<'a> PhiContext<'a> {
    fn new(x: &'a Configuration, oracle: &'a NormOracle, opts: &SolveOptions) -> Result<Self> {
        opts.validate()?;
        x.p().require_smooth()?;
        if oracle.dim != x.dim() {
            return Err(Error::Dimension(format!(
                "oracle acts on R^{}, configuration lives in R^{}",
                oracle.dim,
                x.dim()
            )));
        }
        if oracle.p != x.p() {
            return Err(Error::InvalidOracle(format!(
                "oracle compares to p = {}, configuration has p = {}",
                oracle.p.get(),
                x.p().get()
            )));
        }
        let witness = has_property_k(x, SearchStrategy::Exhaustive, DEFAULT_RANK_TOLERANCE)?
            .witness
            .ok_or(Error::PropertyKFailed)?;
        let dist = eval_f_tilde(x).entries().to_vec();
        let max_pow = dist.iter().fold(1.0f64, |m, d| m.max(d.powf(x.p().get())));
        // Ψ has to be markedly more accurate than the fixed-point tolerance
        let inner_tol = (opts.residual_tolerance * 1e-3).max(1e-14 * max_pow);
        Ok(PhiContext { x, oracle, witness, dist, inner: opts.with_tolerance(inner_tol) })
    }

    fn eval(&self, rho: &[f64]) -> Result<PhiEvaluation> {
        let target: Vec<f64> = self.dist.iter().zip(rho).map(|(d, r)| d + r).collect();
        let target = UpperTriangularMatrix::new(self.x.n(), MatrixKind::Raw, target)?;
        let psi = realize_perturbation(self.x, &target, Some(&self.witness), &self.inner)?;
        if !psi.converged {
            return Err(Error::NonConvergence { iterations: psi.iterations_used, residual: psi.residual_inf_norm });
        }
        let y = psi.configuration;
        let delta = self.oracle.delta;
        let shrink = delta / (1.0 + delta);
        let mut violation = 0.0f64;
        let phi: Vec<f64> = pairs(self.x.n())
            .zip(target.entries())
            .map(|((i, j), t)| {
                let v = t - self.oracle.distance(y.point(i), y.point(j));
                violation = violation.max(-v).max(v - shrink * t);
                v
            })
            .collect();
        Ok(PhiEvaluation { phi, realized: y, bound_violation: violation })
    }
}

fn check_rho(rho: &[f64], cap: f64, pairs: usize) -> Result<()> {
    if rho.len() != pairs {
        return Err(Error::Dimension(format!("rho has {} entries, need {pairs}", rho.len())));
    }
    if !(cap >= 0.0) || !cap.is_finite() {
        return Err(Error::InvalidOptions(format!("epsilon cap {cap} must be finite and nonnegative")));
    }
    if rho.iter().any(|r| !(*r >= 0.0 && *r <= cap)) {
        return Err(Error::InvalidOptions(format!("rho must lie in [0, {cap}]")));
    }
    Ok(())
}

/// Evaluates `φ(ρ)` for `ρ ∈ [0, ε]^{C(n,2)}`.
pub fn phi_map(
    x: &Configuration,
    oracle: &NormOracle,
    rho: &[f64],
    epsilon_cap: f64,
    opts: &SolveOptions,
) -> Result<PhiEvaluation> {
    let ctx = PhiContext::new(x, oracle, opts)?;
    check_rho(rho, epsilon_cap, ctx.dist.len())?;
    ctx.eval(rho)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EmbedOptions {
    pub solve: SolveOptions,
    /// Budget of fixed-point steps, damped and fallback combined.
    pub max_outer: usize,
    /// Box size `ε` for `ρ`. When absent it is half of
    /// [`estimate_perturbation_radius`] with the two settings below.
    pub epsilon_cap: Option<f64>,
    pub radius_trials: usize,
    pub radius_seed: u64,
}

impl Default for EmbedOptions {
    fn default() -> Self {
        EmbedOptions {
            solve: SolveOptions::default(),
            max_outer: 200,
            epsilon_cap: None,
            radius_trials: 20,
            radius_seed: 0,
        }
    }
}

/// Safety factor applied to the estimated perturbation radius.
pub const EPSILON_CAP_FACTOR: f64 = 0.5;

/// Smallest damping tried before switching to the Broyden fallback.
const MIN_DAMPING: f64 = 1.0 / 64.0;

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingResult {
    pub source: Configuration,
    pub oracle: NormOracle,
    /// `y = Ψ(d + ρ*)`.
    pub points: Configuration,
    pub e_norm_distances: UpperTriangularMatrix,
    pub target_distances: UpperTriangularMatrix,
    pub max_isometry_defect: f64,
    pub state: FixedPointState,
    pub phi_evaluations: usize,
    /// Worst violation of the two `φ` bounds over every evaluation.
    pub max_phi_bound_violation: f64,
    pub used_fallback: bool,
    pub converged: bool,
}

/// Embeds `x` isometrically into the oracle norm with default settings and
/// the given step budget.
pub fn embed_into_norm(
    x: &Configuration,
    oracle: &NormOracle,
    opts: &SolveOptions,
    max_outer: usize,
) -> Result<EmbeddingResult> {
    embed_into_norm_with(x, oracle, &EmbedOptions { solve: *opts, max_outer, ..Default::default() })
}

pub fn embed_into_norm_with(x: &Configuration, oracle: &NormOracle, opts: &EmbedOptions) -> Result<EmbeddingResult> {
    let ctx = PhiContext::new(x, oracle, &opts.solve)?;
    let cap = match opts.epsilon_cap {
        Some(c) => c,
        None => {
            EPSILON_CAP_FACTOR * estimate_perturbation_radius(x, opts.radius_trials, opts.radius_seed, &opts.solve)?
        }
    };
    if !(cap >= 0.0) || !cap.is_finite() {
        return Err(Error::InvalidOptions(format!("epsilon cap {cap} must be finite and nonnegative")));
    }
    let delta = oracle.delta;
    let max_d = ctx.dist.iter().copied().fold(0.0, f64::max);
    let bound = delta / (1.0 + delta) * (max_d + cap);
    if bound > cap {
        return Err(Error::Capacity { bound, cap });
    }

    let tol = opts.solve.residual_tolerance;
    let m = ctx.dist.len();
    let inf_dist = |a: &[f64], b: &[f64]| a.iter().zip(b).fold(0.0f64, |s, (u, v)| s.max((u - v).abs()));
    let clamp = |v: f64| v.clamp(0.0, cap);

    let mut evaluations = 1;
    let mut rho = vec![0.0; m];
    let mut cur = ctx.eval(&rho)?;
    let mut worst_violation = cur.bound_violation;
    let mut residual = inf_dist(&rho, &cur.phi);
    let mut steps = 0;
    let mut lambda = 1.0;
    let mut stalled = false;

    while residual > tol && steps < opts.max_outer {
        steps += 1;
        let proposal: Vec<f64> =
            rho.iter().zip(&cur.phi).map(|(r, f)| clamp((1.0 - lambda) * r + lambda * f)).collect();
        let outcome = ctx.eval(&proposal);
        evaluations += 1;
        match outcome {
            Ok(ev) => {
                worst_violation = worst_violation.max(ev.bound_violation);
                let r = inf_dist(&proposal, &ev.phi);
                if r < residual {
                    rho = proposal;
                    cur = ev;
                    residual = r;
                    continue;
                }
            }
            Err(e) => debug!("phi evaluation failed during damped step: {e}"),
        }
        lambda *= 0.5;
        if lambda < MIN_DAMPING {
            stalled = true;
            break;
        }
    }

    if stalled && residual > tol {
        debug!("damped iteration stalled at residual {residual:e}; switching to Broyden");
        let mut h = DVector::from_iterator(m, rho.iter().zip(&cur.phi).map(|(r, f)| r - f));
        let mut jac = DMatrix::<f64>::identity(m, m);
        while residual > tol && steps < opts.max_outer {
            steps += 1;
            let Some(step) = jac.clone().lu().solve(&(-&h)) else { break };
            let next: Vec<f64> = rho.iter().zip(step.iter()).map(|(r, s)| clamp(r + s)).collect();
            let s = DVector::from_iterator(m, next.iter().zip(&rho).map(|(a, b)| a - b));
            let ss = s.dot(&s);
            if ss == 0.0 {
                break;
            }
            let ev = match ctx.eval(&next) {
                Ok(ev) => ev,
                Err(e) => {
                    debug!("phi evaluation failed during Broyden step: {e}");
                    break;
                }
            };
            evaluations += 1;
            worst_violation = worst_violation.max(ev.bound_violation);
            let h_next = DVector::from_iterator(m, next.iter().zip(&ev.phi).map(|(r, f)| r - f));
            let y = &h_next - &h;
            let correction = (&y - &jac * &s) * s.transpose() / ss;
            jac += correction;
            let r = h_next.amax();
            h = h_next;
            if r < residual {
                residual = r;
                rho = next;
                cur = ev;
            }
        }
    }

    let target = UpperTriangularMatrix::new(x.n(), MatrixKind::Raw, ctx.dist.clone())?;
    let e_dist = oracle.distances(&cur.realized);
    let defect = e_dist.max_abs_diff(&target);
    Ok(EmbeddingResult {
        source: x.clone(),
        oracle: oracle.clone(),
        points: cur.realized,
        e_norm_distances: e_dist,
        target_distances: target,
        max_isometry_defect: defect,
        state: FixedPointState { rho, epsilon_cap: cap, residual, iterations: steps },
        phi_evaluations: evaluations,
        max_phi_bound_violation: worst_violation,
        used_fallback: stalled,
        converged: residual <= tol && defect <= DEFECT_TOLERANCE,
    })
}

/// Recomputes both distance tables from the stored points and checks that
/// they agree to within `tolerance`.
pub fn verify_embedding(result: &EmbeddingResult, tolerance: f64) -> bool {
    let src = &result.source;
    let p = src.p().get();
    let pts = &result.points;
    if pts.n() != src.n() || pts.dim() != result.oracle.dim() {
        return false;
    }
    pairs(src.n()).all(|(i, j)| {
        let lp: f64 =
            src.point(i).iter().zip(src.point(j)).map(|(a, b)| (a - b).abs().powf(p)).sum::<f64>().powf(1.0 / p);
        let e = result.oracle.distance(pts.point(i), pts.point(j));
        (e - lp).abs() <= tolerance
    })
}
