//! Seeded Monte Carlo campaigns and determinant probes along segments.
//!
//! Every trial draws from its own substream `(seed, trial)`, and results are
//! collected in trial order, so reports are a pure function of the
//! parameters whatever the number of worker threads.

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::distance::eval_f_tilde;
use crate::embedding::{embed_into_norm_with, EmbedOptions, NormOracle, EPSILON_CAP_FACTOR};
use crate::error::{Error, Result};
use crate::property_k::{has_property_k, SearchStrategy};
use crate::rank::in_g;
use crate::realization::{estimate_perturbation_radius, realize_perturbation, reduce_dimension, SolveOptions};
use crate::sampling::{random_configuration, random_h_configuration, simplex, substream, Distribution};
use crate::types::{pair_count, pairs, Configuration, MatrixKind, PExponent, UpperTriangularMatrix};

/// Runs `f` on a pool of `jobs` threads; `0` means one per core.
fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidOptions(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        Err(Error::InvalidOptions("trials must be at least 1".into()))
    } else {
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SampleCampaign {
    pub n: usize,
    #[serde(rename = "N")]
    pub dim: usize,
    pub p: f64,
    pub trials: usize,
    pub seed: u64,
    pub distribution: Distribution,
}

impl SampleCampaign {
    pub fn new(n: usize, dim: usize, p: f64, trials: usize, seed: u64, distribution: Distribution) -> Result<Self> {
        PExponent::new(p)?;
        check_trials(trials)?;
        if n < 2 || dim < 1 {
            return Err(Error::InvalidOptions(format!("need n >= 2 and N >= 1, got n = {n}, N = {dim}")));
        }
        Ok(SampleCampaign { n, dim, p, trials, seed, distribution })
    }

    pub fn draw(&self, trial: usize) -> Configuration {
        let mut rng = substream(self.seed, trial as u64);
        random_configuration(&mut rng, self.n, self.dim, self.p, self.distribution)
            .expect("campaign parameters were validated")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityReport {
    pub campaign: SampleCampaign,
    pub tolerance: f64,
    pub in_g_count: usize,
    /// Trials whose Jacobian was rank deficient.
    pub failures: Vec<usize>,
    /// `σ_min / σ_max` over the retained singular values, per trial.
    pub smallest_retained_ratios: Vec<f64>,
}

impl DensityReport {
    /// Counts of `log10(σ_min / σ_max)` in unit-width bins, as CSV.
    pub fn histogram_csv(&self) -> String {
        let mut bins = std::collections::BTreeMap::<i32, usize>::new();
        for r in &self.smallest_retained_ratios {
            *bins.entry(r.log10().floor() as i32).or_default() += 1;
        }
        let mut out = String::from("log10_lower,log10_upper,count\n");
        for (b, c) in bins {
            out.push_str(&format!("{},{},{}\n", b, b + 1, c));
        }
        out
    }
}

/// Rank test on `trials` draws with `N = n`.
pub fn sample_g_density(campaign: &SampleCampaign, tolerance: f64, jobs: usize) -> Result<DensityReport> {
    if campaign.dim != campaign.n {
        return Err(Error::InvalidOptions(format!(
            "density sampling needs N = n, got n = {}, N = {}",
            campaign.n, campaign.dim
        )));
    }
    PExponent::new(campaign.p)?.require_smooth()?;
    let reports = with_jobs(jobs, || {
        (0..campaign.trials).into_par_iter().map(|t| in_g(&campaign.draw(t), tolerance)).collect::<Result<Vec<_>>>()
    })??;
    let failures = reports.iter().enumerate().filter(|(_, r)| !r.full_rank).map(|(t, _)| t).collect();
    Ok(DensityReport {
        campaign: *campaign,
        tolerance,
        in_g_count: reports.iter().filter(|r| r.full_rank).count(),
        failures,
        smallest_retained_ratios: reports.iter().map(|r| r.smallest_retained_ratio()).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurveyRow {
    pub n: usize,
    #[serde(rename = "N")]
    pub dim: usize,
    pub p: f64,
    pub trials: usize,
    pub hits: usize,
    pub frequency: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurveyTable {
    pub rows: Vec<SurveyRow>,
}

impl SurveyTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,N,p,trials,frequency\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{},{}\n", r.n, r.dim, r.p, r.trials, r.frequency));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurveySpec {
    pub n_values: Vec<usize>,
    #[serde(rename = "N_values")]
    pub dim_values: Vec<usize>,
    pub p_values: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub strategy: SearchStrategy,
    pub tolerance: f64,
}

/// Frequency of Property K over Gaussian draws for every `(n, N, p)` cell
/// with `N ≥ n`. Cells are numbered in loop order and cell `c` draws trial
/// `t` from stream `(c << 32) | t`.
pub fn property_k_survey(spec: &SurveySpec, jobs: usize) -> Result<SurveyTable> {
    let SurveySpec { trials, seed, strategy, tolerance, .. } = *spec;
    check_trials(trials)?;
    let mut cells = Vec::new();
    for &n in &spec.n_values {
        for &dim in &spec.dim_values {
            for &p in &spec.p_values {
                PExponent::new(p)?.require_smooth()?;
                if n >= 2 && dim >= n {
                    cells.push((n, dim, p));
                }
            }
        }
    }
    let rows = with_jobs(jobs, || {
        cells
            .par_iter()
            .enumerate()
            .map(|(c, &(n, dim, p))| {
                let mut hits = 0;
                for t in 0..trials {
                    let mut rng = substream(seed, ((c as u64) << 32) | t as u64);
                    let x = random_configuration(&mut rng, n, dim, p, Distribution::StandardGaussian)?;
                    hits += has_property_k(&x, strategy, tolerance)?.holds as usize;
                }
                Ok(SurveyRow { n, dim, p, trials, hits, frequency: hits as f64 / trials as f64 })
            })
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(SurveyTable { rows })
}

/// Per-trial outcome of a solver campaign.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub converged: bool,
    pub iterations: usize,
    pub residual: f64,
    /// Campaign-specific error measure; see each campaign.
    pub defect: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl TrialRecord {
    fn failed(trial: usize, e: Error) -> Self {
        TrialRecord {
            trial,
            converged: false,
            iterations: 0,
            residual: f64::NAN,
            defect: f64::NAN,
            passed: false,
            error: Some(e.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CampaignReport<P> {
    pub params: P,
    pub trials: usize,
    pub passed: usize,
    pub records: Vec<TrialRecord>,
}

impl<P> CampaignReport<P> {
    fn collect(params: P, records: Vec<TrialRecord>) -> Self {
        CampaignReport { params, trials: records.len(), passed: records.iter().filter(|r| r.passed).count(), records }
    }

    pub fn all_passed(&self) -> bool {
        self.passed == self.trials
    }

    pub fn max_iterations(&self) -> usize {
        self.records.iter().map(|r| r.iterations).max().unwrap_or(0)
    }

    pub fn max_residual(&self) -> f64 {
        self.records.iter().map(|r| r.residual).fold(0.0, f64::max)
    }

    pub fn max_defect(&self) -> f64 {
        self.records.iter().map(|r| r.defect).fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InversionParams {
    pub n: usize,
    pub p: f64,
    pub trials: usize,
    pub seed: u64,
    /// Tails of the `H` bases are uniform in `(-tail_amplitude, tail_amplitude)`.
    pub tail_amplitude: f64,
    /// Raw distances move by uniform draws in `(-perturbation, perturbation)`.
    pub perturbation: f64,
    pub solve: SolveOptions,
}

/// Realizes random small perturbations of the raw distances of random `H`
/// bases. `defect` is the largest raw-distance error of the result.
pub fn local_inversion_campaign(params: &InversionParams, jobs: usize) -> Result<CampaignReport<InversionParams>> {
    check_trials(params.trials)?;
    params.solve.validate()?;
    let run = |t: usize| -> Result<TrialRecord> {
        let mut rng = substream(params.seed, t as u64);
        let base = random_h_configuration(&mut rng, params.n, params.p, params.tail_amplitude)?;
        let entries: Vec<f64> = eval_f_tilde(&base)
            .entries()
            .iter()
            .map(|d| d + rng.random_range(-params.perturbation..params.perturbation))
            .collect();
        let target = UpperTriangularMatrix::new(params.n, MatrixKind::Raw, entries)?;
        let r = realize_perturbation(&base, &target, None, &params.solve)?;
        let defect = eval_f_tilde(&r.configuration).max_abs_diff(&target);
        let passed = r.converged
            && r.iterations_used <= params.solve.max_iterations
            && r.residual_inf_norm <= params.solve.residual_tolerance;
        Ok(TrialRecord {
            trial: t,
            converged: r.converged,
            iterations: r.iterations_used,
            residual: r.residual_inf_norm,
            defect,
            passed,
            error: None,
        })
    };
    let records = with_jobs(jobs, || {
        (0..params.trials).into_par_iter().map(|t| run(t).unwrap_or_else(|e| TrialRecord::failed(t, e))).collect()
    })?;
    Ok(CampaignReport::collect(*params, records))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FoldingParams {
    pub n: usize,
    #[serde(rename = "N")]
    pub dim: usize,
    pub p: f64,
    pub trials: usize,
    pub seed: u64,
    /// Amplitude of the `H` tails in the first `n` coordinates.
    pub head_amplitude: f64,
    /// Coordinates `n..N` are uniform in `(-tail_amplitude, tail_amplitude)`.
    pub tail_amplitude: f64,
    pub solve: SolveOptions,
}

/// `n` points in `R^N` whose first `n` coordinates form an `H` member.
pub fn folding_instance(params: &FoldingParams, trial: usize) -> Result<Configuration> {
    let (n, dim) = (params.n, params.dim);
    let mut rng = substream(params.seed, trial as u64);
    let head = random_h_configuration(&mut rng, n, params.p, params.head_amplitude)?;
    let coords = (0..n)
        .flat_map(|i| {
            let mut row = head.point(i).to_vec();
            row.extend((n..dim).map(|_| rng.random_range(-params.tail_amplitude..params.tail_amplitude)));
            row
        })
        .collect();
    Configuration::from_flat(params.p, n, dim, coords)
}

/// Folds configurations from [`folding_instance`]. A trial passes when the
/// output keeps every distance to relative `1e-9` (`defect`) and still has
/// Property K; `iterations` records the output dimension.
pub fn folding_campaign(params: &FoldingParams, jobs: usize) -> Result<CampaignReport<FoldingParams>> {
    check_trials(params.trials)?;
    params.solve.validate()?;
    if params.dim < params.n {
        return Err(Error::InvalidOptions("folding needs N >= n".into()));
    }
    let run = |t: usize| -> Result<TrialRecord> {
        let x = folding_instance(params, t)?;
        let folded = reduce_dimension(&x, None, &params.solve)?;
        let y = &folded.configuration;
        let defect = pairs(params.n)
            .map(|(i, j)| {
                let (a, b) = (x.distance(i, j), y.distance(i, j));
                (a - b).abs() / a.max(b)
            })
            .fold(0.0, f64::max);
        let k = has_property_k(y, SearchStrategy::Exhaustive, crate::rank::DEFAULT_RANK_TOLERANCE)?;
        Ok(TrialRecord {
            trial: t,
            converged: folded.head.converged,
            iterations: y.dim(),
            residual: folded.head.residual_inf_norm,
            defect,
            passed: defect <= crate::realization::ISOMETRY_RELATIVE_TOLERANCE && k.holds,
            error: None,
        })
    };
    let records = with_jobs(jobs, || {
        (0..params.trials).into_par_iter().map(|t| run(t).unwrap_or_else(|e| TrialRecord::failed(t, e))).collect()
    })?;
    Ok(CampaignReport::collect(*params, records))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleFamily {
    WeightedP,
    LinearDistortion,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EmbeddingParams {
    /// The base is the `n`-point simplex in `R^n`.
    pub n: usize,
    pub p: f64,
    pub delta: f64,
    pub family: OracleFamily,
    pub trials: usize,
    pub seed: u64,
    pub max_outer: usize,
    pub solve: SolveOptions,
}

/// Embeds the simplex into `trials` seeded random oracles. `defect` is the
/// isometry defect in the oracle norm and `iterations` the number of
/// fixed-point steps. A trial passes when the fixed-point residual is within
/// tolerance, the defect is at most `1e-8` and `φ` stayed within its bounds
/// to `1e-8` at every evaluation.
pub fn embedding_campaign(params: &EmbeddingParams, jobs: usize) -> Result<CampaignReport<EmbeddingParams>> {
    check_trials(params.trials)?;
    params.solve.validate()?;
    let x = simplex(params.n, params.n, params.p)?;
    let cap = EPSILON_CAP_FACTOR * estimate_perturbation_radius(&x, 20, params.seed, &params.solve)?;
    let opts =
        EmbedOptions { solve: params.solve, max_outer: params.max_outer, epsilon_cap: Some(cap), ..Default::default() };
    let run = |t: usize| -> Result<TrialRecord> {
        let oracle_seed = substream(params.seed, t as u64).random::<u64>();
        let oracle = match params.family {
            OracleFamily::WeightedP => NormOracle::random_weighted(params.n, params.p, params.delta, oracle_seed)?,
            OracleFamily::LinearDistortion => {
                NormOracle::random_linear_distortion(params.n, params.p, params.delta, oracle_seed)?
            }
        };
        let r = embed_into_norm_with(&x, &oracle, &opts)?;
        Ok(TrialRecord {
            trial: t,
            converged: r.converged,
            iterations: r.state.iterations,
            residual: r.state.residual,
            defect: r.max_isometry_defect,
            passed: r.converged && r.max_phi_bound_violation <= crate::embedding::DEFECT_TOLERANCE,
            error: None,
        })
    };
    let records = with_jobs(jobs, || {
        (0..params.trials).into_par_iter().map(|t| run(t).unwrap_or_else(|e| TrialRecord::failed(t, e))).collect()
    })?;
    Ok(CampaignReport::collect(*params, records))
}

/// Default number of grid intervals for [`line_probe_determinant`].
pub const DEFAULT_PROBE_SAMPLES: usize = 10_000;

/// `|g(0)|` divided by the product of row norms must exceed this.
const PROBE_DEGENERACY_RATIO: f64 = 1e-12;

/// Grid values with `|g| ≤ PLATEAU_RELATIVE · max |g|` count as near zero.
pub const PLATEAU_RELATIVE: f64 = 1e-10;

/// Widest run of near-zero grid values accepted as an isolated zero.
pub const MAX_PLATEAU_POINTS: usize = 2;

const BISECTION_WIDTH: f64 = 1e-12;

/// A segment `(1-t) a + t b`, `t ∈ [0, 1]`, between two configurations of
/// `n` points in `R^n` with the same coordinate-order pattern.
#[derive(Clone, Debug, PartialEq)]
pub struct LineProbe {
    endpoint_a: Configuration,
    endpoint_b: Configuration,
    samples: usize,
}

impl LineProbe {
    pub fn new(endpoint_a: Configuration, endpoint_b: Configuration, samples: usize) -> Result<Self> {
        let (n, dim) = (endpoint_a.n(), endpoint_a.dim());
        if dim != n || endpoint_b.n() != n || endpoint_b.dim() != dim {
            return Err(Error::Dimension(format!(
                "both endpoints must be {n} points in R^{n}; got R^{dim} and {} points in R^{}",
                endpoint_b.n(),
                endpoint_b.dim()
            )));
        }
        if endpoint_a.p() != endpoint_b.p() {
            return Err(Error::InvalidConfiguration("endpoints have different exponents".into()));
        }
        endpoint_a.p().require_smooth()?;
        if samples < 1 {
            return Err(Error::InvalidOptions("samples must be at least 1".into()));
        }
        let (pa, pb) = (endpoint_a.order_pattern(), endpoint_b.order_pattern());
        if let Some(idx) = pa.iter().zip(&pb).position(|(a, b)| a != b) {
            let (i, j) = pairs(n).nth(idx / dim).expect("pattern index in range");
            return Err(Error::ComponentMismatch { i, j, k: idx % dim });
        }
        Ok(LineProbe { endpoint_a, endpoint_b, samples })
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn point_at(&self, t: f64) -> Vec<f64> {
        self.endpoint_a.as_flat().iter().zip(self.endpoint_b.as_flat()).map(|(a, b)| (1.0 - t) * a + t * b).collect()
    }

    /// `g(t)`.
    pub fn g(&self, t: f64) -> f64 {
        square_partials(&self.point_at(t), self.endpoint_a.n(), self.endpoint_a.p().get()).determinant()
    }
}

/// Square matrix of partials of `F` at the flat configuration `z`: row
/// `(i, j)` and column `(k, l)` run over pairs in lexicographic order, the
/// column being the derivative along coordinate `k` of point `l`.
pub fn square_partials(z: &[f64], n: usize, p: f64) -> DMatrix<f64> {
    let m = pair_count(n);
    let mut out = DMatrix::zeros(m, m);
    for (row, (i, j)) in pairs(n).enumerate() {
        for (col, (k, l)) in pairs(n).enumerate() {
            let sel = (i == l) as i32 - (j == l) as i32;
            if sel == 0 {
                continue;
            }
            let d = z[i * n + k] - z[j * n + k];
            let s = if d > 0.0 {
                1.0
            } else if d < 0.0 {
                -1.0
            } else {
                0.0
            };
            out[(row, col)] = p * d.abs().powf(p - 1.0) * s * sel as f64;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LineProbeResult {
    pub zero_bracket_count: usize,
    pub refined_zeros: Vec<f64>,
    /// `(t, g(t))` on the grid `t = s / samples`.
    pub grid: Vec<(f64, f64)>,
    /// Longest run of grid values with `|g| ≤ PLATEAU_RELATIVE · max |g|`.
    pub widest_plateau: usize,
    pub zeros_isolated: bool,
}

impl LineProbeResult {
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("t,g\n");
        for (t, g) in &self.grid {
            out.push_str(&format!("{t},{g:e}\n"));
        }
        out
    }
}

/// Tabulates `g` on the grid, brackets its sign changes and bisects each to
/// width `1e-12`.
pub fn line_probe_determinant(probe: &LineProbe) -> Result<LineProbeResult> {
    let n = probe.endpoint_a.n();
    let p = probe.endpoint_a.p().get();
    let x0 = square_partials(probe.endpoint_a.as_flat(), n, p);
    let row_norms: f64 = x0.row_iter().map(|r| r.norm()).product();
    let g0 = x0.determinant();
    if !(row_norms > 0.0) || g0.abs() <= PROBE_DEGENERACY_RATIO * row_norms {
        return Err(Error::DegenerateProbe(format!(
            "g(0) = {g0:e} is numerically zero; the partials at the first endpoint are dependent"
        )));
    }

    let samples = probe.samples;
    let grid: Vec<(f64, f64)> = (0..=samples)
        .map(|s| {
            let t = s as f64 / samples as f64;
            (t, probe.g(t))
        })
        .collect();
    if let Some((t, _)) = grid.iter().find(|(_, g)| !g.is_finite()) {
        return Err(Error::DegenerateProbe(format!("g({t}) is not finite")));
    }

    let scale = grid.iter().fold(0.0f64, |m, (_, g)| m.max(g.abs()));
    let mut widest = 0;
    let mut run = 0;
    for (_, g) in &grid {
        if g.abs() <= PLATEAU_RELATIVE * scale {
            run += 1;
            widest = widest.max(run);
        } else {
            run = 0;
        }
    }

    let mut zeros = Vec::new();
    for w in grid.windows(2) {
        let ((mut lo, glo), (mut hi, ghi)) = (w[0], w[1]);
        if glo == 0.0 {
            // counted as the right end of the previous interval, or t = 0
            continue;
        }
        if ghi == 0.0 {
            zeros.push(hi);
            continue;
        }
        if glo.signum() == ghi.signum() {
            continue;
        }
        let sign_lo = glo.signum();
        while hi - lo > BISECTION_WIDTH {
            let mid = 0.5 * (lo + hi);
            let gm = probe.g(mid);
            if gm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if gm.signum() == sign_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        zeros.push(if probe.g(lo).abs() <= probe.g(hi).abs() { lo } else { hi });
    }

    Ok(LineProbeResult {
        zero_bracket_count: zeros.len(),
        refined_zeros: zeros,
        grid,
        widest_plateau: widest,
        zeros_isolated: widest <= MAX_PLATEAU_POINTS,
    })
}
