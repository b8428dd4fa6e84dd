//! The `lpembed` command-line front end.
//!
//! Every subcommand writes its outputs atomically and, where it emits a JSON
//! report, embeds the fully resolved arguments under `"params"` so the run
//! can be replayed. Exit codes: 0 success, 2 invalid input or precondition,
//! 3 solver gave up, 4 capacity bound violated, 1 I/O failure.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::distance::jacobian_f;
use crate::embedding::{check_sandwich, embed_into_norm_with, EmbedOptions, NormOracle, SANDWICH_SAMPLES};
use crate::error::{Error, Result};
use crate::experiments::{
    embedding_campaign, folding_campaign, line_probe_determinant, local_inversion_campaign, property_k_survey,
    sample_g_density, EmbeddingParams, FoldingParams, InversionParams, LineProbe, OracleFamily, SampleCampaign,
    SurveySpec, DEFAULT_PROBE_SAMPLES,
};
use crate::io::{configuration_to_json, read_configuration, read_matrix, to_json, write_atomic};
use crate::property_k::{has_property_k, SearchStrategy};
use crate::rank::{rank_test, DEFAULT_RANK_TOLERANCE};
use crate::realization::{realize_distance_matrix, realize_perturbation, reduce_dimension, SolveOptions};
use crate::sampling::{random_configuration, random_h_configuration, simplex, substream, Distribution};
use crate::types::{CoordinateSubset, MatrixKind};

#[derive(Debug, Parser)]
#[command(
    name = "lpembed",
    version,
    about = "Rank tests, realization and isometric embeddings of finite l_p configurations"
)]
pub struct Cli {
    /// Omit the timestamp so identical runs give byte-identical reports.
    #[arg(long, global = true)]
    pub deterministic: bool,
    /// Worker threads for campaigns; 0 uses one per core.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a configuration file.
    Gen(GenArgs),
    /// Search for a Property K witness.
    CheckK(CheckKArgs),
    /// Jacobian of the p-th power distance map and its rank.
    Jacobian(JacobianArgs),
    /// Realize a distance matrix near a base configuration.
    Realize(RealizeArgs),
    /// Fold a configuration into fewer coordinates.
    Fold(FoldArgs),
    /// Generate a norm oracle file.
    GenNorm(GenNormArgs),
    /// Embed a configuration isometrically into an oracle norm.
    Embed(EmbedArgs),
    /// Run a seeded Monte Carlo campaign.
    Survey(SurveyArgs),
    /// Tabulate the square-minor determinant along a segment.
    LineProbe(LineProbeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Gaussian,
    Uniform,
    /// Member of `H` with uniform tails of size `--amplitude`.
    H,
    Simplex,
}

#[derive(Debug, Args, Serialize)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    /// Ambient dimension; defaults to n.
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub dim: Option<usize>,
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Family::Gaussian)]
    pub family: Family,
    #[arg(long, default_value_t = 0.5)]
    pub amplitude: f64,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyArg {
    Exhaustive,
    Greedy,
}

impl From<StrategyArg> for SearchStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Exhaustive => SearchStrategy::Exhaustive,
            StrategyArg::Greedy => SearchStrategy::Greedy,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct CheckKArgs {
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = StrategyArg::Exhaustive)]
    pub strategy: StrategyArg,
    #[arg(long, default_value_t = DEFAULT_RANK_TOLERANCE)]
    pub tol: f64,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct JacobianArgs {
    pub input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_RANK_TOLERANCE)]
    pub tol: f64,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SolverArgs {
    /// Residual tolerance on p-th power distances.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long = "max-iter", default_value_t = 100)]
    pub max_iter: usize,
}

impl SolverArgs {
    fn options(&self) -> SolveOptions {
        SolveOptions { max_iterations: self.max_iter, residual_tolerance: self.tol, ..Default::default() }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct RealizeArgs {
    #[arg(long)]
    pub base: PathBuf,
    /// Distance matrix; `pth_power` targets are solved directly, `raw`
    /// targets go through the witness block.
    #[arg(long)]
    pub target: PathBuf,
    /// One-based witness coordinates, e.g. `1,2,3`.
    #[arg(long, value_delimiter = ',')]
    pub witness: Option<Vec<usize>>,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverArgs,
    #[arg(long, short)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Convergence trace as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct FoldArgs {
    pub input: PathBuf,
    #[arg(long, value_delimiter = ',')]
    pub witness: Option<Vec<usize>>,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverArgs,
    #[arg(long, short)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKindArg {
    LpExact,
    WeightedP,
    LinearDistortion,
}

#[derive(Debug, Args, Serialize)]
pub struct GenNormArgs {
    #[arg(long, value_enum)]
    pub kind: OracleKindArg,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub dim: usize,
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct EmbedArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub oracle: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverArgs,
    /// Budget of fixed-point steps.
    #[arg(long = "max-outer", default_value_t = 200)]
    pub max_outer: usize,
    /// Box size for the perturbation vector; estimated when absent.
    #[arg(long = "epsilon-cap")]
    pub epsilon_cap: Option<f64>,
    /// Trials of the perturbation-radius estimate.
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, short)]
    pub out: PathBuf,
    /// Embedded points as a configuration file.
    #[arg(long)]
    pub points: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SurveyMode {
    /// Frequency of Property K per (n, N, p) cell.
    PropertyK,
    /// Rank test on Gaussian draws with N = n.
    GDensity,
    /// Realization of perturbed distances from random bases in H.
    Inversion,
    /// Folding of long configurations with small tails.
    Folding,
    /// Fixed-point embeddings of the simplex into random oracles.
    Embedding,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyArg {
    WeightedP,
    LinearDistortion,
}

#[derive(Debug, Args, Serialize)]
pub struct SurveyArgs {
    #[arg(long, value_enum)]
    pub mode: SurveyMode,
    #[arg(long, value_delimiter = ',', default_value = "3")]
    pub n: Vec<usize>,
    /// Ambient dimensions; property-k only (defaults to n), folding uses the first.
    #[arg(long = "N", value_delimiter = ',')]
    #[serde(rename = "N")]
    pub dim: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub p: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.001")]
    pub delta: Vec<f64>,
    #[arg(long, value_enum, default_value_t = FamilyArg::WeightedP)]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Rank tolerance for property-k and g-density, residual tolerance otherwise.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long = "max-iter", default_value_t = 100)]
    pub max_iter: usize,
    #[arg(long, value_enum, default_value_t = StrategyArg::Exhaustive)]
    pub strategy: StrategyArg,
    #[arg(long, short)]
    pub out: PathBuf,
    /// Table or histogram as CSV (property-k and g-density).
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct LineProbeArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, default_value_t = DEFAULT_PROBE_SAMPLES)]
    pub samples: usize,
    #[arg(long, short)]
    pub out: PathBuf,
    /// `(t, g)` grid as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command; `Ok` carries the exit code of a completed run
/// (3 when a solver finished without converging).
pub fn execute(cli: &Cli) -> Result<i32> {
    let ctx = Context { deterministic: cli.deterministic, jobs: cli.jobs };
    match &cli.command {
        Command::Gen(a) => gen(a),
        Command::CheckK(a) => check_k(&ctx, a),
        Command::Jacobian(a) => jacobian(&ctx, a),
        Command::Realize(a) => realize(&ctx, a),
        Command::Fold(a) => fold(&ctx, a),
        Command::GenNorm(a) => gen_norm(a),
        Command::Embed(a) => embed(&ctx, a),
        Command::Survey(a) => survey(&ctx, a),
        Command::LineProbe(a) => line_probe(&ctx, a),
    }
}

struct Context {
    deterministic: bool,
    jobs: usize,
}

impl Context {
    fn write_report<P: Serialize, R: Serialize>(
        &self,
        path: &Path,
        command: &str,
        params: &P,
        result: R,
    ) -> Result<()> {
        let mut report = json!({
            "command": command,
            "version": env!("CARGO_PKG_VERSION"),
            "params": params,
            "deterministic": self.deterministic,
            "result": result,
        });
        if !self.deterministic {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            report["timestamp"] = json!(secs);
        }
        write_atomic(path, &to_json(&report))
    }
}

fn witness_arg(w: &Option<Vec<usize>>) -> Result<Option<CoordinateSubset>> {
    w.as_ref()
        .map(|v| {
            if v.contains(&0) {
                return Err(Error::InvalidOptions("witness coordinates are one-based".into()));
            }
            CoordinateSubset::new(v.iter().map(|k| k - 1).collect())
        })
        .transpose()
}

fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn gen(a: &GenArgs) -> Result<i32> {
    let dim = a.dim.unwrap_or(a.n);
    let mut rng = substream(a.seed, 0);
    let config = match a.family {
        Family::Gaussian => random_configuration(&mut rng, a.n, dim, a.p, Distribution::StandardGaussian)?,
        Family::Uniform => random_configuration(&mut rng, a.n, dim, a.p, Distribution::UniformCube)?,
        Family::Simplex => simplex(a.n, dim, a.p)?,
        Family::H => {
            if dim != a.n {
                return Err(Error::InvalidOptions("family h needs N = n".into()));
            }
            random_h_configuration(&mut rng, a.n, a.p, a.amplitude)?
        }
    };
    write_atomic(&a.out, &configuration_to_json(&config))?;
    println!("wrote {} points in R^{} to {}", config.n(), config.dim(), a.out.display());
    Ok(0)
}

fn check_k(ctx: &Context, a: &CheckKArgs) -> Result<i32> {
    let config = read_configuration(&a.input)?;
    let k = has_property_k(&config, a.strategy.into(), a.tol)?;
    let witness = k.witness.as_ref().map(|w| w.one_based());
    match &witness {
        Some(w) => {
            let list: Vec<String> = w.iter().map(|v| v.to_string()).collect();
            println!("property_k: true, witness: [{}]", list.join(","));
        }
        None => println!("property_k: false"),
    }
    if let Some(path) = &a.report {
        ctx.write_report(path, "check-k", a, json!({ "property_k": k.holds, "witness": witness }))?;
    }
    Ok(0)
}

fn jacobian(ctx: &Context, a: &JacobianArgs) -> Result<i32> {
    let config = read_configuration(&a.input)?;
    let jac = jacobian_f(&config)?;
    let report = rank_test(&jac, a.tol)?;
    let rows: Vec<Vec<f64>> = jac.as_matrix().row_iter().map(|r| r.iter().copied().collect()).collect();
    println!("rank {} of {} (full rank: {})", report.numeric_rank, report.required_rank, report.full_rank);
    ctx.write_report(
        &a.out,
        "jacobian",
        a,
        json!({
            "rows": rows,
            "singular_values": report.singular_values,
            "numeric_rank": report.numeric_rank,
            "required_rank": report.required_rank,
            "full_rank": report.full_rank,
        }),
    )?;
    Ok(0)
}

fn realize(ctx: &Context, a: &RealizeArgs) -> Result<i32> {
    let base = read_configuration(&a.base)?;
    let target = read_matrix(&a.target)?;
    let opts = a.solver.options();
    let result = match target.kind() {
        MatrixKind::PthPower => {
            if a.witness.is_some() {
                return Err(Error::InvalidOptions("--witness applies to raw targets only".into()));
            }
            realize_distance_matrix(&base, &target, &opts)?
        }
        MatrixKind::Raw => realize_perturbation(&base, &target, witness_arg(&a.witness)?.as_ref(), &opts)?,
    };
    write_atomic(&a.out, &configuration_to_json(&result.configuration))?;
    if let Some(path) = &a.trace {
        write_atomic(path, &result.trace_csv())?;
    }
    if let Some(path) = &a.report {
        ctx.write_report(
            path,
            "realize",
            a,
            json!({
                "converged": result.converged,
                "iterations": result.iterations_used,
                "residual_inf_norm": result.residual_inf_norm,
                "tie_crossings": result.tie_crossings,
            }),
        )?;
    }
    println!(
        "converged: {}, iterations: {}, residual: {:e}",
        result.converged, result.iterations_used, result.residual_inf_norm
    );
    Ok(if result.converged { 0 } else { 3 })
}

fn fold(ctx: &Context, a: &FoldArgs) -> Result<i32> {
    let x = read_configuration(&a.input)?;
    let folded = reduce_dimension(&x, witness_arg(&a.witness)?.as_ref(), &a.solver.options())?;
    write_atomic(&a.out, &configuration_to_json(&folded.configuration))?;
    if let Some(path) = &a.report {
        let sources: Vec<usize> = folded.source_coordinates.iter().map(|k| k + 1).collect();
        ctx.write_report(
            path,
            "fold",
            a,
            json!({
                "N": folded.dim(),
                "source_coordinates": sources,
                "isometry_defect": folded.isometry_defect,
                "iterations": folded.head.iterations_used,
                "residual_inf_norm": folded.head.residual_inf_norm,
            }),
        )?;
    }
    println!("folded R^{} into R^{} (relative defect {:e})", x.dim(), folded.dim(), folded.isometry_defect);
    Ok(0)
}

fn gen_norm(a: &GenNormArgs) -> Result<i32> {
    let oracle = match a.kind {
        OracleKindArg::LpExact => {
            if a.delta != 0.0 {
                return Err(Error::InvalidOptions("lp-exact takes no --delta".into()));
            }
            NormOracle::lp_exact(a.dim, a.p)?
        }
        OracleKindArg::WeightedP => NormOracle::random_weighted(a.dim, a.p, a.delta, a.seed)?,
        OracleKindArg::LinearDistortion => NormOracle::random_linear_distortion(a.dim, a.p, a.delta, a.seed)?,
    };
    let check = check_sandwich(&oracle, SANDWICH_SAMPLES, a.seed);
    if !check.holds {
        return Err(Error::InvalidOracle("generated oracle fails its own comparison check".into()));
    }
    write_atomic(&a.out, &oracle.to_json())?;
    println!("wrote {} oracle on R^{} with delta = {}", oracle.kind().name(), oracle.dim(), oracle.delta());
    Ok(0)
}

fn embed(ctx: &Context, a: &EmbedArgs) -> Result<i32> {
    let config_text = std::fs::read_to_string(&a.config)?;
    let oracle_text = std::fs::read_to_string(&a.oracle)?;
    let x = crate::io::configuration_from_json(&config_text, &a.config.display().to_string())?;
    let oracle = NormOracle::from_json(&oracle_text, &a.oracle.display().to_string())?;
    let opts = EmbedOptions {
        solve: a.solver.options(),
        max_outer: a.max_outer,
        epsilon_cap: a.epsilon_cap,
        radius_trials: a.trials,
        radius_seed: a.seed,
    };
    let r = embed_into_norm_with(&x, &oracle, &opts)?;
    if let Some(path) = &a.points {
        write_atomic(path, &configuration_to_json(&r.points))?;
    }
    let table: Vec<_> = r
        .target_distances
        .iter()
        .zip(r.e_norm_distances.entries())
        .map(|(((i, j), d), e)| json!({ "i": i + 1, "j": j + 1, "target": d, "e_norm": e, "defect": (e - d).abs() }))
        .collect();
    ctx.write_report(
        &a.out,
        "embed",
        a,
        json!({
            "config_sha256": sha256_hex(&config_text),
            "oracle_sha256": sha256_hex(&oracle_text),
            "oracle_kind": oracle.kind().name(),
            "delta": oracle.delta(),
            "epsilon_cap": r.state.epsilon_cap,
            "rho": r.state.rho,
            "fixed_point_residual": r.state.residual,
            "outer_iterations": r.state.iterations,
            "phi_evaluations": r.phi_evaluations,
            "max_phi_bound_violation": r.max_phi_bound_violation,
            "used_fallback": r.used_fallback,
            "max_isometry_defect": r.max_isometry_defect,
            "converged": r.converged,
            "distances": table,
        }),
    )?;
    println!(
        "converged: {}, fixed-point residual: {:e}, isometry defect: {:e}",
        r.converged, r.state.residual, r.max_isometry_defect
    );
    Ok(if r.converged { 0 } else { 3 })
}

fn survey(ctx: &Context, a: &SurveyArgs) -> Result<i32> {
    let jobs = ctx.jobs;
    let solve =
        SolveOptions { max_iterations: a.max_iter, residual_tolerance: a.tol.unwrap_or(1e-9), ..Default::default() };
    let rank_tol = a.tol.unwrap_or(DEFAULT_RANK_TOLERANCE);
    let first = |v: &[usize], what: &str| {
        v.first().copied().ok_or_else(|| Error::InvalidOptions(format!("--{what} needs a value")))
    };
    let mut summary = Vec::new();
    let result = match a.mode {
        SurveyMode::PropertyK => {
            let dims = if a.dim.is_empty() { &a.n } else { &a.dim };
            let spec = SurveySpec {
                n_values: a.n.clone(),
                dim_values: dims.clone(),
                p_values: a.p.clone(),
                trials: a.trials,
                seed: a.seed,
                strategy: a.strategy.into(),
                tolerance: rank_tol,
            };
            let table = property_k_survey(&spec, jobs)?;
            if let Some(path) = &a.csv {
                write_atomic(path, &table.to_csv())?;
            }
            summary.push(format!("{} cells", table.rows.len()));
            serde_json::to_value(table)
        }
        SurveyMode::GDensity => {
            let mut reports = Vec::new();
            let mut csv = String::new();
            for &n in &a.n {
                for &p in &a.p {
                    let c = SampleCampaign::new(n, n, p, a.trials, a.seed, Distribution::StandardGaussian)?;
                    let r = sample_g_density(&c, rank_tol, jobs)?;
                    summary.push(format!("n={n} p={p}: {}/{}", r.in_g_count, a.trials));
                    for line in r.histogram_csv().lines().skip(1) {
                        csv.push_str(&format!("{n},{p},{line}\n"));
                    }
                    reports.push(r);
                }
            }
            if let Some(path) = &a.csv {
                write_atomic(path, &format!("n,p,log10_lower,log10_upper,count\n{csv}"))?;
            }
            serde_json::to_value(reports)
        }
        SurveyMode::Inversion => {
            let mut reports = Vec::new();
            for &n in &a.n {
                for &p in &a.p {
                    let params = InversionParams {
                        n,
                        p,
                        trials: a.trials,
                        seed: a.seed,
                        tail_amplitude: 0.5,
                        perturbation: 1e-3,
                        solve,
                    };
                    let r = local_inversion_campaign(&params, jobs)?;
                    summary.push(format!("n={n} p={p}: {}/{}", r.passed, r.trials));
                    reports.push(r);
                }
            }
            serde_json::to_value(reports)
        }
        SurveyMode::Folding => {
            let n = first(&a.n, "n")?;
            let dim = a.dim.first().copied().unwrap_or(3 * n);
            let mut reports = Vec::new();
            for &p in &a.p {
                let params = FoldingParams {
                    n,
                    dim,
                    p,
                    trials: a.trials,
                    seed: a.seed,
                    head_amplitude: 0.5,
                    tail_amplitude: 0.05,
                    solve,
                };
                let r = folding_campaign(&params, jobs)?;
                summary.push(format!("p={p}: {}/{}", r.passed, r.trials));
                reports.push(r);
            }
            serde_json::to_value(reports)
        }
        SurveyMode::Embedding => {
            let n = first(&a.n, "n")?;
            let family = match a.family {
                FamilyArg::WeightedP => OracleFamily::WeightedP,
                FamilyArg::LinearDistortion => OracleFamily::LinearDistortion,
            };
            let mut reports = Vec::new();
            for &p in &a.p {
                for &delta in &a.delta {
                    let params =
                        EmbeddingParams { n, p, delta, family, trials: a.trials, seed: a.seed, max_outer: 200, solve };
                    let r = embedding_campaign(&params, jobs)?;
                    summary.push(format!("p={p} delta={delta}: {}/{}", r.passed, r.trials));
                    reports.push(r);
                }
            }
            serde_json::to_value(reports)
        }
    }
    .map_err(|e| Error::InvalidOptions(format!("cannot serialize report: {e}")))?;
    ctx.write_report(&a.out, "survey", a, result)?;
    println!("{}", summary.join("\n"));
    Ok(0)
}

fn line_probe(ctx: &Context, a: &LineProbeArgs) -> Result<i32> {
    let probe = LineProbe::new(read_configuration(&a.a)?, read_configuration(&a.b)?, a.samples)?;
    let r = line_probe_determinant(&probe)?;
    if let Some(path) = &a.trace {
        write_atomic(path, &r.trace_csv())?;
    }
    ctx.write_report(
        &a.out,
        "line-probe",
        a,
        json!({
            "g0": r.grid.first().map(|g| g.1),
            "g1": r.grid.last().map(|g| g.1),
            "zero_bracket_count": r.zero_bracket_count,
            "refined_zeros": r.refined_zeros,
            "widest_plateau": r.widest_plateau,
            "zeros_isolated": r.zeros_isolated,
        }),
    )?;
    println!("{} sign changes, zeros isolated: {}", r.zero_bracket_count, r.zeros_isolated);
    Ok(0)
}
