//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Built with `harness = false` so the report is printed by a plain
//! `cargo test`.

use std::path::Path;
use std::time::{Duration, Instant};

use lpembed::embedding::DEFECT_TOLERANCE;
use lpembed::experiments::{
    embedding_campaign, folding_campaign, line_probe_determinant, local_inversion_campaign, sample_g_density,
    square_partials, CampaignReport, EmbeddingParams, FoldingParams, InversionParams, LineProbe, OracleFamily,
    SampleCampaign, DEFAULT_PROBE_SAMPLES,
};
use lpembed::realization::SolveOptions;
use lpembed::sampling::{random_configuration, random_h_configuration, substream, Distribution};
use lpembed::{
    gram_schmidt_rotate, has_property_k, in_g, jacobian_f, pair_count, pairs, Configuration, SearchStrategy,
    DEFAULT_RANK_TOLERANCE,
};
use serde::Serialize;

const SEED: u64 = 20_240_917;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

// ---- 1: derivative against central differences ----------------------------

const FD_STEP: f64 = 1e-6;
/// Draws with a coordinate gap below this are redrawn, so that `x ± h`
/// stays on one side of every tie and the difference quotient is accurate.
const FD_TIE_MARGIN: f64 = 1e-3;

fn tie_free_draw(seed: u64, stream: u64, n: usize, p: f64) -> Configuration {
    let mut rng = substream(seed, stream);
    loop {
        let x = random_configuration(&mut rng, n, n, p, Distribution::StandardGaussian).unwrap();
        let gap = (0..n)
            .flat_map(|k| pairs(n).map(move |(i, j)| (i, j, k)))
            .map(|(i, j, k)| (x.coord(i, k) - x.coord(j, k)).abs())
            .fold(f64::INFINITY, f64::min);
        if gap > FD_TIE_MARGIN {
            return x;
        }
    }
}

/// Central difference of `F_ij` along coordinate `k` of point `l`. `F_ij` is
/// the sum of `|x_i^k - x_j^k|^p` over `k`, and only the `k`-th term depends
/// on `x_l^k`, so the quotient is formed on that term alone; summing the
/// unchanged terms first would only add rounding.
fn central_difference(x: &Configuration, i: usize, j: usize, l: usize, k: usize) -> f64 {
    if l != i && l != j {
        return 0.0;
    }
    let p = x.p().get();
    let other = if l == i { x.coord(j, k) } else { x.coord(i, k) };
    let base = x.coord(l, k);
    let (up, down) = (base + FD_STEP, base - FD_STEP);
    let term = |v: f64| (v - other).abs().powf(p);
    (term(up) - term(down)) / (up - down)
}

fn criterion_1() -> Verdict {
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    for (pi, &p) in [1.5, 2.0, 2.5, 3.0].iter().enumerate() {
        for n in 2..=4 {
            for t in 0..50u64 {
                let x = tie_free_draw(SEED + 1, ((pi as u64 * 8 + n as u64) << 16) | t, n, p);
                let jac = jacobian_f(&x).unwrap();
                for (row, (i, j)) in pairs(n).enumerate() {
                    for l in 0..n {
                        for k in 0..n {
                            let exact = jac.get(row, l, k);
                            let fd = central_difference(&x, i, j, l, k);
                            let err = if exact == 0.0 { fd.abs() } else { (exact - fd).abs() / exact.abs() };
                            worst = worst.max(err);
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    verdict(worst <= 1e-5, format!("{checked} entries, max relative error {worst:.2e} (limit 1e-5)"))
}

// ---- 2: the triangular family has full rank -------------------------------

fn criterion_2() -> Verdict {
    let mut worst = f64::INFINITY;
    let mut failures = 0;
    let mut total = 0;
    for (pi, &p) in [1.5, 2.0, 3.0].iter().enumerate() {
        for n in 2..=6 {
            for t in 0..100u64 {
                let mut rng = substream(SEED + 2, ((pi as u64 * 8 + n as u64) << 16) | t);
                let x = random_h_configuration(&mut rng, n, p, 1.0).unwrap();
                let r = in_g(&x, DEFAULT_RANK_TOLERANCE).unwrap();
                let ratio = r.smallest_retained_ratio();
                worst = worst.min(ratio);
                total += 1;
                if !(r.full_rank && ratio > 1e-8) {
                    failures += 1;
                }
            }
        }
    }
    verdict(
        failures == 0,
        format!(
            "{total} configurations (p in 1.5, 2, 3), {failures} failures, smallest sigma_min/sigma_max {worst:.2e}"
        ),
    )
}

// ---- 3..6: campaigns, also replayed by criterion 9 -------------------------

fn density_reports() -> Vec<lpembed::experiments::DensityReport> {
    let mut out = Vec::new();
    for n in 2..=5 {
        for p in [1.5, 2.0, 3.0] {
            let c = SampleCampaign::new(n, n, p, 1000, SEED + 3, Distribution::StandardGaussian).unwrap();
            out.push(sample_g_density(&c, DEFAULT_RANK_TOLERANCE, 0).unwrap());
        }
    }
    out
}

fn criterion_3(reports: &[lpembed::experiments::DensityReport]) -> Verdict {
    let failures: usize = reports.iter().map(|r| r.failures.len()).sum();
    let total: usize = reports.iter().map(|r| r.campaign.trials).sum();
    let worst = reports.iter().flat_map(|r| r.smallest_retained_ratios.iter().copied()).fold(f64::INFINITY, f64::min);
    verdict(failures == 0, format!("{total} draws, {failures} outside G, smallest sigma ratio {worst:.2e}"))
}

fn inversion_reports() -> Vec<CampaignReport<InversionParams>> {
    [1.5, 2.0, 3.0]
        .iter()
        .map(|&p| {
            let params = InversionParams {
                n: 3,
                p,
                trials: 100,
                seed: SEED + 4,
                tail_amplitude: 0.5,
                perturbation: 1e-3,
                solve: SolveOptions::default(),
            };
            local_inversion_campaign(&params, 0).unwrap()
        })
        .collect()
}

fn campaign_summary<P>(reports: &[CampaignReport<P>]) -> (bool, usize, usize) {
    let passed: usize = reports.iter().map(|r| r.passed).sum();
    let total: usize = reports.iter().map(|r| r.trials).sum();
    (passed == total, passed, total)
}

fn first_error<P>(reports: &[CampaignReport<P>]) -> String {
    reports
        .iter()
        .flat_map(|r| r.records.iter())
        .find(|r| !r.passed)
        .map(|r| format!("; first failure: trial {} {:?}", r.trial, r.error))
        .unwrap_or_default()
}

fn criterion_4(reports: &[CampaignReport<InversionParams>]) -> Verdict {
    let (ok, passed, total) = campaign_summary(reports);
    let iters = reports.iter().map(|r| r.max_iterations()).max().unwrap_or(0);
    let residual = reports.iter().map(|r| r.max_residual()).fold(0.0, f64::max);
    verdict(
        ok && iters <= 100 && residual <= 1e-9,
        format!(
            "{passed}/{total} realized, max iterations {iters}, max residual {residual:.2e}{}",
            first_error(reports)
        ),
    )
}

fn folding_reports() -> Vec<CampaignReport<FoldingParams>> {
    [1.5, 2.0, 3.0]
        .iter()
        .map(|&p| {
            let params = FoldingParams {
                n: 4,
                dim: 12,
                p,
                trials: 50,
                seed: SEED + 5,
                head_amplitude: 0.5,
                tail_amplitude: 0.05,
                solve: SolveOptions::default(),
            };
            folding_campaign(&params, 0).unwrap()
        })
        .collect()
}

fn criterion_5(reports: &[CampaignReport<FoldingParams>]) -> Verdict {
    let (ok, passed, total) = campaign_summary(reports);
    let defect = reports.iter().map(|r| r.max_defect()).fold(0.0, f64::max);
    let dims = reports.iter().flat_map(|r| r.records.iter().map(|t| t.iterations)).max().unwrap_or(0);
    verdict(
        ok && defect <= 1e-9,
        format!(
            "{passed}/{total} folded with Property K, max relative defect {defect:.2e}, largest output N {dims}{}",
            first_error(reports)
        ),
    )
}

fn embedding_reports() -> Vec<CampaignReport<EmbeddingParams>> {
    let mut out = Vec::new();
    for family in [OracleFamily::WeightedP, OracleFamily::LinearDistortion] {
        for p in [2.0, 2.5] {
            for delta in [1e-3, 1e-2] {
                let params = EmbeddingParams {
                    n: 3,
                    p,
                    delta,
                    family,
                    trials: 20,
                    seed: SEED + 6,
                    max_outer: 200,
                    solve: SolveOptions::default(),
                };
                out.push(embedding_campaign(&params, 0).unwrap());
            }
        }
    }
    out
}

fn criterion_6(reports: &[CampaignReport<EmbeddingParams>]) -> Verdict {
    let (ok, passed, total) = campaign_summary(reports);
    let residual = reports.iter().map(|r| r.max_residual()).fold(0.0, f64::max);
    let defect = reports.iter().map(|r| r.max_defect()).fold(0.0, f64::max);
    verdict(
        ok && residual <= 1e-9 && defect <= DEFECT_TOLERANCE,
        format!(
            "{passed}/{total} embeddings, max fixed-point residual {residual:.2e}, max defect {defect:.2e}, phi bounds held{}",
            first_error(reports)
        ),
    )
}

// ---- 7: Euclidean rotation into triangular form ---------------------------

fn criterion_7() -> Verdict {
    let mut worst = 0.0f64;
    let mut failures = 0;
    for t in 0..100u64 {
        let mut rng = substream(SEED + 7, t);
        let x = random_configuration(&mut rng, 4, 6, 2.0, Distribution::StandardGaussian).unwrap();
        let Ok(y) = gram_schmidt_rotate(&x) else {
            failures += 1;
            continue;
        };
        for (i, j) in pairs(4) {
            let (a, b) = (x.distance(i, j), y.distance(i, j));
            worst = worst.max((a - b).abs() / a);
        }
        if !has_property_k(&y, SearchStrategy::Exhaustive, DEFAULT_RANK_TOLERANCE).unwrap().holds {
            failures += 1;
        }
    }
    verdict(
        failures == 0 && worst <= 1e-12,
        format!("100 sets, {failures} failures, max relative distance change {worst:.2e}"),
    )
}

// ---- 8: determinant along segments -----------------------------------------

/// Second endpoint in `H` with the same coordinate-order pattern as `a`.
fn same_component_partner(a: &Configuration, seed: u64, stream: u64) -> Configuration {
    let mut rng = substream(seed, stream);
    loop {
        let b = random_h_configuration(&mut rng, a.n(), a.p().get(), 0.5).unwrap();
        if b.order_pattern() == a.order_pattern() {
            return b;
        }
    }
}

/// Largest deviation of `g` on the grid from the cubic through four of its
/// values, relative to `max |g|`. Zero up to rounding iff `deg g ≤ 3`.
fn cubic_fit_defect(probe: &LineProbe, grid: &[(f64, f64)]) -> f64 {
    let nodes = [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0];
    let values: Vec<f64> = nodes.iter().map(|&t| probe.g(t)).collect();
    let lagrange = |t: f64| -> f64 {
        (0..4)
            .map(|a| {
                let w: f64 = (0..4).filter(|&b| b != a).map(|b| (t - nodes[b]) / (nodes[a] - nodes[b])).product();
                w * values[a]
            })
            .sum()
    };
    let scale = grid.iter().fold(0.0f64, |m, (_, g)| m.max(g.abs()));
    grid.iter().map(|(t, g)| (g - lagrange(*t)).abs() / scale).fold(0.0, f64::max)
}

fn criterion_8() -> Verdict {
    let n = 3;
    let bound = pair_count(n);
    let mut failures = Vec::new();
    let mut max_zeros = 0;
    let mut max_fit = 0.0f64;
    let mut max_consistency = 0.0f64;
    for t in 0..20u64 {
        let mut rng = substream(SEED + 8, t);
        let a = random_h_configuration(&mut rng, n, 2.0, 0.5).unwrap();
        let b = same_component_partner(&a, SEED + 8, (1 << 32) | t);
        let probe = LineProbe::new(a.clone(), b.clone(), DEFAULT_PROBE_SAMPLES).unwrap();
        let r = match line_probe_determinant(&probe) {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("trial {t}: {e}"));
                continue;
            }
        };
        // the endpoints' minors assembled from the full Jacobian
        for (x, g) in [(&a, r.grid[0].1), (&b, r.grid.last().unwrap().1)] {
            let jac = jacobian_f(x).unwrap();
            let cols: Vec<usize> = pairs(n).map(|(k, l)| jac.column_index(l, k)).collect();
            let det = jac.as_matrix().select_columns(&cols).determinant();
            max_consistency = max_consistency.max((g - det).abs() / det.abs());
            let direct = square_partials(x.as_flat(), n, 2.0).determinant();
            max_consistency = max_consistency.max((direct - det).abs() / det.abs());
        }
        max_zeros = max_zeros.max(r.zero_bracket_count);
        max_fit = max_fit.max(cubic_fit_defect(&probe, &r.grid));
        if !r.zeros_isolated || r.zero_bracket_count > bound {
            failures.push(format!("trial {t}: {} zeros, plateau {}", r.zero_bracket_count, r.widest_plateau));
        }
    }
    let ok = failures.is_empty() && max_fit <= 1e-9 && max_consistency <= 1e-10;
    verdict(
        ok,
        format!(
            "20 segments, g(0) != 0 on all, max zeros {max_zeros} (bound {bound}), cubic fit defect {max_fit:.1e}, endpoint minor agreement {max_consistency:.1e}{}",
            failures.first().map(|f| format!("; {f}")).unwrap_or_default()
        ),
    )
}

// ---- 9: replay determinism through the command line -------------------------

fn run_cli(args: &[String]) -> i32 {
    lpembed::cli::run(std::iter::once("lpembed".to_string()).chain(args.iter().cloned()))
}

fn survey_args(out: &Path, mode: &str, extra: &[&str]) -> Vec<String> {
    ["--deterministic", "survey", "--mode", mode]
        .iter()
        .chain(extra)
        .map(|s| s.to_string())
        .chain(["-o".to_string(), out.display().to_string()])
        .collect()
}

fn criterion_9<A: Serialize, B: Serialize, C: Serialize, D: Serialize>(
    density: &A,
    inversion: &B,
    folding: &C,
    embedding: &[D],
) -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let seed = |k: u64| (SEED + k).to_string();
    let cases: Vec<(&str, Vec<String>, serde_json::Value)> = vec![
        (
            "g-density",
            vec![
                "--n".into(),
                "2,3,4,5".into(),
                "--p".into(),
                "1.5,2,3".into(),
                "--trials".into(),
                "1000".into(),
                "--seed".into(),
                seed(3),
            ],
            serde_json::to_value(density).unwrap(),
        ),
        (
            "inversion",
            vec![
                "--n".into(),
                "3".into(),
                "--p".into(),
                "1.5,2,3".into(),
                "--trials".into(),
                "100".into(),
                "--seed".into(),
                seed(4),
            ],
            serde_json::to_value(inversion).unwrap(),
        ),
        (
            "folding",
            vec![
                "--n".into(),
                "4".into(),
                "--N".into(),
                "12".into(),
                "--p".into(),
                "1.5,2,3".into(),
                "--trials".into(),
                "50".into(),
                "--seed".into(),
                seed(5),
            ],
            serde_json::to_value(folding).unwrap(),
        ),
        (
            "weighted-p",
            vec![
                "--n".into(),
                "3".into(),
                "--p".into(),
                "2,2.5".into(),
                "--delta".into(),
                "0.001,0.01".into(),
                "--family".into(),
                "weighted-p".into(),
                "--trials".into(),
                "20".into(),
                "--seed".into(),
                seed(6),
            ],
            serde_json::to_value(&embedding[..4]).unwrap(),
        ),
        (
            "linear-distortion",
            vec![
                "--n".into(),
                "3".into(),
                "--p".into(),
                "2,2.5".into(),
                "--delta".into(),
                "0.001,0.01".into(),
                "--family".into(),
                "linear-distortion".into(),
                "--trials".into(),
                "20".into(),
                "--seed".into(),
                seed(6),
            ],
            serde_json::to_value(&embedding[4..]).unwrap(),
        ),
    ];
    let mut problems = Vec::new();
    for (name, extra, expected) in cases {
        let mode = if name.contains('-') && name != "g-density" { "embedding" } else { name };
        let extra: Vec<&str> = extra.iter().map(String::as_str).collect();
        let mut bytes = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("{name}.json"));
            let code = run_cli(&survey_args(&out, mode, &extra));
            if code != 0 {
                problems.push(format!("{name} run {run} exited with {code}"));
            }
            bytes.push(std::fs::read(&out).unwrap_or_default());
        }
        if bytes[0] != bytes[1] {
            problems.push(format!("{name} replay differs"));
        }
        let report: serde_json::Value = serde_json::from_slice(&bytes[0]).unwrap_or_default();
        if report["result"] != expected {
            problems.push(format!("{name} report differs from the in-process campaign"));
        }
    }
    verdict(
        problems.is_empty(),
        if problems.is_empty() {
            "5 survey reports replayed byte-identically and match the campaigns above".into()
        } else {
            problems.join("; ")
        },
    )
}

// ---- driver ------------------------------------------------------------------

fn report(id: u32, name: &str, limit: Option<u64>, f: impl FnOnce() -> Verdict) -> bool {
    let start = Instant::now();
    let v = f();
    let elapsed = start.elapsed();
    let in_time = limit.is_none_or(|l| elapsed <= Duration::from_secs(l));
    let passed = v.passed && in_time;
    let budget = limit.map(|l| format!(" / {l} s")).unwrap_or_default();
    println!(
        "[{}] {id}. {name}: {} ({:.2} s{budget}){}",
        if passed { "PASS" } else { "FAIL" },
        v.detail,
        elapsed.as_secs_f64(),
        if in_time { "" } else { " over time budget" }
    );
    passed
}

fn main() {
    println!("acceptance suite");
    let mut ok = true;
    ok &= report(1, "derivative matches central differences", Some(10), criterion_1);
    ok &= report(2, "triangular family has full rank", Some(5), criterion_2);

    let mut density = Vec::new();
    ok &= report(3, "random square configurations lie in G", Some(30), || {
        density = density_reports();
        criterion_3(&density)
    });
    let mut inversion = Vec::new();
    ok &= report(4, "perturbed distances are realized near H", Some(60), || {
        inversion = inversion_reports();
        criterion_4(&inversion)
    });
    let mut folding = Vec::new();
    ok &= report(5, "folding preserves distances and Property K", Some(60), || {
        folding = folding_reports();
        criterion_5(&folding)
    });
    let mut embedding = Vec::new();
    ok &= report(6, "fixed-point embedding into perturbed norms", Some(120), || {
        embedding = embedding_reports();
        criterion_6(&embedding)
    });
    ok &= report(7, "Euclidean rotation into triangular form", Some(10), criterion_7);
    ok &= report(8, "determinant zeros along segments are isolated", Some(30), criterion_8);
    ok &= report(9, "deterministic replay of campaigns 3 to 6", None, || {
        criterion_9(&density, &inversion, &folding, &embedding)
    });

    if !ok {
        println!("acceptance suite: FAILED");
        std::process::exit(1);
    }
    println!("acceptance suite: all criteria passed");
}
