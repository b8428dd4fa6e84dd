//! Isometric embedding of the 3-point simplex into norms that are close to
//! l_p: a diagonal reweighting and a random linear distortion.
//!
//! cargo run --example embed_norm

use lpembed::embedding::{check_sandwich, embed_into_norm, verify_embedding, NormOracle, SANDWICH_SAMPLES};
use lpembed::realization::SolveOptions;
use lpembed::sampling::simplex;

fn main() -> lpembed::Result<()> {
    let p = 2.5;
    let x = simplex(3, 3, p)?;
    let oracles = [NormOracle::random_weighted(3, p, 0.01, 4)?, NormOracle::random_linear_distortion(3, p, 0.01, 4)?];
    for oracle in &oracles {
        let sandwich = check_sandwich(oracle, SANDWICH_SAMPLES, 1);
        let r = embed_into_norm(&x, oracle, &SolveOptions::default(), 200)?;
        println!(
            "{}: comparison holds {}, converged {} after {} steps, residual {:.2e}, defect {:.2e}, verified {}",
            oracle.kind().name(),
            sandwich.holds,
            r.converged,
            r.state.iterations,
            r.state.residual,
            r.max_isometry_defect,
            verify_embedding(&r, 1e-8)
        );
        let rho: Vec<String> = r.state.rho.iter().map(|v| format!("{v:.3e}")).collect();
        println!("  rho* = [{}]", rho.join(", "));
    }
    Ok(())
}
