//! The determinant of the square block of partials along a segment inside
//! one component of the tie-free set: its zeros are isolated.
//!
//! cargo run --example line_probe

use lpembed::experiments::{line_probe_determinant, LineProbe, DEFAULT_PROBE_SAMPLES};
use lpembed::Configuration;

fn main() -> lpembed::Result<()> {
    let a = Configuration::new(
        2.0,
        vec![vec![0.5903, -0.6645, 0.5995], vec![-0.8962, 0.4861, -0.9238], vec![-0.9270, 0.5602, 0.0405]],
    )?;
    let b = Configuration::new(
        2.0,
        vec![vec![0.3083, -0.6542, 0.3603], vec![-0.8695, 0.3761, -1.1922], vec![-1.0381, 0.3994, 0.0044]],
    )?;
    let r = line_probe_determinant(&LineProbe::new(a, b, DEFAULT_PROBE_SAMPLES)?)?;
    println!("g(0) = {:.6e}, g(1) = {:.6e}", r.grid[0].1, r.grid[DEFAULT_PROBE_SAMPLES].1);
    println!("sign changes: {}, refined zeros: {:?}", r.zero_bracket_count, r.refined_zeros);
    println!("widest near-zero run: {} grid points, isolated: {}", r.widest_plateau, r.zeros_isolated);
    Ok(())
}
