//! Gauss-Newton realization of a nearby distance matrix, first on p-th
//! powers in the square setting, then on raw distances in higher dimension
//! where only the witness block moves.
//!
//! cargo run --example realize_distances

use lpembed::realization::{estimate_perturbation_radius, realize_distance_matrix, realize_perturbation, SolveOptions};
use lpembed::{eval_f_tilde, make_h_configuration, Configuration, MatrixKind, UpperTriangularMatrix};

fn main() -> lpembed::Result<()> {
    let opts = SolveOptions::default();

    let base = make_h_configuration(3, &[0.2, -0.1, 0.3], 3.0)?;
    let target = UpperTriangularMatrix::new(3, MatrixKind::PthPower, vec![2.05, 1.9, 2.1])?;
    let r = realize_distance_matrix(&base, &target, &opts)?;
    println!("square solve: converged {} in {} iterations", r.converged, r.iterations_used);
    print!("{}", r.trace_csv());

    let x = Configuration::new(
        3.0,
        vec![vec![1.0, 0.2, 0.0, 0.05, -0.1], vec![0.0, 1.0, 0.3, 0.0, 0.2], vec![0.0, 0.0, 1.0, 0.1, 0.0]],
    )?;
    let stretched: Vec<f64> = eval_f_tilde(&x).entries().iter().map(|d| d * 1.001).collect();
    let target = UpperTriangularMatrix::new(3, MatrixKind::Raw, stretched)?;
    let y = realize_perturbation(&x, &target, None, &opts)?;
    println!("raw distances stretched by 0.1%: residual {:.2e}", y.residual_inf_norm);
    for (before, after) in x.points().zip(y.configuration.points()) {
        println!("{before:.4?} -> {after:.4?}");
    }

    let eps = estimate_perturbation_radius(&x, 10, 1, &opts)?;
    println!("every sampled perturbation up to {eps:.3e} was realized");
    Ok(())
}
