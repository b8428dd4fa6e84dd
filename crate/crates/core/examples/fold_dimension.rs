//! Folding a configuration with small tails into as few coordinates as
//! possible without changing any distance.
//!
//! cargo run --example fold_dimension

use lpembed::experiments::{folding_instance, FoldingParams};
use lpembed::pairs;
use lpembed::realization::{reduce_dimension, SolveOptions};

fn main() -> lpembed::Result<()> {
    let params = FoldingParams {
        n: 4,
        dim: 12,
        p: 2.5,
        trials: 1,
        seed: 9,
        head_amplitude: 0.5,
        tail_amplitude: 0.05,
        solve: SolveOptions::default(),
    };
    let x = folding_instance(&params, 0)?;
    let folded = reduce_dimension(&x, None, &params.solve)?;
    println!("R^{} -> R^{}, relative defect {:.2e}", x.dim(), folded.dim(), folded.isometry_defect);
    println!("coordinates kept (zero-based): {:?}", folded.source_coordinates);
    for (i, j) in pairs(4) {
        println!("d({}, {}) = {:.12} -> {:.12}", i + 1, j + 1, x.distance(i, j), folded.configuration.distance(i, j));
    }
    Ok(())
}
