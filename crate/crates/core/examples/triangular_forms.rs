//! The triangular family H is inside G, and any independent Euclidean
//! configuration can be rotated into triangular form.
//!
//! cargo run --example triangular_forms

use lpembed::sampling::{random_configuration, substream, Distribution};
use lpembed::{gram_schmidt_rotate, has_property_k, in_g, make_h_configuration, pairs, SearchStrategy};

fn main() -> lpembed::Result<()> {
    let h = make_h_configuration(4, &[0.3, -0.2, 0.7, 0.1, -0.5, 0.4], 1.5)?;
    let report = in_g(&h, 1e-10)?;
    println!("H member, p = 1.5: full rank {}, singular values {:?}", report.full_rank, report.singular_values);

    let mut rng = substream(3, 0);
    let x = random_configuration(&mut rng, 4, 6, 2.0, Distribution::StandardGaussian)?;
    let y = gram_schmidt_rotate(&x)?;
    for (i, point) in y.points().enumerate() {
        println!("rotated point {}: {:.4?}", i + 1, point);
    }
    let worst =
        pairs(4).map(|(i, j)| (x.distance(i, j) - y.distance(i, j)).abs() / x.distance(i, j)).fold(0.0, f64::max);
    println!("largest relative distance change {worst:.2e}");
    let k = has_property_k(&y, SearchStrategy::Exhaustive, 1e-10)?;
    println!("Property K after rotation: {} {:?}", k.holds, k.witness.map(|w| w.one_based()));
    Ok(())
}
