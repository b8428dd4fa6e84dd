use lpembed::embedding::{check_sandwich, NormOracle};
use lpembed::io::{configuration_from_json, configuration_to_json};
use lpembed::realization::{realize_perturbation, SolveOptions};
use lpembed::{
    eval_f, eval_f_tilde, gram_schmidt_rotate, in_g, jacobian_f, make_h_configuration, normalize_to_r, pair_count,
    pairs, Configuration, CoordinateSubset, MatrixKind, PermutationMap, UpperTriangularMatrix, DEFAULT_RANK_TOLERANCE,
};
use proptest::prelude::*;

fn config(n: usize, dim: usize) -> impl Strategy<Value = (f64, Vec<f64>)> {
    (1.05f64..4.0, proptest::collection::vec(-3.0f64..3.0, n * dim))
}

fn build(n: usize, dim: usize, (p, coords): (f64, Vec<f64>)) -> Configuration {
    Configuration::from_flat(p, n, dim, coords).unwrap()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn raw_distances_satisfy_triangle_inequality(c in config(4, 3)) {
        let d = eval_f_tilde(&build(4, 3, c));
        for a in 0..4 {
            for b in 0..4 {
                for m in 0..4 {
                    if a != b && b != m && a != m {
                        prop_assert!(d.get(a, m) <= (d.get(a, b) + d.get(b, m)) * (1.0 + 1e-12));
                    }
                }
            }
        }
    }

    #[test]
    fn pth_powers_split_over_complementary_coordinates(c in config(3, 5), mask in 1u8..31) {
        let x = build(3, 5, c);
        let head: Vec<usize> = (0..5).filter(|k| mask >> k & 1 == 1).collect();
        let tail: Vec<usize> = (0..5).filter(|k| mask >> k & 1 == 0).collect();
        let whole = eval_f(&x);
        let fh = eval_f(&x.project(&CoordinateSubset::new(head).unwrap()).unwrap());
        let ft = if tail.is_empty() {
            vec![0.0; 3]
        } else {
            eval_f(&x.project(&CoordinateSubset::new(tail).unwrap()).unwrap()).entries().to_vec()
        };
        for ((w, h), t) in whole.entries().iter().zip(fh.entries()).zip(&ft) {
            prop_assert!(close(*w, h + t, 1e-13));
        }
    }

    #[test]
    fn relabelling_commutes_with_the_distance_map(c in config(4, 2), shuffle in Just((0..4).collect::<Vec<usize>>()).prop_shuffle()) {
        let x = build(4, 2, c);
        let pi = PermutationMap::new(shuffle).unwrap();
        let lhs = eval_f(&pi.apply_to_points(&x).unwrap());
        let rhs = pi.apply_to_pairs(&eval_f(&x)).unwrap();
        prop_assert_eq!(lhs.entries(), rhs.entries());
        prop_assert_eq!(pi.unapply_to_pairs(&rhs).unwrap(), eval_f(&x));
    }

    #[test]
    fn normalized_configuration_lies_in_region(c in config(4, 4)) {
        let x = build(4, 4, c);
        prop_assume!(x.find_tie().is_none());
        let (pi, y) = normalize_to_r(&x).unwrap();
        prop_assert!(lpembed::in_region_r(&y));
        prop_assert_eq!(pi.unapply_to_pairs(&eval_f(&y)).unwrap(), eval_f(&x));
    }

    #[test]
    fn jacobian_rows_annihilate_translations(c in config(4, 3)) {
        let x = build(4, 3, c);
        let jac = jacobian_f(&x).unwrap();
        for row in 0..jac.rows() {
            for k in 0..3 {
                let s: f64 = (0..4).map(|l| jac.get(row, l, k)).sum();
                let scale: f64 = (0..4).map(|l| jac.get(row, l, k).abs()).sum();
                prop_assert!(s.abs() <= 1e-14 * scale.max(1.0));
            }
        }
    }

    #[test]
    fn distance_map_is_homogeneous(c in config(3, 3), lambda in -3.0f64..3.0) {
        prop_assume!(lambda.abs() > 1e-3);
        let x = build(3, 3, c);
        let scaled = Configuration::from_flat(x.p().get(), 3, 3, x.as_flat().iter().map(|v| v * lambda).collect()).unwrap();
        let factor = lambda.abs().powf(x.p().get());
        for (a, b) in eval_f(&scaled).entries().iter().zip(eval_f(&x).entries()) {
            prop_assert!(close(*a, factor * b, 1e-12));
        }
    }

    #[test]
    fn configuration_text_round_trip_is_bitwise(c in config(3, 4)) {
        let x = build(3, 4, c);
        let back = configuration_from_json(&configuration_to_json(&x), "mem").unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn triangular_family_is_full_rank(n in 2usize..6, p in 1.05f64..4.0, seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = lpembed::sampling::substream(seed, 0);
        let tails: Vec<f64> = (0..pair_count(n)).map(|_| rng.random_range(-2.0..2.0)).collect();
        let h = make_h_configuration(n, &tails, p).unwrap();
        prop_assert!(in_g(&h, DEFAULT_RANK_TOLERANCE).unwrap().full_rank);
    }

    #[test]
    fn rotation_preserves_euclidean_distances(coords in proptest::collection::vec(-3.0f64..3.0, 15)) {
        let x = Configuration::from_flat(2.0, 3, 5, coords).unwrap();
        prop_assume!(x.points().all(|v| v.iter().any(|c| c.abs() > 0.1)));
        if let Ok(y) = gram_schmidt_rotate(&x) {
            for (i, j) in pairs(3) {
                prop_assert!(close(x.distance(i, j), y.distance(i, j), 1e-12));
            }
            for i in 0..3 {
                prop_assert!(y.coord(i, i) > 0.0);
                prop_assert!(y.point(i)[i + 1..].iter().all(|v| *v == 0.0));
            }
        }
    }

    #[test]
    fn weighted_oracles_satisfy_their_comparison(p in 1.1f64..4.0, delta in 0.0f64..0.2, seed in any::<u64>()) {
        let o = NormOracle::random_weighted(4, p, delta, seed).unwrap();
        prop_assert!(check_sandwich(&o, 500, seed).holds);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn perturbation_leaves_complement_untouched(
        tails in proptest::collection::vec(-0.4f64..0.4, 5),
        bumps in proptest::collection::vec(-1e-3f64..1e-3, 3),
    ) {
        // simplex block in coordinates 0..3, two extra coordinates
        let coords: Vec<f64> = (0..3)
            .flat_map(|i| {
                let mut row = vec![0.0; 5];
                row[i] = 1.0;
                row[3] = tails[i];
                row[4] = tails[(i + 2) % 5];
                row
            })
            .collect();
        let x = Configuration::from_flat(2.5, 3, 5, coords).unwrap();
        let entries: Vec<f64> = eval_f_tilde(&x).entries().iter().zip(&bumps).map(|(d, b)| d + b).collect();
        let target = UpperTriangularMatrix::new(3, MatrixKind::Raw, entries).unwrap();
        let w = CoordinateSubset::leading(3);
        let r = realize_perturbation(&x, &target, Some(&w), &SolveOptions::default()).unwrap();
        prop_assert!(r.converged);
        for i in 0..3 {
            prop_assert_eq!(&r.configuration.point(i)[3..], &x.point(i)[3..]);
        }
        for ((i, j), t) in pairs(3).zip(target.entries()) {
            prop_assert!((r.configuration.distance(i, j) - t).abs() <= 1e-9);
        }
    }
}
