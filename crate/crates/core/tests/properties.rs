use fraclab::frequency::{frequency_profile, DefectOptions, FrequencySettings};
use fraclab::geometry::WeightedGrid;
use fraclab::lab::check::{read_checks, write_checks};
use fraclab::lab::Check;
use fraclab::poly::format::{parse_poly_file, write_solution_exact};
use fraclab::poly::polynomial::{monomials_of_degree, ExactPoly};
use fraclab::poly::scalar::WeightExponent;
use fraclab::poly::solutions::{extend_boundary_polynomial, lift_to_symmetric, model_poly, weighted_residual};
use fraclab::strata::{defect_table, inclusion_violations, scale_ladder, tube_volume_of, Window};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn weight() -> impl Strategy<Value = f64> {
    // quarters keep the rational coefficients small
    (-3i32..=3).prop_map(|q| q as f64 / 4.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn exact_extensions_are_weighted_harmonic(
        n in 1usize..=3,
        a in weight(),
        coeffs in prop::collection::vec(-5i64..=5, 1..12),
        degree in 0u32..=5,
    ) {
        let mut p0 = ExactPoly::zero(n);
        for (e, c) in monomials_of_degree(n, degree).into_iter().zip(coeffs) {
            p0.add_term(e, BigRational::from_integer(BigInt::from(c)));
        }
        let ac = WeightExponent::new(a).as_coefficient::<BigRational>();
        prop_assert!(weighted_residual(&extend_boundary_polynomial(&p0, &ac), &ac).is_zero());
    }

    #[test]
    fn exact_member_files_round_trip(k in 0u32..=6, a in weight(), m in 2usize..=4) {
        let p = model_poly(k, a).unwrap();
        let p = if m == 2 { p } else { lift_to_symmetric(&p, m).unwrap() };
        let file = parse_poly_file(&write_solution_exact(&p)).unwrap();
        prop_assert_eq!(file.n, m - 1);
        prop_assert_eq!(file.d, k);
        prop_assert_eq!(file.exact.as_ref(), Some(&p.shape));
    }

    #[test]
    fn grid_nodes_are_addressable(n in 1usize..=2, cells in 4usize..=8, a in weight(), doubled in any::<bool>()) {
        let h = 1.0 / cells as f64;
        let g = WeightedGrid::new(n, h, 1.0, 1.0, a, doubled).unwrap();
        prop_assert_eq!(g.num_nodes() % g.nodes_per_level(), 0);
        let levels = g.num_nodes() / g.nodes_per_level();
        for level in [0, g.trace_level(), levels - 1] {
            for x in [0, g.nodes_per_level() / 2, g.nodes_per_level() - 1] {
                let i = g.node_index(level, x);
                prop_assert!(i < g.num_nodes());
                let p = g.node_coords(i);
                prop_assert_eq!(p.len(), n + 1);
                prop_assert!(p[..n].iter().all(|v| v.abs() <= 1.0 + 1e-12));
            }
        }
        prop_assert!(g.node_coords(g.node_index(g.trace_level(), 0))[n].abs() <= h / 2.0 + 1e-12);
    }

    #[test]
    fn frequency_ignores_amplitude(k in 1u32..=4, a in weight(), c in 0.01f64..100.0) {
        let p = model_poly(k, a).unwrap();
        let s = FrequencySettings::for_member(&p);
        let q = p.poly.scale(&c);
        let n0 = frequency_profile(&p, &[0.0], 0.9, 0.5, 2, false, &s).unwrap().frequencies();
        let n1 = frequency_profile(&q, &[0.0], 0.9, 0.5, 2, false, &s).unwrap().frequencies();
        for (x, y) in n0.iter().zip(&n1) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn tube_volume_grows_with_radius(pts in prop::collection::vec((-0.4f64..0.4, -0.4f64..0.4), 1..6)) {
        let pieces: Vec<Vec<Vec<f64>>> = pts.into_iter().map(|(x, y)| vec![vec![x, y]]).collect();
        let h = 1.0 / 128.0;
        let c = tube_volume_of(&pieces, &[4.0 * h, 8.0 * h, 16.0 * h, 32.0 * h], &Window::ball(vec![0.0, 0.0], 0.5), h, h).unwrap();
        prop_assert!(c.volumes.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn check_records_round_trip(
        rows in prop::collection::vec((0usize..=12, "[a-z =<]{1,12}", -1e6f64..1e6, any::<bool>()), 0..8),
    ) {
        let checks: Vec<Check> = rows.into_iter().map(|(c, name, v, pass)| Check::new(c, name, v, "-", pass)).collect();
        let mut buf = Vec::new();
        write_checks(&mut buf, &checks).unwrap();
        prop_assert_eq!(read_checks(std::str::from_utf8(&buf).unwrap()).unwrap(), checks);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn strata_are_nested(d in 2u32..=3, a in weight(), offset in -0.2f64..0.2) {
        let u = model_poly(d, a).unwrap();
        let samples: Vec<Vec<f64>> = (-4..=4).map(|i| vec![offset + i as f64 / 16.0]).collect();
        let r = 1.0 / 64.0;
        let table = defect_table(&u, &samples, &scale_ladder(r, 0.5, 2.0).unwrap(), 1, a, &DefectOptions::default()).unwrap();
        prop_assert!(inclusion_violations(&table, &[0], &[1e-3, 1e-2, 1e-1], &[r, 4.0 * r, 16.0 * r]).is_empty());
    }
}
