mod common;

use std::sync::Arc;

use common::*;
use fraclab::geometry::{MetricChart, WeightedGrid};
use fraclab::solver::*;
use fraclab::LabError;

fn exact_error(a: f64, h: f64) -> f64 {
    let g = WeightedGrid::new(1, h, 1.0, 1.0, a, false).unwrap();
    let u = quadratic_solution(a);
    let p = ExtensionProblem::with_exact_boundary(g.clone(), (1.0 - a) / 2.0, u.clone()).unwrap();
    let s = solve(&p).unwrap();
    (0..g.num_nodes()).map(|i| (s.values()[i] - u(&g.node_coords(i))).abs()).fold(0.0, f64::max)
}

#[test]
fn quadratic_solution_converges_at_second_order() {
    for a in [-0.5, 0.5] {
        let errs: Vec<f64> = [1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0].iter().map(|&h| exact_error(a, h)).collect();
        for o in orders(&errs) {
            assert!(o > 1.6, "a = {a}: errors {errs:?}");
        }
    }
    // the unweighted scheme is exact on quadratics
    assert!(exact_error(0.0, 1.0 / 16.0) < 1e-9);
}

#[test]
fn constant_data_gives_constant_solution() {
    let g = WeightedGrid::new(2, 0.125, 1.0, 1.0, 0.2, false).unwrap();
    let p = ExtensionProblem::from_fn(g, 0.4, |_| 1.0).unwrap();
    let s = solve(&p).unwrap();
    assert!(s.values().iter().all(|&v| v == 1.0));
    let tr = neumann_trace(&s).unwrap();
    assert!(tr.values.iter().all(|&v| v == 0.0));
    let fr = frac_laplacian_extension(&p).unwrap();
    assert!(fr.values.iter().all(|&v| v == 0.0));
}

#[test]
fn linear_data_energy_is_exact() {
    for a in [-0.6, 0.0, 0.4] {
        let g = WeightedGrid::new(2, 0.125, 1.0, 1.5, a, false).unwrap();
        let u: fraclab::geometry::ScalarFn = Arc::new(|p: &[f64]| p[0]);
        let p = ExtensionProblem::with_exact_boundary(g.clone(), (1.0 - a) / 2.0, u.clone()).unwrap();
        let s = solve(&p).unwrap();
        let err = (0..g.num_nodes()).map(|i| (s.values()[i] - u(&g.node_coords(i))).abs()).fold(0.0, f64::max);
        assert!(err < 1e-9);
        // ∫ |y|^a over [-1, 1]² × [0, 1.5]
        let analytic = 4.0 * 1.5f64.powf(1.0 + a) / (1.0 + a);
        assert!((s.energy - analytic).abs() < 1e-8 * analytic, "{} vs {analytic}", s.energy);
    }
}

#[test]
fn energy_identity_and_maximum_principle() {
    let g = WeightedGrid::new(1, 1.0 / 32.0, 1.0, 1.0, 0.3, false).unwrap();
    let p = ExtensionProblem::from_fn(g, 0.35, |x| (3.0 * x[0]).cos() + 0.5 * x[0])
        .unwrap()
        .with_lateral(LateralCondition::Dirichlet(Arc::new(|p: &[f64]| 0.2 * p[1])))
        .with_tolerance(1e-12, 20_000);
    let s = solve(&p).unwrap();
    let id = s.energy_identity().unwrap();
    assert!(id.relative_gap() < 1e-8, "{id:?}");
    let (lo, hi) = s.inner_half_box_range();
    let fmin = p.boundary.iter().cloned().fold(f64::INFINITY, f64::min);
    let fmax = p.boundary.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!(lo >= fmin - 1e-9 && hi <= fmax + 1e-9);
}

#[test]
fn doubled_grid_is_even_and_matches_unreduced_solve() {
    let g = WeightedGrid::new(1, 1.0 / 16.0, 1.0, 1.0, -0.4, true).unwrap();
    let p = ExtensionProblem::from_fn(g, 0.7, |x| x[0].sin()).unwrap().with_tolerance(1e-12, 20_000);
    let reduced = solve(&p).unwrap();
    assert_eq!(reduced.evenness_defect(), 0.0);
    let full = solve_unreduced(&p).unwrap();
    assert!(max_diff(reduced.values(), full.values()) < 1e-9);
    assert!(full.evenness_defect() < 1e-9);
}

#[test]
fn solves_are_deterministic_across_thread_counts() {
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let g = WeightedGrid::new(2, 1.0 / 16.0, 1.0, 1.0, 0.5, false).unwrap();
            let p = ExtensionProblem::from_fn(g, 0.25, |x| (x[0] * x[1]).exp()).unwrap();
            solve(&p).unwrap().values().to_vec()
        })
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(3));
}

#[test]
fn trace_of_closed_forms() {
    for a in [-0.5, 0.0, 0.5] {
        let gamma = (1.0 - a) / 2.0;
        let g = WeightedGrid::new(1, 1.0 / 32.0, 1.0, 1.0, a, false).unwrap();
        let p = ExtensionProblem::from_fn(g.clone(), gamma, |x| x[0] * x[0]).unwrap();
        let quad: Vec<f64> = (0..g.num_nodes()).map(|i| quadratic_solution(a)(&g.node_coords(i))).collect();
        let s = SolutionField::from_values(p.clone(), quad).unwrap();
        let tr = neumann_trace(&s).unwrap();
        assert_eq!(tr.branch, TraceBranch::ProfileFit);
        assert!(tr.values.iter().all(|v| v.abs() < 1e-9), "a = {a}");

        let power: Vec<f64> =
            (0..g.num_nodes()).map(|i| g.node_coords(i)[1].powf(1.0 - a)).collect();
        let p0 = ExtensionProblem::from_fn(g.clone(), gamma, |_| 0.0).unwrap();
        let s = SolutionField::from_values(p0, power).unwrap();
        for method in [TraceMethod::ProfileFit, TraceMethod::FluxBalance] {
            let tr = neumann_trace_with(&s, method).unwrap();
            assert!(tr.values.iter().all(|v| (v - (1.0 - a)).abs() < 1e-9), "a = {a}, {method:?}");
        }
    }
}

#[test]
fn extension_route_vanishes_on_the_quadratic_model() {
    for a in [-0.5, 0.5] {
        let gamma = (1.0 - a) / 2.0;
        let h = 1.0 / 32.0;
        let g = WeightedGrid::new(1, h, 1.0, 1.0, a, false).unwrap();
        let p = ExtensionProblem::with_exact_boundary(g.clone(), gamma, quadratic_solution(a)).unwrap();
        let r = frac_laplacian_extension(&p).unwrap();
        for x in 0..g.nx() {
            if g.x_coord(x).abs() <= 0.5 {
                assert!(r.values[x].abs() <= 3.0 * h * h * 10.0, "a = {a}: {}", r.values[x]);
            }
        }
    }
}

#[test]
fn sine_symbol_on_periodic_chart() {
    let pi = std::f64::consts::PI;
    for gamma in [0.3, 0.5, 0.8] {
        let g = WeightedGrid::new(1, 1.0 / 64.0, 1.0, 4.0, 1.0 - 2.0 * gamma, false).unwrap();
        let p = ExtensionProblem::from_fn(g.clone(), gamma, |x| (pi * x[0]).sin())
            .unwrap()
            .with_lateral(LateralCondition::Periodic);
        let r = frac_laplacian_extension(&p).unwrap();
        let (mut num, mut den) = (0.0, 0.0);
        for x in 0..g.nx() {
            let want = pi.powf(2.0 * gamma) * (pi * g.x_coord(x)).sin();
            num += (r.values[x] - want).powi(2);
            den += want * want;
        }
        assert!((num / den).sqrt() < 0.01, "γ = {gamma}");
    }
}

#[test]
fn pv_route_matches_fourier_oracle() {
    for gamma in [0.25, 0.5, 0.75] {
        let pv = frac_laplacian_pv(&bump, gamma, &[0.0], Tail::CompactSupport { radius: 1.0 }, &PvOptions::default())
            .unwrap();
        let fourier = fourier_fractional_at_origin(|x| bump(&[x]), gamma, 64.0, 1 << 14);
        assert!((pv / fourier - 1.0).abs() < 5e-3, "γ = {gamma}: {pv} vs {fourier}");
    }
}

#[test]
fn extension_and_pv_routes_agree_on_a_bump() {
    for gamma in [0.25, 0.75] {
        let g = WeightedGrid::new(1, 1.0 / 32.0, 2.0, 2.0, 1.0 - 2.0 * gamma, false).unwrap();
        let opts = PoissonOptions::default();
        let exact: fraclab::geometry::ScalarFn =
            Arc::new(move |p: &[f64]| poisson_extension(&bump, gamma, p, &opts).unwrap());
        let p = ExtensionProblem::with_exact_boundary(g.clone(), gamma, exact).unwrap();
        let r = frac_laplacian_extension(&p).unwrap();
        for x in [-0.5, 0.0, 0.3] {
            let i = ((x + 2.0) * 32.0f64).round() as usize;
            let pv = frac_laplacian_pv(&bump, gamma, &[x], Tail::CompactSupport { radius: 1.0 }, &PvOptions::default())
                .unwrap();
            assert!((r.values[i] - pv).abs() < 0.03 * pv.abs().max(0.1), "γ = {gamma}, x = {x}");
        }
    }
}

#[test]
fn flat_chart_perturbed_solve_is_identical() {
    let g = WeightedGrid::new(2, 0.125, 1.0, 1.0, 0.2, false).unwrap();
    let p = ExtensionProblem::from_fn(g, 0.4, |x| x[0] - x[1] * x[1]).unwrap();
    let a = solve(&p).unwrap();
    let b = solve_perturbed(&p).unwrap();
    assert_eq!(a.values(), b.values());
}

#[test]
fn conformal_perturbation_is_continuous() {
    let g = WeightedGrid::new(2, 0.125, 1.0, 1.0, 0.0, false).unwrap();
    let p = ExtensionProblem::from_fn(g, 0.5, |x| x[0] + 0.5 * x[1] * x[1]).unwrap();
    let flat = solve(&p).unwrap();
    let mut last = f64::INFINITY;
    for eps in [1e-1, 1e-2, 1e-3] {
        let chart = MetricChart::conformal(3, Arc::new(move |q: &[f64]| eps * 0.5 * (q[0] * q[0] - q[1] * q[2])));
        let s = solve_perturbed(&p.clone().with_chart(chart)).unwrap();
        let d = max_diff(flat.values(), s.values());
        assert!(d < 10.0 * eps, "ε = {eps}: {d}");
        assert!(d < last);
        last = d;
    }
}

#[test]
fn manufactured_source_converges() {
    // U = cos x (1 + y²) gives −Div(y^a ∇U) = y^a cos x (y² − 1 − 2a)
    let a = 0.4;
    let u: fraclab::geometry::ScalarFn = Arc::new(|p: &[f64]| p[0].cos() * (1.0 + p[1] * p[1]));
    let errs: Vec<f64> = [1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0]
        .iter()
        .map(|&h| {
            let g = WeightedGrid::new(1, h, 1.0, 1.0, a, false).unwrap();
            let p = ExtensionProblem::with_exact_boundary(g.clone(), (1.0 - a) / 2.0, u.clone())
                .unwrap()
                .with_source(Arc::new(move |p: &[f64]| p[0].cos() * (p[1] * p[1] - 1.0 - 2.0 * a)));
            let s = solve(&p).unwrap();
            (0..g.num_nodes()).map(|i| (s.values()[i] - u(&g.node_coords(i))).abs()).fold(0.0, f64::max)
        })
        .collect();
    assert!(orders(&errs).iter().all(|&o| o > 1.6), "{errs:?}");
    assert!(errs[2] < 1e-3);
}

#[test]
fn indefinite_and_nonconvergent_systems_are_reported() {
    let g = WeightedGrid::new(2, 0.25, 1.0, 1.0, 0.0, false).unwrap();
    let p = ExtensionProblem::from_fn(g.clone(), 0.5, |x| x[0].sin()).unwrap().with_tolerance(1e-14, 2);
    match solve(&p) {
        Err(LabError::NoConvergence { iterations, history, .. }) => {
            assert_eq!(iterations, 2);
            assert_eq!(history.len(), 3);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn dump_round_trip_and_csv() {
    let g = WeightedGrid::new(1, 0.125, 1.0, 1.0, 0.0, false).unwrap();
    let p = ExtensionProblem::from_fn(g.clone(), 0.5, |x| x[0]).unwrap();
    let s = solve(&p).unwrap();
    let mut buf = Vec::new();
    dump::write_solution(&mut buf, &s).unwrap();
    let (g2, gamma, values) = dump::read_solution(&buf[..]).unwrap();
    assert_eq!(g2, g);
    assert_eq!(gamma, 0.5);
    assert_eq!(values, s.values());
    let mut csv = Vec::new();
    let tr = neumann_trace(&s).unwrap();
    dump::write_trace_csv(&mut csv, &s, &tr.values, &tr.values).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("x1,f,trace,P2gamma_f\n"));
    assert_eq!(text.lines().count(), 1 + g.nx());
    assert!(dump::read_solution(&buf[..buf.len() - 3]).is_err());
}

#[test]
fn interpolation_reproduces_multilinear_data() {
    use fraclab::field::ScalarField;
    for (a, doubled) in [(-0.5, false), (0.3, false), (-0.5, true), (0.3, true)] {
        let g = WeightedGrid::new(2, 0.125, 1.0, 1.0, a, doubled).unwrap();
        let p = ExtensionProblem::from_fn(g.clone(), (1.0 - a) / 2.0, |_| 0.0).unwrap();
        let f = |q: &[f64]| 1.0 + 2.0 * q[0] - q[1] + 0.5 * q[2] + q[0] * q[2];
        let vals: Vec<f64> = (0..g.num_nodes()).map(|i| f(&g.node_coords(i))).collect();
        let s = SolutionField::from_values(p, vals).unwrap();
        for q in [[0.11, -0.37, 0.05], [0.5, 0.5, 0.93], [-0.99, 0.2, 0.4], [0.3, 0.1, 0.0]] {
            assert!((s.value(&q) - f(&q)).abs() < 1e-12, "{q:?}");
            let mut r = q;
            r[2] = -r[2];
            let want = if doubled { f(&r) } else { f(&q) };
            assert!((s.value(&r) - want).abs() < 1e-12, "{r:?}");
        }
    }
}
