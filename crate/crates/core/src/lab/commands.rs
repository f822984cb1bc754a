//! The five lab commands. Each writes its artifacts under `out` together with
//! a `checks_<command>.csv` record.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_rational::BigRational;

use crate::error::{invalid, LabError, Result};
use crate::field::{FnField, ScalarField};
use crate::frequency::{
    almost_monotonicity_fit, classify_scales, doubling_report, frequency_profile, monotonicity_report, poincare_trace_ratio,
    small_frequency_screen, write_profile_csv, DefectOptions, FrequencySettings, Normalization, ScreenStatus,
};
use crate::geometry::constants::trace_to_fractional;
use crate::geometry::{MetricChart, ScalarFn, WeightedGrid};
use crate::lab::check::{collect_checks, report_table, write_checks, Check};
use crate::lab::config::{BoundarySpec, ChartSpec, ExperimentConfig};
use crate::poly::format::{parse_poly_file, write_solution, write_solution_exact};
use crate::poly::scalar::WeightExponent;
use crate::poly::solutions::{lift_to_symmetric, model_poly, weighted_residual, HomogeneousSolution};
use crate::poly::isolated_critical_origin;
use crate::solver::fractional::{frac_laplacian_pv, poisson_extension, PoissonOptions, PvOptions, Tail};
use crate::solver::{dump, neumann_trace_with, solve, solve_perturbed, ExtensionProblem, LateralCondition, SolutionField, TraceMethod};
use crate::strata::{
    boundary_split, defect_table, effective_cover, extract_singular, hausdorff_estimate, inclusion_violations, scale_ladder,
    tube_volume, tube_volume_of, write_stratum_csv, write_tube_csv, BoundaryRestriction, BoxGrid, Carrier, CoverOptions,
    CriticalOptions, GriddedField, SplitClass, SplitOptions, Window,
};

fn create(out: &Path, name: &str) -> Result<BufWriter<File>> {
    std::fs::create_dir_all(out)?;
    let path = out.join(name);
    let f = File::create(&path).map_err(|e| LabError::Io(format!("{}: {e}", path.display())))?;
    Ok(BufWriter::new(f))
}

/// Writes `checks_<command>.csv` into `out`.
pub fn save_checks(out: &Path, command: &str, checks: &[Check]) -> Result<()> {
    let mut w = create(out, &format!("checks_{command}.csv"))?;
    write_checks(&mut w, checks)?;
    w.flush()?;
    Ok(())
}

fn csv_row(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(|v| format!("{v:.16e}")).collect::<Vec<_>>().join(",")
}

fn coord_header(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// Smooth bump `exp(1 − 1/(1 − |x|²))` supported in the unit ball.
pub fn bump(x: &[f64]) -> f64 {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    if r2 >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - r2)).exp()
    }
}

/// `x₁² − y²/(1 + a)` on `R^{n+1}`, `y` the last coordinate.
pub fn example_solution(a: f64) -> ScalarFn {
    Arc::new(move |p: &[f64]| p[0] * p[0] - p[p.len() - 1].powi(2) / (1.0 + a))
}

fn read_samples(path: &Path, grid: &WeightedGrid) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| LabError::Io(format!("{}: {e}", path.display())))?;
    let n = grid.n();
    let t = grid.trace_level();
    let mut values = Vec::with_capacity(grid.nodes_per_level());
    for (i, line) in text.lines().enumerate().skip(1).filter(|(_, l)| !l.trim().is_empty()) {
        let bad = |what: &str| LabError::Format(format!("{}: line {}: {what}", path.display(), i + 1));
        let f: Vec<f64> = line.split(',').map(|t| t.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad("not numeric"))?;
        if f.len() != n + 1 {
            return Err(bad("expected x1..xn,f"));
        }
        let x = values.len();
        if x >= grid.nodes_per_level() {
            return Err(bad("more rows than trace nodes"));
        }
        let p = grid.node_coords(grid.node_index(t, x));
        if p[..n].iter().zip(&f).any(|(a, b)| (a - b).abs() > 1e-9 * grid.h()) {
            return Err(bad("coordinates differ from the trace node in grid order"));
        }
        values.push(f[n]);
    }
    if values.len() != grid.nodes_per_level() {
        return Err(LabError::Format(format!("{}: {} rows for {} trace nodes", path.display(), values.len(), grid.nodes_per_level())));
    }
    Ok(values)
}

/// The configured extension problem and, when known, its closed-form solution.
pub fn build_problem(cfg: &ExperimentConfig) -> Result<(ExtensionProblem, Option<ScalarFn>)> {
    let p = &cfg.problem;
    let g = &cfg.grid;
    let (gamma, a, n) = (p.gamma, p.a(), p.n);
    let grid = WeightedGrid::new(n, g.h, g.l, g.y, a, g.doubled)?;
    let (problem, exact) = match &p.boundary {
        BoundarySpec::ExampleX1Sq => {
            let e = example_solution(a);
            (ExtensionProblem::with_exact_boundary(grid, gamma, e.clone())?, Some(e))
        }
        BoundarySpec::Sine => {
            let l = g.l;
            let pr = ExtensionProblem::from_fn(grid, gamma, move |x: &[f64]| (PI * x[0] / l).sin())?;
            (pr.with_lateral(LateralCondition::Periodic), None)
        }
        BoundarySpec::Bump => {
            // the faces stay away from the support, so coarse panels suffice in 2D
            let opts = PoissonOptions { panels: if n == 1 { 32 } else { 8 }, ..PoissonOptions::default() };
            let e: ScalarFn = Arc::new(move |q: &[f64]| poisson_extension(&bump, gamma, q, &opts).unwrap_or(f64::NAN));
            (ExtensionProblem::with_exact_boundary(grid, gamma, e)?, None)
        }
        BoundarySpec::Poly(path) => {
            let text = std::fs::read_to_string(path)?;
            let file = parse_poly_file(&text).map_err(|e| LabError::Format(format!("{}: {e}", path.display())))?;
            if file.n != n {
                return Err(LabError::Format(format!("{}: polynomial has n = {}, problem has n = {n}", path.display(), file.n)));
            }
            let poly = file.poly.clone();
            if file.is_weighted() {
                if (file.a - a).abs() > 1e-12 {
                    return Err(LabError::Format(format!("{}: a = {} differs from 1 − 2γ = {a}", path.display(), file.a)));
                }
                let e: ScalarFn = Arc::new(move |q: &[f64]| poly.eval(q));
                (ExtensionProblem::with_exact_boundary(grid, gamma, e.clone())?, Some(e))
            } else {
                (ExtensionProblem::from_fn(grid, gamma, move |x: &[f64]| poly.eval(x))?, None)
            }
        }
        BoundarySpec::Samples(path) => {
            let values = read_samples(path, &grid)?;
            (ExtensionProblem::new(grid, gamma, values)?, None)
        }
    };
    let problem = match p.chart {
        ChartSpec::Flat => problem,
        ChartSpec::Conformal(eps) => {
            let m = n + 1;
            let phi: ScalarFn = Arc::new(move |q: &[f64]| eps * 0.5 * (q[0] * q[0] - q[1] * q[m - 1]));
            problem.with_chart(MetricChart::conformal(m, phi))
        }
    };
    Ok((problem, exact))
}

/// Solves on the problem's chart, with the curvature term where it is defined (`n ≥ 2`).
pub fn solve_configured(problem: &ExtensionProblem) -> Result<SolutionField> {
    if !problem.chart.is_flat() && problem.grid.n() >= 2 {
        solve_perturbed(problem)
    } else {
        solve(problem)
    }
}

fn trace_nodes(grid: &WeightedGrid) -> impl Iterator<Item = (usize, Vec<f64>)> + '_ {
    let t = grid.trace_level();
    let n = grid.n();
    (0..grid.nodes_per_level()).map(move |x| (x, grid.node_coords(grid.node_index(t, x))[..n].to_vec()))
}

/// Solution dump, trace CSV and the builtin checks of the boundary data.
pub fn cmd_solve(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<Check>> {
    let (problem, exact) = build_problem(cfg)?;
    let sol = solve_configured(&problem)?;
    let grid = sol.grid().clone();
    let tr = neumann_trace_with(&sol, TraceMethod::FluxBalance)?;
    let k = trace_to_fractional(problem.gamma)?;
    let frac: Vec<f64> = tr.values.iter().map(|v| k * v).collect();

    let mut w = create(out, "grid.txt")?;
    writeln!(w, "{}", grid.dump())?;
    w.flush()?;
    let mut w = create(out, "solution.bin")?;
    dump::write_solution(&mut w, &sol)?;
    w.flush()?;
    let mut w = create(out, "trace.csv")?;
    dump::write_trace_csv(&mut w, &sol, &tr.values, &frac)?;
    w.flush()?;

    let mut checks = vec![Check::new(0, "CG iterations", sol.report.iterations as f64, "-", true)];
    let flat = problem.chart.is_flat();
    let h = grid.h();
    let half = grid.half_width() / 2.0;
    if let Some(e) = &exact {
        let err = (0..grid.num_nodes()).map(|i| (sol.values()[i] - e(&grid.node_coords(i))).abs()).fold(0.0, f64::max);
        checks.push(Check::new(0, "max nodal error vs closed form", err, "-", true));
    }
    match &cfg.problem.boundary {
        BoundarySpec::ExampleX1Sq if flat => {
            let m = trace_nodes(&grid).filter(|(_, x)| x.iter().all(|v| v.abs() <= half + 1e-12)).map(|(i, _)| frac[i].abs()).fold(0.0, f64::max);
            checks.push(Check::at_most(0, "max |P2gamma f| on the inner half box", m, 30.0 * h * h));
        }
        BoundarySpec::Sine if flat => {
            let l = grid.half_width();
            let symbol = (PI / l).powf(2.0 * problem.gamma);
            let mut w = create(out, "symbol.csv")?;
            writeln!(w, "{},expected,computed", coord_header("x", grid.n()).join(","))?;
            let (mut num, mut den) = (0.0, 0.0);
            for (i, x) in trace_nodes(&grid) {
                let want = symbol * (PI * x[0] / l).sin();
                num += (frac[i] - want).powi(2);
                den += want * want;
                writeln!(w, "{}", csv_row(x.iter().copied().chain([want, frac[i]])))?;
            }
            w.flush()?;
            let crit = if (problem.gamma - 0.5).abs() < 1e-12 { 3 } else { 0 };
            checks.push(Check::at_most(crit, "sine symbol relative L2", (num / den).sqrt(), 0.02));
        }
        BoundarySpec::Bump if flat => {
            let stride = ((0.125 / h).round() as usize).max(1);
            let mut w = create(out, "routes.csv")?;
            writeln!(w, "{},extension,pv", coord_header("x", grid.n()).join(","))?;
            let mut worst: f64 = 0.0;
            for (i, x) in trace_nodes(&grid) {
                let on_axis = x[1..].iter().all(|v| v.abs() < 1e-12);
                let step = (x[0] / h).round() as i64;
                if !on_axis || x[0].abs() > 0.5 + 1e-12 || step % stride as i64 != 0 {
                    continue;
                }
                let pv = frac_laplacian_pv(&bump, problem.gamma, &x, Tail::CompactSupport { radius: 1.0 }, &PvOptions::default())?;
                worst = worst.max((frac[i] - pv).abs() / pv.abs());
                writeln!(w, "{}", csv_row(x.iter().copied().chain([frac[i], pv])))?;
            }
            w.flush()?;
            checks.push(Check::at_most(3, "extension vs PV route on the bump", worst, 0.03));
        }
        _ => {}
    }
    save_checks(out, "solve", &checks)?;
    Ok(checks)
}

/// Model member of degree `k` in `m` variables.
pub fn member(k: u32, a: f64, m: usize) -> Result<HomogeneousSolution> {
    let p = model_poly(k, a)?;
    if m > 2 {
        lift_to_symmetric(&p, m)
    } else {
        Ok(p)
    }
}

/// Writes `model_k<k>_m<m>.txt` and returns its path.
pub fn cmd_poly_gen(k: u32, a: f64, m: usize, exact: bool, out: &Path) -> Result<PathBuf> {
    let p = member(k, a, m)?;
    let text = if exact { write_solution_exact(&p) } else { write_solution(&p) };
    let name = format!("model_k{k}_m{m}.txt");
    let mut w = create(out, &name)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(out.join(name))
}

/// Weighted residual of a polynomial file: exact zero test for rational
/// coefficients, relative size `≤ 1e-10` for floats.
pub fn cmd_poly_verify(path: &Path) -> Result<Check> {
    let text = std::fs::read_to_string(path).map_err(|e| LabError::Io(format!("{}: {e}", path.display())))?;
    let file = parse_poly_file(&text)?;
    if !file.is_weighted() {
        return Err(LabError::Format(format!("{}: polynomial has no y variable", path.display())));
    }
    let name = format!("weighted residual of {}", path.display());
    Ok(match &file.exact {
        Some(p) => {
            let r = weighted_residual(p, &WeightExponent::new(file.a).as_coefficient::<BigRational>());
            Check::new(1, name, r.num_terms() as f64, "0 terms", r.is_zero())
        }
        None => {
            let r = weighted_residual(&file.poly, &file.a);
            let rel = r.max_abs_coefficient() / file.poly.max_abs_coefficient().max(f64::MIN_POSITIVE);
            Check::at_most(1, name, rel, 1e-10)
        }
    })
}

/// Whether the model member of degree `k` has an isolated critical point at the origin.
pub fn cmd_poly_critical(k: u32, a: f64) -> Result<bool> {
    isolated_critical_origin(&model_poly(k, a)?)
}

/// Member rigidity, doubling and identity, and the configured solved field.
pub fn cmd_frequency(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<Check>> {
    let f = &cfg.frequency;
    let n = cfg.problem.n;
    let a = cfg.problem.a();
    let origin = vec![0.0; n];
    let mut checks = Vec::new();
    let opts = DefectOptions::default();

    for d in 1..=4u32 {
        let p = member(d, a, n + 1)?;
        let s = FrequencySettings::for_member(&p);
        let prof = frequency_profile(&p, &origin, f.r_max, f.ratio, f.levels, false, &s)?;
        let dev = prof.frequencies().iter().map(|v| (v - d as f64).abs()).fold(0.0, f64::max);
        checks.push(Check::at_most(4, format!("max |N - d| for degree {d}"), dev, 1e-6));
        let c = classify_scales(&p, &origin, f.eps, f.ratio, f.levels, f.r_max, None, &s, &opts)?;
        let mut w = create(out, &format!("profile_member_d{d}.csv"))?;
        write_profile_csv(&mut w, &c)?;
        w.flush()?;

        let s = s.with_normalization(Normalization::Model);
        let prof = frequency_profile(&p, &origin, f.r_max, 0.5, f.levels, false, &s)?;
        let rep = doubling_report(&prof);
        let want = 4f64.powi(d as i32);
        let ratio_err = rep.ratios.iter().map(|(_, r)| (r / want - 1.0).abs()).fold(0.0, f64::max);
        let id = rep.identity_residuals.iter().copied().fold(0.0, f64::max);
        checks.push(Check::at_most(6, format!("doubling ratio error for degree {d}"), ratio_err, 1e-3));
        checks.push(Check::at_most(6, format!("identity residual for degree {d}"), id, 1e-4));
        let mut w = create(out, &format!("doubling_d{d}.csv"))?;
        writeln!(w, "j,r,H,N,identity_residual,H_ratio")?;
        for j in 0..prof.len() {
            let ratio = rep.ratios.iter().find(|(i, _)| *i == j).map(|(_, r)| format!("{r:.16e}")).unwrap_or_default();
            writeln!(w, "{j},{},{ratio}", csv_row([prof.radii[j], prof.h[j], prof.n(j), rep.identity_residuals[j]]))?;
        }
        w.flush()?;
    }

    let (problem, _) = build_problem(cfg)?;
    let sol = solve_configured(&problem)?;
    let s = FrequencySettings::for_solution(&sol)?;
    let c = classify_scales(&sol, &f.center, f.eps, f.ratio, f.levels, f.r_max, None, &s, &opts)?;
    let mut w = create(out, "profile_solution.csv")?;
    write_profile_csv(&mut w, &c)?;
    w.flush()?;
    let mono = monotonicity_report(&c.profile, f.tol);
    let crit = if problem.chart.is_flat() { 5 } else { 0 };
    checks.push(Check::at_most(crit, "monotonicity violations of the solved field", mono.violations.len() as f64, 0.0));
    checks.push(Check::new(0, "almost-monotonicity C*", almost_monotonicity_fit(&c.profile).c_star, "-", true));
    let bad = c.bad_intervals();
    let drop = c.total_drop();
    let need = bad as f64 * c.delta;
    let ok = bad == 0 || drop >= need - 1e-12;
    checks.push(Check::new(7, "total drop minus bad count times delta", if bad == 0 { drop } else { drop - need }, ">= 0", ok));
    let screen = small_frequency_screen(&sol, &f.center, f.r_max, f.eps0, &s)?;
    let (nval, vanishing) = match screen {
        ScreenStatus::NonVanishing { n, .. } | ScreenStatus::AboveThreshold { n } => (n, false),
        ScreenStatus::SmallButVanishing { n, .. } => (n, true),
    };
    checks.push(Check::new(12, "small-frequency screen at the centre", nval, "no zero when N <= eps0", !vanishing));
    let pr = poincare_trace_ratio(&sol, &f.center, f.r_max, &s)?;
    checks.push(Check::new(12, "Poincare-trace ratio at the centre", pr, "finite positive", pr.is_finite() && pr > 0.0));
    save_checks(out, "frequency", &checks)?;
    Ok(checks)
}

/// Lattice with `per_axis` points per coordinate on `[-1/2, 1/2]^n` plus
/// fine points `i r/2` along the first axis.
pub fn stratum_samples(n: usize, per_axis: usize, r: f64) -> Vec<Vec<f64>> {
    let mut pts: Vec<Vec<f64>> = vec![vec![]];
    let step = 1.0 / (per_axis - 1) as f64;
    for _ in 0..n {
        pts = pts
            .into_iter()
            .flat_map(|p| {
                (0..per_axis).map(move |i| {
                    let mut q = p.clone();
                    q.push(-0.5 + i as f64 * step);
                    q
                })
            })
            .collect();
    }
    for i in -16i32..=16 {
        let mut q = vec![0.0; n];
        q[0] = i as f64 * r / 2.0;
        if !pts.contains(&q) {
            pts.push(q);
        }
    }
    pts
}

fn log_radii(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    (0..k).map(|i| lo * (hi / lo).powf(i as f64 / (k - 1) as f64)).collect()
}

fn write_points(out: &Path, name: &str, pts: &[Vec<f64>]) -> Result<()> {
    let n = pts.first().map_or(0, |p| p.len());
    let mut w = create(out, name)?;
    writeln!(w, "{}", coord_header("x", n).join(","))?;
    for p in pts {
        writeln!(w, "{}", csv_row(p.iter().copied()))?;
    }
    w.flush()?;
    Ok(())
}

/// Member pipeline (singular set, strata, covers), then the boundary split.
pub fn cmd_stratify(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<Check>> {
    let st = &cfg.stratify;
    let n = cfg.problem.n;
    let m = n + 1;
    let a = cfg.problem.a();
    let u = member(st.degree, a, m)?;
    let h = st.h;
    let mut checks = Vec::new();

    // singular set and its tube
    let f = GriddedField::sample(&u, BoxGrid::centered(m, st.window + 4.0 * h, h, 0.37)?)?;
    let s = extract_singular(&f, Carrier::Ambient, &CriticalOptions::default())?;
    write_points(out, "singular.csv", &s.cells.iter().map(|c| c.point.clone()).collect::<Vec<_>>())?;
    let w = Window::ball(vec![0.0; m], st.window);
    if !s.is_empty() {
        let curve = tube_volume(&s, &log_radii(2.0 * h, st.window / 2.0, 6), &w, h / 2.0)?;
        let mut t = create(out, "tube_singular.csv")?;
        write_tube_csv(&mut t, &curve)?;
        t.flush()?;
        checks.push(Check::at_least(9, "singular set codimension", curve.exponent, 1.8));
        let e = hausdorff_estimate(&s, (m - 2) as f64, &[4.0 * h, 2.0 * h, h], Some(&w));
        checks.push(Check::new(0, format!("H^{} content at the finest scale", m - 2), *e.contents.last().unwrap_or(&0.0), "-", true));
    } else {
        checks.push(Check::new(0, "singular set is empty", 0.0, "-", true));
    }

    // strata and covers
    let r = st.mu.powi(st.j as i32);
    let per_axis = if n == 1 { 33 } else { 5 };
    let samples = stratum_samples(n, per_axis, r);
    let k_min = st.k.iter().map(|&k| (k + 1).min(m)).min().unwrap_or(1);
    let opts = DefectOptions::default();
    let table = defect_table(&u, &samples, &scale_ladder(r, 0.5, 2.0)?, k_min, a, &opts)?;
    let viol = inclusion_violations(&table, &st.k, &[st.eps / 10.0, st.eps, 10.0 * st.eps], &[r, 4.0 * r, 16.0 * r]);
    checks.push(Check::at_most(0, "stratum inclusion violations", viol.len() as f64, 0.0));
    let mut bounds = create(out, "cover_bounds.csv")?;
    writeln!(bounds, "k,j,mu,leaves,bound,C0,C1,D,points,covered")?;
    for &k in &st.k {
        let stratum = table.stratum(k, st.eps, r);
        let mut wr = create(out, &format!("stratum_k{k}.csv"))?;
        write_stratum_csv(&mut wr, &table, &stratum)?;
        wr.flush()?;
        let pts = stratum.points(&table);
        if pts.is_empty() {
            checks.push(Check::new(0, format!("stratum k={k} is empty"), 0.0, "-", true));
            continue;
        }
        let copts = CoverOptions { eps: st.eps, mu: st.mu, ..CoverOptions::new(k, st.j) };
        let cover = effective_cover(&u, &pts, &Window::ball(vec![0.0; n], 1.0), a, &copts)?;
        let mut wt = create(out, &format!("cover_k{k}.txt"))?;
        cover.write_tree(&mut wt)?;
        wt.flush()?;
        let leaves = cover.leaves().len();
        let covered = cover.covers_all_points();
        writeln!(
            bounds,
            "{k},{},{},{leaves},{},{},{},{},{},{}",
            st.j,
            format_args!("{:.16e}", st.mu),
            format_args!("{:.16e}", cover.leaf_bound()),
            format_args!("{:.16e}", cover.c0),
            format_args!("{:.16e}", cover.c1),
            cover.d,
            pts.len(),
            u8::from(covered)
        )?;
        checks.push(Check::at_most(8, format!("leaves over bound, k={k}"), leaves as f64 / cover.leaf_bound(), 1.0));
        checks.push(Check::holds(8, format!("cover contains all stratum samples, k={k}"), covered));
    }
    bounds.flush()?;

    // boundary split of the example field, and of a harmonic trace when n >= 2
    let sopts = SplitOptions { tau_harm: st.tau_harm, ..SplitOptions::default() };
    let ex = example_solution(a);
    let exg = FnField {
        dim: m,
        f: |p: &[f64]| ex(p),
        grad: |p: &[f64]| {
            let mut g = vec![0.0; m];
            g[0] = 2.0 * p[0];
            g[m - 1] = -2.0 * p[m - 1] / (1.0 + a);
            g
        },
    };
    let bw = Window::ball(vec![0.0; n], st.window);
    let hb = h / 2.0;
    let radii = log_radii(2.0 * hb, 0.2 * st.window / 0.5, 6);
    let restricted = BoundaryRestriction(&exg);
    let nonlocal = split_run(&restricted, n, st.window, hb, &sopts, out, "split_example.csv", SplitClass::Nonlocal)?;
    let all = nonlocal.0.len() == nonlocal.1;
    checks.push(Check::holds(9, "example boundary singular samples are all nonlocal", all && nonlocal.1 > 0));
    if !nonlocal.0.is_empty() {
        let pieces: Vec<Vec<Vec<f64>>> = nonlocal.0.into_iter().map(|p| vec![p]).collect();
        let c = tube_volume_of(&pieces, &radii, &bw, hb / 4.0, hb)?;
        checks.push(Check::at_least(9, "nonlocal part codimension", c.exponent, 0.8));
    }
    if n >= 2 {
        let saddle = FnField {
            dim: n,
            f: |p: &[f64]| p[0] * p[0] - p[1] * p[1],
            grad: |p: &[f64]| {
                let mut g = vec![0.0; p.len()];
                g[0] = 2.0 * p[0];
                g[1] = -2.0 * p[1];
                g
            },
        };
        let (pts, total) = split_run(&saddle, n, st.window, hb, &sopts, out, "split_harmonic.csv", SplitClass::Horizontal)?;
        checks.push(Check::holds(9, "harmonic trace singular samples are all horizontal", pts.len() == total && total > 0));
        if !pts.is_empty() {
            let pieces: Vec<Vec<Vec<f64>>> = pts.into_iter().map(|p| vec![p]).collect();
            let c = tube_volume_of(&pieces, &radii, &bw, hb / 4.0, hb)?;
            checks.push(Check::at_least(9, "horizontal part codimension", c.exponent, 1.8));
        }
    }
    save_checks(out, "stratify", &checks)?;
    Ok(checks)
}

/// Extracts boundary singular samples, splits them, writes the split CSV and
/// returns the samples of `class` with the total count.
#[allow(clippy::too_many_arguments)]
fn split_run(
    f: &(impl ScalarField + ?Sized),
    n: usize,
    window: f64,
    h: f64,
    opts: &SplitOptions,
    out: &Path,
    name: &str,
    class: SplitClass,
) -> Result<(Vec<Vec<f64>>, usize)> {
    let g = GriddedField::sample(f, BoxGrid::centered(n, window + 0.1, h, 0.37)?)?;
    let s = extract_singular(&g, Carrier::Boundary, &CriticalOptions::default())?;
    let pts: Vec<Vec<f64>> = s.cells.iter().map(|c| c.point.clone()).collect();
    let split = boundary_split(f, &pts, opts)?;
    let mut w = create(out, name)?;
    writeln!(w, "{},degree,ratio,class", coord_header("x", n).join(","))?;
    for smp in &split.samples {
        let tag = match smp.class {
            SplitClass::Horizontal => "horizontal",
            SplitClass::Nonlocal => "nonlocal",
            SplitClass::Unclassified => "unclassified",
        };
        writeln!(w, "{},{},{:.16e},{tag}", csv_row(smp.point.iter().copied()), smp.degree.unwrap_or(0), smp.ratio)?;
    }
    w.flush()?;
    Ok((split.points(class), pts.len()))
}

/// Aggregates the check files of a run directory into `report.txt`.
pub fn cmd_report(dir: &Path) -> Result<(String, bool)> {
    if !dir.is_dir() {
        return Err(invalid("dir", format!("{} is not a directory", dir.display())));
    }
    let checks = collect_checks(dir)?;
    let (table, ok) = report_table(&checks);
    let mut w = create(dir, "report.txt")?;
    w.write_all(table.as_bytes())?;
    w.flush()?;
    Ok((table, ok))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_lattice_has_fine_axis_points() {
        let p = stratum_samples(2, 5, 1.0 / 64.0);
        assert_eq!(p.len(), 25 + 32);
        assert!(p.contains(&vec![1.0 / 128.0, 0.0]));
        let q = stratum_samples(1, 33, 1.0 / 256.0);
        assert_eq!(q.len(), 33 + 30);
    }
}
