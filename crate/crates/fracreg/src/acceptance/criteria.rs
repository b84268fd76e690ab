//! The individual acceptance checks. Each returns a `CriterionResult` whose
//! tolerances are pinned here; `tol_scale` multiplies them (1.0 in release
//! runs, smaller values tighten every gate for tamper fixtures).

use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::CriterionResult;
use crate::assemble::Assembler;
use crate::barrier::{verify_barrier_bound, BarrierKind, BarrierSpec};
use crate::checks::{check_comparison, check_hopf};
use crate::error::Result;
use crate::flap::{reach_for, FlapScheme, FlapTables};
use crate::geometry::{dist2, Domain, NormalBall, Point};
use crate::grid::{Field, FieldKind, Grid};
use crate::quotient::{holder_fit, synthetic_quotient};
use crate::report::theorem_main_report;
use crate::series::series_s;
use crate::solver::{FracSolver, Obstacles, SolverConfig};
use crate::upper_barrier::build_upper_barrier;

fn result(id: usize, name: &str, start: Instant, pass: bool, details: String) -> CriterionResult {
    CriterionResult {
        id,
        name: name.into(),
        pass,
        details,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn fail(id: usize, name: &str, start: Instant, err: impl std::fmt::Display) -> CriterionResult {
    result(id, name, start, false, format!("error: {err}"))
}

fn interval_grid(h: f64) -> Result<Arc<Grid>> {
    Grid::from_domain(&Domain::interval(0.0, 1.0)?, h, 4)
}

/// 1. Homogeneity of the quotient diagnostics under f -> 2^{p-1} f.
pub fn c1_homogeneity(tol_scale: f64, _seed: u64) -> CriterionResult {
    let start = Instant::now();
    let name = "homogeneity";
    let tol = 1e-8 * tol_scale;
    let mut details = String::new();
    let mut pass = true;
    let cases: Vec<(f64, Domain, f64)> = vec![
        (2.0, Domain::interval(0.0, 1.0).unwrap(), 1.0 / 256.0),
        (3.0, Domain::interval(0.0, 1.0).unwrap(), 1.0 / 256.0),
        (2.0, Domain::ball([0.0, 0.0], 1.0).unwrap(), 1.0 / 64.0),
        (3.0, Domain::ball([0.0, 0.0], 1.0).unwrap(), 1.0 / 64.0),
    ];
    for (p, domain, h) in cases {
        let case_start = Instant::now();
        let run = || -> Result<(f64, f64)> {
            let grid = Grid::from_domain(&domain, h, 4)?;
            let cfg = SolverConfig::new(p, 0.5);
            let f = Field::dirichlet_from_fn(grid.clone(), |_| 1.0);
            let rep = theorem_main_report(&domain, &f, &cfg, grid)?;
            Ok((rep.sup_ratio, rep.alpha_max_diff))
        };
        match run() {
            Ok((ratio, alpha_diff)) => {
                let secs = case_start.elapsed().as_secs_f64();
                let ok = (ratio - 2.0).abs() <= 2.0 * tol && alpha_diff <= tol && secs <= 120.0;
                pass &= ok;
                details.push_str(&format!(
                    "[p={p} N={} ratio-2={:.2e} dalpha={:.2e} {:.0}s] ",
                    domain.dim(),
                    ratio - 2.0,
                    alpha_diff,
                    secs
                ));
            }
            Err(e) => {
                pass = false;
                details.push_str(&format!("[p={p} error: {e}] "));
            }
        }
    }
    result(1, name, start, pass, details)
}

/// 2. Explicit p = 2 profile against the adaptive-quadrature constant.
pub fn c2_explicit_profile(tol_scale: f64, _seed: u64) -> CriterionResult {
    let start = Instant::now();
    let name = "explicit_profile";
    let mut details = String::new();
    let mut pass = true;
    for &s in &[0.3, 0.5, 0.7] {
        let run = || -> Result<(f64, f64)> {
            let c1d = crate::reference::flap_profile_p2_at_zero(s, 1e-9)?;
            let mut errs = Vec::new();
            for &h in &[1.0 / 256.0, 1.0 / 512.0] {
                let grid = interval_grid(h)?;
                let cfg = SolverConfig::new(2.0, s);
                let sol = FracSolver::new(grid.clone(), cfg)?.solve_torsion()?;
                let mut worst = 0.0f64;
                let mut scale = 0.0f64;
                for idx in 0..grid.len() {
                    if !grid.interior[idx] {
                        continue;
                    }
                    let x = grid.node(idx)[0];
                    let exact = (1.0 - x * x).max(0.0).powf(s) / c1d;
                    scale = scale.max(exact.abs());
                    worst = worst.max((sol.u.values[idx] - exact).abs());
                }
                errs.push(worst / scale);
            }
            Ok((errs[0], errs[1]))
        };
        match run() {
            Ok((e256, e512)) => {
                let ok = e256 <= 0.05 * tol_scale && e512 < e256;
                pass &= ok;
                details.push_str(&format!("[s={s} err256={e256:.4} err512={e512:.4}] "));
            }
            Err(e) => {
                pass = false;
                details.push_str(&format!("[s={s} error: {e}] "));
            }
        }
    }
    result(2, name, start, pass, details)
}

/// 3. Torsion scaling u_R(Rx) = R^{p's} u_1(x) at matched (similar) lattices.
pub fn c3_torsion_scaling(tol_scale: f64, _seed: u64) -> CriterionResult {
    let start = Instant::now();
    let name = "torsion_scaling";
    let s = 0.5;
    let big_r = 2.0;
    let mut details = String::new();
    let mut pass = true;
    for &p in &[2.0, 3.0] {
        for dim in [1usize, 2] {
            let run = || -> Result<f64> {
                let (dom1, dom2, h1) = if dim == 1 {
                    (Domain::interval(0.0, 1.0)?, Domain::interval(0.0, big_r)?, 1.0 / 256.0)
                } else {
                    (
                        Domain::ball([0.0, 0.0], 1.0)?,
                        Domain::ball([0.0, 0.0], big_r)?,
                        1.0 / 48.0,
                    )
                };
                let g1 = Grid::from_domain(&dom1, h1, 4)?;
                let g2 = Grid::from_domain(&dom2, big_r * h1, 4)?;
                let cfg = SolverConfig::new(p, s);
                let u1 = FracSolver::new(g1.clone(), cfg)?.solve_torsion()?.u;
                let u2 = FracSolver::new(g2.clone(), cfg)?.solve_torsion()?.u;
                if g1.shape != g2.shape {
                    return Err(crate::error::FracError::Contract(
                        "scaled grids are not index-aligned".into(),
                    ));
                }
                let expo = p / (p - 1.0) * s;
                let scale = big_r.powf(expo);
                let max_u1 = u1.max_abs();
                let mut worst = 0.0f64;
                for idx in 0..g1.len() {
                    if g1.interior[idx] {
                        worst = worst.max((u2.values[idx] - scale * u1.values[idx]).abs());
                    }
                }
                Ok(worst / max_u1)
            };
            match run() {
                Ok(rel) => {
                    let ok = rel <= 0.05 * tol_scale;
                    pass &= ok;
                    details.push_str(&format!("[p={p} N={dim} dev={rel:.2e}] "));
                }
                Err(e) => {
                    pass = false;
                    details.push_str(&format!("[p={p} N={dim} error: {e}] "));
                }
            }
        }
    }
    result(3, name, start, pass, details)
}

/// 4. Comparison principle campaign on random monotone load pairs.
pub fn c4_comparison_campaign(tol_scale: f64, seed: u64) -> CriterionResult {
    let start = Instant::now();
    let name = "comparison";
    let mut details = String::new();
    let mut pass = true;
    let segments = 8;
    for &p in &[2.0, 3.0] {
        let run = || -> Result<(usize, f64)> {
            let grid = interval_grid(1.0 / 128.0)?;
            let cfg = SolverConfig::new(p, 0.5);
            let solver = FracSolver::new(grid.clone(), cfg)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (p as u64) << 32);
            let mut passed = 0usize;
            let mut worst = f64::INFINITY;
            for _ in 0..100 {
                let lo: Vec<f64> = (0..segments).map(|_| rng.random_range(-1.0..1.0)).collect();
                let hi: Vec<f64> = lo
                    .iter()
                    .map(|&v| v + rng.random_range(0.0..(1.0 - v).max(1e-9)))
                    .collect();
                let seg = |x: f64, vals: &[f64]| {
                    let t = ((x + 1.0) / 2.0 * segments as f64).floor().clamp(0.0, segments as f64 - 1.0);
                    vals[t as usize]
                };
                let f1 = Field::dirichlet_from_fn(grid.clone(), |x| seg(x[0], &lo));
                let f2 = Field::dirichlet_from_fn(grid.clone(), |x| seg(x[0], &hi));
                let u1 = solver.solve(&f1)?;
                let u2 = solver.solve(&f2)?;
                let rep = check_comparison(&u1.u, &u2.u, &f1, &f2, &cfg)?;
                let ok = rep.value >= -rep.tolerance * tol_scale;
                worst = worst.min(rep.value);
                if ok {
                    passed += 1;
                }
            }
            Ok((passed, worst))
        };
        match run() {
            Ok((passed, worst)) => {
                pass &= passed == 100;
                details.push_str(&format!("[p={p} {passed}/100 min_diff={worst:.2e}] "));
            }
            Err(e) => {
                pass = false;
                details.push_str(&format!("[p={p} error: {e}] "));
            }
        }
    }
    result(4, name, start, pass, details)
}

/// 5. Superposition identity on random (w, v, ball) configurations.
pub fn c5_superposition(tol_scale: f64, seed: u64) -> CriterionResult {
    let start = Instant::now();
    let name = "superposition";
    let run = || -> Result<(usize, f64)> {
        let domain = Domain::ball([0.0, 0.0], 2.0)?;
        let s = 0.5;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5171);
        let mut worst = 0.0f64;
        let mut passed = 0usize;
        for cfgi in 0..50 {
            let p = if cfgi % 2 == 0 { 2.0 } else { 3.0 };
            let anchor_t: f64 = rng.random_range(0.0..1.0);
            let anchor = domain.boundary_point(anchor_t);
            let r: f64 = rng.random_range(0.15..0.24);
            let ball = NormalBall::new(&domain, anchor, r)?;
            let c1: f64 = rng.random_range(0.2..1.5);
            let c2: f64 = rng.random_range(-0.8..0.8);
            let mu = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let width: f64 = rng.random_range(0.3..1.0);
            let amp: f64 = rng.random_range(-1.0..1.0);
            let dom_w = domain;
            let w = move |x: Point| {
                let g = (-((x[0] - mu[0]).powi(2) + (x[1] - mu[1]).powi(2)) / (width * width)).exp();
                dom_w.distance(x).powf(s) * (c1 + c2 * g)
            };
            let dom_v = domain;
            let v = move |x: Point| {
                let g = (-((x[0] + mu[1]).powi(2) + (x[1] - mu[0]).powi(2)) / (width * width)).exp();
                w(x) + amp * dom_v.distance(x).powf(s) * g
            };
            let scheme = FlapScheme::with_base_h(r / 64.0);
            let nu = domain.inner_normal(anchor)?;
            for &dep in &[3.0 * scheme.base_h, 0.3 * r] {
                let x = [anchor[0] + dep * nu[0], anchor[1] + dep * nu[1]];
                if dist2(x, ball.center) <= ball.radius {
                    continue;
                }
                let tables = FlapTables::build(2, p, s, scheme, reach_for(&domain, x))?;
                let (total, _corr, direct) = tables.superpose_parts(&w, &v, &ball, x);
                let denom = direct.abs().max(total.abs()).max(1e-9);
                let rel = (total - direct).abs() / denom;
                worst = worst.max(rel);
                if rel <= 1e-6 * tol_scale {
                    passed += 1;
                }
            }
        }
        Ok((passed, worst))
    };
    match run() {
        Ok((passed, worst)) => {
            let pass = worst <= 1e-6 * tol_scale;
            result(5, name, start, pass, format!("{passed} points, worst rel dev {worst:.2e}"))
        }
        Err(e) => fail(5, name, start, e),
    }
}

/// 6. Discrete Lewy-Stampacchia inequality on smooth obstacle instances.
pub fn c6_lewy_stampacchia(tol_scale: f64, seed: u64) -> CriterionResult {
    let start = Instant::now();
    let name = "lewy_stampacchia";
    let run = || -> Result<(usize, f64)> {
        let grid = interval_grid(1.0 / 128.0)?;
        let hn = grid.h;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x15A3);
        let mut worst = 0.0f64;
        let mut instances_ok = 0usize;
        for inst in 0..20 {
            let p = if inst % 2 == 0 { 2.0 } else { 3.0 };
            let cfg = SolverConfig::new(p, 0.5);
            let a: f64 = rng.random_range(0.2..1.0);
            let c: f64 = rng.random_range(-0.5..0.5);
            let w: f64 = rng.random_range(0.25..0.6);
            let lift: f64 = rng.random_range(0.05..0.3);
            let gap: f64 = rng.random_range(0.1..0.6);
            // phi <= 0 outside the domain, psi >= 0 there: required for the
            // discrete inequality (zero exterior data must stay admissible).
            let phi_fn = move |x: Point| {
                let bump = (-((x[0] - c) / w).powi(2)).exp();
                a * (1.0 - x[0] * x[0]) * bump - lift
            };
            let psi_fn = move |x: Point| phi_fn(x).max(0.0) + gap * (1.0 - 0.3 * (x[0] * 2.0).sin());
            let lower = Field::free_from_fn(grid.clone(), phi_fn);
            let upper = Field::free_from_fn(grid.clone(), psi_fn);
            let obs = Obstacles::new(lower.clone(), upper.clone())?;
            let solver = FracSolver::new(grid.clone(), cfg)?;
            let sol = solver.solve_obstacle(&obs)?;
            let asm = &solver.asm;
            let tol_ls = 10.0 * (sol.threshold / hn + 1e-12) * tol_scale;
            let mut inst_ok = true;
            for idx in 0..grid.len() {
                if !grid.interior[idx] {
                    continue;
                }
                let lu = asm.flap_at_node(&sol.u.values, idx);
                let lphi = asm.flap_at_node(&lower.values, idx);
                let lpsi = asm.flap_at_node(&upper.values, idx);
                let lo = lpsi.min(0.0) - tol_ls;
                let hi = lphi.max(0.0) + tol_ls;
                let viol = (lo - lu).max(lu - hi).max(0.0);
                worst = worst.max(viol);
                if viol > 0.0 {
                    inst_ok = false;
                }
            }
            if inst_ok {
                instances_ok += 1;
            }
        }
        Ok((instances_ok, worst))
    };
    match run() {
        Ok((ok, worst)) => {
            let pass = ok == 20;
            result(6, name, start, pass, format!("{ok}/20 instances, worst violation {worst:.2e}"))
        }
        Err(e) => fail(6, name, start, e),
    }
}

/// 7. Hopf positivity of torsion quotients, stable under refinement.
pub fn c7_hopf(tol_scale: f64, _seed: u64) -> CriterionResult {
    let start = Instant::now();
    let name = "hopf";
    let mut details = String::new();
    let mut pass = true;
    let stability = 1.0 + tol_scale.min(1.0);
    let cases: Vec<(f64, Domain, f64)> = vec![
        (2.0, Domain::interval(0.0, 1.0).unwrap(), 1.0 / 256.0),
        (3.0, Domain::interval(0.0, 1.0).unwrap(), 1.0 / 256.0),
        (2.0, Domain::ball([0.0, 0.0], 1.0).unwrap(), 1.0 / 32.0),
    ];
    for (p, domain, h) in cases {
        let run = || -> Result<(f64, f64)> {
            let cfg = SolverConfig::new(p, 0.5);
            let mut c = Vec::new();
            for &hh in &[h, h / 2.0] {
                let grid = Grid::from_domain(&domain, hh, 4)?;
                let sol = FracSolver::new(grid, cfg)?.solve_torsion()?;
                c.push(check_hopf(&sol.u, cfg.s).value);
            }
            Ok((c[0], c[1]))
        };
        match run() {
            Ok((c0, c1)) => {
                let ratio = c1 / c0;
                let ok = c0 > 0.0 && c1 > 0.0 && ratio <= stability && ratio >= 1.0 / stability;
                pass &= ok;
                details.push_str(&format!("[p={p} N={} c={c0:.4}->{c1:.4}] ", domain.dim()));
            }
            Err(e) => {
                pass = false;
                details.push_str(&format!("[p={p} error: {e}] "));
            }
        }
    }
    result(7, name, start, pass, details)
}

/// 8. Global subsolution: torsion operator values stay below 1 everywhere.
pub fn c8_global_subsolution(tol_scale: f64, seed: u64) -> CriterionResult {
    let start = Instant::now();
    let name = "global_subsolution";
    let mut details = String::new();
    let mut pass = true;
    let tol_q = 1e-6 * tol_scale;
    let cases: Vec<(Domain, f64)> = vec![
        (Domain::interval(0.0, 1.0).unwrap(), 1.0 / 256.0),
        (Domain::ball([0.0, 0.0], 1.0).unwrap(), 1.0 / 64.0),
    ];
    for (domain, h) in cases {
        let run = || -> Result<(f64, usize)> {
            let grid = Grid::from_domain(&domain, h, 4)?;
            let cfg = SolverConfig::new(2.0, 0.5);
            let solver = FracSolver::new(grid.clone(), cfg)?;
            let sol = solver.solve_torsion()?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6105);
            let mut nodes = Vec::new();
            let interior: Vec<usize> = (0..grid.len())
                .filter(|&i| grid.interior[i] && grid.dist[i] >= 2.0 * grid.h)
                .collect();
            let exterior: Vec<usize> = (0..grid.len()).filter(|&i| !grid.interior[i]).collect();
            for _ in 0..120 {
                nodes.push(interior[rng.random_range(0..interior.len())]);
            }
            for _ in 0..80 {
                nodes.push(exterior[rng.random_range(0..exterior.len())]);
            }
            let rep =
                crate::checks::check_global_subsolution(&solver, &sol.u, &nodes, tol_q)?;
            Ok((rep.value, nodes.len()))
        };
        match run() {
            Ok((max_val, n)) => {
                let ok = max_val <= 1.0 + tol_q;
                pass &= ok;
                details.push_str(&format!("[N={} max={max_val:.8} pts={n}] ", domain.dim()));
            }
            Err(e) => {
                pass = false;
                details.push_str(&format!("[error: {e}] "));
            }
        }
    }
    result(8, name, start, pass, details)
}

/// 9. Barrier bound sweep (bump family) and the double-obstacle barrier.
pub fn c9_barriers(tol_scale: f64, _seed: u64) -> CriterionResult {
    let start = Instant::now();
    let name = "barriers";
    let stability = 1.0 + tol_scale.min(1.0);
    let mut details = String::new();
    let mut pass = true;

    // Bump-barrier lambda sweep on a 2d ball, two quadrature refinements.
    let sweep = || -> Result<(f64, f64, f64)> {
        let domain = Domain::ball([0.0, 0.0], 2.0)?;
        let r = 0.2;
        let spec = BarrierSpec::new(BarrierKind::BumpLower, 0.0, r, [2.0, 0.0], 1.0, &domain)?;
        let lambdas =
            [-0.5, -0.25, -0.125, -0.0625, 0.0, 0.0625, 0.125, 0.25, 0.5];
        let coarse = verify_barrier_bound(
            &spec,
            &domain,
            2.0,
            0.5,
            FlapScheme { base_h: r / 128.0, ring_cells: 32, tol: 1e-6 },
            &lambdas,
        )?;
        let fine = verify_barrier_bound(
            &spec,
            &domain,
            2.0,
            0.5,
            FlapScheme { base_h: r / 256.0, ring_cells: 32, tol: 1e-6 },
            &lambdas,
        )?;
        Ok((coarse.fitted_c6, fine.fitted_c6, coarse.lambda1))
    };
    match sweep() {
        Ok((c_coarse, c_fine, lambda1)) => {
            let ratio = c_coarse / c_fine;
            let ok = c_coarse.is_finite()
                && c_fine.is_finite()
                && ratio <= stability
                && ratio >= 1.0 / stability;
            pass &= ok;
            details.push_str(&format!(
                "[sweep C6={c_fine:.3} ratio={ratio:.3} lambda1={lambda1}] "
            ));
        }
        Err(e) => {
            pass = false;
            details.push_str(&format!("[sweep error: {e}] "));
        }
    }

    // Double-obstacle barrier at two resolutions, both p = 2 and p = 3.
    for &p in &[2.0, 3.0] {
        let build = |h: f64| -> Result<crate::upper_barrier::UpperBarrierReport> {
            let domain = Domain::interval(0.0, 1.0)?;
            let grid = Grid::from_domain(&domain, h, 4)?;
            let r = 0.1;
            let cfg = SolverConfig::new(p, 0.5);
            let ub = build_upper_barrier(
                &domain,
                grid,
                [-1.0, 0.0],
                [-1.0 + r / 4.0, 0.0],
                r,
                &cfg,
            )?;
            Ok(ub.report)
        };
        match (build(1.0 / 512.0), build(1.0 / 1024.0)) {
            (Ok(a), Ok(b)) => {
                let cratio = a.c_lower / b.c_lower;
                let ok = a.v_at_xbar == 0.0
                    && b.v_at_xbar == 0.0
                    && a.v_min >= 0.0
                    && b.v_min >= 0.0
                    && a.c_lower > 0.0
                    && b.c_lower > 0.0
                    && a.c_sup.is_finite()
                    && cratio <= stability
                    && cratio >= 1.0 / stability
                    && a.feasible
                    && b.feasible;
                pass &= ok;
                details.push_str(&format!(
                    "[obstacle p={p} c_low={:.3}->{:.3} c_sup={:.3} flapR^s={:.2}] ",
                    a.c_lower, b.c_lower, b.c_sup, b.c_flap
                ));
            }
            (a, b) => {
                pass = false;
                let msg = a.err().or(b.err()).map(|e| e.to_string()).unwrap_or_default();
                details.push_str(&format!("[obstacle p={p} error: {msg}] "));
            }
        }
    }
    result(9, name, start, pass, details)
}

/// 10. Fit calibration on synthetic power quotients and gradient consistency.
pub fn c10_fit_calibration(tol_scale: f64, seed: u64) -> CriterionResult {
    let start = Instant::now();
    let name = "fit_calibration";
    let mut details = String::new();
    let mut pass = true;
    let run_fit = || -> Result<Vec<(f64, f64)>> {
        let grid = interval_grid(1.0 / 512.0)?;
        let a = -1.0 + grid.h;
        let mut out = Vec::new();
        for &beta in &[0.2, 0.5, 0.8] {
            let q = synthetic_quotient(grid.clone(), move |x| (x[0] - a).abs().powf(beta));
            let r0 = crate::report::default_r0(&grid);
            let tr = holder_fit(&q, [-1.0, 0.0], r0, 3, 1e-9)?;
            out.push((beta, tr.alpha));
        }
        Ok(out)
    };
    match run_fit() {
        Ok(fits) => {
            for (beta, alpha) in fits {
                let ok = (alpha - beta).abs() <= 0.05 * tol_scale;
                pass &= ok;
                details.push_str(&format!("[beta={beta} alpha={alpha:.3}] "));
            }
        }
        Err(e) => {
            pass = false;
            details.push_str(&format!("[fit error: {e}] "));
        }
    }

    let grad_check = || -> Result<f64> {
        let grid = interval_grid(1.0 / 128.0)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x10CA);
        let mut worst = 0.0f64;
        for &p in &[2.0, 3.0] {
            let asm = Assembler::new(grid.clone(), p, 0.5)?;
            let mut u = Field::zeros(grid.clone(), FieldKind::Dirichlet);
            let mut phi = Field::zeros(grid.clone(), FieldKind::Dirichlet);
            for idx in 0..grid.len() {
                if grid.interior[idx] {
                    u.values[idx] = rng.random_range(-1.0..1.0);
                    phi.values[idx] = rng.random_range(-1.0..1.0);
                }
            }
            let g = asm.grad(&u.values);
            let gphi = crate::assemble::dot(&g, &phi.values);
            for &delta in &[1e-4, 1e-5] {
                let up: Vec<f64> =
                    u.values.iter().zip(&phi.values).map(|(a, b)| a + delta * b).collect();
                let um: Vec<f64> =
                    u.values.iter().zip(&phi.values).map(|(a, b)| a - delta * b).collect();
                let fd = (asm.energy(&up)? - asm.energy(&um)?) / (2.0 * delta);
                worst = worst.max((fd - gphi).abs() / gphi.abs().max(1e-12));
            }
        }
        Ok(worst)
    };
    match grad_check() {
        Ok(worst) => {
            let ok = worst <= 1e-5 * tol_scale;
            pass &= ok;
            details.push_str(&format!("[grad fd dev={worst:.2e}] "));
        }
        Err(e) => {
            pass = false;
            details.push_str(&format!("[grad error: {e}] "));
        }
    }
    result(10, name, start, pass, details)
}

/// 11. The dyadic series: smallness near 0 and monotonicity in the exponent.
pub fn c11_series(tol_scale: f64, _seed: u64) -> CriterionResult {
    let start = Instant::now();
    let name = "series";
    let run = || -> Result<(f64, bool)> {
        let tiny = series_s(1.0, 1e-6, 0.5, 10_000)?.partial;
        let mut last = -1.0;
        let mut monotone = true;
        for k in 1..=10 {
            let a = 0.045 * k as f64;
            let v = series_s(1.0, a, 0.5, 5_000)?.partial;
            if v <= last {
                monotone = false;
            }
            last = v;
        }
        Ok((tiny, monotone))
    };
    match run() {
        Ok((tiny, monotone)) => {
            let pass = tiny < 1e-4 * tol_scale && monotone;
            result(11, name, start, pass, format!("S_1(1e-6)={tiny:.2e} monotone={monotone}"))
        }
        Err(e) => fail(11, name, start, e),
    }
}
