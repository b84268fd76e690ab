//! Command implementations. Each writes its artifacts under the output
//! directory and returns a process exit code.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use fracreg::barrier::{verify_barrier_bound, BarrierKind, BarrierSpec};
use fracreg::flap::FlapScheme;
use fracreg::report::theorem_main_report_with;
use fracreg::solver::{FracSolver, Obstacles, Solution};
use fracreg::upper_barrier::build_upper_barrier;
use fracreg::{Field, FieldKind, FracError, Grid, Result};

use crate::config::{ObstacleProfile, RunConfig};
use crate::output::{oscillation_svg, stamped_json, write_csv, write_json, Stamp};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAIL: i32 = 1;
pub const EXIT_NONCONVERGENCE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

pub struct Ctx {
    pub cfg: RunConfig,
    pub out: PathBuf,
    pub stamp: Stamp,
}

impl Ctx {
    fn grid(&self) -> Result<Arc<Grid>> {
        let domain = self.cfg.domain()?;
        Grid::from_domain(&domain, self.cfg.grid.h, self.cfg.grid.margin_cells)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

fn solution_rows<'a>(
    grid: &'a Grid,
    u: &'a [f64],
) -> impl Iterator<Item = Vec<f64>> + 'a {
    (0..grid.len()).map(move |idx| {
        let x = grid.node(idx);
        if grid.dim == 1 {
            vec![x[0], u[idx]]
        } else {
            vec![x[0], x[1], u[idx]]
        }
    })
}

fn write_solution_files(ctx: &Ctx, name: &str, sol: &Solution) -> Result<()> {
    let grid = &sol.u.grid;
    let header: &[&str] = if grid.dim == 1 { &["x", "u"] } else { &["x", "y", "u"] };
    write_csv(&ctx.path(&format!("{name}.csv")), &ctx.stamp, header, solution_rows(grid, &sol.u.values))?;
    write_csv(
        &ctx.path(&format!("{name}_residual_history.csv")),
        &ctx.stamp,
        &["iteration", "residual"],
        sol.history.iter().enumerate().map(|(i, r)| vec![i as f64, *r]),
    )?;
    let summary = serde_json::json!({
        "iterations": sol.iterations,
        "cg_iterations": sol.cg_iterations,
        "residual_norm": sol.residual_norm,
        "threshold": sol.threshold,
        "energy_initial": sol.energy_initial,
        "energy_final": sol.energy_final,
        "monotone_certificate": sol.monotone_certificate,
        "sup_abs_u": sol.u.max_abs(),
        "grid": {"h": grid.h, "n": grid.len()},
    });
    write_json(&ctx.path(&format!("{name}_summary.json")), &stamped_json(&ctx.stamp, &summary)?)
}

pub fn cmd_solve(ctx: &Ctx) -> Result<i32> {
    let grid = ctx.grid()?;
    let load = ctx.cfg.problem.f;
    let f = Field::dirichlet_from_fn(grid.clone(), |_| load);
    let solver = FracSolver::new(grid, ctx.cfg.solver_config()?)?;
    let sol = solver.solve(&f)?;
    write_solution_files(ctx, "solution", &sol)?;
    Ok(EXIT_OK)
}

pub fn cmd_torsion(ctx: &Ctx) -> Result<i32> {
    let grid = ctx.grid()?;
    let solver = FracSolver::new(grid, ctx.cfg.solver_config()?)?;
    let sol = solver.solve_torsion()?;
    write_solution_files(ctx, "torsion", &sol)?;
    Ok(EXIT_OK)
}

fn obstacle_field(
    ctx: &Ctx,
    grid: &Arc<Grid>,
    profile: &Option<ObstacleProfile>,
    default_value: f64,
) -> Result<Field> {
    let Some(profile) = profile else {
        return Ok(Field::free_from_fn(grid.clone(), |_| default_value));
    };
    let s = ctx.cfg.problem.s;
    match profile.kind.as_str() {
        "const" => {
            let v = profile.value;
            Ok(Field::free_from_fn(grid.clone(), |_| v))
        }
        "dist_pow" => {
            let c = profile.value;
            let g = grid.clone();
            let vals = (0..grid.len()).map(|i| c * g.dist[i].powf(s)).collect();
            Field::from_values(grid.clone(), vals, FieldKind::Free)
        }
        "torsion_frac" => {
            let sol = FracSolver::new(grid.clone(), ctx.cfg.solver_config()?)?.solve_torsion()?;
            Ok(sol.u.scaled(profile.value))
        }
        k => Err(FracError::Contract(format!("unknown obstacle profile kind {k}"))),
    }
}

pub fn cmd_obstacle(ctx: &Ctx) -> Result<i32> {
    let grid = ctx.grid()?;
    let lower = obstacle_field(ctx, &grid, &ctx.cfg.obstacle.lower, -1e30)?;
    let upper = obstacle_field(ctx, &grid, &ctx.cfg.obstacle.upper, 1e30)?;
    let obs = Obstacles::new(lower, upper)?;
    let solver = FracSolver::new(grid, ctx.cfg.solver_config()?)?;
    let sol = solver.solve_obstacle(&obs)?;
    write_solution_files(ctx, "obstacle", &sol)?;
    Ok(EXIT_OK)
}

pub fn cmd_barrier(ctx: &Ctx, refine: u32) -> Result<i32> {
    let domain = ctx.cfg.domain()?;
    let bc = &ctx.cfg.barrier;
    let kind = match bc.kind.as_str() {
        "bump-lower" => BarrierKind::BumpLower,
        "bump-upper" => BarrierKind::BumpUpper,
        k => return Err(FracError::Contract(format!("unknown barrier kind {k}"))),
    };
    let anchor = domain.boundary_point(bc.anchor_t);
    let spec = BarrierSpec::new(kind, 0.0, bc.r, anchor, 1.0, &domain)?;
    let mut lambdas = vec![0.0];
    for k in 1..=bc.lambda_steps {
        let l = bc.lambda_max * k as f64 / bc.lambda_steps as f64;
        lambdas.push(l);
        lambdas.push(-l);
    }
    lambdas.sort_by(f64::total_cmp);
    let base_h = bc.r / bc.base_cells as f64 / f64::powi(2.0, refine as i32);
    let scheme = FlapScheme { base_h, ring_cells: 32, tol: 1e-6 };
    let rep = verify_barrier_bound(
        &spec,
        &domain,
        ctx.cfg.problem.p,
        ctx.cfg.problem.s,
        scheme,
        &lambdas,
    )?;
    write_csv(
        &ctx.path("barrier_sweep.csv"),
        &ctx.stamp,
        &["lambda", "k_sup", "ratio"],
        rep.rows.iter().map(|r| vec![r.lambda, r.k_sup, r.ratio]),
    )?;
    let mut body = serde_json::json!({
        "sweep": rep,
    });
    if bc.upper_obstacle {
        let grid = ctx.grid()?;
        let nu = domain.inner_normal(anchor)?;
        let xbar = [anchor[0] + 0.25 * bc.r * nu[0], anchor[1] + 0.25 * bc.r * nu[1]];
        let ub = build_upper_barrier(&domain, grid, anchor, xbar, bc.r, &ctx.cfg.solver_config()?)?;
        body["upper_obstacle"] = serde_json::to_value(&ub.report)
            .map_err(|e| FracError::Contract(format!("serialize: {e}")))?;
    }
    write_json(&ctx.path("barrier_constants.json"), &stamped_json(&ctx.stamp, &body)?)?;
    Ok(EXIT_OK)
}

pub fn cmd_diagnose(ctx: &Ctx) -> Result<i32> {
    let domain = ctx.cfg.domain()?;
    let grid = ctx.grid()?;
    let load = ctx.cfg.problem.f;
    let f = Field::dirichlet_from_fn(grid.clone(), |_| load);
    let rep = theorem_main_report_with(
        &domain,
        &f,
        &ctx.cfg.solver_config()?,
        grid.clone(),
        ctx.cfg.diagnose.anchors,
        ctx.cfg.diagnose.levels,
    )?;
    write_json(&ctx.path("diagnostics.json"), &stamped_json(&ctx.stamp, &rep.report)?)?;
    for (k, anchor) in rep.report.anchors.iter().enumerate() {
        let svg = oscillation_svg(&ctx.stamp, &anchor.trace);
        std::fs::write(ctx.path(&format!("oscillation_anchor{k}.svg")), svg)
            .map_err(|e| FracError::Contract(format!("write svg: {e}")))?;
    }
    // solution quotient snapshot alongside the report
    let v = rep.quotient_field;
    write_csv(
        &ctx.path("quotient.csv"),
        &ctx.stamp,
        if grid.dim == 1 { &["x", "v"] } else { &["x", "y", "v"] },
        (0..grid.len()).filter(|&i| v.included[i]).map(|i| {
            let x = grid.node(i);
            if grid.dim == 1 {
                vec![x[0], v.values[i]]
            } else {
                vec![x[0], x[1], v.values[i]]
            }
        }),
    )?;
    Ok(EXIT_OK)
}

pub fn cmd_verify(ctx: &Ctx) -> Result<i32> {
    let vc = &ctx.cfg.verify;
    let results =
        fracreg::acceptance::run(&vc.criteria, vc.tolerance_scale, ctx.cfg.output.seed);
    let mut all_pass = true;
    println!("acceptance results (tolerance scale {}):", vc.tolerance_scale);
    for r in &results {
        println!("{}", r.line());
        all_pass &= r.pass;
    }
    let body = serde_json::json!({
        "tolerance_scale": vc.tolerance_scale,
        "all_pass": all_pass,
        "criteria": results,
    });
    write_json(&ctx.path("verify.json"), &stamped_json(&ctx.stamp, &body)?)?;
    Ok(if all_pass { EXIT_OK } else { EXIT_VERIFY_FAIL })
}

pub fn exit_code_for(err: &FracError) -> i32 {
    match err {
        FracError::Nonconvergence { .. } => EXIT_NONCONVERGENCE,
        FracError::Contract(_) => EXIT_CONFIG,
        _ => EXIT_NONCONVERGENCE,
    }
}

pub fn ensure_out_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path)
        .map_err(|e| FracError::Contract(format!("create output dir {path:?}: {e}")))
}
