//! Upper barrier built from a double obstacle problem, in four steps:
//! the opened annulus region, a scaled torsion function of it as the lower
//! obstacle, a scaled reflected small-ball torsion profile pinned to zero at
//! the marked point as the upper obstacle, and the energy minimizer between
//! them, extended below by a multiple of d^s outside D_{3R}.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{FracError, Result};
use crate::geometry::{dist2, Domain, Point};
use crate::grid::{Field, FieldKind, Grid};
use crate::opened::{opened_region, ParentSet};
use crate::solver::{FracSolver, Obstacles, SolverConfig};

#[derive(Debug, Clone, Serialize)]
pub struct UpperBarrierReport {
    pub scale_r: f64,
    pub lambda: f64,
    pub v_at_xbar: f64,
    pub v_min: f64,
    /// sup v / R^s.
    pub c_sup: f64,
    /// min of v / d^s over D_{3R} \ D_R (nodes with d >= h).
    pub c_lower: f64,
    /// sup of |operator value| * R^s over D_{2R} nodes with d >= 2h.
    pub c_flap: f64,
    pub feasible: bool,
}

pub struct UpperBarrier {
    pub v: Field,
    pub xbar: Point,
    pub report: UpperBarrierReport,
}

/// Builds the barrier on the given grid. `anchor` is the boundary point the
/// construction is centered on; `xbar` is snapped to the nearest grid node of
/// D_{R/2}(anchor).
pub fn build_upper_barrier(
    domain: &Domain,
    grid: Arc<Grid>,
    anchor: Point,
    xbar_hint: Point,
    scale_r: f64,
    cfg: &SolverConfig,
) -> Result<UpperBarrier> {
    let rho = domain.interior_sphere_radius();
    if !(scale_r > 0.0 && scale_r < rho / 4.0) {
        return Err(FracError::Precondition(format!(
            "upper barrier needs 0 < R < rho/4 = {:.6}",
            rho / 4.0
        )));
    }
    let xbar_idx = grid.nearest_node(xbar_hint);
    let xbar = grid.node(xbar_idx);
    if !grid.interior[xbar_idx] || dist2(xbar, anchor) >= 0.5 * scale_r {
        return Err(FracError::Precondition(
            "marked point must be an interior node of D_{R/2}(anchor)".into(),
        ));
    }
    let (p, s) = (cfg.p, cfg.s);
    let sp1 = s / (p - 1.0);

    // Step 1 (geometry): opened annulus between 3R/4 and 4R around the anchor.
    let parent = ParentSet::Annulus {
        center: anchor,
        inner: 0.75 * scale_r,
        outer: 4.0 * scale_r,
    };
    let region = opened_region(domain, &parent, scale_r / 8.0, grid.clone())?;

    // Step 2 (lower obstacle): scaled torsion function of the opened region.
    let torsion_region = FracSolver::with_mask(grid.clone(), region.mask.clone(), *cfg)?
        .solve_torsion()?;
    let scale_lower = scale_r.powf(-sp1);
    let lower = torsion_region.u.scaled(scale_lower);

    // Step 3 (upper obstacle): reflected small-ball torsion profile, pinned
    // to zero at xbar, scaled up until it dominates the lower obstacle.
    let sub_r = scale_r / 8.0;
    let sub_domain = if domain.dim() == 1 {
        Domain::interval(0.0, sub_r)?
    } else {
        Domain::ball([0.0, 0.0], sub_r)?
    };
    let sub_h = sub_r / 32.0;
    let sub_grid = Grid::from_domain(&sub_domain, sub_h, 4)?;
    let sub_torsion = FracSolver::new(sub_grid.clone(), *cfg)?.solve_torsion()?;
    let origin_idx = sub_grid
        .locate([0.0, 0.0])
        .ok_or_else(|| FracError::Numeric("sub-grid origin off lattice".into()))?;
    let sub_max = sub_torsion.u.values[origin_idx];
    let profile = |x: Point| {
        let z = [x[0] - xbar[0], if domain.dim() == 1 { 0.0 } else { x[1] - xbar[1] }];
        sub_max - sub_torsion.u.interp(z)
    };
    let mut lambda = 1.0f64;
    let upper_base = Field::free_from_fn(grid.clone(), |x| scale_lower * profile(x));
    loop {
        let feasible = (0..grid.len()).all(|i| {
            !grid.interior[i] || lambda * upper_base.values[i] >= lower.values[i]
        });
        if feasible {
            break;
        }
        lambda *= 2.0;
        if lambda > 1e15 {
            return Err(FracError::Construction(
                "upper obstacle never dominates the lower one".into(),
            ));
        }
    }
    let upper = upper_base.scaled(lambda);

    // Step 4 (the barrier): double obstacle minimizer, extended outside
    // D_{3R} by the measured multiple of d^s.
    let lower_free = Field::from_values(grid.clone(), lower.values.clone(), FieldKind::Free)?;
    let obs = Obstacles::new(lower_free, upper.clone())?;
    let sol = FracSolver::new(grid.clone(), *cfg)?.solve_obstacle(&obs)?;
    let vtilde = sol.u;

    let mut feasible = true;
    for i in 0..grid.len() {
        if grid.interior[i]
            && !(lower.values[i] - 1e-12 <= vtilde.values[i]
                && vtilde.values[i] <= upper.values[i] + 1e-12)
        {
            feasible = false;
        }
    }

    // Measured lower constant on D_{3R} \ D_R.
    let mut c_tilde = f64::INFINITY;
    for i in 0..grid.len() {
        if !grid.interior[i] || grid.dist[i] < grid.h {
            continue;
        }
        let r = dist2(grid.node(i), anchor);
        if r >= scale_r && r < 3.0 * scale_r {
            c_tilde = c_tilde.min(vtilde.values[i] / grid.dist[i].powf(s));
        }
    }
    if !c_tilde.is_finite() {
        return Err(FracError::Resolution(
            "no nodes resolve D_{3R} \\ D_R for the extension constant".into(),
        ));
    }

    let mut v = vtilde.values.clone();
    for i in 0..grid.len() {
        if grid.interior[i] && dist2(grid.node(i), anchor) >= 3.0 * scale_r {
            v[i] = v[i].max(c_tilde.max(0.0) * grid.dist[i].powf(s));
        }
    }
    let v = Field::from_values(grid.clone(), v, FieldKind::Dirichlet)?;

    // Operator bound over D_{2R} (report).
    let asm = crate::assemble::Assembler::new(grid.clone(), p, s)?;
    let mut c_flap = 0.0f64;
    for i in 0..grid.len() {
        if !grid.interior[i] || grid.dist[i] < 2.0 * grid.h {
            continue;
        }
        if dist2(grid.node(i), anchor) < 2.0 * scale_r {
            c_flap = c_flap.max(asm.flap_at_node(&v.values, i).abs());
        }
    }

    let rs = scale_r.powf(s);
    let report = UpperBarrierReport {
        scale_r,
        lambda,
        v_at_xbar: v.values[xbar_idx],
        v_min: v.values.iter().cloned().fold(f64::INFINITY, f64::min),
        c_sup: v.max_abs() / rs,
        c_lower: c_tilde,
        c_flap: c_flap * rs,
        feasible,
    };
    Ok(UpperBarrier { v, xbar, report })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn barrier_pins_zero_and_dominates_distance_power() {
        let dom = Domain::interval(0.0, 1.0).unwrap();
        let grid = Grid::from_domain(&dom, 1.0 / 512.0, 4).unwrap();
        let r = 0.1;
        let anchor = [-1.0, 0.0];
        let xbar = [-1.0 + r / 4.0, 0.0];
        let cfg = SolverConfig::new(2.0, 0.5);
        let ub = build_upper_barrier(&dom, grid, anchor, xbar, r, &cfg).unwrap();
        assert_eq!(ub.report.v_at_xbar, 0.0);
        assert!(ub.report.v_min >= 0.0);
        assert!(ub.report.c_lower > 0.0, "c_lower = {}", ub.report.c_lower);
        assert!(ub.report.feasible);
        assert!(ub.report.c_sup.is_finite() && ub.report.c_sup > 0.0);
    }
}
