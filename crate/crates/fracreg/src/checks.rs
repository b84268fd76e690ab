//! Report-producing verifications of the order-theoretic properties the
//! solver output must exhibit: comparison of solutions under ordered loads,
//! positivity of the torsion quotient (Hopf), and the global subsolution
//! property of torsion fields.

use serde::Serialize;

use crate::assemble::Assembler;
use crate::error::{FracError, Result};
use crate::grid::Field;
use crate::solver::{FracSolver, SolverConfig};

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub tolerance: f64,
}

/// Discrete comparison: loads fu <= fv nodally must give u <= v up to
/// 10 x solver tolerance. Report-only.
pub fn check_comparison(u: &Field, v: &Field, fu: &Field, fv: &Field, cfg: &SolverConfig) -> Result<CheckReport> {
    if !u.same_grid(v) || !fu.same_grid(fv) || !u.same_grid(fu) {
        return Err(FracError::Contract("comparison fields on different grids".into()));
    }
    for idx in 0..u.grid.len() {
        if u.grid.interior[idx] && fu.values[idx] > fv.values[idx] + 1e-15 {
            return Err(FracError::Precondition("comparison requires fu <= fv".into()));
        }
    }
    let tol_cmp = 10.0 * cfg.tol;
    let mut min_diff = f64::INFINITY;
    for idx in 0..u.grid.len() {
        if u.grid.interior[idx] {
            min_diff = min_diff.min(v.values[idx] - u.values[idx]);
        }
    }
    Ok(CheckReport {
        name: "comparison".into(),
        pass: min_diff >= -tol_cmp,
        value: min_diff,
        tolerance: tol_cmp,
    })
}

/// Empirical Hopf constant of a torsion solve: min over interior nodes with
/// d >= h of u / d^s. Pass means strictly positive.
pub fn check_hopf(u: &Field, s: f64) -> CheckReport {
    let grid = &u.grid;
    let mut c_emp = f64::INFINITY;
    for idx in 0..grid.len() {
        if grid.interior[idx] && grid.dist[idx] >= grid.h {
            c_emp = c_emp.min(u.values[idx] / grid.dist[idx].powf(s));
        }
    }
    CheckReport { name: "hopf".into(), pass: c_emp > 0.0, value: c_emp, tolerance: 0.0 }
}

/// Global subsolution: the operator value of a torsion field stays below
/// 1 + tol_q at every sampled node, interior (d >= 2h) or exterior.
pub fn check_global_subsolution(
    solver: &FracSolver,
    u: &Field,
    sample_nodes: &[usize],
    tol_q: f64,
) -> Result<CheckReport> {
    let asm: &Assembler = &solver.asm;
    let grid = &u.grid;
    let mut max_val = f64::NEG_INFINITY;
    for &idx in sample_nodes {
        if grid.interior[idx] && grid.dist[idx] < 2.0 * grid.h {
            return Err(FracError::Precondition(format!(
                "sample node {idx} too close to the boundary (d = {:.3e})",
                grid.dist[idx]
            )));
        }
        let v = asm.flap_at_node(&u.values, idx);
        if !v.is_finite() {
            return Err(FracError::Numeric("non-finite operator value".into()));
        }
        max_val = max_val.max(v);
    }
    Ok(CheckReport {
        name: "global_subsolution".into(),
        pass: max_val <= 1.0 + tol_q,
        value: max_val,
        tolerance: tol_q,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Domain;
    use crate::grid::{FieldKind, Grid};
    use crate::solver::solve_dirichlet;

    #[test]
    fn comparison_zero_vs_torsion() {
        let dom = Domain::interval(0.0, 1.0).unwrap();
        let grid = Grid::from_domain(&dom, 1.0 / 128.0, 4).unwrap();
        let cfg = SolverConfig::new(2.0, 0.5);
        let f0 = Field::zeros(grid.clone(), FieldKind::Dirichlet);
        let f1 = Field::dirichlet_from_fn(grid.clone(), |_| 1.0);
        let u = solve_dirichlet(&f0, &cfg).unwrap().u;
        let v = solve_dirichlet(&f1, &cfg).unwrap().u;
        let rep = check_comparison(&u, &v, &f0, &f1, &cfg).unwrap();
        assert!(rep.pass, "min diff {}", rep.value);
    }

    #[test]
    fn uniqueness_under_equal_loads() {
        let dom = Domain::interval(0.0, 1.0).unwrap();
        let grid = Grid::from_domain(&dom, 1.0 / 128.0, 4).unwrap();
        let cfg = SolverConfig::new(3.0, 0.5);
        let f = Field::dirichlet_from_fn(grid.clone(), |x| 0.5 + 0.5 * x[0] * x[0]);
        let u = solve_dirichlet(&f, &cfg).unwrap().u;
        let v = solve_dirichlet(&f, &cfg).unwrap().u;
        for (a, b) in u.values.iter().zip(&v.values) {
            assert_eq!(a, b);
        }
    }
}
