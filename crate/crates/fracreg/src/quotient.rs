//! Boundary-regularity measurements on the quotient v = u / d^s: the
//! near-boundary-excluded quotient field, the nonlocal excess over normal
//! balls, oscillations over boundary-centered patches and the log-log fit of
//! their decay over the dyadic radii R0 / 8^n.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{FracError, Result};
use crate::geometry::{dist2, Domain, NormalBall, Point};
use crate::grid::{Field, Grid};

#[derive(Debug, Clone)]
pub struct QuotientField {
    pub grid: Arc<Grid>,
    pub values: Vec<f64>,
    /// Interior nodes with d >= h_cut; the quotient of a discrete solution is
    /// noise-dominated below the cut.
    pub included: Vec<bool>,
    pub h_cut: f64,
    pub sup_abs: f64,
}

/// v = u / d^s at interior nodes with d >= h (grid spacing).
pub fn quotient(u: &Field, _domain: &Domain, s: f64) -> Result<QuotientField> {
    u.require_dirichlet("quotient")?;
    let grid = u.grid.clone();
    let h_cut = grid.h;
    let mut values = vec![0.0; grid.len()];
    let mut included = vec![false; grid.len()];
    let mut sup_abs = 0.0f64;
    for idx in 0..grid.len() {
        if grid.interior[idx] && grid.dist[idx] >= h_cut {
            let v = u.values[idx] / grid.dist[idx].powf(s);
            if !v.is_finite() {
                return Err(FracError::Numeric(format!("non-finite quotient at node {idx}")));
            }
            values[idx] = v;
            included[idx] = true;
            sup_abs = sup_abs.max(v.abs());
        }
    }
    Ok(QuotientField { grid, values, included, h_cut, sup_abs })
}

/// Quotient field with prescribed values (calibration/synthetic inputs).
pub fn synthetic_quotient(grid: Arc<Grid>, f: impl Fn(Point) -> f64) -> QuotientField {
    let h_cut = grid.h;
    let mut values = vec![0.0; grid.len()];
    let mut included = vec![false; grid.len()];
    let mut sup_abs = 0.0f64;
    for idx in 0..grid.len() {
        if grid.interior[idx] && grid.dist[idx] >= h_cut {
            values[idx] = f(grid.node(idx));
            included[idx] = true;
            sup_abs = sup_abs.max(values[idx].abs());
        }
    }
    QuotientField { grid, values, included, h_cut, sup_abs }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExcessValue {
    pub k: f64,
    pub radius: f64,
    pub anchor: [f64; 2],
    pub value: f64,
    pub nodes: usize,
}

/// Nonlocal excess: mean of |u/d^s - k| over the grid nodes of the normal
/// ball at the anchor. Requires at least 20 resolved nodes.
pub fn excess(
    u: &Field,
    k: f64,
    scale_r: f64,
    anchor: Point,
    domain: &Domain,
    s: f64,
) -> Result<ExcessValue> {
    let ball = NormalBall::new(domain, anchor, scale_r)?;
    let grid = &u.grid;
    let mut acc = 0.0;
    let mut n = 0usize;
    for idx in 0..grid.len() {
        if !grid.interior[idx] {
            continue;
        }
        let x = grid.node(idx);
        let dist = if grid.dim == 1 { (x[0] - ball.center[0]).abs() } else { dist2(x, ball.center) };
        if dist <= ball.radius {
            acc += (u.values[idx] / grid.dist[idx].powf(s) - k).abs();
            n += 1;
        }
    }
    if n < 20 {
        return Err(FracError::Resolution(format!(
            "normal ball resolves only {n} nodes (need 20): R = {scale_r}, h = {}",
            grid.h
        )));
    }
    Ok(ExcessValue { k, radius: scale_r, anchor, value: acc / n as f64, nodes: n })
}

/// max - min of the quotient over included nodes of D_r(x1).
pub fn oscillation(v: &QuotientField, x1: Point, r: f64) -> Result<f64> {
    let grid = &v.grid;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut n = 0usize;
    for idx in 0..grid.len() {
        if !v.included[idx] {
            continue;
        }
        let x = grid.node(idx);
        let dist = if grid.dim == 1 { (x[0] - x1[0]).abs() } else { dist2(x, x1) };
        if dist < r {
            lo = lo.min(v.values[idx]);
            hi = hi.max(v.values[idx]);
            n += 1;
        }
    }
    if n < 20 {
        return Err(FracError::Resolution(format!(
            "oscillation patch D_{r}(x1) resolves only {n} nodes (need 20)"
        )));
    }
    Ok(hi - lo)
}

#[derive(Debug, Clone, Serialize)]
pub struct OscillationTrace {
    pub anchor: [f64; 2],
    pub radii: Vec<f64>,
    pub osc: Vec<f64>,
    pub alpha: f64,
    #[serde(rename = "C")]
    pub constant: f64,
    pub residual: f64,
    /// Levels excluded from the fit (under-resolved or below the noise floor).
    pub flagged: Vec<usize>,
}

/// Least-squares fit of log osc against log r over the dyadic radii
/// R_n = R0 / 8^n. Levels below `noise_floor` (typically 100 x solver
/// tolerance) or failing the node-count floor are flagged and excluded; at
/// least 3 usable levels are required.
pub fn holder_fit(
    v: &QuotientField,
    x1: Point,
    r0: f64,
    n_levels: usize,
    noise_floor: f64,
) -> Result<OscillationTrace> {
    if n_levels < 3 {
        return Err(FracError::Fit("holder fit needs at least 3 levels".into()));
    }
    let mut radii = Vec::new();
    let mut osc = Vec::new();
    let mut flagged = Vec::new();
    for n in 0..n_levels {
        let r = r0 / 8.0f64.powi(n as i32);
        radii.push(r);
        match oscillation(v, x1, r) {
            Ok(o) => {
                if o < noise_floor {
                    flagged.push(n);
                }
                osc.push(o);
            }
            Err(FracError::Resolution(_)) => {
                flagged.push(n);
                osc.push(f64::NAN);
            }
            Err(e) => return Err(e),
        }
    }
    let usable: Vec<usize> =
        (0..n_levels).filter(|n| !flagged.contains(n) && osc[*n] > 0.0).collect();
    if usable.len() < 3 {
        return Err(FracError::Fit(format!(
            "only {} usable levels out of {n_levels}",
            usable.len()
        )));
    }
    let xs: Vec<f64> = usable.iter().map(|&n| radii[n].ln()).collect();
    let ys: Vec<f64> = usable.iter().map(|&n| osc[n].ln()).collect();
    let (alpha, intercept, residual) = linear_fit(&xs, &ys);
    Ok(OscillationTrace {
        anchor: x1,
        radii,
        osc,
        alpha,
        constant: intercept.exp(),
        residual,
        flagged,
    })
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let e = y - (intercept + slope * x);
        ss += e * e;
    }
    (slope, intercept, (ss / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::FieldKind;

    fn interval_grid(h: f64) -> Arc<Grid> {
        Grid::from_domain(&Domain::interval(0.0, 1.0).unwrap(), h, 4).unwrap()
    }

    #[test]
    fn quotient_of_distance_power_is_one() {
        let dom = Domain::interval(0.0, 1.0).unwrap();
        let grid = interval_grid(1.0 / 256.0);
        let s = 0.5;
        let u = Field::dirichlet_from_fn(grid.clone(), |x| {
            let d = 1.0 - x[0].abs();
            d.max(0.0).powf(s)
        });
        let q = quotient(&u, &dom, s).unwrap();
        for idx in 0..grid.len() {
            if q.included[idx] {
                assert!((q.values[idx] - 1.0).abs() < 1e-12);
            }
        }
        assert!((q.sup_abs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quotient_scales_exactly() {
        let dom = Domain::interval(0.0, 1.0).unwrap();
        let grid = interval_grid(1.0 / 128.0);
        let u = Field::dirichlet_from_fn(grid.clone(), |x| (1.0 - x[0] * x[0]).max(0.0));
        let q1 = quotient(&u, &dom, 0.5).unwrap();
        let q2 = quotient(&u.scaled(3.0), &dom, 0.5).unwrap();
        for idx in 0..grid.len() {
            if q1.included[idx] {
                assert!((q2.values[idx] - 3.0 * q1.values[idx]).abs() <= 1e-12 * q1.values[idx].abs().max(1e-300));
            }
        }
    }

    #[test]
    fn excess_of_scaled_distance_power() {
        let dom = Domain::interval(0.0, 1.0).unwrap();
        let grid = interval_grid(1.0 / 512.0);
        let s = 0.5;
        let k = 0.7;
        let u = Field::dirichlet_from_fn(grid.clone(), |x| {
            k * (1.0 - x[0].abs()).max(0.0).powf(s)
        });
        let e = excess(&u, k, 0.12, [-1.0, 0.0], &dom, s).unwrap();
        assert!(e.value < 1e-10, "excess {}", e.value);
        // shifted level: |(k+c) - k| = c exactly
        let c = 0.25;
        let u2 = Field::dirichlet_from_fn(grid.clone(), |x| {
            (k + c) * (1.0 - x[0].abs()).max(0.0).powf(s)
        });
        let e2 = excess(&u2, k, 0.12, [-1.0, 0.0], &dom, s).unwrap();
        assert!((e2.value - c).abs() < 1e-12);
    }

    #[test]
    fn excess_requires_resolution() {
        let dom = Domain::interval(0.0, 1.0).unwrap();
        let _ = &dom;
        let grid = interval_grid(1.0 / 64.0);
        let u = Field::zeros(grid, FieldKind::Dirichlet);
        assert!(matches!(
            excess(&u, 0.0, 0.05, [-1.0, 0.0], &dom, 0.5),
            Err(FracError::Resolution(_))
        ));
    }

    #[test]
    fn excess_matches_monte_carlo_oracle() {
        let dom = Domain::interval(0.0, 1.0).unwrap();
        let grid = interval_grid(1.0 / 512.0);
        let s = 0.5;
        let cfg = crate::solver::SolverConfig::new(2.0, s);
        let sol = crate::solver::solve_torsion(grid.clone(), &cfg).unwrap();
        let r = 0.12;
        let anchor = [-1.0, 0.0];
        let e = excess(&sol.u, 0.3, r, anchor, &dom, s).unwrap();
        let ball = NormalBall::new(&dom, anchor, r).unwrap();
        let interp = sol.u.clone();
        let mc = crate::reference::monte_carlo_ball_mean(1, ball.center, ball.radius, 100_000, 77, &|x| {
            (interp.interp(x) / dom.distance(x).powf(s) - 0.3).abs()
        });
        assert!(
            (e.value - mc).abs() <= 0.01 * mc.abs().max(1e-12),
            "nodal {} vs MC {}",
            e.value,
            mc
        );
    }

    #[test]
    fn oscillation_monotone_in_radius_and_constant_field() {
        let grid = interval_grid(1.0 / 512.0);
        let q = synthetic_quotient(grid.clone(), |_| 2.5);
        assert_eq!(oscillation(&q, [-1.0, 0.0], 0.5).unwrap(), 0.0);
        let ql = synthetic_quotient(grid, |x| 0.7 * x[0]);
        let o1 = oscillation(&ql, [-1.0, 0.0], 0.25).unwrap();
        let o2 = oscillation(&ql, [-1.0, 0.0], 0.5).unwrap();
        assert!(o1 <= o2 + 1e-15);
        // linear profile: osc over the chord of length r is about 0.7 r
        assert!((o2 - 0.7 * 0.5).abs() < 0.02);
    }

    #[test]
    fn holder_fit_recovers_synthetic_exponents() {
        // The singular anchor sits on an included node so that the nodal
        // max-min sees the pure power decay.
        let grid = interval_grid(1.0 / 512.0);
        let x1 = [-1.0, 0.0];
        let a = -1.0 + grid.h;
        for &beta in &[0.2, 0.5, 0.8] {
            let q = synthetic_quotient(grid.clone(), move |x| (x[0] - a).abs().powf(beta));
            let r0 = crate::report::default_r0(&grid);
            let tr = holder_fit(&q, x1, r0, 3, 1e-6).unwrap();
            assert!(
                (tr.alpha - beta).abs() <= 0.05,
                "beta {beta}: fitted {} (trace {:?})",
                tr.alpha,
                tr.osc
            );
        }
    }

    #[test]
    fn holder_fit_errors_without_usable_levels() {
        let grid = interval_grid(1.0 / 64.0);
        let q = synthetic_quotient(grid, |x| x[0]);
        // tiny radii under-resolve every level below the top
        assert!(holder_fit(&q, [-1.0, 0.0], 0.2, 3, 1e-12).is_err());
    }
}
