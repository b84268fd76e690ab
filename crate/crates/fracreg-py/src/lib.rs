//! Python bindings: domains, grids, the three solves and the boundary
//! diagnostics, with plain lists/dicts at the boundary so the module needs
//! nothing beyond the standard library on the Python side.

use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use fracreg::quotient::{excess, holder_fit, quotient};
use fracreg::solver::{FracSolver, Obstacles, SolverConfig};
use fracreg::{Domain, Field, FieldKind, FracError, Grid};

fn err(e: FracError) -> PyErr {
    match e {
        FracError::Contract(_) | FracError::Precondition(_) => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

#[pyclass(name = "Domain", frozen)]
struct PyDomain {
    inner: Domain,
}

#[pymethods]
impl PyDomain {
    /// Domain("interval", [center, half_length]) / ("ball", [cx, cy, r]) /
    /// ("stadium", [cx, cy, a, cap_r]) / ("ellipse", [cx, cy, a, b]).
    #[new]
    fn new(kind: &str, params: Vec<f64>) -> PyResult<Self> {
        let inner = match (kind, params.len()) {
            ("interval", 2) => Domain::interval(params[0], params[1]),
            ("ball", 3) => Domain::ball([params[0], params[1]], params[2]),
            ("stadium", 4) => Domain::stadium([params[0], params[1]], params[2], params[3]),
            ("ellipse", 4) => Domain::ellipse([params[0], params[1]], params[2], params[3]),
            _ => {
                return Err(PyValueError::new_err(format!(
                    "unknown domain kind {kind} / wrong parameter count"
                )))
            }
        }
        .map_err(err)?;
        Ok(PyDomain { inner })
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn distance(&self, x: Vec<f64>) -> PyResult<f64> {
        Ok(self.inner.distance(point(&x)?))
    }

    fn metric_projection(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        let p = self.inner.metric_projection(point(&x)?).map_err(err)?;
        Ok(trim(self.inner.dim(), p))
    }

    fn interior_sphere_radius(&self) -> f64 {
        self.inner.interior_sphere_radius()
    }

    fn boundary_point(&self, t: f64) -> Vec<f64> {
        trim(self.inner.dim(), self.inner.boundary_point(t))
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

fn point(x: &[f64]) -> PyResult<[f64; 2]> {
    match x.len() {
        1 => Ok([x[0], 0.0]),
        2 => Ok([x[0], x[1]]),
        n => Err(PyValueError::new_err(format!("points have 1 or 2 coordinates, got {n}"))),
    }
}

fn trim(dim: usize, p: [f64; 2]) -> Vec<f64> {
    if dim == 1 {
        vec![p[0]]
    } else {
        vec![p[0], p[1]]
    }
}

#[pyclass(name = "Grid", frozen)]
struct PyGrid {
    domain: Domain,
    grid: Arc<Grid>,
}

#[pymethods]
impl PyGrid {
    #[new]
    #[pyo3(signature = (domain, h, margin_cells = 4))]
    fn new(domain: &PyDomain, h: f64, margin_cells: usize) -> PyResult<Self> {
        let grid = Grid::from_domain(&domain.inner, h, margin_cells).map_err(err)?;
        Ok(PyGrid { domain: domain.inner, grid })
    }

    #[getter]
    fn h(&self) -> f64 {
        self.grid.h
    }

    fn node_count(&self) -> usize {
        self.grid.len()
    }

    fn interior_count(&self) -> usize {
        self.grid.interior_count
    }

    fn nodes(&self) -> Vec<Vec<f64>> {
        (0..self.grid.len()).map(|i| trim(self.grid.dim, self.grid.node(i))).collect()
    }

    fn interior(&self) -> Vec<bool> {
        self.grid.interior.clone()
    }

    fn distances(&self) -> Vec<f64> {
        self.grid.dist.clone()
    }
}

#[pyclass(name = "Solution", frozen)]
struct PySolution {
    #[pyo3(get)]
    values: Vec<f64>,
    #[pyo3(get)]
    iterations: usize,
    #[pyo3(get)]
    residual_norm: f64,
    #[pyo3(get)]
    threshold: f64,
    #[pyo3(get)]
    energy: f64,
}

impl PySolution {
    fn from_solution(sol: fracreg::solver::Solution) -> PySolution {
        PySolution {
            values: sol.u.values,
            iterations: sol.iterations,
            residual_norm: sol.residual_norm,
            threshold: sol.threshold,
            energy: sol.energy_final,
        }
    }
}

fn make_config(p: f64, s: f64, tol: f64, max_iter: usize) -> SolverConfig {
    let mut cfg = SolverConfig::new(p, s);
    cfg.tol = tol;
    cfg.max_iter = max_iter;
    cfg
}

/// Solve the Dirichlet problem with a constant load.
#[pyfunction]
#[pyo3(signature = (grid, p, s, f = 1.0, tol = 1e-8, max_iter = 50_000))]
fn solve_dirichlet(
    grid: &PyGrid,
    p: f64,
    s: f64,
    f: f64,
    tol: f64,
    max_iter: usize,
) -> PyResult<PySolution> {
    let cfg = make_config(p, s, tol, max_iter);
    let load = Field::dirichlet_from_fn(grid.grid.clone(), |_| f);
    let solver = FracSolver::new(grid.grid.clone(), cfg).map_err(err)?;
    Ok(PySolution::from_solution(solver.solve(&load).map_err(err)?))
}

/// Torsion problem: unit load.
#[pyfunction]
#[pyo3(signature = (grid, p, s, tol = 1e-8, max_iter = 50_000))]
fn solve_torsion(grid: &PyGrid, p: f64, s: f64, tol: f64, max_iter: usize) -> PyResult<PySolution> {
    solve_dirichlet(grid, p, s, 1.0, tol, max_iter)
}

/// Double obstacle problem between nodal bounds.
#[pyfunction]
#[pyo3(signature = (grid, lower, upper, p, s, tol = 1e-8, max_iter = 50_000))]
fn solve_double_obstacle(
    grid: &PyGrid,
    lower: Vec<f64>,
    upper: Vec<f64>,
    p: f64,
    s: f64,
    tol: f64,
    max_iter: usize,
) -> PyResult<PySolution> {
    let cfg = make_config(p, s, tol, max_iter);
    let lo = Field::from_values(grid.grid.clone(), lower, FieldKind::Free).map_err(err)?;
    let hi = Field::from_values(grid.grid.clone(), upper, FieldKind::Free).map_err(err)?;
    let obs = Obstacles::new(lo, hi).map_err(err)?;
    let solver = FracSolver::new(grid.grid.clone(), cfg).map_err(err)?;
    Ok(PySolution::from_solution(solver.solve_obstacle(&obs).map_err(err)?))
}

/// Quotient u / d^s at included nodes: returns (values, included, sup_abs).
#[pyfunction]
fn quotient_field(grid: &PyGrid, values: Vec<f64>, s: f64) -> PyResult<(Vec<f64>, Vec<bool>, f64)> {
    let u = Field::from_values(grid.grid.clone(), values, FieldKind::Dirichlet).map_err(err)?;
    let q = quotient(&u, &grid.domain, s).map_err(err)?;
    Ok((q.values, q.included, q.sup_abs))
}

/// Nonlocal excess of u against level k over the normal ball at the anchor.
#[pyfunction]
fn excess_value(
    grid: &PyGrid,
    values: Vec<f64>,
    k: f64,
    scale_r: f64,
    anchor: Vec<f64>,
    s: f64,
) -> PyResult<f64> {
    let u = Field::from_values(grid.grid.clone(), values, FieldKind::Dirichlet).map_err(err)?;
    Ok(excess(&u, k, scale_r, point(&anchor)?, &grid.domain, s).map_err(err)?.value)
}

/// Dyadic oscillation fit of the quotient at a boundary anchor; returns a
/// dict with radii, oscillations, alpha, C and the fit residual.
#[pyfunction]
#[pyo3(signature = (grid, values, s, anchor, r0, levels = 3, noise_floor = 1e-9))]
#[allow(clippy::too_many_arguments)]
fn holder_exponent<'py>(
    py: Python<'py>,
    grid: &PyGrid,
    values: Vec<f64>,
    s: f64,
    anchor: Vec<f64>,
    r0: f64,
    levels: usize,
    noise_floor: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let u = Field::from_values(grid.grid.clone(), values, FieldKind::Dirichlet).map_err(err)?;
    let q = quotient(&u, &grid.domain, s).map_err(err)?;
    let tr = holder_fit(&q, point(&anchor)?, r0, levels, noise_floor).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("radii", tr.radii)?;
    out.set_item("osc", tr.osc)?;
    out.set_item("alpha", tr.alpha)?;
    out.set_item("C", tr.constant)?;
    out.set_item("residual", tr.residual)?;
    Ok(out)
}

/// Partial sum of the dyadic series sum_j (8^{a j} - 1)^q / 8^{s j}.
#[pyfunction]
#[pyo3(signature = (q, alpha1, s, terms = 10_000))]
fn series_s(q: f64, alpha1: f64, s: f64, terms: usize) -> PyResult<f64> {
    Ok(fracreg::series_s(q, alpha1, s, terms).map_err(err)?.partial)
}

#[pymodule]
fn fracreg_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDomain>()?;
    m.add_class::<PyGrid>()?;
    m.add_class::<PySolution>()?;
    m.add_function(wrap_pyfunction!(solve_dirichlet, m)?)?;
    m.add_function(wrap_pyfunction!(solve_torsion, m)?)?;
    m.add_function(wrap_pyfunction!(solve_double_obstacle, m)?)?;
    m.add_function(wrap_pyfunction!(quotient_field, m)?)?;
    m.add_function(wrap_pyfunction!(excess_value, m)?)?;
    m.add_function(wrap_pyfunction!(holder_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(series_s, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bindings_solve_and_measure() {
        Python::initialize();
        Python::attach(|_py| {
            let dom = PyDomain::new("interval", vec![0.0, 1.0]).unwrap();
            let grid = PyGrid::new(&dom, 1.0 / 128.0, 4).unwrap();
            let sol = solve_torsion(&grid, 2.0, 0.5, 1e-8, 50_000).unwrap();
            assert!(sol.residual_norm <= sol.threshold);
            let (values, included, sup) =
                quotient_field(&grid, sol.values.clone(), 0.5).unwrap();
            assert!(sup > 0.0);
            assert_eq!(values.len(), included.len());
            let s = series_s(1.0, 0.1, 0.5, 1000).unwrap();
            assert!(s > 0.0);
        });
    }

    #[test]
    fn binding_errors_map_to_python_exceptions() {
        Python::initialize();
        Python::attach(|_py| {
            assert!(PyDomain::new("triangle", vec![0.0]).is_err());
            let dom = PyDomain::new("ball", vec![0.0, 0.0, 1.0]).unwrap();
            assert!(dom.metric_projection(vec![0.0, 0.0]).is_err());
        });
    }
}
