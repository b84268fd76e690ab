//! Uniform Cartesian node set covering a domain, with per-node distance and
//! interior flags, and nodal fields living on it. Dirichlet fields vanish
//! identically at exterior nodes (the exterior condition holds on the whole
//! complement, not just on the boundary).

use std::sync::Arc;

use crate::error::{FracError, Result};
use crate::geometry::{Domain, Point};

/// Interior-node caps for energy assembly (the all-pairs sums are O(n^2)).
pub const MAX_INTERIOR_1D: usize = 4096;
pub const MAX_INTERIOR_2D: usize = 128 * 128;

#[derive(Debug)]
pub struct Grid {
    pub dim: usize,
    pub h: f64,
    /// Coordinate of node (0, 0).
    pub origin: [f64; 2],
    /// Nodes per axis; shape[1] == 1 in dimension 1.
    pub shape: [usize; 2],
    /// Interior-of-domain flag per node (row-major, x fastest).
    pub interior: Vec<bool>,
    /// Distance to the domain complement per node (0 at exterior nodes).
    pub dist: Vec<f64>,
    pub interior_count: usize,
}

impl Grid {
    /// Covers the domain with margin `margin_cells * h` of exterior nodes on
    /// every side (at least 2 cells), node coordinates on the lattice
    /// origin + i*h.
    pub fn from_domain(domain: &Domain, h: f64, margin_cells: usize) -> Result<Arc<Grid>> {
        if h <= 0.0 {
            return Err(FracError::Contract("grid spacing must be positive".into()));
        }
        let margin = margin_cells.max(2) as f64 * h;
        let (lo, hi) = domain.bounds();
        let dim = domain.dim();
        let mut origin = [0.0; 2];
        let mut shape = [1usize; 2];
        for ax in 0..dim {
            let a = ((lo[ax] - margin) / h).floor() * h;
            let b = ((hi[ax] + margin) / h).ceil() * h;
            origin[ax] = a;
            shape[ax] = ((b - a) / h).round() as usize + 1;
        }
        let n = shape[0] * shape[1];
        let mut interior = vec![false; n];
        let mut dist = vec![0.0; n];
        let mut count = 0;
        for iy in 0..shape[1] {
            for ix in 0..shape[0] {
                let idx = iy * shape[0] + ix;
                let x = [origin[0] + ix as f64 * h, origin[1] + iy as f64 * h];
                if domain.contains(x) {
                    interior[idx] = true;
                    dist[idx] = domain.distance(x);
                    count += 1;
                }
            }
        }
        if count == 0 {
            return Err(FracError::Contract("grid resolves no interior node".into()));
        }
        Ok(Arc::new(Grid { dim, h, origin, shape, interior, dist, interior_count: count }))
    }

    pub fn len(&self) -> usize {
        self.shape[0] * self.shape[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn node(&self, idx: usize) -> Point {
        let ix = idx % self.shape[0];
        let iy = idx / self.shape[0];
        [self.origin[0] + ix as f64 * self.h, self.origin[1] + iy as f64 * self.h]
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.shape[0] + ix
    }

    /// Node index of a lattice point, if it lies on this grid.
    pub fn locate(&self, x: Point) -> Option<usize> {
        let fx = (x[0] - self.origin[0]) / self.h;
        let fy = if self.dim == 2 { (x[1] - self.origin[1]) / self.h } else { 0.0 };
        let ix = fx.round();
        let iy = fy.round();
        if (fx - ix).abs() > 1e-6 || (fy - iy).abs() > 1e-6 {
            return None;
        }
        if ix < 0.0 || iy < 0.0 || ix as usize >= self.shape[0] || iy as usize >= self.shape[1] {
            return None;
        }
        Some(self.index(ix as usize, iy as usize))
    }

    /// Nearest grid node to an arbitrary point.
    pub fn nearest_node(&self, x: Point) -> usize {
        let ix = (((x[0] - self.origin[0]) / self.h).round().max(0.0) as usize)
            .min(self.shape[0] - 1);
        let iy = if self.dim == 2 {
            (((x[1] - self.origin[1]) / self.h).round().max(0.0) as usize).min(self.shape[1] - 1)
        } else {
            0
        };
        self.index(ix, iy)
    }

    pub fn cell_volume(&self) -> f64 {
        if self.dim == 1 {
            self.h
        } else {
            self.h * self.h
        }
    }

    /// Box extent (max node minus min node coordinate) per axis.
    pub fn extent(&self, ax: usize) -> f64 {
        (self.shape[ax] - 1) as f64 * self.h
    }

    pub fn diameter(&self) -> f64 {
        if self.dim == 1 {
            self.extent(0)
        } else {
            (self.extent(0).powi(2) + self.extent(1).powi(2)).sqrt()
        }
    }

    pub(crate) fn check_assembly_cap(&self, mask: &[bool]) -> Result<()> {
        let count = mask.iter().filter(|&&b| b).count();
        let cap = if self.dim == 1 { MAX_INTERIOR_1D } else { MAX_INTERIOR_2D };
        if count > cap {
            return Err(FracError::Contract(format!(
                "assembly cap exceeded: {count} unknowns > {cap} (dim {})",
                self.dim
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    /// Zero at every exterior node; the class all solutions live in.
    Dirichlet,
    Free,
}

#[derive(Debug, Clone)]
pub struct Field {
    pub grid: Arc<Grid>,
    pub values: Vec<f64>,
    pub kind: FieldKind,
}

impl Field {
    pub fn zeros(grid: Arc<Grid>, kind: FieldKind) -> Field {
        let n = grid.len();
        Field { grid, values: vec![0.0; n], kind }
    }

    /// Samples a function at interior nodes, zero outside (Dirichlet kind).
    pub fn dirichlet_from_fn(grid: Arc<Grid>, f: impl Fn(Point) -> f64) -> Field {
        let mut values = vec![0.0; grid.len()];
        for idx in 0..grid.len() {
            if grid.interior[idx] {
                values[idx] = f(grid.node(idx));
            }
        }
        Field { grid, values, kind: FieldKind::Dirichlet }
    }

    /// Samples a function everywhere (free kind).
    pub fn free_from_fn(grid: Arc<Grid>, f: impl Fn(Point) -> f64) -> Field {
        let values = (0..grid.len()).map(|idx| f(grid.node(idx))).collect();
        Field { grid, values, kind: FieldKind::Free }
    }

    pub fn from_values(grid: Arc<Grid>, values: Vec<f64>, kind: FieldKind) -> Result<Field> {
        if values.len() != grid.len() {
            return Err(FracError::Contract("field length does not match grid".into()));
        }
        if kind == FieldKind::Dirichlet {
            for (idx, v) in values.iter().enumerate() {
                if !grid.interior[idx] && *v != 0.0 {
                    return Err(FracError::Contract(
                        "dirichlet field must vanish at exterior nodes".into(),
                    ));
                }
            }
        }
        Ok(Field { grid, values, kind })
    }

    pub fn scaled(&self, t: f64) -> Field {
        Field {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| t * v).collect(),
            kind: self.kind,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Multilinear interpolation of the nodal values; zero outside the box.
    pub fn interp(&self, x: Point) -> f64 {
        let g = &self.grid;
        let fx = (x[0] - g.origin[0]) / g.h;
        if fx < 0.0 || fx > (g.shape[0] - 1) as f64 {
            return 0.0;
        }
        let ix = (fx.floor() as usize).min(g.shape[0] - 2);
        let tx = fx - ix as f64;
        if g.dim == 1 {
            return (1.0 - tx) * self.values[ix] + tx * self.values[ix + 1];
        }
        let fy = (x[1] - g.origin[1]) / g.h;
        if fy < 0.0 || fy > (g.shape[1] - 1) as f64 {
            return 0.0;
        }
        let iy = (fy.floor() as usize).min(g.shape[1] - 2);
        let ty = fy - iy as f64;
        let v00 = self.values[g.index(ix, iy)];
        let v10 = self.values[g.index(ix + 1, iy)];
        let v01 = self.values[g.index(ix, iy + 1)];
        let v11 = self.values[g.index(ix + 1, iy + 1)];
        (1.0 - ty) * ((1.0 - tx) * v00 + tx * v10) + ty * ((1.0 - tx) * v01 + tx * v11)
    }

    pub fn require_dirichlet(&self, what: &str) -> Result<()> {
        if self.kind != FieldKind::Dirichlet {
            return Err(FracError::Contract(format!("{what} requires a dirichlet field")));
        }
        Ok(())
    }

    pub fn same_grid(&self, other: &Field) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid)
            || (self.grid.shape == other.grid.shape
                && self.grid.h == other.grid.h
                && self.grid.origin == other.grid.origin)
    }
}
