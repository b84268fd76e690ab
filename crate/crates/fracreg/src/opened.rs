//! Morphological opening of node masks by a disc: the opened region is the
//! union of all discs of the structuring radius contained in the parent set,
//! up to grid resolution. Opening = erosion followed by dilation with the
//! same disc stencil, and is idempotent.

use std::sync::Arc;

use crate::error::{FracError, Result};
use crate::geometry::{dist2, Domain, Point};
use crate::grid::Grid;

/// Parent set specification, intersected with the domain interior.
#[derive(Debug, Clone)]
pub enum ParentSet {
    Disc { center: Point, radius: f64 },
    Annulus { center: Point, inner: f64, outer: f64 },
    /// The whole domain interior.
    Full,
}

impl ParentSet {
    fn contains(&self, dim: usize, x: Point) -> bool {
        let d = |a: Point, b: Point| if dim == 1 { (a[0] - b[0]).abs() } else { dist2(a, b) };
        match *self {
            ParentSet::Disc { center, radius } => d(x, center) < radius,
            ParentSet::Annulus { center, inner, outer } => {
                let r = d(x, center);
                r >= inner && r < outer
            }
            ParentSet::Full => true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OpenedRegion {
    pub grid: Arc<Grid>,
    pub structuring_radius: f64,
    pub mask: Vec<bool>,
    pub count: usize,
}

/// Opening of (parent ∩ domain interior) by a disc of the structuring radius.
/// Requires the radius to resolve at least two cells.
pub fn opened_region(
    _domain: &Domain,
    parent: &ParentSet,
    structuring_radius: f64,
    grid: Arc<Grid>,
) -> Result<OpenedRegion> {
    if structuring_radius < 2.0 * grid.h {
        return Err(FracError::Precondition(format!(
            "structuring radius {structuring_radius} under-resolves the grid (h = {})",
            grid.h
        )));
    }
    let parent_mask: Vec<bool> = (0..grid.len())
        .map(|i| grid.interior[i] && parent.contains(grid.dim, grid.node(i)))
        .collect();
    let mask = open_mask(&grid, &parent_mask, structuring_radius);
    let count = mask.iter().filter(|&&b| b).count();
    if count == 0 {
        return Err(FracError::Geometry(
            "opened region is empty at this resolution".into(),
        ));
    }
    Ok(OpenedRegion { grid, structuring_radius, mask, count })
}

/// Erosion then dilation by the disc stencil of the given radius.
pub fn open_mask(grid: &Grid, parent: &[bool], radius: f64) -> Vec<bool> {
    let stencil = disc_stencil(grid, radius);
    let eroded = erode(grid, parent, &stencil);
    dilate(grid, &eroded, &stencil)
}

fn disc_stencil(grid: &Grid, radius: f64) -> Vec<(i64, i64)> {
    let m = (radius / grid.h).floor() as i64;
    let mut out = Vec::new();
    let r2 = (radius / grid.h) * (radius / grid.h);
    if grid.dim == 1 {
        for dx in -m..=m {
            out.push((dx, 0));
        }
    } else {
        for dy in -m..=m {
            for dx in -m..=m {
                if (dx * dx + dy * dy) as f64 <= r2 {
                    out.push((dx, dy));
                }
            }
        }
    }
    out
}

fn erode(grid: &Grid, mask: &[bool], stencil: &[(i64, i64)]) -> Vec<bool> {
    let (nx, ny) = (grid.shape[0] as i64, grid.shape[1] as i64);
    let mut out = vec![false; mask.len()];
    for iy in 0..ny {
        for ix in 0..nx {
            let idx = (iy * nx + ix) as usize;
            if !mask[idx] {
                continue;
            }
            let ok = stencil.iter().all(|&(dx, dy)| {
                let jx = ix + dx;
                let jy = iy + dy;
                jx >= 0 && jx < nx && jy >= 0 && jy < ny && mask[(jy * nx + jx) as usize]
            });
            out[idx] = ok;
        }
    }
    out
}

fn dilate(grid: &Grid, mask: &[bool], stencil: &[(i64, i64)]) -> Vec<bool> {
    let (nx, ny) = (grid.shape[0] as i64, grid.shape[1] as i64);
    let mut out = vec![false; mask.len()];
    for iy in 0..ny {
        for ix in 0..nx {
            if !mask[(iy * nx + ix) as usize] {
                continue;
            }
            for &(dx, dy) in stencil {
                let jx = ix + dx;
                let jy = iy + dy;
                if jx >= 0 && jx < nx && jy >= 0 && jy < ny {
                    out[(jy * nx + jx) as usize] = true;
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn opening_a_ball_by_a_smaller_disc_is_identity() {
        let dom = Domain::ball([0.0, 0.0], 1.0).unwrap();
        let grid = Grid::from_domain(&dom, 1.0 / 32.0, 4).unwrap();
        let opened = opened_region(&dom, &ParentSet::Full, 0.25, grid.clone()).unwrap();
        // up to grid resolution the opening of a ball by a smaller disc is
        // the ball: only an O(h) boundary rim may drop out
        for i in 0..grid.len() {
            if grid.interior[i] && !opened.mask[i] {
                assert!(
                    grid.dist[i] < 2.0 * grid.h * 1.5,
                    "lost node {i} at depth {}",
                    grid.dist[i]
                );
            }
        }
    }

    #[test]
    fn opening_is_idempotent() {
        let dom = Domain::ball([0.0, 0.0], 1.0).unwrap();
        let grid = Grid::from_domain(&dom, 1.0 / 32.0, 4).unwrap();
        let parent = ParentSet::Annulus { center: [0.3, 0.0], inner: 0.2, outer: 0.9 };
        let opened = opened_region(&dom, &parent, 0.1, grid.clone()).unwrap();
        let again = open_mask(&grid, &opened.mask, 0.1);
        assert_eq!(opened.mask, again);
    }

    #[test]
    fn opened_annulus_has_inscribed_balls_everywhere() {
        // per-point largest-inscribed-ball brute force: every opened node must
        // lie in some stencil ball fully inside the parent
        let dom = Domain::ball([0.0, 0.0], 1.0).unwrap();
        let grid = Grid::from_domain(&dom, 1.0 / 48.0, 4).unwrap();
        let r_big = 0.4;
        let parent = ParentSet::Annulus { center: [0.0, 0.0], inner: 3.0 * r_big / 4.0, outer: 0.95 };
        let rad = r_big / 8.0 * 2.0; // 0.1, resolves 4.8 cells
        let opened = opened_region(&dom, &parent, rad, grid.clone()).unwrap();
        let parent_mask: Vec<bool> =
            (0..grid.len()).map(|i| grid.interior[i] && parent.contains(2, grid.node(i))).collect();
        let stencil = disc_stencil(&grid, rad);
        let eroded = erode(&grid, &parent_mask, &stencil);
        for i in 0..grid.len() {
            if !opened.mask[i] {
                continue;
            }
            // brute force: exists eroded center within rad of node i
            let x = grid.node(i);
            let found = (0..grid.len()).any(|j| {
                eroded[j] && dist2(x, grid.node(j)) <= rad + 1e-12
            });
            assert!(found, "opened node {i} not covered by an inscribed ball");
        }
    }

    #[test]
    fn opened_boundary_disc_contains_inner_disc() {
        // flat-boundary-like regime: on a large ball, the opening of the
        // boundary disc D_R by R/8 still contains D_{3R/4}, up to resolution
        let dom = Domain::ball([0.0, 0.0], 8.0).unwrap();
        let grid = Grid::from_domain(&dom, 1.0 / 16.0, 4).unwrap();
        let anchor = [8.0, 0.0];
        let r = 1.0;
        let parent = ParentSet::Disc { center: anchor, radius: r };
        let opened = opened_region(&dom, &parent, r / 8.0, grid.clone()).unwrap();
        let slack = 2.0 * grid.h * 1.5;
        for i in 0..grid.len() {
            if !grid.interior[i] || opened.mask[i] {
                continue;
            }
            let x = grid.node(i);
            if dist2(x, anchor) < 0.75 * r - slack && grid.dist[i] > slack {
                panic!("node {x:?} of D_(3R/4) missing from the opened region");
            }
        }
    }

    #[test]
    fn empty_opening_errors() {
        let dom = Domain::ball([0.0, 0.0], 1.0).unwrap();
        let grid = Grid::from_domain(&dom, 1.0 / 32.0, 4).unwrap();
        let parent = ParentSet::Disc { center: [0.9, 0.0], radius: 0.05 };
        assert!(opened_region(&dom, &parent, 0.2, grid).is_err());
    }
}
