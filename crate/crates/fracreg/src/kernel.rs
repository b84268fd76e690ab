//! Kernel machinery for the Gagliardo energy on a uniform lattice: the
//! cell-averaged singular kernel table over node offsets, and the exact
//! closure integral of the kernel over the complement of the bounding box
//! (admissible fields vanish there, so the far field reduces to a weight).

use std::f64::consts::PI;

/// Signed power a^{q} meaning |a|^{q-1} a, specialized for the exponents the
/// acceptance actually exercises so that scaling by powers of two stays exact.
#[derive(Debug, Clone, Copy)]
pub enum PowKind {
    /// p = 2: identity / square
    Linear,
    /// p = 3: |a| a / |a|^3
    Quadratic,
    General(f64),
}

impl PowKind {
    pub fn from_p(p: f64) -> PowKind {
        if p == 2.0 {
            PowKind::Linear
        } else if p == 3.0 {
            PowKind::Quadratic
        } else {
            PowKind::General(p)
        }
    }

    /// |a|^{p-2} a
    #[inline(always)]
    pub fn signed(self, a: f64) -> f64 {
        match self {
            PowKind::Linear => a,
            PowKind::Quadratic => a.abs() * a,
            PowKind::General(p) => {
                if a == 0.0 {
                    0.0
                } else {
                    a.abs().powf(p - 2.0) * a
                }
            }
        }
    }

    /// |a|^p
    #[inline(always)]
    pub fn abs_p(self, a: f64) -> f64 {
        match self {
            PowKind::Linear => a * a,
            PowKind::Quadratic => a * a * a.abs(),
            PowKind::General(p) => a.abs().powf(p),
        }
    }
}

/// Gauss-Legendre nodes/weights on [-1, 1], computed by Newton iteration on
/// the Legendre recurrence (deterministic, accurate to fp).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j as f64 + 1.0) * z * p1 - j as f64 * p2) / (j as f64 + 1.0);
            }
            pp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / pp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Surface measure of the unit sphere in dimension N.
pub fn sphere_measure(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * PI,
        _ => unreachable!("only N in {{1,2}} supported"),
    }
}

/// Offset-indexed kernel table for a `shape` lattice with spacing `h`:
/// entry (dy + ny - 1, dx + nx - 1) approximates the cell average of
/// |z|^{-(N + p s)} over the h-cell centered at (dx*h, dy*h); the zero offset
/// is 0 (pairs are distinct). Near-diagonal entries are integrated with
/// tensor Gauss-Legendre, far ones use the midpoint value.
pub struct KernelTable {
    pub dim: usize,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    /// (2 ny - 1) rows by (2 nx - 1) columns, row-major.
    pub k: Vec<f64>,
}

impl KernelTable {
    pub fn build(dim: usize, h: f64, shape: [usize; 2], exponent: f64) -> KernelTable {
        let (nx, ny) = (shape[0], shape[1]);
        let wx = 2 * nx - 1;
        let wy = 2 * ny - 1;
        let mut k = vec![0.0; wx * wy];
        // Cells within this Chebyshev radius get the exact/high-order cell average.
        const NEAR: i64 = 8;
        let (gx, gw) = gauss_legendre(24);
        for dy in -(ny as i64 - 1)..=(ny as i64 - 1) {
            for dx in -(nx as i64 - 1)..=(nx as i64 - 1) {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let idx = ((dy + ny as i64 - 1) as usize) * wx + (dx + nx as i64 - 1) as usize;
                let near = dx.abs() <= NEAR && dy.abs() <= NEAR;
                k[idx] = if dim == 1 {
                    if near {
                        cell_average_1d(dx, h, exponent)
                    } else {
                        ((dx as f64) * h).abs().powf(-exponent)
                    }
                } else if near {
                    cell_average_2d(dx, dy, h, exponent, &gx, &gw)
                } else {
                    let zx = dx as f64 * h;
                    let zy = dy as f64 * h;
                    (zx * zx + zy * zy).sqrt().powf(-exponent)
                };
            }
        }
        KernelTable { dim, h, nx, ny, k }
    }

    #[inline(always)]
    pub fn row(&self, dy: i64) -> &[f64] {
        let wx = 2 * self.nx - 1;
        let r = (dy + self.ny as i64 - 1) as usize;
        &self.k[r * wx..(r + 1) * wx]
    }
}

/// Exact cell average of |z|^{-e} over [(dx-1/2)h, (dx+1/2)h], dx != 0.
fn cell_average_1d(dx: i64, h: f64, e: f64) -> f64 {
    let a = (dx.abs() as f64 - 0.5) * h;
    let b = (dx.abs() as f64 + 0.5) * h;
    // integral of z^{-e} over [a,b] = (a^{1-e} - b^{1-e}) / (e - 1)
    (a.powf(1.0 - e) - b.powf(1.0 - e)) / ((e - 1.0) * h)
}

/// Tensor Gauss-Legendre cell average of |z|^{-e} over the h-cell at offset
/// (dx, dy) != 0.
fn cell_average_2d(dx: i64, dy: i64, h: f64, e: f64, gx: &[f64], gw: &[f64]) -> f64 {
    let cx = dx as f64 * h;
    let cy = dy as f64 * h;
    let half = h / 2.0;
    let mut acc = 0.0;
    for (i, &xi) in gx.iter().enumerate() {
        let zx = cx + half * xi;
        for (j, &yj) in gx.iter().enumerate() {
            let zy = cy + half * yj;
            let r = (zx * zx + zy * zy).sqrt();
            acc += gw[i] * gw[j] * r.powf(-e);
        }
    }
    // weights integrate to 4 over the reference square
    acc / 4.0
}

/// Exact integral of |x - y|^{-(N + ps)} over y outside the box, for every
/// node x of the box. In 1d the integral is analytic; in 2d it reduces to an
/// angular quadrature of r(theta)^{-ps}/(ps) with r the exit distance,
/// integrated per corner-delimited arc where the integrand is smooth.
pub fn far_closure(
    dim: usize,
    origin: [f64; 2],
    shape: [usize; 2],
    h: f64,
    ps: f64,
) -> Vec<f64> {
    let nx = shape[0];
    let ny = shape[1];
    // The box complement starts half a cell outside the outermost nodes.
    let lo = [origin[0] - 0.5 * h, origin[1] - 0.5 * h];
    let hi = [
        origin[0] + (nx as f64 - 1.0 + 0.5) * h,
        origin[1] + (ny as f64 - 1.0 + 0.5) * h,
    ];
    let mut out = vec![0.0; nx * ny];
    if dim == 1 {
        for ix in 0..nx {
            let x = origin[0] + ix as f64 * h;
            out[ix] = ((hi[0] - x).powf(-ps) + (x - lo[0]).powf(-ps)) / ps;
        }
        return out;
    }
    let (gx, gw) = gauss_legendre(32);
    for iy in 0..ny {
        for ix in 0..nx {
            let x = [origin[0] + ix as f64 * h, origin[1] + iy as f64 * h];
            // corner angles, sorted
            let mut angs = [
                (hi[0] - x[0]).atan2(hi[1] - x[1]),
                (hi[0] - x[0]).atan2(lo[1] - x[1]),
                (lo[0] - x[0]).atan2(hi[1] - x[1]),
                (lo[0] - x[0]).atan2(lo[1] - x[1]),
            ];
            angs.sort_by(f64::total_cmp);
            let mut acc = 0.0;
            for seg in 0..4 {
                let a = angs[seg];
                let b = if seg == 3 { angs[0] + 2.0 * PI } else { angs[seg + 1] };
                if b - a < 1e-15 {
                    continue;
                }
                let mid = 0.5 * (b - a);
                let cen = 0.5 * (a + b);
                let mut seg_acc = 0.0;
                for (i, &xi) in gx.iter().enumerate() {
                    let th = cen + mid * xi;
                    let r = box_exit_distance(x, lo, hi, th);
                    seg_acc += gw[i] * r.powf(-ps);
                }
                acc += seg_acc * mid;
            }
            out[iy * nx + ix] = acc / ps;
        }
    }
    out
}

/// Distance from an interior point of the box to its boundary along (sin is
/// the y-component): direction (sin th, cos th) to match atan2(dx, dy) above.
fn box_exit_distance(x: [f64; 2], lo: [f64; 2], hi: [f64; 2], th: f64) -> f64 {
    let (s, c) = th.sin_cos();
    let mut r = f64::INFINITY;
    if s > 1e-300 {
        r = r.min((hi[0] - x[0]) / s);
    } else if s < -1e-300 {
        r = r.min((lo[0] - x[0]) / s);
    }
    if c > 1e-300 {
        r = r.min((hi[1] - x[1]) / c);
    } else if c < -1e-300 {
        r = r.min((lo[1] - x[1]) / c);
    }
    r
}
