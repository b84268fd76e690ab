//! Discrete Gagliardo energy, its nodal gradient and the residual field on a
//! uniform lattice. The energy is the all-pairs sum
//!   J(u) = (1/p) sum_{x != y} h^{2N} K(x-y) |u(x)-u(y)|^p  +  far-field closure,
//! with K the cell-averaged kernel |z|^{-(N+ps)} and the closure the exact
//! integral of the kernel over the box complement (where every admissible u
//! vanishes). The nodal gradient doubles as the pointwise operator value:
//! grad J(x) / h^N approximates the operator at node x.
//!
//! For p = 2 the gradient is a lattice convolution and is evaluated through
//! FFTs; the nonlinear path is a blocked direct sum parallelized over rows
//! with a fixed chunk order, so results are bit-deterministic.

use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::Fft;

use crate::error::{FracError, Result};
use crate::grid::{Field, Grid};
use crate::kernel::{far_closure, KernelTable, PowKind};

/// Deterministic compensated sum.
#[derive(Default, Clone, Copy)]
pub struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    #[inline(always)]
    pub fn add(&mut self, v: f64) {
        let y = v - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }
    pub fn value(&self) -> f64 {
        self.sum
    }
}

pub fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut k = Kahan::default();
    for v in values {
        k.add(v);
    }
    k.value()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut k = Kahan::default();
    for (x, y) in a.iter().zip(b) {
        k.add(x * y);
    }
    k.value()
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

const PAR_CHUNK: usize = 64;

pub struct Assembler {
    pub grid: Arc<Grid>,
    pub p: f64,
    pub s: f64,
    pub pow: PowKind,
    ker: KernelTable,
    /// Exact kernel integral over the box complement, per node.
    far: Vec<f64>,
    /// Solve mask (unknown nodes); defaults to the grid interior.
    pub mask: Vec<bool>,
    pub mask_indices: Vec<usize>,
    /// sum_{y in box, y != x} K(x-y), per node.
    ksum: Vec<f64>,
    /// sum_{y in box \ mask} K(x-y), per mask node (0 elsewhere).
    wext: Vec<f64>,
    fft: FftConv,
}

impl Assembler {
    pub fn new(grid: Arc<Grid>, p: f64, s: f64) -> Result<Assembler> {
        let mask = grid.interior.clone();
        Self::with_mask(grid, p, s, mask)
    }

    pub fn with_mask(grid: Arc<Grid>, p: f64, s: f64, mask: Vec<bool>) -> Result<Assembler> {
        if p < 2.0 {
            return Err(FracError::Contract(format!("degenerate regime requires p >= 2, got {p}")));
        }
        if !(s > 0.0 && s < 1.0) {
            return Err(FracError::Contract(format!("s must lie in (0,1), got {s}")));
        }
        if mask.len() != grid.len() {
            return Err(FracError::Contract("mask length does not match grid".into()));
        }
        for (idx, &m) in mask.iter().enumerate() {
            if m && !grid.interior[idx] {
                return Err(FracError::Contract("mask includes exterior nodes".into()));
            }
        }
        grid.check_assembly_cap(&mask)?;
        let dim = grid.dim;
        let exponent = dim as f64 + p * s;
        let ker = KernelTable::build(dim, grid.h, grid.shape, exponent);
        let far = far_closure(dim, grid.origin, grid.shape, grid.h, p * s);
        let fft = FftConv::plan(&grid, &ker);
        let ksum = fft.convolve(&vec![1.0; grid.len()]);
        let mask_vec: Vec<f64> = mask.iter().map(|&m| if m { 1.0 } else { 0.0 }).collect();
        let kmask = fft.convolve(&mask_vec);
        let mut wext = vec![0.0; grid.len()];
        let mask_indices: Vec<usize> =
            (0..grid.len()).filter(|&i| mask[i]).collect();
        for &i in &mask_indices {
            wext[i] = (ksum[i] - kmask[i]).max(0.0);
        }
        Ok(Assembler {
            grid,
            p,
            s,
            pow: PowKind::from_p(p),
            ker,
            far,
            mask,
            mask_indices,
            ksum,
            wext,
            fft,
        })
    }

    pub fn h_pow_n(&self) -> f64 {
        self.grid.cell_volume()
    }

    fn h2n(&self) -> f64 {
        let hn = self.h_pow_n();
        hn * hn
    }

    /// Row sums at node `x_idx` over the whole box lattice:
    /// (sum K |u(x)-u(y)|^p, sum K (u(x)-u(y))^{p-1}).
    #[inline]
    fn row_sums(&self, u: &[f64], x_idx: usize) -> (f64, f64) {
        let nx = self.grid.shape[0];
        let ny = self.grid.shape[1];
        let ix = x_idx % nx;
        let iy = x_idx / nx;
        let ux = u[x_idx];
        let col0 = nx - 1 - ix;
        let pow = self.pow;
        let mut e = Kahan::default();
        let mut g = Kahan::default();
        for jy in 0..ny {
            // K(x-y) = K(y-x); row indexed by jy - iy, columns forward in jx.
            let krow = self.ker.row(jy as i64 - iy as i64);
            let krow = &krow[col0..col0 + nx];
            let urow = &u[jy * nx..jy * nx + nx];
            let mut re = 0.0;
            let mut rg = 0.0;
            for jx in 0..nx {
                let d = ux - urow[jx];
                let k = krow[jx];
                re += k * pow.abs_p(d);
                rg += k * pow.signed(d);
            }
            e.add(re);
            g.add(rg);
        }
        (e.value(), g.value())
    }

    #[inline]
    fn row_sum_energy(&self, u: &[f64], x_idx: usize) -> f64 {
        let nx = self.grid.shape[0];
        let ny = self.grid.shape[1];
        let ix = x_idx % nx;
        let iy = x_idx / nx;
        let ux = u[x_idx];
        let col0 = nx - 1 - ix;
        let pow = self.pow;
        let mut e = Kahan::default();
        for jy in 0..ny {
            let krow = self.ker.row(jy as i64 - iy as i64);
            let krow = &krow[col0..col0 + nx];
            let urow = &u[jy * nx..jy * nx + nx];
            let mut re = 0.0;
            for jx in 0..nx {
                let d = ux - urow[jx];
                re += krow[jx] * pow.abs_p(d);
            }
            e.add(re);
        }
        e.value()
    }

    fn check_support(&self, u: &[f64]) -> Result<()> {
        for (i, &v) in u.iter().enumerate() {
            if v != 0.0 && !self.mask[i] {
                return Err(FracError::Contract(
                    "field has support outside the assembler mask".into(),
                ));
            }
        }
        Ok(())
    }

    /// Discrete energy J(u) for u supported on the mask. Returns +inf when a
    /// value is non-finite.
    pub fn energy(&self, u: &[f64]) -> Result<f64> {
        self.check_support(u)?;
        if !u.iter().all(|v| v.is_finite()) {
            return Ok(f64::INFINITY);
        }
        Ok(self.energy_unchecked(u))
    }

    fn energy_unchecked(&self, u: &[f64]) -> f64 {
        if !u.iter().all(|v| v.is_finite()) {
            return f64::INFINITY;
        }
        let hn = self.h_pow_n();
        let h2n = self.h2n();
        let pow = self.pow;
        let chunk_sums: Vec<f64> = self
            .mask_indices
            .par_chunks(PAR_CHUNK)
            .map(|chunk| {
                let mut acc = Kahan::default();
                for &i in chunk {
                    let e = self.row_sum_energy(u, i);
                    let upx = pow.abs_p(u[i]);
                    acc.add(h2n * (e + self.wext[i] * upx) + 2.0 * hn * self.far[i] * upx);
                }
                acc.value()
            })
            .collect();
        kahan_sum(chunk_sums) / self.p
    }

    /// Nodal gradient of J at the mask nodes (zero elsewhere).
    pub fn grad(&self, u: &[f64]) -> Vec<f64> {
        let hn = self.h_pow_n();
        let h2n = self.h2n();
        let pow = self.pow;
        let mut out = vec![0.0; u.len()];
        let results: Vec<(usize, f64)> = self
            .mask_indices
            .par_chunks(PAR_CHUNK)
            .flat_map_iter(|chunk| {
                chunk.iter().map(|&i| {
                    let (_, g) = self.row_sums(u, i);
                    (i, 2.0 * h2n * g + 2.0 * hn * self.far[i] * pow.signed(u[i]))
                })
            })
            .collect();
        for (i, v) in results {
            out[i] = v;
        }
        out
    }

    /// Energy and gradient in one sweep (the solver hot path).
    pub fn fused(&self, u: &[f64]) -> (f64, Vec<f64>) {
        if !u.iter().all(|v| v.is_finite()) {
            return (f64::INFINITY, vec![0.0; u.len()]);
        }
        if matches!(self.pow, PowKind::Linear) {
            let g = self.grad_linear(u);
            let mut phi = Kahan::default();
            for &i in &self.mask_indices {
                phi.add(g[i] * u[i]);
            }
            return (phi.value() / 2.0, g);
        }
        let hn = self.h_pow_n();
        let h2n = self.h2n();
        let pow = self.pow;
        let mut grad = vec![0.0; u.len()];
        let results: Vec<(f64, Vec<(usize, f64)>)> = self
            .mask_indices
            .par_chunks(PAR_CHUNK)
            .map(|chunk| {
                let mut acc = Kahan::default();
                let mut gs = Vec::with_capacity(chunk.len());
                for &i in chunk {
                    let (e, g) = self.row_sums(u, i);
                    let ui = u[i];
                    let upx = pow.abs_p(ui);
                    // The energy mirror term w_ext covers the ordered pairs
                    // whose outer index is off-mask; the gradient row already
                    // sums over the whole box, so it takes no such term.
                    acc.add(h2n * (e + self.wext[i] * upx) + 2.0 * hn * self.far[i] * upx);
                    gs.push((i, 2.0 * h2n * g + 2.0 * hn * self.far[i] * pow.signed(ui)));
                }
                (acc.value(), gs)
            })
            .collect();
        let mut e_total = Kahan::default();
        for (e, gs) in results {
            e_total.add(e);
            for (i, v) in gs {
                grad[i] = v;
            }
        }
        (e_total.value() / self.p, grad)
    }

    /// Gradient of the p = 2 quadratic form on the same kernel, at every box
    /// node, via FFT convolution. Used by the conjugate-gradient initializer
    /// and as the fast path when p = 2.
    pub fn grad_linear(&self, u: &[f64]) -> Vec<f64> {
        let hn = self.h_pow_n();
        let h2n = self.h2n();
        let conv = self.fft.convolve(u);
        let mut out = vec![0.0; u.len()];
        for i in 0..u.len() {
            out[i] = 2.0 * h2n * (u[i] * self.ksum[i] - conv[i]) + 2.0 * hn * self.far[i] * u[i];
        }
        out
    }

    /// Jacobi diagonal of the p = 2 form.
    pub fn diag_linear(&self) -> Vec<f64> {
        let hn = self.h_pow_n();
        let h2n = self.h2n();
        (0..self.grid.len())
            .map(|i| 2.0 * h2n * self.ksum[i] + 2.0 * hn * self.far[i])
            .collect()
    }

    /// Operator value (-Delta)_p^s u at a single box node: grad J(x) / h^N.
    /// For exterior nodes this is the plain kernel sum against -u.
    pub fn flap_at_node(&self, u: &[f64], idx: usize) -> f64 {
        let hn = self.h_pow_n();
        let h2n = self.h2n();
        let (_, g) = self.row_sums(u, idx);
        (2.0 * h2n * g + 2.0 * hn * self.far[idx] * self.pow.signed(u[idx])) / hn
    }

    /// Residual field: grad J(u) - h^N f at mask nodes, zero elsewhere.
    pub fn residual(&self, u: &Field, f: &Field) -> Result<Field> {
        u.require_dirichlet("residual")?;
        f.require_dirichlet("residual")?;
        if !u.same_grid(f)
            || u.grid.shape != self.grid.shape
            || u.grid.h != self.grid.h
            || u.grid.origin != self.grid.origin
        {
            return Err(FracError::Contract("residual: fields on different grids".into()));
        }
        let mut g = self.grad(&u.values);
        let hn = self.h_pow_n();
        for &i in &self.mask_indices {
            g[i] -= hn * f.values[i];
        }
        Ok(Field::from_values(self.grid.clone(), g, crate::grid::FieldKind::Dirichlet)?)
    }

    /// Load vector h^N f restricted to the mask.
    pub fn load(&self, f: &Field) -> Vec<f64> {
        let hn = self.h_pow_n();
        let mut out = vec![0.0; f.values.len()];
        for &i in &self.mask_indices {
            out[i] = hn * f.values[i];
        }
        out
    }
}

/// Zero-padded FFT convolution with the kernel table on the box lattice.
struct FftConv {
    nx: usize,
    ny: usize,
    px: usize,
    py: usize,
    fx: Arc<dyn Fft<f64>>,
    fx_inv: Arc<dyn Fft<f64>>,
    fy: Option<(Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>)>,
    kernel_hat: Vec<Complex<f64>>,
}

impl FftConv {
    fn plan(grid: &Grid, ker: &KernelTable) -> FftConv {
        let nx = grid.shape[0];
        let ny = grid.shape[1];
        let px = (2 * nx - 1).next_power_of_two();
        let py = if ny > 1 { (2 * ny - 1).next_power_of_two() } else { 1 };
        let mut planner = rustfft::FftPlanner::new();
        let fx = planner.plan_fft_forward(px);
        let fx_inv = planner.plan_fft_inverse(px);
        let fy = if ny > 1 {
            Some((planner.plan_fft_forward(py), planner.plan_fft_inverse(py)))
        } else {
            None
        };
        // embed kernel with wrap-around indexing
        let mut kpad = vec![Complex::new(0.0, 0.0); px * py];
        let wx = 2 * nx - 1;
        for dy in -(ny as i64 - 1)..=(ny as i64 - 1) {
            let row = ker.row(dy);
            let ry = ((dy + py as i64) % py as i64) as usize;
            for (col, &kv) in row.iter().enumerate().take(wx) {
                let dx = col as i64 - (nx as i64 - 1);
                let rx = ((dx + px as i64) % px as i64) as usize;
                kpad[ry * px + rx] = Complex::new(kv, 0.0);
            }
        }
        let mut conv = FftConv { nx, ny, px, py, fx, fx_inv, fy, kernel_hat: Vec::new() };
        conv.fft2(&mut kpad, true);
        conv.kernel_hat = kpad;
        conv
    }

    fn fft2(&self, data: &mut [Complex<f64>], forward: bool) {
        let (px, py) = (self.px, self.py);
        let plan_x = if forward { &self.fx } else { &self.fx_inv };
        for row in data.chunks_exact_mut(px) {
            plan_x.process(row);
        }
        if let Some((fyf, fyi)) = &self.fy {
            let plan_y = if forward { fyf } else { fyi };
            let mut col = vec![Complex::new(0.0, 0.0); py];
            for cx in 0..px {
                for (ry, c) in col.iter_mut().enumerate() {
                    *c = data[ry * px + cx];
                }
                plan_y.process(&mut col);
                for (ry, c) in col.iter().enumerate() {
                    data[ry * px + cx] = *c;
                }
            }
        }
    }

    /// (K * u)(x) = sum_y K(x - y) u(y) for every box node x.
    fn convolve(&self, u: &[f64]) -> Vec<f64> {
        let (nx, ny, px, py) = (self.nx, self.ny, self.px, self.py);
        let mut upad = vec![Complex::new(0.0, 0.0); px * py];
        for iy in 0..ny {
            for ix in 0..nx {
                upad[iy * px + ix] = Complex::new(u[iy * nx + ix], 0.0);
            }
        }
        self.fft2(&mut upad, true);
        for (a, b) in upad.iter_mut().zip(&self.kernel_hat) {
            *a *= *b;
        }
        self.fft2(&mut upad, false);
        let scale = 1.0 / (px as f64 * py as f64);
        let mut out = vec![0.0; nx * ny];
        for iy in 0..ny {
            for ix in 0..nx {
                out[iy * nx + ix] = upad[iy * px + ix].re * scale;
            }
        }
        out
    }
}
