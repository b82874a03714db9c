//! Neumann Poisson solves on the slab: Fourier-diagonal in the periodic
//! directions, dense collocation solves in the wall-normal direction.
//!
//! For each tangential wavenumber pair the operator reduces to a 1D Helmholtz
//! system `(D² − κ²I)` on the normal nodes with derivative rows imposing the
//! wall flux. The κ² per bin is the effective one — what applying the
//! spectral first derivative twice implements — which vanishes not only for
//! the mean mode but also for the unpaired highest mode on each even-sized
//! tangential axis. Every zero-κ² block is singular up to constants, so one
//! interior collocation row is traded for a quadrature row that pins the
//! bin's mean to zero. Factors are cached per κ² and reused across
//! right-hand sides.

use std::collections::HashMap;

use machslab_grid::{Field, SlabGrid};
use ndarray::{Array2, Array3};
use num_complex::Complex64;

use crate::lu::LuFactors;
use crate::IncError;

/// Relative residual target of the variable-coefficient iteration.
pub const VAR_COEFF_TOL: f64 = 1e-11;
/// Iteration cap of the variable-coefficient solve.
pub const VAR_COEFF_MAX_ITERS: usize = 200;

struct CachedBlock {
    lu: LuFactors,
    /// Interior row replaced by the zero-mean quadrature row (zero
    /// effective-wavenumber block only).
    mean_row: Option<usize>,
}

/// Reusable workspace for Poisson/Helmholtz solves with wall-flux conditions.
pub struct PoissonWorkspace {
    grid: SlabGrid,
    n1: usize,
    n2: usize,
    n3: usize,
    k1_sq: Vec<f64>,
    k2_sq: Vec<f64>,
    d1: Array2<f64>,
    d2: Array2<f64>,
    weights_normal: Vec<f64>,
    cache: HashMap<u64, CachedBlock>,
}

impl PoissonWorkspace {
    pub fn new(grid: &SlabGrid) -> PoissonWorkspace {
        let (n3, n2, n1) = grid.shape();
        let d1 = grid.diff_matrix_normal().clone();
        let d2 = d1.dot(&d1);
        // Effective squared wavenumbers: what the spectral first derivative
        // applied twice actually implements. The derivative multiplier
        // annihilates the unpaired highest mode, so that bin carries an
        // effective wavenumber of zero — it must be solved like the mean
        // mode (zero-mean row included), not as a Helmholtz shift, or the
        // inverted operator disagrees with the discrete divergence of the
        // gradient on exactly that bin.
        let mut k1_sq: Vec<f64> = grid.kappa(1).iter().map(|k| k * k).collect();
        if n1 % 2 == 0 {
            k1_sq[n1 / 2] = 0.0;
        }
        let mut k2_sq: Vec<f64> = if grid.dim() == 3 {
            grid.kappa(2).iter().map(|k| k * k).collect()
        } else {
            vec![0.0]
        };
        if grid.dim() == 3 && n2 % 2 == 0 {
            k2_sq[n2 / 2] = 0.0;
        }
        PoissonWorkspace {
            grid: grid.clone(),
            n1,
            n2,
            n3,
            k1_sq,
            k2_sq,
            d1,
            d2,
            weights_normal: grid.weights_normal().to_vec(),
            cache: HashMap::new(),
        }
    }

    pub fn grid(&self) -> &SlabGrid {
        &self.grid
    }

    fn block(&mut self, ksq: f64) -> Result<&CachedBlock, IncError> {
        let key = ksq.to_bits();
        if !self.cache.contains_key(&key) {
            let built = build_block(&self.d1, &self.d2, &self.weights_normal, ksq)?;
            self.cache.insert(key, built);
        }
        Ok(self.cache.get(&key).expect("inserted above"))
    }

    /// Solve `Δφ = rhs` in the interior with `∂ₙφ` at the walls given by the
    /// wall rows of `wall_flux` (zero flux if `None`); returns zero-mean `φ`.
    ///
    /// Interior collocation rows use the right-hand side; wall rows use the
    /// flux. For compatible data (volume integral of `rhs` equal to the net
    /// boundary flux, which holds identically for divergence/trace pairs) the
    /// replaced κ=0 row is satisfied automatically to roundoff.
    pub fn solve_const_neumann(
        &mut self,
        rhs: &Field,
        wall_flux: Option<&Field>,
    ) -> Result<Field, IncError> {
        self.check_layout(rhs)?;
        if let Some(f) = wall_flux {
            self.check_layout(f)?;
        }
        let (n1, n2, n3) = (self.n1, self.n2, self.n3);
        let rhat = self.grid.fft_tangential(rhs.values());
        let fhat = wall_flux.map(|f| self.grid.fft_tangential(f.values()));
        let mut phat = Array3::<Complex64>::zeros((n3, n2, n1));
        let mut b_re = vec![0.0_f64; n3];
        let mut b_im = vec![0.0_f64; n3];
        for i2 in 0..n2 {
            for i1 in 0..n1 {
                let ksq = self.k1_sq[i1] + self.k2_sq[i2];
                let block = self.block(ksq)?;
                for j in 0..n3 {
                    let c = rhat[(j, i2, i1)];
                    b_re[j] = c.re;
                    b_im[j] = c.im;
                }
                let (fb, ft) = match &fhat {
                    Some(f) => (f[(0, i2, i1)], f[(n3 - 1, i2, i1)]),
                    None => (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
                };
                b_re[0] = fb.re;
                b_im[0] = fb.im;
                b_re[n3 - 1] = ft.re;
                b_im[n3 - 1] = ft.im;
                if let Some(row) = block.mean_row {
                    b_re[row] = 0.0;
                    b_im[row] = 0.0;
                }
                block.lu.solve_in_place(&mut b_re);
                block.lu.solve_in_place(&mut b_im);
                for j in 0..n3 {
                    phat[(j, i2, i1)] = Complex64::new(b_re[j], b_im[j]);
                }
            }
        }
        let values = self.grid.ifft_tangential(phat);
        let mut phi = Field::from_values(&self.grid, values)?;
        let mean = phi.mean();
        if mean != 0.0 {
            phi = phi.map(|v| v - mean);
        }
        Ok(phi)
    }

    /// Solve `∇·(β∇φ) = rhs` with `β∂ₙφ` at the walls given by the wall rows
    /// of `wall_flux` (zero if `None`); returns zero-mean `φ`.
    ///
    /// Richardson iteration preconditioned by the constant-coefficient solve
    /// at the mean of `β`; converges geometrically while `β` stays within a
    /// factor of two of its mean. A spatially constant `β` finishes in one
    /// preconditioner application.
    pub fn solve_var_neumann(
        &mut self,
        beta: &Field,
        rhs: &Field,
        wall_flux: Option<&Field>,
    ) -> Result<Field, IncError> {
        self.check_layout(beta)?;
        self.check_layout(rhs)?;
        if let Some(f) = wall_flux {
            self.check_layout(f)?;
        }
        let beta_min = beta.values().iter().cloned().fold(f64::INFINITY, f64::min);
        if !(beta_min > 0.0) {
            return Err(IncError::NonPositiveCoefficient { min: beta_min });
        }
        let beta_bar = beta.mean();
        let inv_bar = 1.0 / beta_bar;
        let beta_dev = beta
            .values()
            .iter()
            .fold(0.0_f64, |m, &v| m.max((v - beta_bar).abs()));
        if beta_dev <= 1e-14 * beta_bar {
            // Spatially constant coefficient: one direct transform-space solve.
            let scaled_flux = wall_flux.map(|f| f.scaled(inv_bar));
            return self.solve_const_neumann(&rhs.scaled(inv_bar), scaled_flux.as_ref());
        }

        // The discretization enforces the equation at interior nodes except
        // the row traded for the zero-mean constraint (zero effective-
        // wavenumber bins only); that component is redundant for compatible
        // data and must not count toward the residual.
        let mean_row = self.kappa0_mean_row()?;

        let mut phi = Field::zeros(&self.grid);
        let mut denom = 0.0_f64;
        let mut rel = f64::INFINITY;
        let mut res_prev = f64::INFINITY;
        let mut stagnant = 0_usize;
        let mut iters_done = 0_usize;
        for _iter in 0..VAR_COEFF_MAX_ITERS {
            iters_done = _iter + 1;
            // Residual of the interior equation and of the wall-flux condition.
            let (mut r_int, r_flux) = self.var_residual(beta, rhs, wall_flux, &phi);
            remove_traded_components(&mut r_int, mean_row);
            let res = residual_norm(&r_int, &r_flux);
            if denom == 0.0 {
                denom = res;
                if denom == 0.0 {
                    // Zero data: the zero-mean solution is identically zero.
                    return Ok(phi);
                }
            }
            rel = res / denom;
            if rel <= VAR_COEFF_TOL {
                return Ok(zero_mean(phi));
            }
            // A strict contraction that stops contracting has reached the
            // floating-point floor; accept provided real progress was made.
            // Initial data already at roundoff scale floors within a few
            // steps at a relative residual of a few percent, so the
            // acceptance window must sit well above that — while a genuine
            // failure to contract parks the relative residual near or
            // above one, far outside it.
            stagnant = if res >= 0.99 * res_prev { stagnant + 1 } else { 0 };
            if stagnant >= 5 {
                if rel <= 1e-1 {
                    return Ok(zero_mean(phi));
                }
                break;
            }
            res_prev = res;
            let delta = self.solve_const_neumann(
                &r_int.scaled(inv_bar),
                Some(&r_flux.scaled(inv_bar)),
            )?;
            phi.add_scaled(1.0, &delta);
        }
        Err(IncError::PoissonNonConvergence {
            iters: iters_done,
            rel_residual: rel,
        })
    }

    /// Interior residual `rhs − ∇·(β∇φ)` and wall residual `flux − β∂ₙφ`.
    fn var_residual(
        &self,
        beta: &Field,
        rhs: &Field,
        wall_flux: Option<&Field>,
        phi: &Field,
    ) -> (Field, Field) {
        let dim = self.grid.dim();
        let mut div = beta
            .zip_with(&phi.dx(1), |b, g| b * g)
            .dx(1);
        for axis in 2..=dim {
            let flux_axis = beta.zip_with(&phi.dx(axis), |b, g| b * g);
            div.add_scaled(1.0, &flux_axis.dx(axis));
        }
        let r_int = rhs.zip_with(&div, |a, b| a - b);
        let beta_dn = beta.zip_with(&phi.dx(dim), |b, g| b * g);
        let r_flux = match wall_flux {
            Some(f) => f.zip_with(&beta_dn, |a, b| a - b),
            None => beta_dn.scaled(-1.0),
        };
        (r_int, r_flux)
    }

    /// Interior row whose mean tangential mode carries the zero-mean
    /// constraint instead of the equation.
    fn kappa0_mean_row(&mut self) -> Result<usize, IncError> {
        Ok(self
            .block(0.0)?
            .mean_row
            .expect("kappa=0 block always replaces a row"))
    }

    fn check_layout(&self, f: &Field) -> Result<(), IncError> {
        if f.grid().same_layout(&self.grid) {
            Ok(())
        } else {
            Err(IncError::GridMismatch {
                expected: self.grid.shape(),
                got: f.grid().shape(),
            })
        }
    }
}

fn zero_mean(mut phi: Field) -> Field {
    let mean = phi.mean();
    if mean != 0.0 {
        phi = phi.map(|v| v - mean);
    }
    phi
}

/// Remove, at one normal row, the tangential components whose effective
/// wavenumber vanishes: the mean mode and (on even-sized axes) the unpaired
/// highest mode, whose sample pattern alternates sign node to node. Those
/// are exactly the bins whose collocation row at `row` is traded for the
/// zero-mean constraint.
fn remove_traded_components(f: &mut Field, row: usize) {
    let values = f.values_mut();
    let mut lane = values.index_axis_mut(ndarray::Axis(0), row);
    let (n2, n1) = (lane.shape()[0], lane.shape()[1]);
    let total = (n1 * n2) as f64;
    let even1 = n1 % 2 == 0;
    let even2 = n2 % 2 == 0;
    let (mut c00, mut c10, mut c01, mut c11) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for ((i2, i1), &v) in lane.indexed_iter() {
        let s1 = if i1 % 2 == 0 { 1.0 } else { -1.0 };
        let s2 = if i2 % 2 == 0 { 1.0 } else { -1.0 };
        c00 += v;
        c10 += s1 * v;
        c01 += s2 * v;
        c11 += s1 * s2 * v;
    }
    c00 /= total;
    c10 /= total;
    c01 /= total;
    c11 /= total;
    for ((i2, i1), v) in lane.indexed_iter_mut() {
        let s1 = if i1 % 2 == 0 { 1.0 } else { -1.0 };
        let s2 = if i2 % 2 == 0 { 1.0 } else { -1.0 };
        *v -= c00;
        if even1 {
            *v -= c10 * s1;
        }
        if even2 {
            *v -= c01 * s2;
        }
        if even1 && even2 {
            *v -= c11 * s1 * s2;
        }
    }
}

/// Combined size of the interior residual (L², wall rows excluded) and the
/// wall residual (L² over both wall planes).
fn residual_norm(r_int: &Field, r_flux: &Field) -> f64 {
    let mut interior = r_int.clone();
    interior.zero_walls_inplace();
    (interior.l2_norm_sq() + r_flux.wall_spectrum_norm_sq(0.0)).sqrt()
}

fn build_block(
    d1: &Array2<f64>,
    d2: &Array2<f64>,
    weights: &[f64],
    ksq: f64,
) -> Result<CachedBlock, IncError> {
    let n = d1.nrows();
    let assemble = |mean_row: Option<usize>| -> Array2<f64> {
        let mut m = d2.clone();
        for i in 0..n {
            m[[i, i]] -= ksq;
        }
        for c in 0..n {
            m[[0, c]] = d1[[0, c]];
            m[[n - 1, c]] = d1[[n - 1, c]];
        }
        if let Some(row) = mean_row {
            for c in 0..n {
                m[[row, c]] = weights[c];
            }
        }
        m
    };
    if ksq != 0.0 {
        let lu = LuFactors::factor(&assemble(None))
            .ok_or(IncError::EllipticSingular { kappa_sq: ksq })?;
        return Ok(CachedBlock { lu, mean_row: None });
    }
    // κ=0: pick an interior row for the zero-mean constraint, scanning
    // outward from the center in case a particular choice degenerates.
    let mid = n / 2;
    let mut candidates = vec![mid];
    for off in 1..n {
        if mid >= off + 1 {
            candidates.push(mid - off);
        }
        if mid + off <= n - 2 {
            candidates.push(mid + off);
        }
    }
    for row in candidates {
        if let Some(lu) = LuFactors::factor(&assemble(Some(row))) {
            return Ok(CachedBlock {
                lu,
                mean_row: Some(row),
            });
        }
    }
    Err(IncError::EllipticSingular { kappa_sq: ksq })
}
