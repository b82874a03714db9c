//! Discrete slab domain for wall-bounded spectral computation.
//!
//! The domain is a product of `dim - 1` periodic tangential directions
//! (uniform nodes, Fourier differentiation) and one wall-bounded normal
//! direction on Legendre–Gauss–Lobatto nodes over [-1, 1] (collocation
//! differentiation, quadrature exact to degree 2*n - 3). Both walls are
//! grid points, so wall values can be read and imposed exactly.
//!
//! Coordinate axes are 1-based: axes `1..dim` are tangential, axis `dim`
//! is wall-normal. Sample arrays are stored as `Array3<f64>` with layout
//! `[normal][axis-2][axis-1]` (the axis-1 direction is contiguous); in two
//! dimensions the middle extent is 1.

mod checkpoint;
mod lobatto;
mod spectral;

pub use checkpoint::{read_checkpoint, write_checkpoint, CHECKPOINT_MAGIC};

use ndarray::{Array2, Array3, ArrayView2, Axis, Order, Zip};
use num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

pub type Complex64 = Complex<f64>;

/// Default tangential spectral-filter exponent.
pub const FILTER_ORDER_DEFAULT: usize = 8;
/// Default tangential spectral-filter strength (damps the last retained
/// mode to roughly machine precision).
pub const FILTER_STRENGTH_DEFAULT: f64 = 36.0;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("dimension must be 2 or 3, got {0}")]
    InvalidDim(usize),
    #[error("dimension {dim} needs {expected} tangential mode counts, got {got}")]
    TangentialArity {
        dim: usize,
        expected: usize,
        got: usize,
    },
    #[error("tangential mode count {n} on axis {axis} must be even and at least 8")]
    TangentialCount { axis: usize, n: usize },
    #[error("wall-normal node count {0} must be odd and at least 9")]
    NormalCount(usize),
    #[error("tangential period {0} must be positive and finite")]
    InvalidPeriod(f64),
    #[error("axis {axis} out of range (valid: 1..={dim})")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("array shape {got:?} does not match grid shape {expected:?}")]
    ShapeMismatch {
        expected: (usize, usize, usize),
        got: (usize, usize, usize),
    },
    #[error("field contains a non-finite value")]
    NonFinite,
    #[error("vector field needs {expected} components, got {got}")]
    ComponentCount { expected: usize, got: usize },
    #[error("checkpoint {path}: {kind}")]
    Checkpoint { path: String, kind: String },
    #[error("I/O on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

struct GridInner {
    dim: usize,
    n_tangential: Vec<usize>,
    n_normal: usize,
    period: f64,
    nodes_normal: Vec<f64>,
    weights_normal: Vec<f64>,
    dmat: Array2<f64>,
    quad_weights: Array3<f64>,
    /// Per tangential axis (index 0 holds axis 1): FFT plans and
    /// precomputed diagonal multipliers.
    fft_fwd: Vec<Arc<dyn Fft<f64>>>,
    fft_inv: Vec<Arc<dyn Fft<f64>>>,
    deriv_mult: Vec<Vec<Complex64>>,
    dealias_mult: Vec<Vec<Complex64>>,
}

impl GridInner {
    fn shape(&self) -> (usize, usize, usize) {
        let n1 = self.n_tangential[0];
        let n2 = if self.dim == 3 { self.n_tangential[1] } else { 1 };
        (self.n_normal, n2, n1)
    }

    /// Array axis carrying tangential coordinate axis `axis` (1-based).
    fn array_axis_tangential(&self, axis: usize) -> usize {
        debug_assert!(axis >= 1 && axis < self.dim);
        if axis == 1 {
            2
        } else {
            1
        }
    }

    fn normal_deriv(&self, values: &Array3<f64>) -> Array3<f64> {
        let (n3, n2, n1) = values.dim();
        let flat = values
            .view()
            .into_shape_with_order(((n3, n2 * n1), Order::RowMajor))
            .expect("field arrays are standard layout");
        let out = self.dmat.dot(&flat);
        out.into_shape_with_order(((n3, n2, n1), Order::RowMajor))
            .expect("product is standard layout")
    }

    fn plane_weighted_spectrum(&self, plane: ArrayView2<f64>, exponent: f64) -> f64 {
        let (n2, n1) = plane.dim();
        let mut c = plane.mapv(|v| Complex::new(v, 0.0));
        let transform_axis = |c: &mut Array2<Complex64>, axis: usize, plan: &Arc<dyn Fft<f64>>| {
            let n = c.len_of(Axis(axis));
            let mut buf = vec![Complex::new(0.0, 0.0); n];
            let mut scratch = vec![Complex::new(0.0, 0.0); plan.get_inplace_scratch_len()];
            for mut lane in c.lanes_mut(Axis(axis)) {
                for (b, v) in buf.iter_mut().zip(lane.iter()) {
                    *b = *v;
                }
                plan.process_with_scratch(&mut buf, &mut scratch);
                for (v, b) in lane.iter_mut().zip(buf.iter()) {
                    *v = *b;
                }
            }
        };
        transform_axis(&mut c, 1, &self.fft_fwd[0]);
        if self.dim == 3 {
            transform_axis(&mut c, 0, &self.fft_fwd[1]);
        }
        let k_base = 2.0 * std::f64::consts::PI / self.period;
        let norm = 1.0 / (n1 as f64 * n2 as f64);
        let surface_measure = self.period.powi(self.dim as i32 - 1);
        let mut total = 0.0;
        for b2 in 0..n2 {
            let kappa2 = if self.dim == 3 {
                k_base * spectral::mode_of_bin(b2, n2) as f64
            } else {
                0.0
            };
            for b1 in 0..n1 {
                let kappa1 = k_base * spectral::mode_of_bin(b1, n1) as f64;
                let weight = (1.0 + kappa1 * kappa1 + kappa2 * kappa2).powf(exponent);
                let amp = c[[b2, b1]].norm_sqr() * norm * norm;
                total += weight * amp * surface_measure;
            }
        }
        total
    }
}

/// Immutable, cheaply clonable handle to the discretized slab domain.
#[derive(Clone)]
pub struct SlabGrid(Arc<GridInner>);

impl fmt::Debug for SlabGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SlabGrid")
            .field("dim", &self.0.dim)
            .field("n_tangential", &self.0.n_tangential)
            .field("n_normal", &self.0.n_normal)
            .field("period", &self.0.period)
            .finish()
    }
}

/// Build the discrete slab: `dim` in {2, 3}, even tangential mode counts
/// (>= 8, one per tangential axis), an odd wall-normal node count >= 9, and
/// the tangential period.
pub fn build_grid(
    dim: usize,
    n_tangential: &[usize],
    n_normal: usize,
    period: f64,
) -> Result<SlabGrid, GridError> {
    if dim != 2 && dim != 3 {
        return Err(GridError::InvalidDim(dim));
    }
    if n_tangential.len() != dim - 1 {
        return Err(GridError::TangentialArity {
            dim,
            expected: dim - 1,
            got: n_tangential.len(),
        });
    }
    for (i, &n) in n_tangential.iter().enumerate() {
        if n < 8 || n % 2 != 0 {
            return Err(GridError::TangentialCount { axis: i + 1, n });
        }
    }
    if n_normal < 9 || n_normal % 2 == 0 {
        return Err(GridError::NormalCount(n_normal));
    }
    if !(period.is_finite() && period > 0.0) {
        return Err(GridError::InvalidPeriod(period));
    }

    let (nodes_normal, weights_normal) = lobatto::lobatto_nodes_weights(n_normal);
    let dmat = lobatto::lobatto_diff_matrix(&nodes_normal);

    let n1 = n_tangential[0];
    let n2 = if dim == 3 { n_tangential[1] } else { 1 };
    let tangential_cell = period / n1 as f64 * if dim == 3 { period / n2 as f64 } else { 1.0 };
    let quad_weights = Array3::from_shape_fn((n_normal, n2, n1), |(i3, _, _)| {
        weights_normal[i3] * tangential_cell
    });

    let mut planner = FftPlanner::<f64>::new();
    let mut fft_fwd = Vec::new();
    let mut fft_inv = Vec::new();
    let mut deriv_mult = Vec::new();
    let mut dealias_mult = Vec::new();
    let k_base = 2.0 * std::f64::consts::PI / period;
    for &n in n_tangential {
        fft_fwd.push(planner.plan_fft_forward(n));
        fft_inv.push(planner.plan_fft_inverse(n));
        let keep = (n / 3) as i64;
        let mut dm = Vec::with_capacity(n);
        let mut am = Vec::with_capacity(n);
        for bin in 0..n {
            let k = spectral::mode_of_bin(bin, n);
            // The unpaired highest mode has no well-defined odd derivative;
            // drop it (it is outside the dealiased band anyway).
            let dk = if n % 2 == 0 && bin == n / 2 { 0.0 } else { k as f64 * k_base };
            dm.push(Complex::new(0.0, dk));
            am.push(Complex::new(if k.abs() <= keep { 1.0 } else { 0.0 }, 0.0));
        }
        deriv_mult.push(dm);
        dealias_mult.push(am);
    }

    Ok(SlabGrid(Arc::new(GridInner {
        dim,
        n_tangential: n_tangential.to_vec(),
        n_normal,
        period,
        nodes_normal,
        weights_normal,
        dmat,
        quad_weights,
        fft_fwd,
        fft_inv,
        deriv_mult,
        dealias_mult,
    })))
}

impl SlabGrid {
    pub fn dim(&self) -> usize {
        self.0.dim
    }
    pub fn n_tangential(&self) -> &[usize] {
        &self.0.n_tangential
    }
    pub fn n_normal(&self) -> usize {
        self.0.n_normal
    }
    pub fn period(&self) -> f64 {
        self.0.period
    }
    /// Array shape `(normal, axis-2, axis-1)`; the middle extent is 1 in 2-D.
    pub fn shape(&self) -> (usize, usize, usize) {
        self.0.shape()
    }
    pub fn node_count(&self) -> usize {
        let (a, b, c) = self.shape();
        a * b * c
    }
    /// Volume of the domain: period^(dim-1) * 2.
    pub fn measure(&self) -> f64 {
        self.0.period.powi(self.0.dim as i32 - 1) * 2.0
    }
    /// Ascending wall-normal nodes; first and last are exactly -1 and +1.
    pub fn nodes_normal(&self) -> &[f64] {
        &self.0.nodes_normal
    }
    /// Wall-normal quadrature weights matching `nodes_normal`.
    pub fn weights_normal(&self) -> &[f64] {
        &self.0.weights_normal
    }
    /// Dense wall-normal differentiation matrix (acts on node values).
    pub fn diff_matrix_normal(&self) -> &Array2<f64> {
        &self.0.dmat
    }
    /// Per-node volume quadrature weights, summing to `measure()`.
    pub fn quad_weights(&self) -> &Array3<f64> {
        &self.0.quad_weights
    }
    /// Uniform node coordinates of a tangential axis (1-based, `axis < dim`).
    pub fn tangential_coords(&self, axis: usize) -> Vec<f64> {
        assert!(axis >= 1 && axis < self.0.dim, "tangential axis out of range");
        let n = self.0.n_tangential[axis - 1];
        let h = self.0.period / n as f64;
        (0..n).map(|i| i as f64 * h).collect()
    }
    /// Physical wavenumber per FFT bin of a tangential axis.
    pub fn kappa(&self, axis: usize) -> Vec<f64> {
        assert!(axis >= 1 && axis < self.0.dim, "tangential axis out of range");
        let n = self.0.n_tangential[axis - 1];
        let k_base = 2.0 * std::f64::consts::PI / self.0.period;
        (0..n)
            .map(|bin| spectral::mode_of_bin(bin, n) as f64 * k_base)
            .collect()
    }
    /// Largest retained integer mode of the 2/3 dealiasing rule on an axis.
    pub fn dealias_cutoff(&self, axis: usize) -> i64 {
        assert!(axis >= 1 && axis < self.0.dim, "tangential axis out of range");
        (self.0.n_tangential[axis - 1] / 3) as i64
    }
    /// Structural equality (same dimensions, counts, and period).
    pub fn same_layout(&self, other: &SlabGrid) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.dim == other.0.dim
                && self.0.n_tangential == other.0.n_tangential
                && self.0.n_normal == other.0.n_normal
                && self.0.period == other.0.period)
    }

    /// The boundary-vanishing normal weight (1 - x_n)(1 + x_n) as a field.
    pub fn weight_omega(&self) -> Field {
        Field::from_fn(self, |_, _, xn| (1.0 - xn) * (1.0 + xn))
    }

    /// Derivative of the normal weight, -2 x_n, as a field.
    pub fn weight_omega_prime(&self) -> Field {
        Field::from_fn(self, |_, _, xn| -2.0 * xn)
    }

    /// Forward complex Fourier transform along all tangential axes
    /// (unnormalized; pair with `ifft_tangential`).
    pub fn fft_tangential(&self, values: &Array3<f64>) -> Array3<Complex64> {
        let mut c = values.mapv(|v| Complex::new(v, 0.0));
        spectral::transform_lanes(&self.0.fft_fwd[0], &mut c, 2);
        if self.0.dim == 3 {
            spectral::transform_lanes(&self.0.fft_fwd[1], &mut c, 1);
        }
        c
    }

    /// Inverse of `fft_tangential`, returning the real part.
    pub fn ifft_tangential(&self, mut spec: Array3<Complex64>) -> Array3<f64> {
        spectral::transform_lanes(&self.0.fft_inv[0], &mut spec, 2);
        if self.0.dim == 3 {
            spectral::transform_lanes(&self.0.fft_inv[1], &mut spec, 1);
        }
        let norm = 1.0
            / (self.0.n_tangential[0] as f64
                * if self.0.dim == 3 { self.0.n_tangential[1] as f64 } else { 1.0 });
        spec.mapv(|c| c.re * norm)
    }
}

fn require_same_grid(a: &Field, b: &Field) {
    assert!(
        a.grid.same_layout(&b.grid),
        "fields live on different grids"
    );
}

/// Real scalar samples on a `SlabGrid`.
#[derive(Clone)]
pub struct Field {
    grid: SlabGrid,
    values: Array3<f64>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in self.values.iter() {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        write!(f, "Field{:?} in [{lo:.3e}, {hi:.3e}]", self.values.dim())
    }
}

impl Field {
    pub fn zeros(grid: &SlabGrid) -> Field {
        Field {
            grid: grid.clone(),
            values: Array3::zeros(grid.shape()),
        }
    }

    pub fn constant(grid: &SlabGrid, c: f64) -> Field {
        Field {
            grid: grid.clone(),
            values: Array3::from_elem(grid.shape(), c),
        }
    }

    /// Sample `f(x1, x2, xn)` at every node (`x2` is 0 in two dimensions).
    pub fn from_fn(grid: &SlabGrid, f: impl Fn(f64, f64, f64) -> f64) -> Field {
        let (n3, n2, n1) = grid.shape();
        let x1: Vec<f64> = grid.tangential_coords(1);
        let x2: Vec<f64> = if grid.dim() == 3 {
            grid.tangential_coords(2)
        } else {
            vec![0.0]
        };
        let xn = grid.nodes_normal();
        let values =
            Array3::from_shape_fn((n3, n2, n1), |(i3, i2, i1)| f(x1[i1], x2[i2], xn[i3]));
        Field {
            grid: grid.clone(),
            values,
        }
    }

    pub fn from_values(grid: &SlabGrid, values: Array3<f64>) -> Result<Field, GridError> {
        if values.dim() != grid.shape() {
            return Err(GridError::ShapeMismatch {
                expected: grid.shape(),
                got: values.dim(),
            });
        }
        let values = if values.is_standard_layout() {
            values
        } else {
            values.as_standard_layout().into_owned()
        };
        let f = Field {
            grid: grid.clone(),
            values,
        };
        f.check_finite()?;
        Ok(f)
    }

    pub fn grid(&self) -> &SlabGrid {
        &self.grid
    }
    pub fn values(&self) -> &Array3<f64> {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut Array3<f64> {
        &mut self.values
    }
    pub fn into_values(self) -> Array3<f64> {
        self.values
    }

    pub fn check_finite(&self) -> Result<(), GridError> {
        if self.values.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(GridError::NonFinite)
        }
    }

    /// Spectral partial derivative along 1-based `axis` (tangential: Fourier;
    /// axis = dim: wall-normal collocation).
    pub fn deriv(&self, axis: usize) -> Result<Field, GridError> {
        let dim = self.grid.dim();
        if axis < 1 || axis > dim {
            return Err(GridError::AxisOutOfRange { axis, dim });
        }
        if axis == dim {
            Ok(Field {
                grid: self.grid.clone(),
                values: self.grid.0.normal_deriv(&self.values),
            })
        } else {
            let inner = &self.grid.0;
            let idx = axis - 1;
            let mut values = self.values.clone();
            spectral::apply_multiplier_lanes(
                &inner.fft_fwd[idx],
                &inner.fft_inv[idx],
                &mut values,
                inner.array_axis_tangential(axis),
                &inner.deriv_mult[idx],
            );
            Ok(Field {
                grid: self.grid.clone(),
                values,
            })
        }
    }

    /// `deriv` for axes known to be valid; panics otherwise.
    pub fn dx(&self, axis: usize) -> Field {
        self.deriv(axis).expect("axis in 1..=dim")
    }

    /// Quadrature of the field over the whole domain.
    pub fn integrate(&self) -> f64 {
        Zip::from(&self.values)
            .and(&self.grid.0.quad_weights)
            .fold(0.0, |acc, &v, &w| acc + v * w)
    }

    /// Quadrature of the square of the field (its L2 norm squared).
    pub fn l2_norm_sq(&self) -> f64 {
        Zip::from(&self.values)
            .and(&self.grid.0.quad_weights)
            .fold(0.0, |acc, &v, &w| acc + v * v * w)
    }

    pub fn mean(&self) -> f64 {
        self.integrate() / self.grid.measure()
    }

    pub fn abs_max(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, &v| m.max(v.abs()))
    }

    /// Remove all tangential modes above the 2/3 cutoff, in place.
    pub fn dealias_inplace(&mut self) {
        let inner = self.grid.0.clone();
        for axis in 1..inner.dim {
            let idx = axis - 1;
            spectral::apply_multiplier_lanes(
                &inner.fft_fwd[idx],
                &inner.fft_inv[idx],
                &mut self.values,
                inner.array_axis_tangential(axis),
                &inner.dealias_mult[idx],
            );
        }
    }

    pub fn dealiased(&self) -> Field {
        let mut out = self.clone();
        out.dealias_inplace();
        out
    }

    /// Exponential tangential spectral filter with a pass band: modes at or
    /// below the 2/3 cutoff are untouched, higher modes are damped by
    /// exp(-strength * r^order) with r ramping from 0 at the cutoff to 1 at
    /// the highest mode. Strength 0 disables the filter entirely.
    pub fn filter_tangential_inplace(&mut self, order: usize, strength: f64) {
        if strength == 0.0 {
            return;
        }
        let inner = self.grid.0.clone();
        for axis in 1..inner.dim {
            let idx = axis - 1;
            let n = inner.n_tangential[idx];
            let keep = (n / 3) as f64;
            let kmax = (n / 2) as f64;
            let mult: Vec<Complex64> = (0..n)
                .map(|bin| {
                    let k = spectral::mode_of_bin(bin, n).abs() as f64;
                    let sigma = if k <= keep {
                        1.0
                    } else {
                        (-strength * ((k - keep) / (kmax - keep)).powi(order as i32)).exp()
                    };
                    Complex::new(sigma, 0.0)
                })
                .collect();
            spectral::apply_multiplier_lanes(
                &inner.fft_fwd[idx],
                &inner.fft_inv[idx],
                &mut self.values,
                inner.array_axis_tangential(axis),
                &mult,
            );
        }
    }

    /// Set both wall rows (normal index first and last) to zero.
    pub fn zero_walls_inplace(&mut self) {
        let last = self.grid.n_normal() - 1;
        self.values.index_axis_mut(Axis(0), 0).fill(0.0);
        self.values.index_axis_mut(Axis(0), last).fill(0.0);
    }

    /// Largest absolute value over both wall rows.
    pub fn wall_abs_max(&self) -> f64 {
        let last = self.grid.n_normal() - 1;
        let mut m = 0.0_f64;
        for row in [0, last] {
            for &v in self.values.index_axis(Axis(0), row).iter() {
                m = m.max(v.abs());
            }
        }
        m
    }

    /// Weighted wall-spectrum norm: sum over both walls and tangential modes
    /// of (1 + |kappa|^2)^exponent |f_hat|^2 times the wall surface measure,
    /// with the mode amplitudes of the normalized tangential transform.
    pub fn wall_spectrum_norm_sq(&self, exponent: f64) -> f64 {
        let inner = &self.grid.0;
        let last = inner.n_normal - 1;
        let mut total = 0.0;
        for row in [0, last] {
            let plane = self.values.index_axis(Axis(0), row);
            total += inner.plane_weighted_spectrum(plane, exponent);
        }
        total
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            grid: self.grid.clone(),
            values: self.values.mapv(|v| f(v)),
        }
    }

    pub fn zip_with(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Field {
        require_same_grid(self, other);
        let mut values = self.values.clone();
        Zip::from(&mut values)
            .and(&other.values)
            .for_each(|a, &b| *a = f(*a, b));
        Field {
            grid: self.grid.clone(),
            values,
        }
    }

    pub fn scaled(&self, c: f64) -> Field {
        self.map(|v| v * c)
    }

    pub fn recip(&self) -> Field {
        self.map(|v| 1.0 / v)
    }

    /// self += c * other, in place.
    pub fn add_scaled(&mut self, c: f64, other: &Field) {
        require_same_grid(self, other);
        Zip::from(&mut self.values)
            .and(&other.values)
            .for_each(|a, &b| *a += c * b);
    }

    pub fn scale_inplace(&mut self, c: f64) {
        self.values.mapv_inplace(|v| v * c);
    }

    pub fn fill(&mut self, c: f64) {
        self.values.fill(c);
    }
}

macro_rules! field_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl std::ops::$trait<&Field> for &Field {
            type Output = Field;
            fn $method(self, rhs: &Field) -> Field {
                self.zip_with(rhs, |a, b| a $op b)
            }
        }
    };
}
field_binop!(Add, add, +);
field_binop!(Sub, sub, -);
field_binop!(Mul, mul, *);
field_binop!(Div, div, /);

impl std::ops::Mul<f64> for &Field {
    type Output = Field;
    fn mul(self, rhs: f64) -> Field {
        self.scaled(rhs)
    }
}

impl std::ops::Neg for &Field {
    type Output = Field;
    fn neg(self) -> Field {
        self.scaled(-1.0)
    }
}

impl std::ops::AddAssign<&Field> for Field {
    fn add_assign(&mut self, rhs: &Field) {
        self.add_scaled(1.0, rhs);
    }
}

impl std::ops::SubAssign<&Field> for Field {
    fn sub_assign(&mut self, rhs: &Field) {
        self.add_scaled(-1.0, rhs);
    }
}

/// `dim` scalar fields sharing one grid; components are addressed 1-based
/// to match coordinate axes (component `dim` is wall-normal).
#[derive(Clone, Debug)]
pub struct VecField {
    components: Vec<Field>,
}

impl VecField {
    pub fn from_components(components: Vec<Field>) -> Result<VecField, GridError> {
        assert!(!components.is_empty(), "empty component list");
        let grid = components[0].grid().clone();
        if components.len() != grid.dim() {
            return Err(GridError::ComponentCount {
                expected: grid.dim(),
                got: components.len(),
            });
        }
        for c in &components {
            if !c.grid().same_layout(&grid) {
                return Err(GridError::ShapeMismatch {
                    expected: grid.shape(),
                    got: c.grid().shape(),
                });
            }
        }
        Ok(VecField { components })
    }

    pub fn zeros(grid: &SlabGrid) -> VecField {
        VecField {
            components: (0..grid.dim()).map(|_| Field::zeros(grid)).collect(),
        }
    }

    pub fn grid(&self) -> &SlabGrid {
        self.components[0].grid()
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    /// Component with 1-based index (`dim` is the wall-normal component).
    pub fn comp(&self, i: usize) -> &Field {
        &self.components[i - 1]
    }

    pub fn comp_mut(&mut self, i: usize) -> &mut Field {
        &mut self.components[i - 1]
    }

    pub fn normal(&self) -> &Field {
        self.comp(self.dim())
    }

    pub fn iter(&self) -> impl Iterator<Item = &Field> {
        self.components.iter()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut Field> {
        self.components.iter_mut()
    }

    pub fn map_components(&self, f: impl Fn(&Field) -> Field) -> VecField {
        VecField {
            components: self.components.iter().map(f).collect(),
        }
    }

    pub fn dot(&self, other: &VecField) -> Field {
        let mut acc = self.comp(1).zip_with(other.comp(1), |a, b| a * b);
        for i in 2..=self.dim() {
            let prod = self.comp(i).zip_with(other.comp(i), |a, b| a * b);
            acc += &prod;
        }
        acc
    }

    pub fn norm_sq_field(&self) -> Field {
        self.dot(self)
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.components.iter().map(|c| c.l2_norm_sq()).sum()
    }

    pub fn abs_max(&self) -> f64 {
        self.components
            .iter()
            .fold(0.0_f64, |m, c| m.max(c.abs_max()))
    }

    pub fn scaled(&self, c: f64) -> VecField {
        self.map_components(|f| f.scaled(c))
    }

    pub fn add_scaled(&mut self, c: f64, other: &VecField) {
        for (a, b) in self.components.iter_mut().zip(other.components.iter()) {
            a.add_scaled(c, b);
        }
    }

    pub fn dealias_inplace(&mut self) {
        for c in self.components.iter_mut() {
            c.dealias_inplace();
        }
    }

    /// Zero the wall rows of the normal component (strong wall condition).
    pub fn zero_normal_walls_inplace(&mut self) {
        let d = self.dim();
        self.comp_mut(d).zero_walls_inplace();
    }
}

impl std::ops::Add<&VecField> for &VecField {
    type Output = VecField;
    fn add(self, rhs: &VecField) -> VecField {
        let mut out = self.clone();
        out.add_scaled(1.0, rhs);
        out
    }
}

impl std::ops::Sub<&VecField> for &VecField {
    type Output = VecField;
    fn sub(self, rhs: &VecField) -> VecField {
        let mut out = self.clone();
        out.add_scaled(-1.0, rhs);
        out
    }
}
