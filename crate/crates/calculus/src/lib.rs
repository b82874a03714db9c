//! Derivative bookkeeping on the slab.
//!
//! Coordinate axes are 1-based with axis `dim` wall-normal. The anisotropic
//! derivative calculus counts one pure normal derivative as two units while
//! time, tangential, and weighted-normal (omega times normal) derivatives
//! count as one; `MultiIndex` carries those counts and `tangential_apply`
//! realizes the composite operator on a field with a time-derivative stack.

pub mod commutator;
pub mod stack;

use machslab_grid::{Field, VecField};
use std::collections::BTreeMap;
use thiserror::Error;

pub use commutator::{omega_commutator, omega_commutator_expansion};

#[derive(Debug, Error)]
pub enum CalcError {
    #[error("multi-index for dimension {dim} needs {expected} entries, got {got}")]
    IndexArity {
        dim: usize,
        expected: usize,
        got: usize,
    },
    #[error("time-derivative stack has depth {depth}, need more than {needed} levels")]
    InsufficientStack { depth: usize, needed: usize },
    #[error("commutator order {0} must be at least 1")]
    CommutatorOrder(usize),
    #[error("Sobolev index {got} out of supported range {lo}..={hi}")]
    SobolevRange { got: usize, lo: usize, hi: usize },
    #[error("time step {0} must be positive")]
    InvalidDt(f64),
    #[error("operation {op} needs dimension {need}, got {got}")]
    WrongDim {
        op: &'static str,
        need: usize,
        got: usize,
    },
}

/// Derivative counts (time, tangential axes, pure normal, weighted normal).
///
/// Entry layout for dimension `d`: `[t, a_1, ..., a_{d-1}, normal, omega]`,
/// `d + 2` entries in all. The anisotropic length counts the pure normal
/// entry twice and everything else once.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex {
    dim: usize,
    alpha: Vec<usize>,
}

impl MultiIndex {
    pub fn new(dim: usize, alpha: &[usize]) -> Result<Self, CalcError> {
        if alpha.len() != dim + 2 {
            return Err(CalcError::IndexArity {
                dim,
                expected: dim + 2,
                got: alpha.len(),
            });
        }
        Ok(MultiIndex {
            dim,
            alpha: alpha.to_vec(),
        })
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex {
            dim,
            alpha: vec![0; dim + 2],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn entries(&self) -> &[usize] {
        &self.alpha
    }
    /// Time-derivative count.
    pub fn time(&self) -> usize {
        self.alpha[0]
    }
    /// Tangential count along axis `j` (1-based, `j < dim`).
    pub fn tangential(&self, j: usize) -> usize {
        assert!(j >= 1 && j < self.dim);
        self.alpha[j]
    }
    /// Pure normal-derivative count (weighted double in the length).
    pub fn normal(&self) -> usize {
        self.alpha[self.dim]
    }
    /// Weighted normal-derivative count (omega times normal derivative).
    pub fn omega(&self) -> usize {
        self.alpha[self.dim + 1]
    }
    pub fn is_tangential_only(&self) -> bool {
        self.normal() == 0
    }

    /// Anisotropic length: time and tangential entries count once, the pure
    /// normal entry twice, the weighted normal entry once.
    pub fn aniso_length(&self) -> usize {
        let first: usize = self.alpha[..self.dim].iter().sum();
        first + 2 * self.alpha[self.dim] + self.alpha[self.dim + 1]
    }
}

/// Divergence of a vector field: the sum of the component derivatives.
pub fn divergence(x: &VecField) -> Field {
    let dim = x.dim();
    let mut acc = x.comp(1).dx(1);
    for j in 2..=dim {
        acc += &x.comp(j).dx(j);
    }
    acc
}

/// Gradient of a scalar field.
pub fn gradient(f: &Field) -> VecField {
    let dim = f.grid().dim();
    VecField::from_components((1..=dim).map(|j| f.dx(j)).collect())
        .expect("components share the field's grid")
}

/// Three-dimensional curl.
pub fn curl3(x: &VecField) -> Result<VecField, CalcError> {
    if x.dim() != 3 {
        return Err(CalcError::WrongDim {
            op: "curl3",
            need: 3,
            got: x.dim(),
        });
    }
    let c1 = &x.comp(3).dx(2) - &x.comp(2).dx(3);
    let c2 = &x.comp(1).dx(3) - &x.comp(3).dx(1);
    let c3 = &x.comp(2).dx(1) - &x.comp(1).dx(2);
    Ok(VecField::from_components(vec![c1, c2, c3]).expect("same grid"))
}

/// Two-dimensional (scalar) curl: d1 X2 - d2 X1.
pub fn curl2(x: &VecField) -> Result<Field, CalcError> {
    if x.dim() != 2 {
        return Err(CalcError::WrongDim {
            op: "curl2",
            need: 2,
            got: x.dim(),
        });
    }
    Ok(&x.comp(2).dx(1) - &x.comp(1).dx(2))
}

/// Advection term u . grad f.
pub fn advect(u: &VecField, f: &Field) -> Field {
    let dim = u.dim();
    let mut acc = u.comp(1).zip_with(&f.dx(1), |a, b| a * b);
    for j in 2..=dim {
        let term = u.comp(j).zip_with(&f.dx(j), |a, b| a * b);
        acc += &term;
    }
    acc
}

/// Advection of each component of a vector field.
pub fn advect_vec(u: &VecField, x: &VecField) -> VecField {
    x.map_components(|c| advect(u, c))
}

/// First-order-in-time material derivative along `u`:
/// (f_now - f_prev)/dt + u . grad f_now. A diagnostic; solvers substitute
/// the exact equations instead of differencing.
pub fn material_derivative(
    u: &VecField,
    f_now: &Field,
    f_prev: &Field,
    dt: f64,
) -> Result<Field, CalcError> {
    if !(dt > 0.0) {
        return Err(CalcError::InvalidDt(dt));
    }
    let mut out = f_now.zip_with(f_prev, |a, b| (a - b) / dt);
    out += &advect(u, f_now);
    Ok(out)
}

/// Apply the anisotropic derivative operator described by `m` to a field
/// given as its time-derivative stack (`stack[k]` holds the k-th time
/// derivative). Operator order: pure normal derivatives first, then
/// tangential, then the weighted normal factors; the time order selects the
/// stack level.
pub fn tangential_apply(m: &MultiIndex, stack: &[Field]) -> Result<Field, CalcError> {
    if stack.len() <= m.time() {
        return Err(CalcError::InsufficientStack {
            depth: stack.len(),
            needed: m.time(),
        });
    }
    let dim = stack[0].grid().dim();
    if m.dim() != dim {
        return Err(CalcError::WrongDim {
            op: "tangential_apply",
            need: dim,
            got: m.dim(),
        });
    }
    let mut g = stack[m.time()].clone();
    for _ in 0..m.normal() {
        g = g.dx(dim);
    }
    for j in 1..dim {
        for _ in 0..m.tangential(j) {
            g = g.dx(j);
        }
    }
    if m.omega() > 0 {
        let om = g.grid().weight_omega();
        for _ in 0..m.omega() {
            g = om.zip_with(&g.dx(dim), |a, b| a * b);
        }
    }
    Ok(g)
}

/// Squared Sobolev norm of order `s` (0..=4): the sum over all spatial
/// derivative multi-indices of total order at most `s` of the squared L2
/// norm, computed with spectral derivatives and quadrature.
pub fn sobolev_norm_sq(f: &Field, s: usize) -> Result<f64, CalcError> {
    if s > 4 {
        return Err(CalcError::SobolevRange {
            got: s,
            lo: 0,
            hi: 4,
        });
    }
    let dim = f.grid().dim();
    let mut total = f.l2_norm_sq();
    let mut level: BTreeMap<Vec<usize>, Field> = BTreeMap::new();
    level.insert(vec![0; dim], f.clone());
    for _order in 1..=s {
        let mut next: BTreeMap<Vec<usize>, Field> = BTreeMap::new();
        for (beta, fld) in &level {
            for j in 1..=dim {
                let mut b2 = beta.clone();
                b2[j - 1] += 1;
                if !next.contains_key(&b2) {
                    next.insert(b2, fld.dx(j));
                }
            }
        }
        for fld in next.values() {
            total += fld.l2_norm_sq();
        }
        level = next;
    }
    Ok(total)
}

/// Diagnostic ratio of a div-curl control estimate: the squared order-`s`
/// Sobolev norm of `X` divided by the sum of its squared L2 norm, the
/// squared order-(s-1) norms of divergence and curl, and the weighted wall
/// spectrum of the normal trace at exponent s - 1/2. Returns 0 for X = 0;
/// bounded over well-prepared band-limited fields.
pub fn hodge_report(x: &VecField, s: usize) -> Result<f64, CalcError> {
    if s < 1 || s > 4 {
        return Err(CalcError::SobolevRange {
            got: s,
            lo: 1,
            hi: 4,
        });
    }
    let dim = x.dim();
    let mut num = 0.0;
    for j in 1..=dim {
        num += sobolev_norm_sq(x.comp(j), s)?;
    }
    if num == 0.0 {
        return Ok(0.0);
    }
    let mut den = x.l2_norm_sq();
    den += sobolev_norm_sq(&divergence(x), s - 1)?;
    if dim == 3 {
        let c = curl3(x)?;
        for j in 1..=3 {
            den += sobolev_norm_sq(c.comp(j), s - 1)?;
        }
    } else {
        den += sobolev_norm_sq(&curl2(x)?, s - 1)?;
    }
    den += x.normal().wall_spectrum_norm_sq(s as f64 - 0.5);
    Ok(num / den)
}
